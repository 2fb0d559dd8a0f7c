use std::io::Write;

use anyhow::Result;
use topocon::persistence::{persistence_unionfind, reduce};
use topocon::{build_vr, io, Engine};

use super::{require, sink};
use crate::args::BarcodeArgs;
use crate::config::{Context, RunConfig};

pub fn engine_name(e: Engine) -> &'static str {
    match e {
        Engine::UnionFind => "union-find",
        Engine::Standard => "standard",
        Engine::Parallel => "parallel",
    }
}

/// One line per bar, `birth<TAB>death<TAB>i<TAB>j`, in filtration order,
/// then one `0<TAB>inf<TAB>essential` line per essential class.
pub fn run(a: BarcodeArgs, ctx: &Context) -> Result<()> {
    let input = require(a.input.clone(), "in")?;
    let norm = a.norm.unwrap_or_default();
    let engine = a.engine.unwrap_or_default();
    let cloud = io::read_cloud_file(&input, norm, a.header.unwrap_or(false))?;
    let complex = build_vr(&cloud);

    let (barcode, matrix) = match engine {
        Engine::UnionFind => {
            let bc = persistence_unionfind(&complex);
            // the matrix dump still needs a reduced matrix
            let m = a
                .reduced_out
                .as_ref()
                .map(|_| reduce(&complex, Engine::Standard).matrix);
            (bc, m)
        }
        other => {
            let r = reduce(&complex, other);
            if other == Engine::Parallel {
                log::info!("parallel reduction finished after {} rounds", r.iterations);
            }
            (r.barcode, Some(r.matrix))
        }
    };
    log::info!(
        "{} points, {} edges, engine {}",
        cloud.len(),
        complex.edges().len(),
        engine_name(engine)
    );

    let out = ctx.output_path(a.out.clone(), "barcode.tsv");
    let mut w = sink(out.as_deref())?;
    for e in &barcode.events {
        writeln!(w, "0\t{}\t{}\t{}", e.death(), e.edge.0, e.edge.1)?;
    }
    for _ in 0..barcode.essential_count {
        writeln!(w, "0\tinf\tessential")?;
    }
    w.flush()?;

    if let (Some(path), Some(m)) = (&a.reduced_out, &matrix) {
        std::fs::write(path, serde_json::to_string(m)?)?;
    }
    if let Some(path) = &a.complex_out {
        std::fs::write(path, complex.to_json()?)?;
    }
    ctx.write_config(
        RunConfig {
            barcode: Some(a),
            ..RunConfig::default()
        },
        out.as_deref(),
    )
}
