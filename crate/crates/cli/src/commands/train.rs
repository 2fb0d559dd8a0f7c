use std::path::PathBuf;

use anyhow::Result;
use topocon::io;
use topocon::neural::{train, AdamConfig, AeSpec, BranchedAutoencoder, Matrix, TrainConfig};
use topocon::rng::derive_seed;

use super::{require, sink, usage};
use crate::args::TrainAeArgs;
use crate::config::{Context, RunConfig};

/// Features of a CSV, dropping a trailing label column when `labeled`.
pub fn read_features(path: &std::path::Path, labeled: bool, header: bool) -> Result<Matrix> {
    Ok(if labeled {
        io::read_labeled_file(path, header)?.0
    } else {
        io::read_matrix_file(path, header)?
    })
}

pub fn run(a: TrainAeArgs, ctx: &Context) -> Result<()> {
    let data_path = require(a.data.clone(), "data")?;
    let data = read_features(
        &data_path,
        a.labeled.unwrap_or(false),
        a.header.unwrap_or(false),
    )?;
    let branches = a.branches.unwrap_or(4);
    let branch_dim = a.branch_dim.unwrap_or(4);
    if branches == 0 || branch_dim == 0 {
        return Err(usage("--branches and --branch-dim must be at least 1"));
    }
    let pre_latent = a.pre_latent.unwrap_or(branches * branch_dim);
    let mut widths = vec![data.cols()];
    widths.extend(a.hidden.clone().unwrap_or_default());
    widths.push(pre_latent);
    let mut net = BranchedAutoencoder::new(AeSpec::new(
        widths,
        branches,
        branch_dim,
        derive_seed(ctx.seed, 0),
    ))?;

    let cfg = TrainConfig {
        eta: a.eta.unwrap_or(2.0),
        lambda: a.lambda.unwrap_or(1.0),
        batch_size: a.batch_size.unwrap_or(100),
        epochs: a.epochs.unwrap_or(50),
        adam: AdamConfig {
            learning_rate: a.lr.unwrap_or(1e-3),
            ..AdamConfig::default()
        },
        norm: a.norm.unwrap_or_default(),
        seed: derive_seed(ctx.seed, 1),
    };
    if cfg.batch_size > data.rows() {
        return Err(usage(format!(
            "batch size {} exceeds the {} training rows",
            cfg.batch_size,
            data.rows()
        )));
    }
    let records = train(&mut net, &data, &cfg, |r| {
        log::debug!(
            "epoch {} iter {}: reconstruction {:.6} connectivity {:.6}",
            r.epoch,
            r.iteration,
            r.reconstruction,
            r.connectivity
        );
    })?;

    let model_out = ctx
        .output_path(a.model_out.clone(), "model.json")
        .unwrap_or_else(|| PathBuf::from("model.json"));
    if let Some(dir) = model_out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    net.save_json(&model_out)?;
    if let Some(curve) = ctx.output_path(a.curve_out.clone(), "ae_curve.csv") {
        io::write_rows(
            sink(Some(&curve))?,
            Some(&["epoch", "iteration", "reconstruction", "connectivity"]),
            records.iter().map(|r| {
                [
                    r.epoch as f64,
                    r.iteration as f64,
                    r.reconstruction,
                    r.connectivity,
                ]
            }),
        )?;
    }
    if let (Some(first), Some(last)) = (records.first(), records.last()) {
        println!("iterations\t{}", records.len());
        println!(
            "reconstruction\t{}\t{}",
            first.reconstruction, last.reconstruction
        );
        println!(
            "connectivity\t{}\t{}",
            first.connectivity, last.connectivity
        );
    }
    ctx.write_config(
        RunConfig {
            train_ae: Some(a),
            ..RunConfig::default()
        },
        Some(&model_out),
    )
}
