use anyhow::Result;
use topocon::persistence::{bench_reduction, BenchConfig};

use super::barcode::engine_name;
use super::sink;
use crate::args::BenchReduceArgs;
use crate::config::{Context, RunConfig};

/// Table `size,engine,trials,mean_seconds,max_iterations,mean_iterations`.
/// Timings vary between runs; the engines are cross-checked on every trial.
pub fn run(a: BenchReduceArgs, ctx: &Context) -> Result<()> {
    let d = BenchConfig::default();
    let cfg = BenchConfig {
        sizes: a.sizes.clone().unwrap_or(d.sizes),
        dim: a.dim.unwrap_or(d.dim),
        repetitions: a.repetitions.unwrap_or(d.repetitions),
        norm: a.norm.unwrap_or(d.norm),
        seed: ctx.seed,
    };
    let rows = bench_reduction(&cfg)?;
    let out = ctx.output_path(a.out.clone(), "bench.csv");
    let mut w = csv::Writer::from_writer(sink(out.as_deref())?);
    w.write_record([
        "size",
        "engine",
        "trials",
        "mean_seconds",
        "max_iterations",
        "mean_iterations",
    ])?;
    for r in &rows {
        if r.engine == topocon::Engine::Parallel {
            log::info!(
                "b = {}: parallel reduction rounds max {} mean {}",
                r.size,
                r.max_iterations,
                r.mean_iterations
            );
        }
        w.write_record([
            r.size.to_string(),
            engine_name(r.engine).to_string(),
            r.trials.to_string(),
            r.mean_seconds.to_string(),
            r.max_iterations.to_string(),
            r.mean_iterations.to_string(),
        ])?;
    }
    w.flush()?;
    ctx.write_config(
        RunConfig {
            bench_reduce: Some(a),
            ..RunConfig::default()
        },
        out.as_deref(),
    )
}
