use std::path::PathBuf;

use anyhow::Result;
use topocon::io;
use topocon::neural::toy::{toy_experiment, ToyConfig};
use topocon::neural::AdamConfig;

use super::sink;
use crate::args::TrainToyArgs;
use crate::config::{Context, RunConfig};

/// Writes `loss_curve.csv`, `stats.csv`, `inputs.csv` and one
/// `outputs_epoch_<e>.csv` per snapshot into the output directory.
pub fn run(a: TrainToyArgs, ctx: &Context) -> Result<()> {
    let d = ToyConfig::default();
    let cfg = ToyConfig {
        seed: ctx.seed,
        samples: a.samples.unwrap_or(d.samples),
        clusters: a.clusters.unwrap_or(d.clusters),
        hidden: a.hidden.unwrap_or(d.hidden),
        eta: a.eta.unwrap_or(d.eta),
        epochs: a.epochs.unwrap_or(d.epochs),
        batch_size: a.batch_size.unwrap_or(d.batch_size),
        adam: AdamConfig {
            learning_rate: a.lr.unwrap_or(d.adam.learning_rate),
            ..d.adam
        },
        norm: a.norm.unwrap_or(d.norm),
        eval_batches: a.eval_batches.unwrap_or(d.eval_batches),
        snapshot_epochs: a.snapshot_epochs.clone().unwrap_or(d.snapshot_epochs),
    };
    let result = toy_experiment(&cfg)?;

    let dir = ctx
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("toy-out"));
    std::fs::create_dir_all(&dir)?;

    io::write_rows(
        sink(Some(&dir.join("loss_curve.csv")))?,
        Some(&["epoch", "iteration", "connectivity"]),
        result
            .curve
            .iter()
            .map(|r| [r.epoch as f64, r.iteration as f64, r.connectivity]),
    )?;
    io::write_rows(
        sink(Some(&dir.join("stats.csv")))?,
        Some(&["epoch", "alpha_hat", "eps_hat", "beta_hat"]),
        result.snapshots.iter().map(|s| {
            [
                s.epoch as f64,
                s.stats.alpha_hat,
                s.stats.eps_hat,
                s.stats.beta_hat,
            ]
        }),
    )?;
    let with_labels = |m: &topocon::neural::Matrix| -> Vec<[f64; 3]> {
        (0..m.rows())
            .map(|r| [m.get(r, 0), m.get(r, 1), result.labels[r] as f64])
            .collect()
    };
    io::write_rows(
        sink(Some(&dir.join("inputs.csv")))?,
        Some(&["x", "y", "label"]),
        with_labels(&result.inputs),
    )?;
    for s in &result.snapshots {
        io::write_rows(
            sink(Some(&dir.join(format!("outputs_epoch_{}.csv", s.epoch))))?,
            Some(&["x", "y", "label"]),
            with_labels(&s.outputs),
        )?;
    }

    println!("epoch\talpha_hat\teps_hat\tbeta_hat");
    for s in &result.snapshots {
        println!(
            "{}\t{:.6}\t{:.6}\t{:.6}",
            s.epoch, s.stats.alpha_hat, s.stats.eps_hat, s.stats.beta_hat
        );
    }

    let ctx = Context {
        out_dir: Some(dir),
        ..ctx.clone()
    };
    ctx.write_config(
        RunConfig {
            train_toy: Some(a),
            ..RunConfig::default()
        },
        None,
    )
}
