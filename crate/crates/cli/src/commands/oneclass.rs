use anyhow::Result;
use topocon::io;
use topocon::neural::BranchedAutoencoder;
use topocon::oneclass::{self as oc, OneClassModel, OneVsAllConfig};

use super::train::read_features;
use super::{require, sink, usage};
use crate::args::{EvalAucArgs, OneclassEvalArgs, ScoreArgs};
use crate::config::{Context, RunConfig};

/// Scores queries against a one-class model, fitted from `--fit` samples or
/// loaded from `--oneclass` (whose stored η then applies).
pub fn score(a: ScoreArgs, ctx: &Context) -> Result<()> {
    let net = BranchedAutoencoder::load_json(&require(a.model.clone(), "model")?)?;
    let labeled = a.labeled.unwrap_or(false);
    let header = a.header.unwrap_or(false);
    let model = match (&a.fit, &a.oneclass) {
        (Some(_), Some(_)) => return Err(usage("--fit and --oneclass are mutually exclusive")),
        (Some(fit), None) => {
            let samples = read_features(fit, labeled, header)?;
            oc::fit(&net, &samples, a.eta.unwrap_or(2.0))?
        }
        (None, Some(path)) => OneClassModel::load_json(path)?,
        (None, None) => return Err(usage("one of --fit or --oneclass is required")),
    };
    if let Some(path) = &a.save_oneclass {
        model.save_json(path)?;
    }
    let queries = read_features(&require(a.query.clone(), "query")?, labeled, header)?;
    let scores = model.score(&net, &queries)?;
    let out = ctx.output_path(a.out.clone(), "scores.csv");
    io::write_rows(
        sink(out.as_deref())?,
        Some(&["score"]),
        scores.iter().map(|&s| [s as f64]),
    )?;
    ctx.write_config(
        RunConfig {
            score: Some(a),
            ..RunConfig::default()
        },
        out.as_deref(),
    )
}

pub fn eval_auc(a: EvalAucArgs, _ctx: &Context) -> Result<()> {
    let pos = io::read_values_file(&require(a.positive, "positive")?)?;
    let neg = io::read_values_file(&require(a.negative, "negative")?)?;
    println!("{}", oc::evaluate_auc(&pos, &neg)?);
    Ok(())
}

/// AUC table: `class,mean_auc,run_1,...`, closed by a `mean` row.
pub fn one_vs_all(a: OneclassEvalArgs, ctx: &Context) -> Result<()> {
    let net = BranchedAutoencoder::load_json(&require(a.model.clone(), "model")?)?;
    let header = a.header.unwrap_or(false);
    let (pool, pool_labels) = io::read_labeled_file(&require(a.data.clone(), "data")?, header)?;
    let test = a
        .test
        .as_ref()
        .map(|p| io::read_labeled_file(p, header))
        .transpose()?;
    let cfg = OneVsAllConfig {
        m: a.m.unwrap_or(120),
        eta: a.eta.unwrap_or(2.0),
        runs: a.runs.unwrap_or(5),
        seed: ctx.seed,
    };
    let report = oc::one_vs_all(
        &net,
        &pool,
        &pool_labels,
        test.as_ref().map(|(x, y)| (x, y.as_slice())),
        &cfg,
    )?;
    if !report.skipped.is_empty() {
        log::warn!(
            "skipped classes with fewer than {} samples: {:?}",
            cfg.m,
            report.skipped
        );
    }

    let out = ctx.output_path(a.out.clone(), "auc.csv");
    let mut w = csv::Writer::from_writer(sink(out.as_deref())?);
    let mut head = vec!["class".to_string(), "mean_auc".to_string()];
    head.extend((1..=cfg.runs).map(|r| format!("run_{r}")));
    w.write_record(&head)?;
    for c in &report.classes {
        let mut row = vec![c.class.to_string(), c.mean.to_string()];
        row.extend(c.runs.iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    let mut last = vec!["mean".to_string(), report.mean_auc.to_string()];
    last.extend(std::iter::repeat_n(String::new(), cfg.runs));
    w.write_record(&last)?;
    w.flush()?;
    ctx.write_config(
        RunConfig {
            oneclass_eval: Some(a),
            ..RunConfig::default()
        },
        out.as_deref(),
    )
}
