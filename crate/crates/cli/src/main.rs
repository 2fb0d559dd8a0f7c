mod args;
mod commands;
mod config;

use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;

use crate::args::{Cli, Command};
use crate::config::{Context, Layered, RunConfig};

/// Bad flags or configuration; exits with status 1. Every other failure is
/// treated as a data error (status 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .init();

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn init_threads(threads: Option<usize>) -> Result<()> {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        return Err(UsageError("--threads must be at least 1".into()).into());
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| anyhow::anyhow!("thread pool: {e}"))?;
    #[cfg(not(feature = "parallel"))]
    log::info!("built without the parallel feature; ignoring --threads {n}");
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let threads = cli.threads.or(file.threads);
    init_threads(threads)?;
    let ctx = Context {
        command: cli.command.name(),
        seed: cli.seed.or(file.seed).unwrap_or(0),
        threads,
        out_dir: cli.out_dir.or(file.out_dir),
    };

    use commands::*;
    match cli.command {
        Command::Barcode(a) => barcode::run(a.resolve(file.barcode), &ctx),
        Command::Loss(a) => loss::run(a.resolve(file.loss), &ctx),
        Command::GradCheck(a) => gradcheck::run(a.resolve(file.grad_check), &ctx),
        Command::TrainToy(a) => toy::run(a.resolve(file.train_toy), &ctx),
        Command::TrainAe(a) => train::run(a.resolve(file.train_ae), &ctx),
        Command::Score(a) => oneclass::score(a.resolve(file.score), &ctx),
        Command::EvalAuc(a) => oneclass::eval_auc(a.resolve(file.eval_auc), &ctx),
        Command::OneclassEval(a) => oneclass::one_vs_all(a.resolve(file.oneclass_eval), &ctx),
        Command::Bounds(a) => analysis::bounds(a.resolve(file.bounds), &ctx),
        Command::VerifyLemma1(a) => analysis::lemma1(a.resolve(file.verify_lemma1), &ctx),
        Command::BenchReduce(a) => bench::run(a.resolve(file.bench_reduce), &ctx),
    }
}
