//! Layered run configuration: built-in defaults, then an optional TOML file,
//! then command-line flags. Every section is also a clap argument group, so
//! the file mirrors the flags one-to-one.

use std::path::{Path, PathBuf};

use anyhow::{Context as _, Result};
use serde::{Deserialize, Serialize};

use crate::args::*;
use crate::UsageError;

/// Field-wise `Option::or` over a section.
pub trait Layered: Sized {
    fn or(self, fallback: Self) -> Self;
    fn defaults() -> Self;

    fn resolve(self, file: Option<Self>) -> Self {
        match file {
            Some(f) => self.or(f),
            None => self,
        }
        .or(Self::defaults())
    }
}

#[macro_export]
macro_rules! layered {
    ($ty:ident { $($field:ident),* $(,)? }) => {
        impl $crate::config::Layered for $ty {
            fn or(self, fallback: Self) -> Self {
                Self { $($field: self.$field.or(fallback.$field)),* }
            }

            fn defaults() -> Self {
                $ty::default_values()
            }
        }
    };
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub barcode: Option<BarcodeArgs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loss: Option<LossArgs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grad_check: Option<GradCheckArgs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_toy: Option<TrainToyArgs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_ae: Option<TrainAeArgs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub score: Option<ScoreArgs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eval_auc: Option<EvalAucArgs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oneclass_eval: Option<OneclassEvalArgs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsArgs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify_lemma1: Option<VerifyLemma1Args>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bench_reduce: Option<BenchReduceArgs>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text)
            .map_err(|e| UsageError(format!("invalid config {}: {e}", path.display())).into())
    }
}

/// Global settings shared by every subcommand after layering.
#[derive(Debug, Clone)]
pub struct Context {
    pub command: &'static str,
    pub seed: u64,
    pub threads: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

impl Context {
    /// Writes the resolved configuration next to the run's outputs: into the
    /// output directory when one is set, else beside `primary` as
    /// `<primary>.config.toml`. Runs that only print to stdout write nothing.
    pub fn write_config(&self, section: RunConfig, primary: Option<&Path>) -> Result<()> {
        let target = match (&self.out_dir, primary) {
            (Some(dir), _) => dir.join("config.toml"),
            (None, Some(p)) => {
                let mut name = p.as_os_str().to_owned();
                name.push(".config.toml");
                PathBuf::from(name)
            }
            (None, None) => return Ok(()),
        };
        let full = RunConfig {
            command: Some(self.command.to_string()),
            seed: Some(self.seed),
            threads: self.threads,
            out_dir: self.out_dir.clone(),
            ..section
        };
        if let Some(parent) = target.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        std::fs::write(&target, toml::to_string(&full)?)
            .with_context(|| format!("writing {}", target.display()))?;
        Ok(())
    }

    /// `name` inside the output directory, or as given.
    pub fn output_path(&self, explicit: Option<PathBuf>, name: &str) -> Option<PathBuf> {
        explicit.or_else(|| self.out_dir.as_ref().map(|d| d.join(name)))
    }
}
