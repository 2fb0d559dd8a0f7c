use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use topocon::analysis::CloudKind;
use topocon::{Engine, Norm};

use crate::layered;

#[derive(Debug, Parser)]
#[command(
    name = "topocon",
    version,
    about = "Connectivity-controlled representations via 0-dimensional persistent homology",
    arg_required_else_help = true
)]
pub struct Cli {
    /// Worker threads for data-parallel sections.
    #[arg(long, global = true, env = "TOPOCON_THREADS")]
    pub threads: Option<usize>,
    /// TOML file with default values; command-line flags take precedence.
    #[arg(long, global = true, value_name = "TOML")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for outputs and the resolved config.
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Increase log verbosity (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// 0-dimensional barcode of a point cloud.
    Barcode(BarcodeArgs),
    /// Connectivity loss (and gradient) of a point cloud.
    Loss(LossArgs),
    /// Finite-difference check of analytic gradients.
    GradCheck(GradCheckArgs),
    /// Toy experiment: an MLP on planar Gaussians trained with the connectivity loss.
    TrainToy(TrainToyArgs),
    /// Train a branched autoencoder on a CSV dataset.
    TrainAe(TrainAeArgs),
    /// One-class scores of query samples.
    Score(ScoreArgs),
    /// AUC from positive and negative score files.
    EvalAuc(EvalAucArgs),
    /// One-vs-all one-class evaluation on a labeled dataset.
    OneclassEval(OneclassEvalArgs),
    /// Metric-entropy, separation and batch-size bounds.
    Bounds(BoundsArgs),
    /// Exhaustive check of the annulus densification lemma on random clouds.
    VerifyLemma1(VerifyLemma1Args),
    /// Time the sequential and parallel boundary-matrix reductions.
    BenchReduce(BenchReduceArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Barcode(_) => "barcode",
            Command::Loss(_) => "loss",
            Command::GradCheck(_) => "grad-check",
            Command::TrainToy(_) => "train-toy",
            Command::TrainAe(_) => "train-ae",
            Command::Score(_) => "score",
            Command::EvalAuc(_) => "eval-auc",
            Command::OneclassEval(_) => "oneclass-eval",
            Command::Bounds(_) => "bounds",
            Command::VerifyLemma1(_) => "verify-lemma1",
            Command::BenchReduce(_) => "bench-reduce",
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarcodeArgs {
    /// Point cloud CSV, one point per row.
    #[arg(long = "in", value_name = "CSV")]
    #[serde(rename = "in")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub norm: Option<Norm>,
    /// union-find, standard or parallel.
    #[arg(long)]
    pub engine: Option<Engine>,
    /// Skip the first line of the input.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub header: Option<bool>,
    /// Barcode destination (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON dump of the reduced boundary matrix.
    #[arg(long)]
    pub reduced_out: Option<PathBuf>,
    /// JSON dump of the filtered complex.
    #[arg(long)]
    pub complex_out: Option<PathBuf>,
}

impl BarcodeArgs {
    fn default_values() -> Self {
        Self {
            norm: Some(Norm::L1),
            engine: Some(Engine::UnionFind),
            header: Some(false),
            ..Self::default()
        }
    }
}
layered!(BarcodeArgs {
    input,
    norm,
    engine,
    header,
    out,
    reduced_out,
    complex_out
});

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossArgs {
    #[arg(long = "in", value_name = "CSV")]
    #[serde(rename = "in")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub norm: Option<Norm>,
    /// Also print the gradient as CSV.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub grad: Option<bool>,
    /// Write the gradient CSV here instead of stdout.
    #[arg(long)]
    pub grad_out: Option<PathBuf>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub header: Option<bool>,
}

impl LossArgs {
    fn default_values() -> Self {
        Self {
            eta: Some(2.0),
            norm: Some(Norm::L1),
            grad: Some(false),
            header: Some(false),
            ..Self::default()
        }
    }
}
layered!(LossArgs {
    input,
    eta,
    norm,
    grad,
    grad_out,
    header
});

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradCheckArgs {
    #[arg(long)]
    pub trials: Option<usize>,
    /// Check network parameter gradients instead of point gradients.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub network: Option<bool>,
    #[arg(long)]
    pub max_points: Option<usize>,
    #[arg(long)]
    pub max_dim: Option<usize>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub norm: Option<Norm>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub kink_margin: Option<f64>,
    /// Largest accepted relative error (default 1e-5 for points, 1e-4 for networks).
    #[arg(long)]
    pub tolerance: Option<f64>,
}

impl GradCheckArgs {
    fn default_values() -> Self {
        Self {
            trials: Some(200),
            network: Some(false),
            max_points: Some(16),
            max_dim: Some(8),
            eta: Some(2.0),
            lambda: Some(1.0),
            norm: Some(Norm::L2),
            step: Some(1e-6),
            kink_margin: Some(1e-4),
            tolerance: None,
        }
    }
}
layered!(GradCheckArgs {
    trials,
    network,
    max_points,
    max_dim,
    eta,
    lambda,
    norm,
    step,
    kink_margin,
    tolerance
});

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainToyArgs {
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub clusters: Option<usize>,
    #[arg(long)]
    pub hidden: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub norm: Option<Norm>,
    /// Random batches used to estimate the connectivity statistics.
    #[arg(long)]
    pub eval_batches: Option<usize>,
    /// Epochs at which output clouds are dumped (0 = before training).
    #[arg(long, value_delimiter = ',')]
    pub snapshot_epochs: Option<Vec<usize>>,
}

impl TrainToyArgs {
    fn default_values() -> Self {
        Self {
            eta: Some(2.0),
            epochs: Some(60),
            batch_size: Some(50),
            samples: Some(1500),
            clusters: Some(3),
            hidden: Some(20),
            lr: Some(1e-3),
            norm: Some(Norm::L1),
            eval_batches: Some(3000),
            snapshot_epochs: Some(vec![0, 20, 60]),
        }
    }
}
layered!(TrainToyArgs {
    eta,
    epochs,
    batch_size,
    samples,
    clusters,
    hidden,
    lr,
    norm,
    eval_batches,
    snapshot_epochs
});

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainAeArgs {
    /// Training data CSV.
    #[arg(long, value_name = "CSV")]
    pub data: Option<PathBuf>,
    /// The last column holds labels and is ignored.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub labeled: Option<bool>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub header: Option<bool>,
    /// Hidden encoder widths, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub hidden: Option<Vec<usize>>,
    /// Width feeding the branched head (default: branches x branch-dim).
    #[arg(long)]
    pub pre_latent: Option<usize>,
    #[arg(long)]
    pub branches: Option<usize>,
    #[arg(long)]
    pub branch_dim: Option<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub norm: Option<Norm>,
    #[arg(long)]
    pub model_out: Option<PathBuf>,
    /// Per-iteration loss curve CSV.
    #[arg(long)]
    pub curve_out: Option<PathBuf>,
}

impl TrainAeArgs {
    fn default_values() -> Self {
        Self {
            labeled: Some(false),
            header: Some(false),
            hidden: Some(vec![32]),
            branches: Some(4),
            branch_dim: Some(4),
            lambda: Some(1.0),
            eta: Some(2.0),
            epochs: Some(50),
            batch_size: Some(100),
            lr: Some(1e-3),
            norm: Some(Norm::L1),
            ..Self::default()
        }
    }
}
layered!(TrainAeArgs {
    data,
    labeled,
    header,
    hidden,
    pre_latent,
    branches,
    branch_dim,
    lambda,
    eta,
    epochs,
    batch_size,
    lr,
    norm,
    model_out,
    curve_out
});

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreArgs {
    /// Trained encoder (JSON model file).
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Samples of the normal class used to fit the one-class model.
    #[arg(long, value_name = "CSV")]
    pub fit: Option<PathBuf>,
    /// Previously saved one-class model (instead of --fit).
    #[arg(long)]
    pub oneclass: Option<PathBuf>,
    #[arg(long, value_name = "CSV")]
    pub query: Option<PathBuf>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Input CSVs carry a trailing label column to drop.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub labeled: Option<bool>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub header: Option<bool>,
    /// Scores CSV destination (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Save the fitted one-class model.
    #[arg(long)]
    pub save_oneclass: Option<PathBuf>,
}

impl ScoreArgs {
    fn default_values() -> Self {
        Self {
            eta: Some(2.0),
            labeled: Some(false),
            header: Some(false),
            ..Self::default()
        }
    }
}
layered!(ScoreArgs {
    model,
    fit,
    oneclass,
    query,
    eta,
    labeled,
    header,
    out,
    save_oneclass
});

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalAucArgs {
    /// Scores of in-class samples, one per line.
    #[arg(long)]
    pub positive: Option<PathBuf>,
    /// Scores of out-of-class samples, one per line.
    #[arg(long)]
    pub negative: Option<PathBuf>,
}

impl EvalAucArgs {
    fn default_values() -> Self {
        Self::default()
    }
}
layered!(EvalAucArgs { positive, negative });

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OneclassEvalArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Labeled CSV (integer label in the last column) to draw class samples from.
    #[arg(long, value_name = "CSV")]
    pub data: Option<PathBuf>,
    /// Separate labeled test set; otherwise the undrawn rows of --data are scored.
    #[arg(long, value_name = "CSV")]
    pub test: Option<PathBuf>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub header: Option<bool>,
    /// AUC table destination (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl OneclassEvalArgs {
    fn default_values() -> Self {
        Self {
            m: Some(120),
            runs: Some(5),
            eta: Some(2.0),
            header: Some(false),
            ..Self::default()
        }
    }
}
layered!(OneclassEvalArgs {
    model,
    data,
    test,
    m,
    runs,
    eta,
    header,
    out
});

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Separation radius for the threshold.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Packing radius for the entropy bound.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub n: Option<u32>,
    /// Batch size for the separation threshold.
    #[arg(long)]
    pub b: Option<usize>,
}

impl BoundsArgs {
    fn default_values() -> Self {
        Self::default()
    }
}
layered!(BoundsArgs {
    alpha,
    beta,
    eta,
    eps,
    n,
    b
});

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyLemma1Args {
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub b: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// uniform or grid.
    #[arg(long, value_parser = parse_kind)]
    pub kind: Option<CloudKind>,
    #[arg(long)]
    pub norm: Option<Norm>,
    /// Fixed lower bound α (requires --beta); measured from each cloud otherwise.
    #[arg(long, requires = "beta")]
    pub alpha: Option<f64>,
    #[arg(long, requires = "alpha")]
    pub beta: Option<f64>,
}

fn parse_kind(s: &str) -> Result<CloudKind, String> {
    match s {
        "uniform" => Ok(CloudKind::Uniform),
        "grid" => Ok(CloudKind::Grid),
        other => Err(format!(
            "unknown cloud kind '{other}' (expected uniform or grid)"
        )),
    }
}

impl VerifyLemma1Args {
    fn default_values() -> Self {
        Self {
            m: Some(5),
            b: Some(3),
            n: Some(2),
            trials: Some(1000),
            kind: Some(CloudKind::Uniform),
            norm: Some(Norm::L1),
            ..Self::default()
        }
    }
}
layered!(VerifyLemma1Args {
    m,
    b,
    n,
    trials,
    kind,
    norm,
    alpha,
    beta
});

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchReduceArgs {
    /// Cloud sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub repetitions: Option<usize>,
    #[arg(long)]
    pub norm: Option<Norm>,
    /// Timing table CSV (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl BenchReduceArgs {
    fn default_values() -> Self {
        Self {
            sizes: Some(vec![32, 64, 128]),
            dim: Some(10),
            repetitions: Some(10),
            norm: Some(Norm::L1),
            out: None,
        }
    }
}
layered!(BenchReduceArgs {
    sizes,
    dim,
    repetitions,
    norm,
    out
});
