//! Two-dimensional toy setting: an MLP `R² → R²` trained with the
//! connectivity loss alone on samples from three random Gaussians.

use rand::seq::index;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::adam::{Adam, AdamConfig};
use super::mlp::{Mlp, MlpSpec};
use super::train::epoch_batches;
use super::Matrix;
use crate::analysis::{batch_stats, ConnectivityStats};
use crate::error::{invalid, Result};
use crate::geometry::{Norm, PointCloud};
use crate::loss::connectivity_loss_with_grad;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToyConfig {
    pub seed: u64,
    pub samples: usize,
    pub clusters: usize,
    pub hidden: usize,
    pub eta: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub adam: AdamConfig,
    pub norm: Norm,
    pub eval_batches: usize,
    /// Epochs after which outputs are dumped and statistics evaluated
    /// (0 = before training).
    pub snapshot_epochs: Vec<usize>,
}

impl Default for ToyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 1500,
            clusters: 3,
            hidden: 20,
            eta: 2.0,
            epochs: 60,
            batch_size: 50,
            adam: AdamConfig::default(),
            norm: Norm::L1,
            eval_batches: 3000,
            snapshot_epochs: vec![0, 20, 60],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyRecord {
    pub epoch: usize,
    pub iteration: usize,
    pub connectivity: f64,
}

#[derive(Debug, Clone)]
pub struct ToySnapshot {
    pub epoch: usize,
    pub outputs: Matrix,
    pub stats: ConnectivityStats,
}

#[derive(Debug, Clone)]
pub struct ToyResult {
    pub mlp: Mlp,
    pub inputs: Matrix,
    pub labels: Vec<usize>,
    pub curve: Vec<ToyRecord>,
    pub snapshots: Vec<ToySnapshot>,
}

impl ToyResult {
    pub fn initial_stats(&self) -> Option<&ConnectivityStats> {
        self.snapshots.first().map(|s| &s.stats)
    }

    pub fn final_stats(&self) -> Option<&ConnectivityStats> {
        self.snapshots.last().map(|s| &s.stats)
    }
}

/// `samples` points from `clusters` planar Gaussians with random means in
/// `[-4, 4]²` and random covariances `L Lᵀ`, `L` lower triangular.
pub fn sample_gaussians(
    samples: usize,
    clusters: usize,
    rng: &mut rng::Rng,
) -> Result<(Matrix, Vec<usize>)> {
    if clusters == 0 {
        return Err(invalid("need at least one cluster"));
    }
    let params: Vec<([f64; 2], [f64; 3])> = (0..clusters)
        .map(|_| {
            let mean = [rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)];
            let chol = [
                rng.random_range(0.2..1.0),
                rng.random_range(-0.5..0.5),
                rng.random_range(0.2..1.0),
            ];
            (mean, chol)
        })
        .collect();
    let mut data = Vec::with_capacity(samples * 2);
    let mut labels = Vec::with_capacity(samples);
    for s in 0..samples {
        let c = s % clusters;
        let (mean, [a, c10, d]) = params[c];
        let u: f64 = StandardNormal.sample(&mut *rng);
        let v: f64 = StandardNormal.sample(&mut *rng);
        data.push(mean[0] + a * u);
        data.push(mean[1] + c10 * u + d * v);
        labels.push(c);
    }
    Ok((Matrix::from_vec(samples, 2, data)?, labels))
}

/// (α̂, ε̂, β̂) of `points` over `count` random batches of size `batch_size`.
pub fn evaluate_stats(
    points: &Matrix,
    batch_size: usize,
    count: usize,
    norm: Norm,
    rng: &mut rng::Rng,
) -> Result<ConnectivityStats> {
    if batch_size > points.rows() {
        return Err(invalid("evaluation batch larger than the point set"));
    }
    let clouds = (0..count)
        .map(|_| {
            let rows = index::sample(rng, points.rows(), batch_size).into_vec();
            PointCloud::from_flat(points.select_rows(&rows).into_vec(), points.cols(), norm)
        })
        .collect::<Result<Vec<_>>>()?;
    batch_stats(&clouds)
}

/// One Adam step on the connectivity loss of the MLP outputs for a batch.
fn connectivity_step(
    mlp: &mut Mlp,
    adam: &mut Adam,
    batch: &Matrix,
    eta: f64,
    norm: Norm,
) -> Result<f64> {
    let (out, cache) = mlp.forward(batch)?;
    let cloud = PointCloud::from_flat(out.as_slice().to_vec(), out.cols(), norm)?;
    let loss = connectivity_loss_with_grad(&cloud, eta)?;
    let dout = Matrix::from_vec(out.rows(), out.cols(), loss.gradient.expect("gradient"))?;
    let mut grad = vec![0.0; mlp.params().len()];
    mlp.backward(&cache, &dout, &mut grad);
    adam.step(&mut [mlp.params_mut()], &[&grad]);
    Ok(loss.value)
}

pub fn toy_experiment(config: &ToyConfig) -> Result<ToyResult> {
    if config.batch_size < 2 {
        return Err(invalid("batch size must be >= 2"));
    }
    let mut data_rng = rng::seeded(rng::derive_seed(config.seed, 0));
    let mut shuffle_rng = rng::seeded(rng::derive_seed(config.seed, 1));
    let mut eval_rng = rng::seeded(rng::derive_seed(config.seed, 2));

    let (inputs, labels) = sample_gaussians(config.samples, config.clusters, &mut data_rng)?;
    let mut mlp = Mlp::new(MlpSpec::new(
        vec![2, config.hidden, config.hidden, 2],
        rng::derive_seed(config.seed, 3),
    ))?;
    let mut adam = Adam::new(config.adam, &[mlp.params().len()]);

    let mut snapshots = Vec::new();
    let mut snapshot = |epoch: usize, mlp: &Mlp, rng: &mut rng::Rng| -> Result<()> {
        if config.snapshot_epochs.contains(&epoch) {
            let outputs = mlp.predict(&inputs)?;
            let stats = evaluate_stats(
                &outputs,
                config.batch_size,
                config.eval_batches,
                config.norm,
                rng,
            )?;
            log::info!(
                "epoch {epoch}: alpha {:.4} eps {:.4} beta {:.4}",
                stats.alpha_hat,
                stats.eps_hat,
                stats.beta_hat
            );
            snapshots.push(ToySnapshot {
                epoch,
                outputs,
                stats,
            });
        }
        Ok(())
    };

    snapshot(0, &mlp, &mut eval_rng)?;
    let mut curve = Vec::new();
    let mut iteration = 0;
    for epoch in 1..=config.epochs {
        for rows in epoch_batches(inputs.rows(), config.batch_size, &mut shuffle_rng) {
            let batch = inputs.select_rows(&rows);
            let value = connectivity_step(&mut mlp, &mut adam, &batch, config.eta, config.norm)?;
            curve.push(ToyRecord {
                epoch,
                iteration,
                connectivity: value,
            });
            iteration += 1;
        }
        snapshot(epoch, &mlp, &mut eval_rng)?;
    }

    Ok(ToyResult {
        mlp,
        inputs,
        labels,
        curve,
        snapshots,
    })
}
