//! Joint objective and training loop for the branched autoencoder:
//! mean L1 reconstruction plus `λ` times the sum of per-branch connectivity
//! losses on the latent slices.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::adam::{Adam, AdamConfig};
use super::autoencoder::{slice, AeCache, AeGradients, BranchedAutoencoder};
use super::Matrix;
use crate::error::{invalid, Result};
use crate::geometry::{Norm, PointCloud};
use crate::loss::{connectivity_loss, connectivity_loss_with_grad};
use crate::par::*;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub eta: f64,
    pub lambda: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub adam: AdamConfig,
    /// Norm of the connectivity loss; reconstruction always uses L1.
    pub norm: Norm,
    /// Seed for per-epoch shuffling.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            eta: 2.0,
            lambda: 1.0,
            batch_size: 100,
            epochs: 50,
            adam: AdamConfig::default(),
            norm: Norm::L1,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size < 2 {
            return Err(invalid("batch size must be >= 2"));
        }
        if self.lambda.is_nan() || self.lambda < 0.0 {
            return Err(invalid("lambda must be nonnegative"));
        }
        if self.eta.is_nan() || self.eta <= 0.0 {
            return Err(invalid("eta must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub reconstruction: f64,
    /// Unweighted sum of per-branch connectivity losses.
    pub connectivity: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub epoch: usize,
    pub iteration: usize,
    pub reconstruction: f64,
    pub connectivity: f64,
}

fn branch_cloud(latent: &Matrix, branch: usize, dim: usize, norm: Norm) -> Result<PointCloud> {
    PointCloud::from_flat(slice(latent, branch, dim).into_vec(), dim, norm)
}

fn reconstruction_loss(batch: &Matrix, cache: &AeCache) -> (f64, Matrix) {
    let b = batch.rows() as f64;
    let mut grad = Matrix::zeros(batch.rows(), batch.cols());
    let mut total = 0.0;
    for ((g, x), y) in grad
        .as_mut_slice()
        .iter_mut()
        .zip(batch.as_slice())
        .zip(cache.reconstruction.as_slice())
    {
        let diff = y - x;
        total += diff.abs();
        *g = if diff > 0.0 {
            1.0 / b
        } else if diff < 0.0 {
            -1.0 / b
        } else {
            0.0
        };
    }
    (total / b, grad)
}

fn check_batch(batch: &Matrix, config: &TrainConfig) -> Result<()> {
    if batch.rows() != config.batch_size {
        return Err(invalid(format!(
            "batch has {} rows, configured batch size is {}",
            batch.rows(),
            config.batch_size
        )));
    }
    if config.lambda > 0.0 && batch.rows() < 2 {
        return Err(invalid(
            "connectivity loss needs batches of at least two samples",
        ));
    }
    Ok(())
}

/// Value of the joint objective without gradients.
pub fn objective(
    net: &BranchedAutoencoder,
    batch: &Matrix,
    config: &TrainConfig,
) -> Result<LossBreakdown> {
    check_batch(batch, config)?;
    let cache = net.forward(batch)?;
    let (reconstruction, _) = reconstruction_loss(batch, &cache);
    let mut connectivity = 0.0;
    if config.lambda > 0.0 {
        for j in 0..net.branches() {
            let cloud = branch_cloud(&cache.latent, j, net.branch_dim(), config.norm)?;
            connectivity += connectivity_loss(&cloud, config.eta)?.value;
        }
    }
    Ok(LossBreakdown {
        reconstruction,
        connectivity,
        total: reconstruction + config.lambda * connectivity,
    })
}

/// Parameter gradients of the joint objective. The connectivity term enters
/// through the latent codes only, so the decoder sees just the reconstruction
/// gradient.
pub fn backward_combined(
    net: &BranchedAutoencoder,
    batch: &Matrix,
    config: &TrainConfig,
) -> Result<(AeGradients, LossBreakdown, AeCache)> {
    check_batch(batch, config)?;
    let cache = net.forward(batch)?;
    let (reconstruction, d_recon) = reconstruction_loss(batch, &cache);

    let mut connectivity = 0.0;
    let mut d_latent = None;
    if config.lambda > 0.0 {
        let d = net.branch_dim();
        let per_branch: Vec<Result<(f64, Vec<f64>)>> = (0..net.branches())
            .into_par_iter()
            .map(|j| {
                let cloud = branch_cloud(&cache.latent, j, d, config.norm)?;
                let r = connectivity_loss_with_grad(&cloud, config.eta)?;
                Ok((r.value, r.gradient.expect("gradient requested")))
            })
            .collect();
        let mut dz = Matrix::zeros(batch.rows(), net.branches() * d);
        for (j, res) in per_branch.into_iter().enumerate() {
            let (value, grad) = res?;
            connectivity += value;
            for r in 0..batch.rows() {
                for k in 0..d {
                    dz.row_mut(r)[j * d + k] = config.lambda * grad[r * d + k];
                }
            }
        }
        d_latent = Some(dz);
    }

    let mut grads = net.zero_gradients();
    net.backward(&cache, &d_recon, d_latent.as_ref(), &mut grads);
    let breakdown = LossBreakdown {
        reconstruction,
        connectivity,
        total: reconstruction + config.lambda * connectivity,
    };
    Ok((grads, breakdown, cache))
}

/// Row indices of each full batch for one epoch; the partial tail is dropped.
pub fn epoch_batches(n: usize, batch_size: usize, rng: &mut rng::Rng) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order
        .chunks_exact(batch_size)
        .map(<[usize]>::to_vec)
        .collect()
}

pub fn train(
    net: &mut BranchedAutoencoder,
    data: &Matrix,
    config: &TrainConfig,
    mut on_record: impl FnMut(&IterationRecord),
) -> Result<Vec<IterationRecord>> {
    config.validate()?;
    if data.rows() == 0 {
        return Err(invalid("training data is empty"));
    }
    if data.cols() != net.input_dim() {
        return Err(invalid(format!(
            "data has {} columns, network expects {}",
            data.cols(),
            net.input_dim()
        )));
    }
    let mut rng = rng::seeded(config.seed);
    let sizes = [
        net.encoder.params().len(),
        net.head.params().len(),
        net.decoder.params().len(),
    ];
    let mut adam = Adam::new(config.adam, &sizes);
    let mut records = Vec::new();
    let mut iteration = 0;
    for epoch in 0..config.epochs {
        for rows in epoch_batches(data.rows(), config.batch_size, &mut rng) {
            let batch = data.select_rows(&rows);
            let (grads, loss, _) = backward_combined(net, &batch, config)?;
            let mut params = net.param_slices_mut();
            adam.step(&mut params, &[&grads.encoder, &grads.head, &grads.decoder]);
            let record = IterationRecord {
                epoch,
                iteration,
                reconstruction: loss.reconstruction,
                connectivity: loss.connectivity,
            };
            on_record(&record);
            records.push(record);
            iteration += 1;
        }
    }
    Ok(records)
}
