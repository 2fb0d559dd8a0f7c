//! Central finite-difference harnesses for the point gradient of the
//! connectivity loss and for parameter gradients of the branched
//! autoencoder objective.
//!
//! The numerical side only evaluates loss values; it never touches the
//! analytic gradient code.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{pairwise_distances, Norm, PointCloud};
use crate::loss::{connectivity_grad, connectivity_loss};
use crate::neural::TrainConfig;
use crate::neural::{backward_combined, objective, slice, AeSpec, BranchedAutoencoder, Matrix};
use crate::persistence::barcode;
use crate::rng;

/// `|a − f| / max(|a|, |f|, 1)`: relative for large entries, absolute below one.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1.0)
}

pub fn central_difference<F>(mut f: F, x: &[f64], step: f64) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|k| {
            let orig = probe[k];
            probe[k] = orig + step;
            let plus = f(&probe);
            probe[k] = orig - step;
            let minus = f(&probe);
            probe[k] = orig;
            (plus - minus) / (2.0 * step)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GradCheckConfig {
    pub trials: usize,
    pub max_points: usize,
    pub max_dim: usize,
    pub eta: f64,
    pub norm: Norm,
    pub step: f64,
    /// Clouds closer than this to a kink (eps ≈ η, a distance tie, or an L1
    /// coordinate kink on a merge edge) are redrawn.
    pub kink_margin: f64,
    pub seed: u64,
}

impl Default for GradCheckConfig {
    fn default() -> Self {
        Self {
            trials: 200,
            max_points: 16,
            max_dim: 8,
            eta: 2.0,
            norm: Norm::L2,
            step: 1e-6,
            kink_margin: 1e-4,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GradCheckReport {
    pub trials: usize,
    pub redrawn: usize,
    pub max_rel_error: f64,
}

/// Distance from the nearest non-differentiable configuration.
pub fn kink_distance(cloud: &PointCloud, eta: f64) -> f64 {
    let bc = barcode(cloud);
    let mut margin = pairwise_distances(cloud).min_gap();
    for e in &bc.events {
        margin = margin.min((e.eps - eta).abs());
        if cloud.norm() == Norm::L1 {
            let (a, b) = (cloud.point(e.edge.0), cloud.point(e.edge.1));
            for (x, y) in a.iter().zip(b) {
                margin = margin.min((x - y).abs());
            }
        }
    }
    margin
}

pub fn random_cloud(
    rng: &mut rng::Rng,
    max_points: usize,
    max_dim: usize,
    scale: f64,
    norm: Norm,
) -> Result<PointCloud> {
    let b = rng.random_range(2..=max_points.max(2));
    let n = rng.random_range(1..=max_dim.max(1));
    let data = (0..b * n)
        .map(|_| rng.random_range(-scale..scale))
        .collect();
    PointCloud::from_flat(data, n, norm)
}

pub fn check_point_gradients(cfg: &GradCheckConfig) -> Result<GradCheckReport> {
    let mut rng = rng::seeded(cfg.seed);
    let mut report = GradCheckReport {
        trials: 0,
        redrawn: 0,
        max_rel_error: 0.0,
    };
    let attempts_cap = cfg.trials.saturating_mul(100).max(100);
    let mut attempts = 0;
    while report.trials < cfg.trials && attempts < attempts_cap {
        attempts += 1;
        let cloud = random_cloud(&mut rng, cfg.max_points, cfg.max_dim, 1.5, cfg.norm)?;
        if kink_distance(&cloud, cfg.eta) < cfg.kink_margin {
            report.redrawn += 1;
            continue;
        }
        let analytic = connectivity_grad(&cloud, cfg.eta)?;
        let (dim, norm) = (cloud.dim(), cloud.norm());
        let numeric = central_difference(
            |x| {
                let probe = PointCloud::from_flat(x.to_vec(), dim, norm).expect("finite probe");
                connectivity_loss(&probe, cfg.eta)
                    .expect("valid probe")
                    .value
            },
            cloud.as_flat(),
            cfg.step,
        );
        for (a, f) in analytic.iter().zip(&numeric) {
            report.max_rel_error = report.max_rel_error.max(relative_error(*a, *f));
        }
        report.trials += 1;
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetGradCheckConfig {
    pub trials: usize,
    pub lambda: f64,
    pub norm: Norm,
    pub step: f64,
    pub kink_margin: f64,
    pub seed: u64,
}

impl Default for NetGradCheckConfig {
    fn default() -> Self {
        Self {
            trials: 200,
            lambda: 1.0,
            norm: Norm::L2,
            step: 1e-6,
            kink_margin: 1e-4,
            seed: 0,
        }
    }
}

/// Smallest distance to a kink of the joint objective: leaky-ReLU inputs,
/// reconstruction residuals and the per-branch connectivity kinks.
pub fn objective_kink_distance(
    net: &BranchedAutoencoder,
    batch: &Matrix,
    config: &TrainConfig,
) -> Result<f64> {
    let cache = net.forward(batch)?;
    let mut margin = cache.kink_margin(net);
    for (x, y) in batch.as_slice().iter().zip(cache.reconstruction.as_slice()) {
        margin = margin.min((x - y).abs());
    }
    if config.lambda > 0.0 {
        let d = net.branch_dim();
        for j in 0..net.branches() {
            let cloud =
                PointCloud::from_flat(slice(&cache.latent, j, d).into_vec(), d, config.norm)?;
            margin = margin.min(kink_distance(&cloud, config.eta));
        }
    }
    Ok(margin)
}

fn flatten(net: &BranchedAutoencoder) -> Vec<f64> {
    let mut out = net.encoder.params().to_vec();
    out.extend_from_slice(net.head.params());
    out.extend_from_slice(net.decoder.params());
    out
}

fn unflatten(net: &mut BranchedAutoencoder, flat: &[f64]) {
    let mut rest = flat;
    for buf in net.param_slices_mut() {
        let (head, tail) = rest.split_at(buf.len());
        buf.copy_from_slice(head);
        rest = tail;
    }
}

/// Random small autoencoders and batches; compares backpropagated parameter
/// gradients of the joint objective with central differences.
pub fn check_network_gradients(cfg: &NetGradCheckConfig) -> Result<GradCheckReport> {
    let mut rng = rng::seeded(cfg.seed);
    let mut report = GradCheckReport {
        trials: 0,
        redrawn: 0,
        max_rel_error: 0.0,
    };
    let attempts_cap = cfg.trials.saturating_mul(100).max(100);
    let mut attempts = 0;
    while report.trials < cfg.trials && attempts < attempts_cap {
        attempts += 1;
        let input = rng.random_range(2..=5);
        let hidden = rng.random_range(2..=6);
        let branches = rng.random_range(1..=3);
        let pre = branches * rng.random_range(1..=3);
        let branch_dim = rng.random_range(1..=3);
        let rows = rng.random_range(3..=8);
        let spec = AeSpec::new(vec![input, hidden, pre], branches, branch_dim, rng.random());
        let mut net = BranchedAutoencoder::new(spec)?;
        let data = (0..rows * input)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let batch = Matrix::from_vec(rows, input, data)?;
        let config = TrainConfig {
            eta: rng.random_range(0.05..1.0),
            lambda: cfg.lambda,
            batch_size: rows,
            norm: cfg.norm,
            ..TrainConfig::default()
        };
        if objective_kink_distance(&net, &batch, &config)? < cfg.kink_margin {
            report.redrawn += 1;
            continue;
        }
        let (grads, _, _) = backward_combined(&net, &batch, &config)?;
        let analytic: Vec<f64> = grads
            .encoder
            .iter()
            .chain(&grads.head)
            .chain(&grads.decoder)
            .copied()
            .collect();
        let theta = flatten(&net);
        let mut probe = net.clone();
        let numeric = central_difference(
            |x| {
                unflatten(&mut probe, x);
                objective(&probe, &batch, &config)
                    .expect("valid probe")
                    .total
            },
            &theta,
            cfg.step,
        );
        unflatten(&mut net, &theta);
        for (a, f) in analytic.iter().zip(&numeric) {
            report.max_rel_error = report.max_rel_error.max(relative_error(*a, *f));
        }
        report.trials += 1;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_l1_example() {
        let c = PointCloud::new(vec![vec![0.0], vec![1.0]], Norm::L1).unwrap();
        let numeric = central_difference(
            |x| {
                let p = PointCloud::from_flat(x.to_vec(), 1, Norm::L1).unwrap();
                connectivity_loss(&p, 2.0).unwrap().value
            },
            c.as_flat(),
            1e-6,
        );
        assert!((numeric[0] - 1.0).abs() < 1e-8);
        assert!((numeric[1] + 1.0).abs() < 1e-8);
        assert_eq!(connectivity_grad(&c, 2.0).unwrap(), vec![1.0, -1.0]);
    }

    #[test]
    fn quadratic_difference() {
        let g = central_difference(|x| x[0] * x[0] + 3.0 * x[1], &[2.0, -1.0], 1e-5);
        assert!((g[0] - 4.0).abs() < 1e-8);
        assert!((g[1] - 3.0).abs() < 1e-8);
    }

    #[test]
    fn harness_runs_small() {
        let cfg = GradCheckConfig {
            trials: 10,
            ..GradCheckConfig::default()
        };
        let r = check_point_gradients(&cfg).unwrap();
        assert_eq!(r.trials, 10);
        assert!(r.max_rel_error <= 1e-5, "{r:?}");
    }

    #[test]
    fn network_harness_runs_small() {
        let cfg = NetGradCheckConfig {
            trials: 5,
            ..NetGradCheckConfig::default()
        };
        let r = check_network_gradients(&cfg).unwrap();
        assert_eq!(r.trials, 5);
        assert!(r.max_rel_error <= 1e-4, "{r:?}");
    }
}
