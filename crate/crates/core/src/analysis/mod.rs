//! Connectivity statistics and the densification / separation bounds that
//! follow from α-β connectedness, with brute-force checks on small instances.

mod lemma1;
pub mod packing;

use serde::{Deserialize, Serialize};

pub use lemma1::{verify_lemma1, CloudKind, Lemma1Config, Lemma1Report, SUBSET_LIMIT};

use crate::error::{invalid, Result};
use crate::geometry::PointCloud;
use crate::par::*;
use crate::persistence::barcode;

/// Mean of per-batch min / mean / max merge distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityStats {
    pub alpha_hat: f64,
    pub eps_hat: f64,
    pub beta_hat: f64,
    pub batch_size: usize,
    pub batch_count: usize,
}

fn merge_extremes(cloud: &PointCloud) -> Result<(f64, f64, f64)> {
    if cloud.len() < 2 {
        return Err(invalid("need at least two points per batch"));
    }
    let d = barcode(cloud).merge_distances();
    let min = d.iter().copied().fold(f64::INFINITY, f64::min);
    let max = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = d.iter().sum::<f64>() / d.len() as f64;
    Ok((min, mean, max))
}

pub fn batch_stats(clouds: &[PointCloud]) -> Result<ConnectivityStats> {
    if clouds.is_empty() {
        return Err(invalid("no batches given"));
    }
    let per_batch = clouds
        .par_iter()
        .map(merge_extremes)
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let k = per_batch.len() as f64;
    let (mut a, mut e, mut b) = (0.0, 0.0, 0.0);
    for (lo, mean, hi) in &per_batch {
        a += lo;
        e += mean;
        b += hi;
    }
    Ok(ConnectivityStats {
        alpha_hat: a / k,
        eps_hat: e / k,
        beta_hat: b / k,
        batch_size: clouds[0].len(),
        batch_count: clouds.len(),
    })
}

/// `(α, β)`: smallest and largest merge distance of the cloud.
pub fn alpha_beta(cloud: &PointCloud) -> Result<(f64, f64)> {
    let (lo, _, hi) = merge_extremes(cloud)?;
    Ok((lo, hi))
}

/// Every point has at least `d` other points within distance `eps`.
pub fn is_d_eps_dense(cloud: &PointCloud, d: usize, eps: f64) -> bool {
    let b = cloud.len();
    (0..b).all(|i| {
        (0..b)
            .filter(|&j| j != i && cloud.distance(i, j) <= eps)
            .take(d)
            .count()
            >= d
    })
}

/// All pairwise distances are at least `eps`.
pub fn is_eps_separated(cloud: &PointCloud, eps: f64) -> bool {
    let b = cloud.len();
    (0..b).all(|i| ((i + 1)..b).all(|j| cloud.distance(i, j) >= eps))
}

/// The L1 annulus `B(0, α, β)` in `R^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusSpec {
    pub alpha: f64,
    pub beta: f64,
    pub n: u32,
}

impl AnnulusSpec {
    pub fn new(alpha: f64, beta: f64, n: u32) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= beta && beta.is_finite()) {
            return Err(invalid(format!(
                "need 0 < alpha <= beta, got {alpha}, {beta}"
            )));
        }
        if n == 0 {
            return Err(invalid("dimension must be >= 1"));
        }
        Ok(Self { alpha, beta, n })
    }
}

/// Volume upper bound on the ε-packing number of the L1 annulus:
/// `(2β/ε + 1)^n − (2α/ε − 1)^n`.
pub fn entropy_bound(spec: &AnnulusSpec, eps: f64) -> f64 {
    let n = spec.n as i32;
    (2.0 * spec.beta / eps + 1.0).powi(n) - (2.0 * spec.alpha / eps - 1.0).powi(n)
}

/// Smallest `m` with `m − b + 1 > (2β/η + 1)^n − (2α/η − 1)^n`. A set of that
/// size whose `b`-subsets are all α-β connected cannot be η-separated. The
/// boundary case `m − b + 1 = bound` does not qualify.
pub fn separation_threshold(b: usize, alpha: f64, beta: f64, eta: f64, n: u32) -> u64 {
    let n = n as i32;
    let bound = (2.0 * beta / eta + 1.0).powi(n) - (2.0 * alpha / eta - 1.0).powi(n);
    let b = b as u64;
    if bound < 0.0 {
        return b;
    }
    // m − b + 1 > bound  ⇔  m ≥ b + floor(bound)
    let extra = bound.floor();
    if extra >= (u64::MAX - b) as f64 {
        u64::MAX
    } else {
        b + extra as u64
    }
}

/// Largest batch size compatible with α-β connectedness of every `b`-subset
/// of a `2b − 1` set: `floor((2β/α + 1)^n − 1)`, saturating.
pub fn batch_size_condition(alpha: f64, beta: f64, n: u32) -> u64 {
    let v = (2.0 * beta / alpha + 1.0).powi(n as i32) - 1.0;
    if v >= u64::MAX as f64 {
        u64::MAX
    } else {
        v.floor() as u64
    }
}
