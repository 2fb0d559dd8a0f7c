//! The connectivity loss `L_η(S) = Σ_t |η − ε_t|` over the merge events of a
//! batch, and its gradient with respect to the points.
//!
//! The merge pairing is locally constant in the points (away from distance
//! ties), so the gradient only flows through the distance `‖z_i − z_j‖` of
//! each causing edge. Subgradient conventions: `sign(0) = 0`, both for the
//! outer absolute value and for coordinate kinks of the L1 norm.

use crate::error::{invalid, Result};
use crate::filtration::build_vr;
use crate::geometry::{distances_unique, Norm, PointCloud, DEFAULT_TIE_TOLERANCE};
use crate::persistence::{persistence_unionfind, Barcode};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventTerm {
    pub eps: f64,
    pub edge: (usize, usize),
    /// `|η − eps|`
    pub term: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossResult {
    pub value: f64,
    pub per_event: Vec<EventTerm>,
    /// Row-major `b × n` gradient, when requested.
    pub gradient: Option<Vec<f64>>,
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn check_args(cloud: &PointCloud, eta: f64) -> Result<()> {
    if cloud.len() < 2 {
        return Err(invalid(
            "connectivity loss needs at least two points (no merge events otherwise)",
        ));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(invalid(format!(
            "eta must be positive and finite, got {eta}"
        )));
    }
    Ok(())
}

fn terms(barcode: &Barcode, eta: f64) -> (f64, Vec<EventTerm>) {
    // events arrive in filtration order: ascending eps, then edge
    let per_event: Vec<EventTerm> = barcode
        .events
        .iter()
        .map(|e| EventTerm {
            eps: e.eps,
            edge: e.edge,
            term: (eta - e.eps).abs(),
        })
        .collect();
    let value = per_event.iter().fold(0.0, |acc, t| acc + t.term);
    (value, per_event)
}

pub fn connectivity_loss(cloud: &PointCloud, eta: f64) -> Result<LossResult> {
    check_args(cloud, eta)?;
    let barcode = persistence_unionfind(&build_vr(cloud));
    let (value, per_event) = terms(&barcode, eta);
    Ok(LossResult {
        value,
        per_event,
        gradient: None,
    })
}

/// Adds the gradient of `Σ_t |η − ‖z_i − z_j‖|` over the given edges into
/// `grad` (row-major, same shape as the cloud), scaled by `weight`.
pub fn accumulate_gradient(
    cloud: &PointCloud,
    eta: f64,
    edges: impl IntoIterator<Item = (usize, usize)>,
    weight: f64,
    grad: &mut [f64],
) {
    let n = cloud.dim();
    debug_assert_eq!(grad.len(), cloud.len() * n);
    for (i, j) in edges {
        let d = cloud.distance(i, j);
        let outer = weight * sign(d - eta);
        if outer == 0.0 {
            continue;
        }
        let (zi, zj) = (cloud.point(i), cloud.point(j));
        for k in 0..n {
            let diff = zi[k] - zj[k];
            let inner = match cloud.norm() {
                Norm::L1 => sign(diff),
                Norm::L2 => {
                    if d > 0.0 {
                        diff / d
                    } else {
                        0.0
                    }
                }
            };
            grad[i * n + k] += outer * inner;
            grad[j * n + k] -= outer * inner;
        }
    }
}

pub fn connectivity_loss_with_grad(cloud: &PointCloud, eta: f64) -> Result<LossResult> {
    check_args(cloud, eta)?;
    let barcode = persistence_unionfind(&build_vr(cloud));
    let (value, per_event) = terms(&barcode, eta);
    let mut gradient = vec![0.0; cloud.as_flat().len()];
    accumulate_gradient(
        cloud,
        eta,
        per_event.iter().map(|t| t.edge),
        1.0,
        &mut gradient,
    );
    Ok(LossResult {
        value,
        per_event,
        gradient: Some(gradient),
    })
}

/// Row-major `b × n` gradient of the connectivity loss.
pub fn connectivity_grad(cloud: &PointCloud, eta: f64) -> Result<Vec<f64>> {
    Ok(connectivity_loss_with_grad(cloud, eta)?
        .gradient
        .expect("gradient requested"))
}

/// One bit per unordered pair: whether the pair's distance is a merge
/// distance of the cloud.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndicatorTable {
    b: usize,
    bits: Vec<bool>,
}

impl IndicatorTable {
    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        debug_assert!(i != j && j < self.b);
        // row-major upper triangle without the diagonal
        i * (2 * self.b - i - 1) / 2 + (j - i - 1)
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[self.index(i, j)]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&x| x).count()
    }

    pub fn point_count(&self) -> usize {
        self.b
    }

    /// Builds the table from distance-value membership. When exact distance
    /// ties make membership ambiguous (more than `b − 1` set bits), falls
    /// back to the causing edges picked by the lexicographic tie-break.
    pub fn from_cloud(cloud: &PointCloud) -> Self {
        let b = cloud.len();
        let barcode = persistence_unionfind(&build_vr(cloud));
        let mut merge_values: Vec<f64> = barcode.merge_distances();
        merge_values.sort_by(f64::total_cmp);
        let mut table = Self {
            b,
            bits: vec![false; b * b.saturating_sub(1) / 2],
        };
        for (i, j, d) in cloud.pair_distances() {
            if merge_values.binary_search_by(|v| v.total_cmp(&d)).is_ok() {
                let k = table.index(i, j);
                table.bits[k] = true;
            }
        }
        if table.count() != barcode.len() {
            table.bits.iter_mut().for_each(|x| *x = false);
            for e in &barcode.events {
                let k = table.index(e.edge.0, e.edge.1);
                table.bits[k] = true;
            }
        }
        table
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicatorLoss {
    pub value: f64,
    /// Some pairwise distances were within the tie tolerance of each other.
    pub tie_warning: bool,
}

/// `Σ_{i<j} |η − ‖z_i − z_j‖| · 1_{i,j}`, summed over pairs in filtration
/// order so that it matches [`connectivity_loss`] bit for bit.
pub fn loss_via_indicator(cloud: &PointCloud, eta: f64) -> Result<IndicatorLoss> {
    check_args(cloud, eta)?;
    let tie_warning = !distances_unique(cloud, DEFAULT_TIE_TOLERANCE).unique;
    if tie_warning {
        log::warn!("pairwise distances are not unique; using lexicographic tie-break");
    }
    let table = IndicatorTable::from_cloud(cloud);
    let complex = build_vr(cloud);
    let value = complex.edges().iter().fold(0.0, |acc, e| {
        if table.get(e.i, e.j) {
            acc + (eta - e.eps).abs()
        } else {
            acc
        }
    });
    Ok(IndicatorLoss { value, tie_warning })
}
