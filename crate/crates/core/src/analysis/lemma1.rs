//! Exhaustive check of the annulus densification property: if every
//! `b`-subset of an `m`-point set `M` is α-β connected, each `z ∈ M` has at
//! least `m − b + 1` other points of `M` at distance in `[α, β]`.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{Norm, PointCloud};
use crate::par::*;
use crate::persistence::barcode;
use crate::rng;

/// Maximum number of `b`-subsets enumerated per cloud.
pub const SUBSET_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CloudKind {
    /// Uniform in the unit cube.
    #[default]
    Uniform,
    /// First `m` nodes of a unit-spacing lattice, in row-major order.
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Config {
    pub m: usize,
    pub b: usize,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub kind: CloudKind,
    /// Fixed `(α, β)`. When absent, each cloud uses the extreme merge
    /// distances over all of its `b`-subsets.
    pub alpha_beta: Option<(f64, f64)>,
    pub norm: Norm,
}

impl Lemma1Config {
    pub fn new(m: usize, b: usize, n: usize, trials: usize, seed: u64) -> Self {
        Self {
            m,
            b,
            n,
            trials,
            seed,
            kind: CloudKind::Uniform,
            alpha_beta: None,
            norm: Norm::L1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub trials: usize,
    pub premise_hits: usize,
    pub violations: usize,
    /// `m − b + 1`.
    pub required: usize,
    /// Smallest annulus count seen over premise-satisfying clouds.
    pub min_annulus_count: Option<usize>,
}

impl Lemma1Report {
    pub fn premise_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.premise_hits as f64 / self.trials as f64
        }
    }
}

pub fn binomial(m: usize, k: usize) -> u128 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    (0..k).fold(1u128, |acc, i| acc * (m - i) as u128 / (i + 1) as u128)
}

/// Calls `f` on every `k`-subset of `0..m` in lexicographic order.
fn for_each_subset(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(pos) = (0..k).rev().find(|&p| idx[p] != p + m - k) else {
            return;
        };
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

fn make_cloud(cfg: &Lemma1Config, rng: &mut rng::Rng) -> Result<PointCloud> {
    let data: Vec<f64> = match cfg.kind {
        CloudKind::Uniform => (0..cfg.m * cfg.n).map(|_| rng.random::<f64>()).collect(),
        CloudKind::Grid => {
            let side = (1..)
                .find(|s: &usize| s.pow(cfg.n as u32) >= cfg.m)
                .unwrap();
            (0..cfg.m)
                .flat_map(|k| {
                    let mut rest = k;
                    let mut coords = vec![0.0; cfg.n];
                    for c in coords.iter_mut().rev() {
                        *c = (rest % side) as f64;
                        rest /= side;
                    }
                    coords
                })
                .collect()
        }
    };
    PointCloud::from_flat(data, cfg.n, cfg.norm)
}

#[derive(Debug, Clone, Copy)]
struct Trial {
    premise: bool,
    violation: bool,
    min_count: usize,
}

fn check_cloud(cloud: &PointCloud, cfg: &Lemma1Config) -> Trial {
    let (m, b) = (cfg.m, cfg.b);
    let mut extremes = Vec::with_capacity(binomial(m, b) as usize);
    for_each_subset(m, b, |idx| {
        let d = barcode(&cloud.select(idx)).merge_distances();
        let lo = d.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        extremes.push((lo, hi));
    });
    let (alpha, beta) = cfg.alpha_beta.unwrap_or_else(|| {
        extremes
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, c), &(lo, hi)| {
                (a.min(lo), c.max(hi))
            })
    });
    let premise = extremes.iter().all(|&(lo, hi)| lo >= alpha && hi <= beta);
    let min_count = (0..m)
        .map(|z| {
            (0..m)
                .filter(|&y| {
                    let d = cloud.distance(z, y);
                    y != z && d >= alpha && d <= beta
                })
                .count()
        })
        .min()
        .unwrap_or(0);
    Trial {
        premise,
        violation: premise && min_count < m - b + 1,
        min_count,
    }
}

/// Runs `trials` random clouds; trials run in parallel with per-trial seeds.
pub fn verify_lemma1(cfg: &Lemma1Config) -> Result<Lemma1Report> {
    if cfg.b < 2 || cfg.b > cfg.m {
        return Err(invalid(format!(
            "need 2 <= b <= m, got b = {}, m = {}",
            cfg.b, cfg.m
        )));
    }
    if cfg.n == 0 {
        return Err(invalid("dimension must be >= 1"));
    }
    let count = binomial(cfg.m, cfg.b);
    if count > SUBSET_LIMIT {
        return Err(Error::TooManySubsets {
            m: cfg.m,
            b: cfg.b,
            count,
            limit: SUBSET_LIMIT,
        });
    }
    let trials = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng::seeded(rng::derive_seed(cfg.seed, t as u64));
            make_cloud(cfg, &mut rng).map(|c| check_cloud(&c, cfg))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let hits: Vec<&Trial> = trials.iter().filter(|t| t.premise).collect();
    Ok(Lemma1Report {
        trials: trials.len(),
        premise_hits: hits.len(),
        violations: trials.iter().filter(|t| t.violation).count(),
        required: cfg.m - cfg.b + 1,
        min_annulus_count: hits.iter().map(|t| t.min_count).min(),
    })
}
