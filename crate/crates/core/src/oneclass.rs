//! Count-based one-class models over branched latent codes.
//!
//! A model stores the per-branch latent slices of `m` training samples. The
//! score of a query is the number of stored slices, summed over branches,
//! within L1 distance `η` of the query's slice. Scores are unnormalised
//! integers; AUC is rank based, so normalising would not change it.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::Norm;
use crate::io;
use crate::neural::{slice, BranchedAutoencoder, Matrix};
use crate::par::*;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneClassModel {
    pub branches: usize,
    pub branch_dim: usize,
    pub eta: f64,
    /// One `m × D` row-major block per branch.
    pub stored: Vec<Vec<f64>>,
}

impl OneClassModel {
    /// Model from precomputed latent codes (`m × B·D`).
    pub fn from_latents(
        latent: &Matrix,
        branches: usize,
        branch_dim: usize,
        eta: f64,
    ) -> Result<Self> {
        if latent.rows() == 0 {
            return Err(invalid("one-class model needs at least one sample"));
        }
        if latent.cols() != branches * branch_dim {
            return Err(invalid(format!(
                "latent width {} does not match {branches} x {branch_dim}",
                latent.cols()
            )));
        }
        let stored = (0..branches)
            .map(|j| slice(latent, j, branch_dim).into_vec())
            .collect();
        Ok(Self {
            branches,
            branch_dim,
            eta,
            stored,
        })
    }

    pub fn sample_count(&self) -> usize {
        self.stored.first().map_or(0, |s| s.len() / self.branch_dim)
    }

    /// Score of a single latent code (length `B·D`).
    pub fn score_latent(&self, z: &[f64]) -> usize {
        self.score_latent_with_radius(z, self.eta)
    }

    pub fn score_latent_with_radius(&self, z: &[f64], radius: f64) -> usize {
        let d = self.branch_dim;
        self.stored
            .iter()
            .enumerate()
            .map(|(j, block)| {
                let query = &z[j * d..(j + 1) * d];
                block
                    .chunks_exact(d)
                    .filter(|s| Norm::L1.distance(query, s) <= radius)
                    .count()
            })
            .sum()
    }

    pub fn score_latents(&self, latent: &Matrix) -> Result<Vec<usize>> {
        if latent.cols() != self.branches * self.branch_dim {
            return Err(invalid("query latent width does not match the model"));
        }
        Ok((0..latent.rows())
            .into_par_iter()
            .map(|r| self.score_latent(latent.row(r)))
            .collect())
    }

    pub fn score(&self, encoder: &BranchedAutoencoder, queries: &Matrix) -> Result<Vec<usize>> {
        self.score_latents(&encoder.encode(queries)?)
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer(file, self)?;
        Ok(())
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let model: Self = serde_json::from_reader(std::io::BufReader::new(io::open(path)?))?;
        let expected = model.sample_count() * model.branch_dim;
        if model.branch_dim == 0
            || model.stored.len() != model.branches
            || model
                .stored
                .iter()
                .any(|s| s.len() != expected || s.is_empty())
        {
            return Err(invalid("inconsistent one-class model file"));
        }
        Ok(model)
    }
}

/// Encodes `samples` once and stores their per-branch slices. `eta` is the
/// radius the encoder was trained for.
pub fn fit(encoder: &BranchedAutoencoder, samples: &Matrix, eta: f64) -> Result<OneClassModel> {
    if samples.cols() != encoder.input_dim() {
        return Err(invalid(format!(
            "samples have {} columns, encoder expects {}",
            samples.cols(),
            encoder.input_dim()
        )));
    }
    OneClassModel::from_latents(
        &encoder.encode(samples)?,
        encoder.branches(),
        encoder.branch_dim(),
        eta,
    )
}

/// Mann-Whitney AUC with midranks for ties.
pub fn evaluate_auc(positive: &[f64], negative: &[f64]) -> Result<f64> {
    if positive.is_empty() || negative.is_empty() {
        return Err(invalid(
            "AUC needs at least one positive and one negative score",
        ));
    }
    if positive.iter().chain(negative).any(|s| s.is_nan()) {
        return Err(invalid("scores must not be NaN"));
    }
    let mut all: Vec<(f64, bool)> = positive
        .iter()
        .map(|&s| (s, true))
        .chain(negative.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Sum of positive ranks, doubled so that midranks stay integral.
    let mut rank_sum2: u128 = 0;
    let mut start = 0;
    while start < all.len() {
        let mut end = start + 1;
        while end < all.len() && all[end].0 == all[start].0 {
            end += 1;
        }
        // ranks start+1 ..= end; midrank·2 = start + 1 + end
        let mid2 = (start + 1 + end) as u128;
        let pos = all[start..end].iter().filter(|x| x.1).count() as u128;
        rank_sum2 += mid2 * pos;
        start = end;
    }
    let (np, nn) = (positive.len() as u128, negative.len() as u128);
    // 2U = 2R − np(np + 1)
    let u2 = rank_sum2 - np * (np + 1);
    Ok(u2 as f64 / (2 * np * nn) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassAuc {
    pub class: i64,
    /// AUC of each run, in run order.
    pub runs: Vec<f64>,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneVsAllReport {
    pub classes: Vec<ClassAuc>,
    /// Classes with fewer than `m` samples.
    pub skipped: Vec<i64>,
    pub mean_auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneVsAllConfig {
    pub m: usize,
    pub eta: f64,
    pub runs: usize,
    pub seed: u64,
}

/// One-vs-all protocol. For each class and run, `m` samples of the class
/// are drawn from `pool` to fit a model; the test set (`test`, or the rest
/// of `pool` when absent) is scored with class members labelled positive.
pub fn one_vs_all(
    encoder: &BranchedAutoencoder,
    pool: &Matrix,
    pool_labels: &[i64],
    test: Option<(&Matrix, &[i64])>,
    cfg: &OneVsAllConfig,
) -> Result<OneVsAllReport> {
    if pool.rows() != pool_labels.len() {
        return Err(invalid("feature and label counts differ"));
    }
    if cfg.m == 0 || cfg.runs == 0 {
        return Err(invalid("m and runs must be >= 1"));
    }
    let pool_latent = encoder.encode(pool)?;
    let test_latent = match test {
        Some((x, labels)) => {
            if x.rows() != labels.len() {
                return Err(invalid("test feature and label counts differ"));
            }
            Some((encoder.encode(x)?, labels))
        }
        None => None,
    };

    let mut by_class: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, &l) in pool_labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    let (eligible, skipped): (Vec<_>, Vec<_>) =
        by_class.iter().partition(|(_, rows)| rows.len() >= cfg.m);
    let skipped: Vec<i64> = skipped.into_iter().map(|(&c, _)| c).collect();
    for c in &skipped {
        log::warn!("class {c} has fewer than {} samples; skipped", cfg.m);
    }

    let (b, d) = (encoder.branches(), encoder.branch_dim());
    let classes = eligible
        .par_iter()
        .map(|&(&class, rows)| -> Result<ClassAuc> {
            let mut runs = Vec::with_capacity(cfg.runs);
            for run in 0..cfg.runs {
                let stream = (class as u64)
                    .wrapping_mul(1_000_003)
                    .wrapping_add(run as u64);
                let mut rng = rng::seeded(rng::derive_seed(cfg.seed, stream));
                let picked: Vec<usize> = index::sample(&mut rng, rows.len(), cfg.m)
                    .into_iter()
                    .map(|k| rows[k])
                    .collect();
                let model =
                    OneClassModel::from_latents(&pool_latent.select_rows(&picked), b, d, cfg.eta)?;
                let (mut pos, mut neg) = (Vec::new(), Vec::new());
                match &test_latent {
                    Some((latent, labels)) => {
                        for r in 0..latent.rows() {
                            let s = model.score_latent(latent.row(r)) as f64;
                            if labels[r] == class {
                                pos.push(s)
                            } else {
                                neg.push(s)
                            }
                        }
                    }
                    None => {
                        let mut held_out = vec![true; pool.rows()];
                        for &p in &picked {
                            held_out[p] = false;
                        }
                        for r in (0..pool.rows()).filter(|&r| held_out[r]) {
                            let s = model.score_latent(pool_latent.row(r)) as f64;
                            if pool_labels[r] == class {
                                pos.push(s)
                            } else {
                                neg.push(s)
                            }
                        }
                    }
                }
                runs.push(evaluate_auc(&pos, &neg)?);
            }
            let mean = runs.iter().sum::<f64>() / runs.len() as f64;
            Ok(ClassAuc { class, runs, mean })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    if classes.is_empty() {
        return Err(invalid(format!("no class has at least {} samples", cfg.m)));
    }
    let mean_auc = classes.iter().map(|c| c.mean).sum::<f64>() / classes.len() as f64;
    Ok(OneVsAllReport {
        classes,
        skipped,
        mean_auc,
    })
}
