use std::time::Instant;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{persistence_unionfind, reduce, Engine};
use crate::error::{Error, Result};
use crate::filtration::build_vr;
use crate::geometry::{Norm, PointCloud};
use crate::rng;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub dim: usize,
    pub repetitions: usize,
    pub norm: Norm,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![32, 64, 128],
            dim: 10,
            repetitions: 10,
            norm: Norm::L1,
            seed: 0,
        }
    }
}

/// Mean wall time of one engine at one size. Times include building the
/// Rips complex.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchRow {
    pub size: usize,
    pub engine: Engine,
    pub trials: usize,
    pub mean_seconds: f64,
    /// Plan/apply rounds of the parallel engine (zero for the others).
    pub max_iterations: usize,
    pub mean_iterations: f64,
}

pub fn gaussian_cloud(b: usize, dim: usize, norm: Norm, rng: &mut rng::Rng) -> Result<PointCloud> {
    let data: Vec<f64> = (0..b * dim)
        .map(|_| StandardNormal.sample(&mut *rng))
        .collect();
    PointCloud::from_flat(data, dim, norm)
}

/// Times the sequential and parallel reductions on standard-normal clouds and
/// cross-checks both against the union-find engine on every trial.
pub fn bench_reduction(config: &BenchConfig) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    if config.repetitions == 0 {
        return Ok(rows);
    }
    for (k, &b) in config.sizes.iter().enumerate() {
        let mut rng = rng::seeded(rng::derive_seed(config.seed, k as u64));
        let mut seconds = [0.0f64; 2];
        let mut iterations = Vec::with_capacity(config.repetitions);
        for trial in 0..config.repetitions {
            let cloud = gaussian_cloud(b, config.dim, config.norm, &mut rng)?;
            let reference = persistence_unionfind(&build_vr(&cloud));

            let t = Instant::now();
            let standard = reduce(&build_vr(&cloud), Engine::Standard);
            seconds[0] += t.elapsed().as_secs_f64();

            let t = Instant::now();
            let parallel = reduce(&build_vr(&cloud), Engine::Parallel);
            seconds[1] += t.elapsed().as_secs_f64();

            for (name, got) in [("standard", &standard), ("parallel", &parallel)] {
                if got.barcode != reference {
                    return Err(Error::EngineMismatch(format!(
                        "{name} reduction disagrees with union-find (b = {b}, trial {trial})"
                    )));
                }
            }
            log::debug!(
                "b = {b}, trial {trial}: parallel reduction took {} iterations",
                parallel.iterations
            );
            iterations.push(parallel.iterations);
        }
        let n = config.repetitions as f64;
        rows.push(BenchRow {
            size: b,
            engine: Engine::Standard,
            trials: config.repetitions,
            mean_seconds: seconds[0] / n,
            max_iterations: 0,
            mean_iterations: 0.0,
        });
        rows.push(BenchRow {
            size: b,
            engine: Engine::Parallel,
            trials: config.repetitions,
            mean_seconds: seconds[1] / n,
            max_iterations: iterations.iter().copied().max().unwrap_or(0),
            mean_iterations: iterations.iter().sum::<usize>() as f64 / n,
        });
    }
    Ok(rows)
}
