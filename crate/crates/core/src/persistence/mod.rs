//! 0-dimensional persistent homology of the Rips 1-skeleton.
//!
//! Three engines produce the same [`Barcode`]: a union-find sweep over the
//! edges and the boundary-matrix reduction in its sequential and parallel
//! forms. Every finite bar is `(0, eps / 2)` and carries the edge that caused
//! the merge.

mod bench;
pub mod matrix;
pub mod unionfind;

use serde::{Deserialize, Serialize};

pub use bench::{bench_reduction, BenchConfig, BenchRow};
pub use matrix::{Addition, ReductionMatrix};

use crate::error::{invalid, Error, Result};
use crate::filtration::{build_vr, FilteredComplex};
use crate::geometry::PointCloud;
use unionfind::DisjointSets;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    #[default]
    UnionFind,
    Standard,
    Parallel,
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "union-find" | "unionfind" => Ok(Engine::UnionFind),
            "standard" => Ok(Engine::Standard),
            "parallel" => Ok(Engine::Parallel),
            other => Err(invalid(format!(
                "unknown engine '{other}' (expected union-find, standard or parallel)"
            ))),
        }
    }
}

/// A merge of two connected components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MergeEvent {
    /// Distance at which the merge happens.
    pub eps: f64,
    /// The edge `(i, j)`, `i < j`, whose insertion causes the merge.
    pub edge: (usize, usize),
    /// Eldest vertex of the component that dies; the row paired with the
    /// edge column in the reduced boundary matrix.
    pub killed: usize,
}

impl MergeEvent {
    pub fn death(&self) -> f64 {
        self.eps / 2.0
    }

    pub fn barcode_tuple(&self) -> (f64, f64) {
        (0.0, self.death())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Barcode {
    /// Finite bars in filtration order (ascending eps, then edge).
    pub events: Vec<MergeEvent>,
    /// Components that never die: one for any non-empty cloud.
    pub essential_count: usize,
}

impl Barcode {
    /// `(killed vertex, edge)` pairs in filtration order.
    pub fn pairing(&self) -> Vec<(usize, (usize, usize))> {
        self.events.iter().map(|e| (e.killed, e.edge)).collect()
    }

    pub fn merge_distances(&self) -> Vec<f64> {
        self.events.iter().map(|e| e.eps).collect()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// Union-find sweep over the edges in filtration order.
pub fn persistence_unionfind(complex: &FilteredComplex) -> Barcode {
    let b = complex.vertex_count();
    let mut sets = DisjointSets::new(b);
    let mut events = Vec::with_capacity(b.saturating_sub(1));
    for e in complex.edges() {
        if let Some(killed) = sets.union(e.i, e.j) {
            events.push(MergeEvent {
                eps: e.eps,
                edge: e.pair(),
                killed,
            });
            if events.len() + 1 == b {
                break;
            }
        }
    }
    Barcode {
        events,
        essential_count: usize::from(b > 0),
    }
}

/// Reads the barcode off a reduced boundary matrix of `complex`.
pub fn barcode_from_reduced(complex: &FilteredComplex, reduced: &ReductionMatrix) -> Barcode {
    let b = complex.vertex_count();
    let events = reduced
        .low_pairs()
        .into_iter()
        .filter(|&(_, col)| col >= b)
        .map(|(row, col)| {
            let e = complex.edges()[col - b];
            MergeEvent {
                eps: e.eps,
                edge: e.pair(),
                killed: row,
            }
        })
        .collect();
    Barcode {
        events,
        essential_count: usize::from(b > 0),
    }
}

/// Output of a matrix-reduction run.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub barcode: Barcode,
    pub matrix: ReductionMatrix,
    /// Plan/apply rounds for the parallel engine; zero for the others.
    pub iterations: usize,
}

pub fn reduce(complex: &FilteredComplex, engine: Engine) -> Reduction {
    let mut matrix = ReductionMatrix::from_complex(complex);
    let iterations = match engine {
        Engine::Parallel => matrix.reduce_parallel(),
        Engine::Standard | Engine::UnionFind => {
            matrix.reduce_standard();
            0
        }
    };
    Reduction {
        barcode: barcode_from_reduced(complex, &matrix),
        matrix,
        iterations,
    }
}

pub fn compute_barcode(complex: &FilteredComplex, engine: Engine) -> Barcode {
    match engine {
        Engine::UnionFind => persistence_unionfind(complex),
        Engine::Standard | Engine::Parallel => reduce(complex, engine).barcode,
    }
}

/// Barcode of a point cloud using the union-find engine.
pub fn barcode(cloud: &PointCloud) -> Barcode {
    persistence_unionfind(&build_vr(cloud))
}

/// The merging multiset as `(distance, causing edge)`, sorted by distance then
/// edge.
pub fn merge_set(barcode: &Barcode) -> Vec<(f64, (usize, usize))> {
    let mut out: Vec<_> = barcode.events.iter().map(|e| (e.eps, e.edge)).collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Norm;

    fn cloud(points: Vec<Vec<f64>>) -> PointCloud {
        PointCloud::new(points, Norm::L1).unwrap()
    }

    #[test]
    fn two_points() {
        let bc = barcode(&cloud(vec![vec![0.0, 0.0], vec![1.5, 1.0]]));
        assert_eq!(bc.events.len(), 1);
        assert_eq!(bc.events[0].eps, 2.5);
        assert_eq!(bc.events[0].edge, (0, 1));
        assert_eq!(bc.events[0].barcode_tuple(), (0.0, 1.25));
        assert_eq!(bc.essential_count, 1);
    }

    #[test]
    fn line_of_three() {
        let bc = barcode(&cloud(vec![vec![0.0], vec![1.0], vec![3.0]]));
        assert_eq!(merge_set(&bc), vec![(1.0, (0, 1)), (2.0, (1, 2))]);
        assert_eq!(bc.pairing(), vec![(1, (0, 1)), (2, (1, 2))]);
    }

    #[test]
    fn uniform_grid() {
        let h = 0.25;
        let bc = barcode(&cloud((0..9).map(|k| vec![k as f64 * h]).collect()));
        assert_eq!(bc.merge_distances(), vec![h; 8]);
    }

    #[test]
    fn single_point_has_only_essential_bar() {
        let bc = barcode(&cloud(vec![vec![1.0]]));
        assert!(bc.is_empty());
        assert_eq!(bc.essential_count, 1);
    }

    #[test]
    fn engines_agree_on_small_cloud() {
        let c = cloud(vec![
            vec![0.3, 1.2],
            vec![-0.7, 0.1],
            vec![2.2, -1.9],
            vec![0.05, 0.4],
            vec![1.1, 1.0],
        ]);
        let complex = build_vr(&c);
        let uf = compute_barcode(&complex, Engine::UnionFind);
        assert_eq!(uf, compute_barcode(&complex, Engine::Standard));
        assert_eq!(uf, compute_barcode(&complex, Engine::Parallel));
    }

    #[test]
    fn engine_names_parse() {
        assert_eq!("parallel".parse::<Engine>().unwrap(), Engine::Parallel);
        assert!("ripser".parse::<Engine>().is_err());
    }
}
