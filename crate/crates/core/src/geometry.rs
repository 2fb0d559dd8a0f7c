//! Points, norms and pairwise distances.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::par::*;

/// Default absolute tolerance for judging two distances equal.
pub const DEFAULT_TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    #[default]
    L1,
    L2,
}

impl Norm {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        match self {
            Norm::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            Norm::L2 => a
                .iter()
                .zip(b)
                .map(|(x, y)| {
                    let d = x - y;
                    d * d
                })
                .sum::<f64>()
                .sqrt(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
        }
    }
}

impl std::str::FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Norm::L1),
            "l2" => Ok(Norm::L2),
            other => Err(invalid(format!(
                "unknown norm '{other}' (expected l1 or l2)"
            ))),
        }
    }
}

impl std::fmt::Display for Norm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// An ordered, non-empty set of points in R^n equipped with a p-norm.
///
/// Points are stored row-major; point `i` keeps index `i` for the lifetime of
/// the cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    data: Vec<f64>,
    norm: Norm,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>, norm: Norm) -> Result<Self> {
        let dim = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| invalid("point cloud must contain at least one point"))?;
        let mut data = Vec::with_capacity(points.len() * dim);
        for (row, p) in points.into_iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                    row,
                });
            }
            data.extend(p);
        }
        Self::from_flat(data, dim, norm)
    }

    pub fn from_flat(data: Vec<f64>, dim: usize, norm: Norm) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("points must have dimension >= 1"));
        }
        if data.is_empty() {
            return Err(invalid("point cloud must contain at least one point"));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(invalid(format!(
                "flat buffer of length {} is not a multiple of dimension {dim}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!(
                "non-finite coordinate at point {}, axis {}",
                pos / dim,
                pos % dim
            )));
        }
        Ok(Self { dim, data, norm })
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn with_norm(mut self, norm: Norm) -> Self {
        self.norm = norm;
        self
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// Mutable coordinate access; the caller keeps the values finite.
    pub fn coord_mut(&mut self, i: usize, axis: usize) -> &mut f64 {
        &mut self.data[i * self.dim + axis]
    }

    /// Distance between points `i` and `j`. Symmetric bit-for-bit.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.norm.distance(self.point(i), self.point(j))
    }

    /// All `b(b-1)/2` pairs `(i, j, distance)` with `i < j`, in lexicographic
    /// order of `(i, j)`.
    pub fn pair_distances(&self) -> Vec<(usize, usize, f64)> {
        let b = self.len();
        (0..b)
            .into_par_iter()
            .map(|i| {
                ((i + 1)..b)
                    .map(|j| (i, j, self.distance(i, j)))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    }

    /// Sub-cloud made of the given indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            data.extend_from_slice(self.point(i));
        }
        Self {
            dim: self.dim,
            data,
            norm: self.norm,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|v| v * factor).collect(),
            norm: self.norm,
        }
    }

    pub fn translated(&self, offset: &[f64]) -> Self {
        assert_eq!(offset.len(), self.dim);
        let mut data = self.data.clone();
        for row in data.chunks_exact_mut(self.dim) {
            for (v, o) in row.iter_mut().zip(offset) {
                *v += o;
            }
        }
        Self {
            dim: self.dim,
            data,
            norm: self.norm,
        }
    }
}

/// The strictly increasing sequence of distinct pairwise-distance values,
/// each with the index pairs that realise it.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DistanceSequence {
    pub values: Vec<f64>,
    pub pairs_by_value: Vec<Vec<(usize, usize)>>,
}

impl DistanceSequence {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Smallest gap between consecutive distinct values (`+inf` with fewer
    /// than two values).
    pub fn min_gap(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Distinct pairwise distances sorted ascending. Values are grouped by exact
/// float equality; clouds with fewer than two points give an empty sequence.
pub fn pairwise_distances(cloud: &PointCloud) -> DistanceSequence {
    let mut pairs = cloud.pair_distances();
    pairs.sort_by(|a, b| a.2.total_cmp(&b.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    let mut seq = DistanceSequence::default();
    for (i, j, d) in pairs {
        if seq.values.last() == Some(&d) {
            seq.pairs_by_value.last_mut().unwrap().push((i, j));
        } else {
            seq.values.push(d);
            seq.pairs_by_value.push(vec![(i, j)]);
        }
    }
    seq
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct UniquenessReport {
    pub unique: bool,
    /// Every pair of index pairs whose distances lie within the tolerance of
    /// each other (directly or through a chain of near-equal values).
    pub collisions: Vec<((usize, usize), (usize, usize))>,
}

impl UniquenessReport {
    /// Index pairs involved in at least one collision, sorted.
    pub fn colliding_pairs(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self.collisions.iter().flat_map(|&(a, b)| [a, b]).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

pub fn distances_unique(cloud: &PointCloud, tolerance: f64) -> UniquenessReport {
    let mut pairs = cloud.pair_distances();
    pairs.sort_by(|a, b| a.2.total_cmp(&b.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    let mut collisions = Vec::new();
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end].2 - pairs[end - 1].2 <= tolerance {
            end += 1;
        }
        let group = &pairs[start..end];
        for (k, a) in group.iter().enumerate() {
            for c in &group[k + 1..] {
                collisions.push(((a.0, a.1), (c.0, c.1)));
            }
        }
        start = end;
    }
    UniquenessReport {
        unique: collisions.is_empty(),
        collisions,
    }
}
