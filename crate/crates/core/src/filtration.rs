//! Vietoris-Rips filtration truncated to vertices and edges.
//!
//! An edge `{i, j}` enters at radius `δ(z_i, z_j) / 2`; all vertices enter at
//! radius zero. Edges are totally ordered by distance, ties broken by `(i, j)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::PointCloud;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub eps: f64,
}

impl Edge {
    pub fn radius(&self) -> f64 {
        self.eps / 2.0
    }

    pub fn pair(&self) -> (usize, usize) {
        (self.i, self.j)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilteredComplex {
    vertex_count: usize,
    edges: Vec<Edge>,
}

/// The 1-skeleton present at a given radius.
#[derive(Debug, Clone, Copy)]
pub struct Skeleton<'a> {
    pub vertex_count: usize,
    pub edges: &'a [Edge],
}

impl FilteredComplex {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Edges in filtration order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn filtration_radii(&self) -> impl Iterator<Item = f64> + '_ {
        self.edges.iter().map(Edge::radius)
    }

    /// Vertices and exactly the edges with `eps / 2 <= r`.
    pub fn complex_at_radius(&self, r: f64) -> Result<Skeleton<'_>> {
        if r.is_nan() || r < 0.0 {
            return Err(invalid(format!("radius must be nonnegative, got {r}")));
        }
        let count = self.edges.partition_point(|e| e.radius() <= r);
        Ok(Skeleton {
            vertex_count: self.vertex_count,
            edges: &self.edges[..count],
        })
    }

    pub fn to_dump(&self) -> ComplexDump {
        ComplexDump {
            vertices: (0..self.vertex_count).collect(),
            edges: self.edges.iter().map(|e| (e.i, e.j, e.eps)).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_dump())?)
    }
}

/// JSON-friendly view of a complex: `{"vertices": [...], "edges": [[i, j, eps], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexDump {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize, f64)>,
}

pub fn build_vr(cloud: &PointCloud) -> FilteredComplex {
    let mut edges: Vec<Edge> = cloud
        .pair_distances()
        .into_iter()
        .map(|(i, j, eps)| Edge { i, j, eps })
        .collect();
    edges.sort_by(|a, b| a.eps.total_cmp(&b.eps).then((a.i, a.j).cmp(&(b.i, b.j))));
    FilteredComplex {
        vertex_count: cloud.len(),
        edges,
    }
}
