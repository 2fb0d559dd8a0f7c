//! Sparse Z2 boundary matrix and its reduction.
//!
//! Columns are sorted lists of row indices; adding one column to another is a
//! sorted symmetric difference. Two reduction schemes are provided:
//!
//! * [`ReductionMatrix::reduce_standard`] – left-to-right column additions,
//!   one column at a time.
//! * [`ReductionMatrix::reduce_parallel`] – repeatedly computes the set of
//!   conflict-free additions `M(B)` from the current state and applies all of
//!   them at once, until the matrix is reduced.

use serde::{Deserialize, Serialize};

use crate::filtration::FilteredComplex;
use crate::par::*;

pub type Column = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionMatrix {
    columns: Vec<Column>,
    vertex_count: usize,
}

/// One column addition `column[target] += column[source]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Addition {
    pub source: usize,
    pub target: usize,
}

/// Sorted symmetric difference of two sorted index lists.
pub fn xor_sorted(a: &[u32], b: &[u32]) -> Column {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl ReductionMatrix {
    /// Boundary matrix of the 1-skeleton: `b` zero vertex columns followed by
    /// one column `{i, j}` per edge, in filtration order.
    pub fn from_complex(complex: &FilteredComplex) -> Self {
        let b = complex.vertex_count();
        let mut columns = Vec::with_capacity(b + complex.edges().len());
        columns.resize(b, Vec::new());
        columns.extend(
            complex
                .edges()
                .iter()
                .map(|e| vec![e.i.min(e.j) as u32, e.i.max(e.j) as u32]),
        );
        Self {
            columns,
            vertex_count: b,
        }
    }

    /// Arbitrary Z2 matrix; every column is sorted and deduplicated.
    pub fn from_columns(mut columns: Vec<Column>, vertex_count: usize) -> Self {
        for c in &mut columns {
            c.sort_unstable();
            let mut k = 0;
            // pairs of equal rows cancel over Z2
            let mut out = Vec::with_capacity(c.len());
            while k < c.len() {
                let mut run = 1;
                while k + run < c.len() && c[k + run] == c[k] {
                    run += 1;
                }
                if run % 2 == 1 {
                    out.push(c[k]);
                }
                k += run;
            }
            *c = out;
        }
        Self {
            columns,
            vertex_count,
        }
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Row index of the lowest one in column `col`, or `None` for a zero column.
    pub fn low(&self, col: usize) -> Option<usize> {
        self.columns[col].last().map(|&r| r as usize)
    }

    pub fn add(&mut self, source: usize, target: usize) {
        assert_ne!(source, target, "a column cannot be added to itself");
        self.columns[target] = xor_sorted(&self.columns[target], &self.columns[source]);
    }

    /// No two nonzero columns share a low.
    pub fn is_reduced(&self) -> bool {
        let rows = self.row_bound();
        let mut seen = vec![false; rows];
        for c in 0..self.columns.len() {
            if let Some(l) = self.low(c) {
                if std::mem::replace(&mut seen[l], true) {
                    return false;
                }
            }
        }
        true
    }

    /// `(low, column)` for every nonzero column, ordered by column.
    pub fn low_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.columns.len())
            .filter_map(|c| self.low(c).map(|l| (l, c)))
            .collect()
    }

    fn row_bound(&self) -> usize {
        self.columns
            .iter()
            .filter_map(|c| c.last())
            .map(|&r| r as usize + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn reduce_standard(&mut self) {
        let mut pivot_col: Vec<Option<usize>> = vec![None; self.row_bound()];
        for j in 0..self.columns.len() {
            while let Some(l) = self.low(j) {
                match pivot_col[l] {
                    Some(j0) => self.add(j0, j),
                    None => {
                        pivot_col[l] = Some(j);
                        break;
                    }
                }
            }
        }
    }

    /// The conflict-free addition set `M(B)`: for every row shared as low by
    /// two or more columns, the leftmost such column is added to each of the
    /// others. Sorted by target column; empty iff the matrix is reduced.
    pub fn addition_plan(&self) -> Vec<Addition> {
        let rows = self.row_bound();
        let mut first: Vec<Option<usize>> = vec![None; rows];
        let mut plan = Vec::new();
        for c in 0..self.columns.len() {
            if let Some(l) = self.low(c) {
                match first[l] {
                    Some(source) => plan.push(Addition { source, target: c }),
                    None => first[l] = Some(c),
                }
            }
        }
        plan
    }

    /// Applies a plan whose sources and targets are disjoint and whose targets
    /// are distinct. Additions read only source columns, which the plan leaves
    /// untouched, so they are computed concurrently from a consistent state.
    pub fn apply_plan(&mut self, plan: &[Addition]) {
        let columns = &self.columns;
        let updated: Vec<(usize, Column)> = plan
            .par_iter()
            .map(|a| (a.target, xor_sorted(&columns[a.target], &columns[a.source])))
            .collect();
        for (target, col) in updated {
            self.columns[target] = col;
        }
    }

    /// Iterates plan/apply until the plan is empty. Returns the number of
    /// iterations that performed additions.
    pub fn reduce_parallel(&mut self) -> usize {
        let mut iterations = 0;
        loop {
            let plan = self.addition_plan();
            if plan.is_empty() {
                return iterations;
            }
            self.apply_plan(&plan);
            iterations += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::build_vr;
    use crate::geometry::{Norm, PointCloud};

    fn path_matrix() -> ReductionMatrix {
        let cloud = PointCloud::new(vec![vec![0.0], vec![1.0], vec![3.0]], Norm::L1).unwrap();
        ReductionMatrix::from_complex(&build_vr(&cloud))
    }

    #[test]
    fn xor_cancels_shared_rows() {
        assert_eq!(xor_sorted(&[0, 2, 5], &[2, 3]), vec![0, 3, 5]);
        assert!(xor_sorted(&[1, 4], &[1, 4]).is_empty());
    }

    #[test]
    fn zero_matrix_stays_zero() {
        let mut m = ReductionMatrix::from_columns(vec![vec![]; 5], 5);
        let before = m.clone();
        m.reduce_standard();
        assert_eq!(m, before);
        assert_eq!(m.reduce_parallel(), 0);
        assert_eq!(m, before);
    }

    #[test]
    fn path_example_by_hand() {
        let mut m = path_matrix();
        assert_eq!(
            m.columns(),
            &[vec![], vec![], vec![], vec![0, 1], vec![1, 2], vec![0, 2]]
        );
        assert!(!m.is_reduced());
        m.reduce_standard();
        // {0,2} + {1,2} = {0,1}; then + {0,1} = 0
        assert_eq!(m.columns()[5], Vec::<u32>::new());
        assert_eq!(m.low_pairs(), vec![(1, 3), (2, 4)]);
        assert!(m.is_reduced());
    }

    #[test]
    fn parallel_matches_standard_on_path() {
        let mut seq = path_matrix();
        seq.reduce_standard();
        let mut par = path_matrix();
        let iterations = par.reduce_parallel();
        assert!(iterations >= 1);
        assert_eq!(par.low_pairs(), seq.low_pairs());
        assert!(par.is_reduced());
    }

    #[test]
    fn plan_is_empty_iff_reduced() {
        let mut m = path_matrix();
        assert!(!m.addition_plan().is_empty());
        m.reduce_standard();
        assert!(m.addition_plan().is_empty());
        assert_eq!(m.reduce_parallel(), 0);
    }

    #[test]
    fn duplicate_rows_cancel_on_construction() {
        let m = ReductionMatrix::from_columns(vec![vec![3, 1, 3, 3, 1]], 0);
        assert_eq!(m.columns()[0], vec![3]);
    }
}
