#![allow(dead_code)]

use proptest::prelude::*;
use topocon::{Norm, PointCloud};

pub fn norm_strategy() -> impl Strategy<Value = Norm> {
    prop_oneof![Just(Norm::L1), Just(Norm::L2)]
}

/// Clouds with generic real coordinates.
pub fn generic_cloud(max_b: usize, max_n: usize) -> impl Strategy<Value = PointCloud> {
    (2..=max_b, 1..=max_n, norm_strategy()).prop_flat_map(|(b, n, norm)| {
        prop::collection::vec(-10.0f64..10.0, b * n)
            .prop_map(move |data| PointCloud::from_flat(data, n, norm).unwrap())
    })
}

/// Clouds on a small integer lattice: lots of exact distance ties and
/// coincident points.
pub fn lattice_cloud(max_b: usize, max_n: usize) -> impl Strategy<Value = PointCloud> {
    (2..=max_b, 1..=max_n, norm_strategy()).prop_flat_map(|(b, n, norm)| {
        prop::collection::vec(0i32..3, b * n).prop_map(move |data| {
            PointCloud::from_flat(data.into_iter().map(f64::from).collect(), n, norm).unwrap()
        })
    })
}

pub fn any_cloud(max_b: usize, max_n: usize) -> impl Strategy<Value = PointCloud> {
    prop_oneof![
        3 => generic_cloud(max_b, max_n),
        1 => lattice_cloud(max_b, max_n),
    ]
}

/// MST edge weights by Prim's algorithm on the dense distance matrix,
/// sorted ascending. Shares nothing with the filtration code beyond the
/// distance function.
pub fn prim_weights(cloud: &PointCloud) -> Vec<f64> {
    let b = cloud.len();
    let mut in_tree = vec![false; b];
    let mut best = vec![f64::INFINITY; b];
    best[0] = 0.0;
    let mut weights = Vec::with_capacity(b - 1);
    for step in 0..b {
        let u = (0..b)
            .filter(|&v| !in_tree[v])
            .min_by(|&x, &y| best[x].total_cmp(&best[y]))
            .unwrap();
        in_tree[u] = true;
        if step > 0 {
            weights.push(best[u]);
        }
        for v in 0..b {
            if !in_tree[v] {
                let d = cloud.distance(u, v);
                if d < best[v] {
                    best[v] = d;
                }
            }
        }
    }
    weights.sort_by(f64::total_cmp);
    weights
}

/// Dense Z2 column as a bitset (at most 128 rows).
pub fn bits(col: &[u32]) -> u128 {
    col.iter().fold(0u128, |acc, &r| acc ^ (1u128 << r))
}

/// Whether `target` lies in the Z2 span of `basis`.
pub fn in_span(basis: &[u128], target: u128) -> bool {
    let mut pivots: Vec<u128> = Vec::new();
    for &v in basis {
        let mut v = v;
        for &p in &pivots {
            v = v.min(v ^ p);
        }
        if v != 0 {
            pivots.push(v);
            pivots.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    let mut t = target;
    for &p in &pivots {
        t = t.min(t ^ p);
    }
    t == 0
}

/// AUC by counting wins and half-ties over every positive/negative pair.
pub fn auc_pairwise(pos: &[f64], neg: &[f64]) -> f64 {
    let mut twice = 0u64;
    for p in pos {
        for n in neg {
            twice += if p > n {
                2
            } else if p == n {
                1
            } else {
                0
            };
        }
    }
    twice as f64 / (2 * pos.len() * neg.len()) as f64
}
