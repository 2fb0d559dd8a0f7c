//! Brute-force packings of the L1 annulus `{x : α ≤ ‖x‖₁ ≤ β}`, used to check
//! the metric-entropy bound from below.

/// Largest ε-separated subset of the 1-D annulus `[−β, −α] ∪ [α, β]`.
///
/// Exact: left-to-right greedy placement is optimal on a union of intervals.
/// Positions are computed as `start + k·ε` from each interval start, so
/// dyadic inputs are handled without accumulated rounding.
pub fn annulus_packing_1d(alpha: f64, beta: f64, eps: f64) -> usize {
    assert!(eps > 0.0 && alpha >= 0.0 && alpha <= beta);
    let intervals = [(-beta, -alpha), (alpha, beta)];
    let mut last = f64::NEG_INFINITY;
    let mut count = 0;
    for (lo, hi) in intervals {
        let start = lo.max(last + eps);
        let mut k = 0u64;
        loop {
            let x = start + k as f64 * eps;
            if x > hi {
                break;
            }
            // the two intervals share the point 0 when α = 0
            if x > last {
                count += 1;
                last = x;
            }
            k += 1;
        }
    }
    count
}

/// Greedy ε-separated subset of the 2-D L1 annulus over a candidate lattice
/// with spacing `eps / resolution`. A lower bound on the packing number.
pub fn greedy_packing_2d(alpha: f64, beta: f64, eps: f64, resolution: usize) -> usize {
    assert!(eps > 0.0 && alpha >= 0.0 && alpha <= beta && resolution >= 1);
    let step = eps / resolution as f64;
    let steps = (beta / step).floor() as i64;
    let mut chosen: Vec<(f64, f64)> = Vec::new();
    for ix in -steps..=steps {
        for iy in -steps..=steps {
            let (x, y) = (ix as f64 * step, iy as f64 * step);
            let r = x.abs() + y.abs();
            if r < alpha || r > beta {
                continue;
            }
            if chosen
                .iter()
                .all(|&(a, b)| (a - x).abs() + (b - y).abs() >= eps)
            {
                chosen.push((x, y));
            }
        }
    }
    chosen.len()
}
