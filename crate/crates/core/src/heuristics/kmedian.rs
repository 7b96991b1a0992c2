use itertools::Itertools;

use super::{require_finite, HeuristicError, MedianSolution};
use crate::metric::Metric;

/// Upper limit on `C(n, k)` for [`exact_kmedian`].
pub const DEFAULT_KMEDIAN_CAP: u64 = 1_000_000;

/// `sum_v min_{u in centers} d(v, u)`.
pub fn kmedian_cost(metric: &Metric, centers: &[usize]) -> f64 {
    (0..metric.n()).map(|v| centers.iter().map(|&u| metric.d(v, u)).fold(f64::INFINITY, f64::min)).sum()
}

/// Cost of a center set fixed without looking at the metric. The canonical
/// trivial heuristic uses `centers = 0..k`.
pub fn trivial_kmedian(metric: &Metric, centers: &[usize]) -> Result<MedianSolution, HeuristicError> {
    if centers.is_empty() {
        return Err(HeuristicError::EmptyCenterSet);
    }
    let n = metric.n();
    if let Some(&vertex) = centers.iter().find(|&&c| c >= n) {
        return Err(HeuristicError::VertexOutOfRange { vertex, n });
    }
    require_finite(metric)?;
    let mut centers = centers.to_vec();
    centers.sort_unstable();
    centers.dedup();
    let cost = kmedian_cost(metric, &centers);
    Ok(MedianSolution { centers, cost })
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (1..=k).fold(1u64, |acc, i| acc.saturating_mul(n - k + i) / i)
}

/// Optimal `k`-median by enumerating all `C(n, k)` center sets in
/// lexicographic order; the first optimum wins ties.
pub fn exact_kmedian(metric: &Metric, k: usize) -> Result<MedianSolution, HeuristicError> {
    exact_kmedian_with_cap(metric, k, DEFAULT_KMEDIAN_CAP)
}

pub fn exact_kmedian_with_cap(metric: &Metric, k: usize, cap: u64) -> Result<MedianSolution, HeuristicError> {
    let n = metric.n();
    if k == 0 || k > n {
        return Err(HeuristicError::InvalidK { k, n });
    }
    let count = binomial(n as u64, k as u64);
    if count > cap {
        return Err(HeuristicError::TooManyCenterSets { count, cap });
    }
    require_finite(metric)?;
    let mut best = MedianSolution { centers: Vec::new(), cost: f64::INFINITY };
    for centers in (0..n).combinations(k) {
        let cost = kmedian_cost(metric, &centers);
        if cost < best.cost {
            best = MedianSolution { centers, cost };
        }
    }
    Ok(best)
}
