use serde::{Deserialize, Serialize};

use super::{require_finite, tour_cost, HeuristicError, Tour, TwoOptTrace};
use crate::metric::Metric;

/// An exchange counts as improving only if it gains more than this.
pub const MIN_IMPROVEMENT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PivotRule {
    /// Apply the first improving exchange, resuming the scan after it.
    #[default]
    First,
    /// Apply the exchange with the largest gain over a full scan.
    Best,
}

/// Position pairs `(i, j)` whose tour edges `(t[i], t[i+1])` and
/// `(t[j], t[j+1])` are disjoint, in lexicographic order.
fn exchange_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 0..n.saturating_sub(1) {
        for j in i + 2..n {
            if !(i == 0 && j == n - 1) {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Gain of replacing `{t[i], t[i+1]}` and `{t[j], t[j+1]}` by
/// `{t[i], t[j]}` and `{t[i+1], t[j+1]}`.
fn gain(metric: &Metric, order: &[usize], i: usize, j: usize) -> f64 {
    let n = order.len();
    let (a, b, c, d) = (order[i], order[i + 1], order[j], order[(j + 1) % n]);
    metric.d(a, b) + metric.d(c, d) - metric.d(a, c) - metric.d(b, d)
}

/// 2-opt with first-improvement pivoting from `initial`.
pub fn two_opt(metric: &Metric, initial: &Tour) -> Result<TwoOptTrace, HeuristicError> {
    two_opt_with(metric, initial, PivotRule::First)
}

/// Runs 2-exchanges until none gains more than [`MIN_IMPROVEMENT`].
///
/// With [`PivotRule::First`] the pairs are scanned cyclically in
/// lexicographic order starting after the last applied exchange; the search
/// stops once a full cycle finds nothing.
pub fn two_opt_with(metric: &Metric, initial: &Tour, pivot: PivotRule) -> Result<TwoOptTrace, HeuristicError> {
    require_finite(metric)?;
    let initial = Tour::new(metric, initial.order.clone())?;
    let mut order = initial.order.clone();
    let pairs = exchange_pairs(order.len());
    let mut costs = Vec::new();

    match pivot {
        PivotRule::First => {
            let mut cursor = 0;
            let mut idle = 0;
            while idle < pairs.len() {
                let (i, j) = pairs[cursor];
                if gain(metric, &order, i, j) > MIN_IMPROVEMENT {
                    order[i + 1..=j].reverse();
                    costs.push(tour_cost(metric, &order));
                    idle = 0;
                } else {
                    idle += 1;
                }
                cursor = (cursor + 1) % pairs.len();
            }
        }
        PivotRule::Best => loop {
            let best = pairs.iter().map(|&(i, j)| (gain(metric, &order, i, j), i, j)).fold(
                None,
                |acc: Option<(f64, usize, usize)>, cur| match acc {
                    Some(a) if a.0 >= cur.0 => Some(a),
                    _ => Some(cur),
                },
            );
            match best {
                Some((g, i, j)) if g > MIN_IMPROVEMENT => {
                    order[i + 1..=j].reverse();
                    costs.push(tour_cost(metric, &order));
                }
                _ => break,
            }
        },
    }

    Ok(TwoOptTrace {
        initial_cost: initial.cost,
        iterations: costs.len() as u64,
        final_tour: Tour::unchecked(metric, order),
        costs,
    })
}

/// Full rescan: true iff no 2-exchange gains more than `tol`.
pub fn is_two_opt_local_optimum(metric: &Metric, tour: &Tour, tol: f64) -> bool {
    exchange_pairs(tour.order.len()).into_iter().all(|(i, j)| gain(metric, &tour.order, i, j) <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heuristics::exact_tsp;
    use approx::assert_abs_diff_eq;

    fn line() -> Metric {
        Metric::from_line(&[0.0, 1.1, 2.0, 4.5])
    }

    #[test]
    fn one_exchange_fixes_crossing() {
        let m = line();
        let start = Tour::new(&m, vec![0, 2, 1, 3]).unwrap();
        assert_abs_diff_eq!(start.cost, 10.8, epsilon = 1e-12);
        let trace = two_opt(&m, &start).unwrap();
        assert_eq!(trace.iterations, 1);
        assert_eq!(trace.final_tour.order, vec![0, 1, 2, 3]);
        assert_abs_diff_eq!(trace.final_tour.cost, 9.0, epsilon = 1e-12);
        assert!(trace.strictly_decreasing());
    }

    #[test]
    fn optimal_start_needs_no_iterations() {
        let m = Metric::from_line(&[0.0, 0.4, 1.7, 2.0, 3.3, 5.0]);
        let opt = exact_tsp(&m).unwrap();
        for pivot in [PivotRule::First, PivotRule::Best] {
            let trace = two_opt_with(&m, &opt, pivot).unwrap();
            assert_eq!(trace.iterations, 0);
            assert_eq!(trace.final_tour, opt);
        }
    }

    #[test]
    fn best_improvement_reaches_local_optimum() {
        let m = Metric::from_line(&[3.0, 0.0, 5.0, 1.0, 4.0, 2.0]);
        let trace = two_opt_with(&m, &Tour::identity(&m), PivotRule::Best).unwrap();
        assert!(trace.strictly_decreasing());
        assert!(is_two_opt_local_optimum(&m, &trace.final_tour, MIN_IMPROVEMENT));
    }

    #[test]
    fn tiny_tours_have_no_exchanges() {
        let m = Metric::from_line(&[0.0, 1.0, 3.0]);
        assert_eq!(two_opt(&m, &Tour::identity(&m)).unwrap().iterations, 0);
    }

    #[test]
    fn rejects_non_permutations() {
        let m = line();
        let bad = Tour { order: vec![0, 0, 1, 2], cost: 0.0 };
        assert!(matches!(two_opt(&m, &bad), Err(HeuristicError::NotAPermutation(_))));
    }
}
