//! Heuristics and exact baselines on a finite metric.
//!
//! All routines take a [`Metric`] and refuse disconnected inputs (an
//! infinite distance anywhere) with [`HeuristicError::InfiniteDistance`].
//! Ties are broken by the lowest vertex index, or lexicographically for
//! pairs, so results are deterministic on crafted metrics.

mod kmedian;
mod matching;
mod tour;
mod two_opt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::Metric;

pub use kmedian::{exact_kmedian, exact_kmedian_with_cap, kmedian_cost, trivial_kmedian, DEFAULT_KMEDIAN_CAP};
pub use matching::{exact_matching, exact_matching_with_cap, greedy_matching, DEFAULT_MATCHING_CAP};
pub use tour::{exact_tsp, exact_tsp_with_cap, insertion_tour, nearest_neighbor_tour, InsertionRule, DEFAULT_TSP_CAP};
pub use two_opt::{is_two_opt_local_optimum, two_opt, two_opt_with, PivotRule, MIN_IMPROVEMENT};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeuristicError {
    #[error("perfect matching needs an even number of vertices, got {0}")]
    OddVertexCount(usize),
    #[error("metric has an infinite distance (disconnected graph)")]
    InfiniteDistance,
    #[error("n = {n} exceeds the exact-baseline cap {cap}")]
    SizeCapExceeded { n: usize, cap: usize },
    #[error("C(n, k) = {count} center sets exceed the enumeration cap {cap}")]
    TooManyCenterSets { count: u64, cap: u64 },
    #[error("need at least {needed} vertices, got {n}")]
    TooFewVertices { n: usize, needed: usize },
    #[error("center set is empty")]
    EmptyCenterSet,
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("k = {k} must lie in 1..={n}")]
    InvalidK { k: usize, n: usize },
    #[error("{0} is not a permutation of the vertices")]
    NotAPermutation(String),
}

fn require_finite(metric: &Metric) -> Result<(), HeuristicError> {
    if metric.all_finite() {
        Ok(())
    } else {
        Err(HeuristicError::InfiniteDistance)
    }
}

/// A perfect matching and its total distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    pub cost: f64,
}

impl Matching {
    fn from_pairs(metric: &Metric, mut pairs: Vec<(usize, usize)>) -> Self {
        for p in &mut pairs {
            *p = (p.0.min(p.1), p.0.max(p.1));
        }
        let cost = pairs.iter().map(|&(u, v)| metric.d(u, v)).sum();
        Matching { pairs, cost }
    }

    /// True iff every vertex appears in exactly one pair.
    pub fn is_perfect(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        for &(u, v) in &self.pairs {
            for w in [u, v] {
                if w >= n || seen[w] {
                    return false;
                }
                seen[w] = true;
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// A Hamiltonian cycle given by its visiting order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    pub order: Vec<usize>,
    pub cost: f64,
}

impl Tour {
    /// Validates that `order` is a permutation of `0..n` and computes the
    /// closed-cycle cost.
    pub fn new(metric: &Metric, order: Vec<usize>) -> Result<Self, HeuristicError> {
        let n = metric.n();
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&v| v >= n || std::mem::replace(&mut seen[v], true)) {
            return Err(HeuristicError::NotAPermutation(format!("{order:?}")));
        }
        Ok(Self::unchecked(metric, order))
    }

    pub fn identity(metric: &Metric) -> Self {
        Self::unchecked(metric, (0..metric.n()).collect())
    }

    fn unchecked(metric: &Metric, order: Vec<usize>) -> Self {
        let cost = tour_cost(metric, &order);
        Tour { order, cost }
    }
}

/// `sum d(order[i], order[i+1]) + d(last, first)`.
pub fn tour_cost(metric: &Metric, order: &[usize]) -> f64 {
    match order.len() {
        0 | 1 => 0.0,
        len => (0..len).map(|i| metric.d(order[i], order[(i + 1) % len])).sum(),
    }
}

/// Run of the 2-opt local search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoOptTrace {
    pub initial_cost: f64,
    pub final_tour: Tour,
    /// Number of applied improving exchanges.
    pub iterations: u64,
    /// Tour cost after each applied exchange.
    pub costs: Vec<f64>,
}

impl TwoOptTrace {
    /// True iff the initial cost followed by every recorded cost is
    /// strictly decreasing.
    pub fn strictly_decreasing(&self) -> bool {
        std::iter::once(&self.initial_cost).chain(&self.costs).collect::<Vec<_>>().windows(2).all(|w| w[1] < w[0])
    }
}

/// A set of `k` centers and the total distance of every vertex to its
/// nearest center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianSolution {
    pub centers: Vec<usize>,
    pub cost: f64,
}
