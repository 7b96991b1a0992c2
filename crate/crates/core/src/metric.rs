//! Shortest-path metrics and the structural objects built on them.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds;
use crate::fmt::{g17, parse_f64};
use crate::graphs::{Graph, WeightedGraph};

/// Absolute slack for the triangle inequality and the `4 * delta`
/// diameter check: sums of at most `n` weights of order one.
pub const METRIC_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("distance table has {len} entries, expected {n}^2")]
    Shape { n: usize, len: usize },
    #[error("d({u}, {v}) = {value} is not a valid distance")]
    InvalidEntry { u: usize, v: usize, value: f64 },
    #[error("d({u}, {v}) != d({v}, {u})")]
    Asymmetric { u: usize, v: usize },
    #[error("metric file: {0}")]
    Parse(String),
}

/// Symmetric `n x n` distance table. Pairs in different components hold
/// `f64::INFINITY`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    n: usize,
    dist: Vec<f64>,
}

#[derive(Clone, Copy, PartialEq)]
struct HeapKey(f64);

impl Eq for HeapKey {}

impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

fn dijkstra(adj: &[Vec<(usize, f64)>], source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Reverse((HeapKey(0.0), source)));
    while let Some(Reverse((HeapKey(d), u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((HeapKey(nd), v)));
            }
        }
    }
    dist
}

/// All-pairs shortest paths, one heap-based Dijkstra run per source.
///
/// Only the row of the smaller endpoint is kept for each pair, so the table
/// is exactly symmetric even though the two directions may sum the same
/// path in a different order.
pub fn build_metric(wg: &WeightedGraph) -> Metric {
    let n = wg.n();
    let mut adj = vec![Vec::new(); n];
    for (u, v, w) in wg.weighted_edges() {
        adj[u].push((v, w));
        adj[v].push((u, w));
    }
    let mut dist = vec![0.0; n * n];
    for u in 0..n {
        let row = dijkstra(&adj, u);
        for v in u + 1..n {
            dist[u * n + v] = row[v];
            dist[v * n + u] = row[v];
        }
    }
    Metric { n, dist }
}

impl Metric {
    /// Wraps an explicit row-major distance table after checking shape,
    /// zero diagonal, nonnegativity and symmetry.
    pub fn from_matrix(n: usize, dist: Vec<f64>) -> Result<Self, MetricError> {
        if dist.len() != n * n {
            return Err(MetricError::Shape { n, len: dist.len() });
        }
        for u in 0..n {
            for v in 0..n {
                let value = dist[u * n + v];
                if value.is_nan() || value < 0.0 || (u == v && value != 0.0) {
                    return Err(MetricError::InvalidEntry { u, v, value });
                }
                if value != dist[v * n + u] {
                    return Err(MetricError::Asymmetric { u, v });
                }
            }
        }
        Ok(Metric { n, dist })
    }

    /// Distances between points on a line, `d(i, j) = |x_i - x_j|`.
    pub fn from_line(positions: &[f64]) -> Self {
        let n = positions.len();
        let dist = positions.iter().flat_map(|a| positions.iter().map(move |b| (a - b).abs())).collect();
        Metric { n, dist }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self, u: usize, v: usize) -> f64 {
        self.dist[u * self.n + v]
    }

    pub fn row(&self, u: usize) -> &[f64] {
        &self.dist[u * self.n..(u + 1) * self.n]
    }

    pub fn all_finite(&self) -> bool {
        self.dist.iter().all(|d| d.is_finite())
    }

    /// Counts violated metric axioms: nonzero diagonal, asymmetry and
    /// triangle violations beyond `tol`. Infinity absorbs in sums.
    pub fn axiom_violations(&self, tol: f64) -> usize {
        let n = self.n;
        let mut bad = 0;
        for u in 0..n {
            if self.d(u, u) != 0.0 {
                bad += 1;
            }
            for v in 0..n {
                if self.d(u, v) != self.d(v, u) {
                    bad += 1;
                }
                for s in 0..n {
                    let via = self.d(u, s) + self.d(s, v);
                    if self.d(u, v) > via + tol {
                        bad += 1;
                    }
                }
            }
        }
        bad
    }

    /// Export format: `n`, then `n` lines of `n` distances (17 significant
    /// digits, `inf` for unreachable pairs).
    pub fn to_file_string(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for u in 0..self.n {
            let line: Vec<String> = self.row(u).iter().map(|&d| g17(d)).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, MetricError> {
        let mut tokens = text.split_whitespace();
        let n: usize = tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| MetricError::Parse("missing vertex count".into()))?;
        let dist = tokens
            .map(|t| parse_f64(t).ok_or_else(|| MetricError::Parse(format!("bad distance `{t}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        Metric::from_matrix(n, dist)
    }
}

/// Largest pairwise distance; infinite iff the graph is disconnected.
pub fn diameter(metric: &Metric) -> f64 {
    metric.dist.iter().copied().fold(0.0, f64::max)
}

/// `B_delta(v) = { u : d(u, v) <= delta }`, in increasing vertex order.
pub fn ball(metric: &Metric, v: usize, delta: f64) -> Vec<usize> {
    (0..metric.n()).filter(|&u| metric.d(v, u) <= delta).collect()
}

/// Growth of the ball around `center`.
///
/// `tau[k - 1]` is the distance to the `k`-th closest vertex (the center
/// itself is first) and `chi[k - 1]` the number of graph edges leaving the
/// `k` closest vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauProfile {
    pub center: usize,
    pub tau: Vec<f64>,
    pub chi: Vec<usize>,
    pub order: Vec<usize>,
}

impl TauProfile {
    /// `tau_k(v)` with 1-based `k`.
    pub fn tau_k(&self, k: usize) -> f64 {
        self.tau[k - 1]
    }

    /// `chi_k(v)` with 1-based `k`, `k < n`.
    pub fn chi_k(&self, k: usize) -> usize {
        self.chi[k - 1]
    }
}

/// Sorts vertices by distance from `v` (ties by index) and tracks the cut
/// of each prefix incrementally on `graph`.
pub fn tau_profile(metric: &Metric, graph: &Graph, v: usize) -> TauProfile {
    let n = metric.n();
    assert_eq!(n, graph.n(), "metric and graph disagree on n");
    let row = metric.row(v);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));

    let adj = graph.adjacency();
    let mut inside = vec![false; n];
    let mut cut: isize = 0;
    let mut chi = Vec::with_capacity(n.saturating_sub(1));
    for &x in order.iter().take(n.saturating_sub(1)) {
        let internal = adj[x].iter().filter(|&&y| inside[y]).count() as isize;
        cut += adj[x].len() as isize - 2 * internal;
        inside[x] = true;
        chi.push(cut as usize);
    }
    let tau = order.iter().map(|&u| row[u]).collect();
    TauProfile { center: v, tau, chi, order }
}

/// Clusters of diameter at most `4 * delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub delta: f64,
    pub s_delta: f64,
    pub clusters: Vec<Vec<usize>>,
    pub diameters: Vec<f64>,
    /// `dense[v]` iff `|B_delta(v)| >= s_delta`.
    pub dense: Vec<bool>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn max_diameter(&self) -> f64 {
        self.diameters.iter().copied().fold(0.0, f64::max)
    }
}

fn set_diameter(metric: &Metric, members: &[usize]) -> f64 {
    let mut best = 0.0f64;
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i + 1..] {
            best = best.max(metric.d(a, b));
        }
    }
    best
}

/// Partition into clusters of diameter at most `4 * delta`.
///
/// Sparse vertices (ball smaller than `s_delta`) become singletons. Among
/// dense vertices a maximal set with pairwise disjoint balls is picked
/// greedily by index; each such center starts a cluster with the dense
/// vertices of its ball, and every remaining dense vertex joins the
/// lowest-index center whose ball meets its own.
pub fn cluster_partition(metric: &Metric, delta: f64, alpha: f64) -> Partition {
    let n = metric.n();
    let (s_delta, _) = bounds::cluster_scale(delta, n, alpha);
    let balls: Vec<Vec<bool>> = (0..n).map(|v| metric.row(v).iter().map(|&d| d <= delta).collect()).collect();
    let ball_size: Vec<usize> = balls.iter().map(|b| b.iter().filter(|&&x| x).count()).collect();
    let dense: Vec<bool> = ball_size.iter().map(|&s| s as f64 >= s_delta).collect();
    let meets = |a: usize, b: usize| balls[a].iter().zip(&balls[b]).any(|(&x, &y)| x && y);

    let mut centers: Vec<usize> = Vec::new();
    for v in (0..n).filter(|&v| dense[v]) {
        if centers.iter().all(|&c| !meets(c, v)) {
            centers.push(v);
        }
    }

    let mut owner: Vec<Option<usize>> = vec![None; n];
    for (slot, &c) in centers.iter().enumerate() {
        for u in (0..n).filter(|&u| dense[u] && balls[c][u]) {
            owner[u] = Some(slot);
        }
    }
    for v in (0..n).filter(|&v| dense[v]) {
        if owner[v].is_none() {
            let slot =
                centers.iter().position(|&c| meets(c, v)).expect("maximality: some center ball meets every dense ball");
            owner[v] = Some(slot);
        }
    }

    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); centers.len()];
    for v in 0..n {
        match owner[v] {
            Some(slot) => clusters[slot].push(v),
            None => clusters.push(vec![v]),
        }
    }
    let diameters = clusters.iter().map(|c| set_diameter(metric, c)).collect();
    Partition { delta, s_delta, clusters, diameters, dense }
}
