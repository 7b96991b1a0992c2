//! Graphs, seeded randomness, exponential edge weights and cut parameters.
//!
//! Vertices are `0..n` internally. The text file format and the CLI use
//! 1-based vertex labels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fmt::{g17, parse_f64};

/// Largest `n` accepted by [`cut_parameters_exact`] unless a caller raises it.
pub const DEFAULT_CUT_CAP: usize = 24;

/// Hard ceiling for the cut enumeration: vertex subsets are `u64` masks.
const MAX_CUT_CAP: usize = 40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    NoVertices,
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("edge probability {0} not in [0, 1]")]
    InvalidProbability(f64),
    #[error("weight {weight} on edge {{{u}, {v}}} is not a positive finite number")]
    InvalidWeight { u: usize, v: usize, weight: f64 },
    #[error("graph is disconnected; cut parameters are undefined")]
    DisconnectedGraph,
    #[error("cut parameters need at least two vertices")]
    TooFewVertices,
    #[error("n = {n} exceeds the size cap {cap}")]
    SizeCapExceeded { n: usize, cap: usize },
    #[error("requested the {requested} lightest edges but the graph has {available}")]
    NotEnoughEdges { requested: usize, available: usize },
    #[error("graph file line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Master seed with a deterministic split into labelled child streams.
///
/// `child(index, label)` mixes the master value, a trial index and an
/// FNV-1a hash of the label through SplitMix64. Every stream is a ChaCha8
/// generator seeded from the resulting 64-bit value, which makes draws
/// identical across platforms and independent of thread scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed {
    pub master: u64,
}

impl Seed {
    pub const fn new(master: u64) -> Self {
        Seed { master }
    }

    pub fn child(&self, index: u64, label: &str) -> Seed {
        let salted = splitmix64(self.master ^ fnv1a64(label.as_bytes()));
        Seed::new(splitmix64(salted.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))))
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.master)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xCBF2_9CE4_8422_2325, |h, &b| (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3))
}

/// Simple undirected graph. Edges are stored as `(u, v)` with `u < v`,
/// sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    /// Edge probability when the graph came from `G(n, p)`.
    p: Option<f64>,
}

impl Graph {
    /// Builds a graph from an edge list in any order and orientation.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::NoVertices);
        }
        let mut normalized = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }
        Ok(Graph { n, edges: normalized, p: None })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_probability(&self) -> Option<f64> {
        self.p
    }

    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.n * (self.n - 1) / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn is_connected(&self) -> bool {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    /// Number of edges with exactly one endpoint in `members`.
    pub fn cut_size(&self, members: &[bool]) -> usize {
        self.edges.iter().filter(|&&(u, v)| members[u] != members[v]).count()
    }

    /// Writes the `n m` / `u v` text format with 1-based labels.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            out.push_str(&format!("{} {}\n", u + 1, v + 1));
        }
        out
    }
}

/// `K_n`: every pair of distinct vertices is adjacent.
pub fn complete_graph(n: usize) -> Result<Graph, GraphError> {
    if n == 0 {
        return Err(GraphError::NoVertices);
    }
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    Ok(Graph { n, edges, p: None })
}

/// `G(n, p)`: pairs are visited in lexicographic order and each consumes
/// one uniform draw, kept iff the draw is below `p`.
pub fn generate_erdos_renyi(n: usize, p: f64, seed: Seed) -> Result<Graph, GraphError> {
    if n == 0 {
        return Err(GraphError::NoVertices);
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidProbability(p));
    }
    let mut rng = seed.rng();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph { n, edges, p: Some(p) })
}

/// A graph together with one positive weight per edge, aligned with
/// [`Graph::edges`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraph {
    graph: Graph,
    weights: Vec<f64>,
}

impl WeightedGraph {
    /// Attaches explicit weights; `weights[i]` belongs to `graph.edges()[i]`.
    pub fn new(graph: Graph, weights: Vec<f64>) -> Result<Self, GraphError> {
        assert_eq!(graph.edge_count(), weights.len(), "one weight per edge");
        for (&(u, v), &weight) in graph.edges().iter().zip(&weights) {
            if !(weight.is_finite() && weight > 0.0) {
                return Err(GraphError::InvalidWeight { u, v, weight });
            }
        }
        Ok(WeightedGraph { graph, weights })
    }

    /// Builds from `(u, v, w)` triples in any order.
    pub fn from_triples(n: usize, triples: &[(usize, usize, f64)]) -> Result<Self, GraphError> {
        let graph = Graph::new(n, triples.iter().map(|&(u, v, _)| (u, v)))?;
        let mut keyed: Vec<_> = triples.iter().map(|&(u, v, w)| ((u.min(v), u.max(v)), w)).collect();
        keyed.sort_by_key(|k| k.0);
        Self::new(graph, keyed.into_iter().map(|(_, w)| w).collect())
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn weighted_edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.graph.edges().iter().zip(&self.weights).map(|(&(u, v), &w)| (u, v, w))
    }

    /// Weighted variant of the file format: weights in the third column
    /// with 17 significant digits.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("{} {}\n", self.graph.n, self.weights.len());
        for (u, v, w) in self.weighted_edges() {
            out.push_str(&format!("{} {} {}\n", u + 1, v + 1, g17(w)));
        }
        out
    }
}

/// Draws i.i.d. Exp(1) weights by inverse transform `-ln(1 - u)`, one
/// uniform per edge in lexicographic edge order.
///
/// A draw of exactly `u = 0` would give weight zero; it is redrawn so every
/// weight is strictly positive.
pub fn draw_weights(graph: &Graph, seed: Seed) -> WeightedGraph {
    let mut rng = seed.rng();
    let weights = graph
        .edges()
        .iter()
        .map(|_| loop {
            let u: f64 = rng.random();
            let w = -(1.0 - u).ln();
            if w > 0.0 {
                break w;
            }
        })
        .collect();
    WeightedGraph { graph: graph.clone(), weights }
}

/// Parsed contents of a graph file. `weights` is present iff every edge
/// line had a third column.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFile {
    pub graph: Graph,
    pub weights: Option<WeightedGraph>,
}

pub fn parse_graph_file(text: &str) -> Result<GraphFile, GraphError> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let parse_err = |line: usize, message: &str| GraphError::Parse { line, message: message.to_string() };

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing `n m` header"))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 2 {
        return Err(parse_err(hline, "header must be `n m`"));
    }
    let n: usize = head[0].parse().map_err(|_| parse_err(hline, "bad vertex count"))?;
    let m: usize = head[1].parse().map_err(|_| parse_err(hline, "bad edge count"))?;

    let mut triples = Vec::with_capacity(m);
    let mut weighted = None;
    for (line, text) in lines {
        let cols: Vec<&str> = text.split_whitespace().collect();
        let has_weight = match cols.len() {
            2 => false,
            3 => true,
            _ => return Err(parse_err(line, "expected `u v` or `u v w`")),
        };
        if *weighted.get_or_insert(has_weight) != has_weight {
            return Err(parse_err(line, "mixed weighted and unweighted edge lines"));
        }
        let vertex = |s: &str| -> Result<usize, GraphError> {
            let label: usize = s.parse().map_err(|_| parse_err(line, "bad vertex label"))?;
            if label == 0 || label > n {
                return Err(parse_err(line, "vertex label outside 1..=n"));
            }
            Ok(label - 1)
        };
        let w = if has_weight { parse_f64(cols[2]).ok_or_else(|| parse_err(line, "bad weight"))? } else { f64::NAN };
        triples.push((vertex(cols[0])?, vertex(cols[1])?, w));
    }
    if triples.len() != m {
        return Err(parse_err(hline, "edge count does not match header"));
    }

    let graph = Graph::new(n, triples.iter().map(|&(u, v, _)| (u, v)))?;
    let weights = match weighted {
        Some(true) => Some(WeightedGraph::from_triples(n, &triples)?),
        _ => None,
    };
    Ok(GraphFile { graph, weights })
}

/// The pair `(alpha, beta)`: min and max of `|delta(U)| / (|U| (n - |U|))`
/// over nonempty proper vertex subsets `U`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutParameters {
    pub alpha: f64,
    pub beta: f64,
}

impl CutParameters {
    pub const COMPLETE: CutParameters = CutParameters { alpha: 1.0, beta: 1.0 };
}

/// Exact cut parameters with the default cap of [`DEFAULT_CUT_CAP`] vertices.
pub fn cut_parameters_exact(graph: &Graph) -> Result<CutParameters, GraphError> {
    cut_parameters_exact_with_cap(graph, DEFAULT_CUT_CAP)
}

/// Enumerates the `2^(n-1) - 1` subsets containing vertex 0 (each cut is
/// shared with its complement) in Gray-code order, so each step updates the
/// cut size from a single toggled vertex. Ratios are compared exactly as
/// integer fractions.
pub fn cut_parameters_exact_with_cap(graph: &Graph, cap: usize) -> Result<CutParameters, GraphError> {
    let n = graph.n();
    let cap = cap.min(MAX_CUT_CAP);
    if n < 2 {
        return Err(GraphError::TooFewVertices);
    }
    if n > cap {
        return Err(GraphError::SizeCapExceeded { n, cap });
    }
    if !graph.is_connected() {
        return Err(GraphError::DisconnectedGraph);
    }

    let mut nbr = vec![0u64; n];
    for &(u, v) in graph.edges() {
        nbr[u] |= 1 << v;
        nbr[v] |= 1 << u;
    }
    let deg: Vec<i64> = nbr.iter().map(|m| i64::from(m.count_ones())).collect();

    let mut members: u64 = 1;
    let mut cut = deg[0];
    // (numerator, denominator) of the current min and max ratios.
    let mut lo = (1u64, 0u64);
    let mut hi = (0u64, 1u64);
    let steps: u64 = 1 << (n - 1);
    for step in 0..steps {
        if step > 0 {
            let x = step.trailing_zeros() as usize + 1;
            let bit = 1u64 << x;
            let inside = i64::from((nbr[x] & members & !bit).count_ones());
            if members & bit == 0 {
                members |= bit;
                cut += deg[x] - 2 * inside;
            } else {
                members &= !bit;
                cut -= deg[x] - 2 * inside;
            }
        }
        let size = u64::from(members.count_ones());
        if size as usize == n {
            continue;
        }
        let num = cut as u64;
        let den = size * (n as u64 - size);
        if lo.1 == 0 || num * lo.1 < lo.0 * den {
            lo = (num, den);
        }
        if num * hi.1 > hi.0 * den {
            hi = (num, den);
        }
    }
    if lo.0 == 0 {
        return Err(GraphError::DisconnectedGraph);
    }
    Ok(CutParameters { alpha: lo.0 as f64 / lo.1 as f64, beta: hi.0 as f64 / hi.1 as f64 })
}

/// `S_m`: the sum of the `m` smallest edge weights.
pub fn sum_lightest_edges(wg: &WeightedGraph, m: usize) -> Result<f64, GraphError> {
    let available = wg.weights().len();
    if m > available {
        return Err(GraphError::NotEnoughEdges { requested: m, available });
    }
    let mut sorted = wg.weights().to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted[..m].iter().sum())
}
