//! Brute-force oracles shared by the integration tests. Each one is written
//! from the definition, independently of the library's algorithms.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rsplab::graphs::{draw_weights, generate_erdos_renyi, Graph, Seed};
use rsplab::metric::{build_metric, Metric};

/// `(alpha, beta)` as floats by scanning every subset `S` with
/// `1 <= |S| <= n - 1`, not only those containing vertex 0.
pub fn cut_parameters_naive(graph: &Graph) -> (f64, f64) {
    let n = graph.n();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for mask in 1u64..(1u64 << n) - 1 {
        let inside: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
        let s = inside.iter().filter(|&&b| b).count();
        let crossing = graph.edges().iter().filter(|&&(u, v)| inside[u] != inside[v]).count();
        let ratio = crossing as f64 / (s * (n - s)) as f64;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    (lo, hi)
}

/// Minimum perfect matching cost by recursive enumeration: pair the first
/// free vertex with every other free vertex.
pub fn matching_brute_force(metric: &Metric) -> f64 {
    fn go(metric: &Metric, free: &mut Vec<usize>) -> f64 {
        if free.is_empty() {
            return 0.0;
        }
        let first = free.remove(0);
        let mut best = f64::INFINITY;
        for i in 0..free.len() {
            let partner = free.remove(i);
            best = best.min(metric.d(first, partner) + go(metric, free));
            free.insert(i, partner);
        }
        free.insert(0, first);
        best
    }
    go(metric, &mut (0..metric.n()).collect())
}

/// Optimal tour cost over all permutations fixing vertex 0.
pub fn tsp_brute_force(metric: &Metric) -> f64 {
    fn permute(rest: &mut [usize], k: usize, metric: &Metric, best: &mut f64) {
        if k == rest.len() {
            let mut cost = metric.d(0, rest[0]) + metric.d(*rest.last().unwrap(), 0);
            cost += rest.windows(2).map(|w| metric.d(w[0], w[1])).sum::<f64>();
            *best = best.min(cost);
            return;
        }
        for i in k..rest.len() {
            rest.swap(k, i);
            permute(rest, k + 1, metric, best);
            rest.swap(k, i);
        }
    }
    let n = metric.n();
    if n == 1 {
        return 0.0;
    }
    if n == 2 {
        return 2.0 * metric.d(0, 1);
    }
    let mut rest: Vec<usize> = (1..n).collect();
    let mut best = f64::INFINITY;
    permute(&mut rest, 0, metric, &mut best);
    best
}

/// Floyd-Warshall closure of the weighted adjacency matrix.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0.0;
    }
    for &(u, v, w) in edges {
        d[u][v] = d[u][v].min(w);
        d[v][u] = d[v][u].min(w);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// A connected random shortest path metric on `G(n, p)` drawn from `seed`.
pub fn random_metric(n: usize, p: f64, seed: u64) -> Metric {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let graph = generate_erdos_renyi(n, p, Seed::new(rng.random())).unwrap();
        if graph.is_connected() {
            return build_metric(&draw_weights(&graph, Seed::new(rng.random())));
        }
    }
}
