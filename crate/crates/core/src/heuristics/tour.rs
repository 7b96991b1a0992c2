use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{require_finite, HeuristicError, Tour};
use crate::graphs::Seed;
use crate::metric::Metric;

/// Largest `n` for the Held–Karp dynamic program in [`exact_tsp`].
pub const DEFAULT_TSP_CAP: usize = 18;

/// Greedy walk from `start` to the nearest unvisited vertex, closing back to
/// `start`.
pub fn nearest_neighbor_tour(metric: &Metric, start: usize) -> Result<Tour, HeuristicError> {
    let n = metric.n();
    if start >= n {
        return Err(HeuristicError::VertexOutOfRange { vertex: start, n });
    }
    require_finite(metric)?;
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut current = start;
    visited[start] = true;
    order.push(start);
    for _ in 1..n {
        let next = (0..n)
            .filter(|&v| !visited[v])
            .min_by(|&a, &b| metric.d(current, a).total_cmp(&metric.d(current, b)))
            .expect("an unvisited vertex remains");
        visited[next] = true;
        order.push(next);
        current = next;
    }
    Ok(Tour::unchecked(metric, order))
}

/// How the insertion heuristic picks its initial triangle and the next
/// vertex to insert.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InsertionRule {
    /// Vertex closest to the current tour.
    Nearest,
    /// Vertex whose distance to the current tour is largest.
    Farthest,
    /// Vertex with the cheapest insertion; starts from the cheapest triangle.
    Cheapest,
    /// Vertices in a seeded random order.
    Random,
}

impl InsertionRule {
    pub const ALL: [InsertionRule; 4] = [Self::Nearest, Self::Farthest, Self::Cheapest, Self::Random];
}

impl fmt::Display for InsertionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Nearest => "nearest",
            Self::Farthest => "farthest",
            Self::Cheapest => "cheapest",
            Self::Random => "random",
        })
    }
}

impl FromStr for InsertionRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nearest" => Ok(Self::Nearest),
            "farthest" => Ok(Self::Farthest),
            "cheapest" => Ok(Self::Cheapest),
            "random" => Ok(Self::Random),
            other => Err(format!("unknown insertion rule `{other}`")),
        }
    }
}

/// Cheapest position to insert `v`: returns `(increase, index)` where the
/// vertex goes between `order[index]` and its successor. Earliest wins ties.
fn best_position(metric: &Metric, order: &[usize], v: usize) -> (f64, usize) {
    let len = order.len();
    let mut best = (f64::INFINITY, 0);
    for i in 0..len {
        let (a, b) = (order[i], order[(i + 1) % len]);
        let increase = metric.d(a, v) + metric.d(v, b) - metric.d(a, b);
        if increase < best.0 {
            best = (increase, i);
        }
    }
    best
}

/// Picks the unvisited vertex by its distance to the tour: the smallest for
/// `Nearest`, the largest for `Farthest`; lowest index on ties.
fn select_by_distance(metric: &Metric, to_tour: &[f64], in_tour: &[bool], farthest: bool) -> usize {
    let mut best: Option<usize> = None;
    for v in (0..metric.n()).filter(|&v| !in_tour[v]) {
        best = match best {
            None => Some(v),
            Some(b) if (farthest && to_tour[v] > to_tour[b]) || (!farthest && to_tour[v] < to_tour[b]) => Some(v),
            keep => keep,
        };
    }
    best.expect("an unvisited vertex remains")
}

/// Insertion heuristic: start from a triangle chosen by `rule`, then insert
/// the vertex picked by `rule` where it increases the tour cost least.
///
/// `Nearest` and `Farthest` grow the triangle from vertex 0 by the same
/// rule; `Cheapest` starts from the cheapest triangle; `Random` uses the
/// first three vertices of a permutation drawn from `seed`.
pub fn insertion_tour(metric: &Metric, rule: InsertionRule, seed: Seed) -> Result<Tour, HeuristicError> {
    let n = metric.n();
    if n < 3 {
        return Err(HeuristicError::TooFewVertices { n, needed: 3 });
    }
    require_finite(metric)?;

    let mut in_tour = vec![false; n];
    let mut order: Vec<usize> = Vec::with_capacity(n);
    match rule {
        InsertionRule::Nearest | InsertionRule::Farthest => {
            let farthest = rule == InsertionRule::Farthest;
            let mut to_tour = metric.row(0).to_vec();
            in_tour[0] = true;
            order.push(0);
            while order.len() < n {
                let v = select_by_distance(metric, &to_tour, &in_tour, farthest);
                if order.len() < 3 {
                    order.push(v);
                } else {
                    let (_, i) = best_position(metric, &order, v);
                    order.insert(i + 1, v);
                }
                in_tour[v] = true;
                for (u, d) in to_tour.iter_mut().enumerate() {
                    *d = d.min(metric.d(u, v));
                }
            }
        }
        InsertionRule::Cheapest => {
            let mut triangle = (f64::INFINITY, [0, 1, 2]);
            for a in 0..n {
                for b in a + 1..n {
                    for c in b + 1..n {
                        let cost = metric.d(a, b) + metric.d(b, c) + metric.d(a, c);
                        if cost < triangle.0 {
                            triangle = (cost, [a, b, c]);
                        }
                    }
                }
            }
            for v in triangle.1 {
                in_tour[v] = true;
                order.push(v);
            }
            while order.len() < n {
                let mut best = (f64::INFINITY, usize::MAX, 0);
                for v in (0..n).filter(|&v| !in_tour[v]) {
                    let (increase, i) = best_position(metric, &order, v);
                    if increase < best.0 {
                        best = (increase, v, i);
                    }
                }
                let (_, v, i) = best;
                order.insert(i + 1, v);
                in_tour[v] = true;
            }
        }
        InsertionRule::Random => {
            let mut sequence: Vec<usize> = (0..n).collect();
            sequence.shuffle(&mut seed.rng());
            order.extend_from_slice(&sequence[..3]);
            for &v in &sequence[3..] {
                let (_, i) = best_position(metric, &order, v);
                order.insert(i + 1, v);
            }
        }
    }
    Ok(Tour::unchecked(metric, order))
}

/// Optimal tour by the Held–Karp dynamic program over subsets of
/// `1..n`, with vertex 0 fixed as the start.
pub fn exact_tsp(metric: &Metric) -> Result<Tour, HeuristicError> {
    exact_tsp_with_cap(metric, DEFAULT_TSP_CAP)
}

pub fn exact_tsp_with_cap(metric: &Metric, cap: usize) -> Result<Tour, HeuristicError> {
    let n = metric.n();
    if n < 3 {
        return Err(HeuristicError::TooFewVertices { n, needed: 3 });
    }
    if n > cap {
        return Err(HeuristicError::SizeCapExceeded { n, cap });
    }
    require_finite(metric)?;

    // Bit j of a mask stands for vertex j + 1.
    let m = n - 1;
    let states = 1usize << m;
    let mut cost = vec![f64::INFINITY; states * m];
    let mut parent = vec![u8::MAX; states * m];
    for j in 0..m {
        cost[(1 << j) * m + j] = metric.d(0, j + 1);
    }
    for mask in 1..states {
        let mut ends = mask;
        while ends != 0 {
            let j = ends.trailing_zeros() as usize;
            ends &= ends - 1;
            let here = cost[mask * m + j];
            if !here.is_finite() {
                continue;
            }
            let mut free = !mask & (states - 1);
            while free != 0 {
                let k = free.trailing_zeros() as usize;
                free &= free - 1;
                let next = mask | (1 << k);
                let cand = here + metric.d(j + 1, k + 1);
                if cand < cost[next * m + k] {
                    cost[next * m + k] = cand;
                    parent[next * m + k] = j as u8;
                }
            }
        }
    }
    let full = states - 1;
    let last = (0..m)
        .min_by(|&a, &b| {
            (cost[full * m + a] + metric.d(a + 1, 0)).total_cmp(&(cost[full * m + b] + metric.d(b + 1, 0)))
        })
        .expect("m >= 2");
    let mut order = Vec::with_capacity(n);
    let (mut mask, mut j) = (full, last);
    loop {
        order.push(j + 1);
        let p = parent[mask * m + j];
        mask &= !(1 << j);
        if p == u8::MAX {
            break;
        }
        j = p as usize;
    }
    order.push(0);
    order.reverse();
    Ok(Tour::unchecked(metric, order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn line() -> Metric {
        Metric::from_line(&[0.0, 1.1, 2.0, 4.5])
    }

    #[test]
    fn nearest_neighbor_on_line() {
        let t = nearest_neighbor_tour(&line(), 0).unwrap();
        assert_eq!(t.order, vec![0, 1, 2, 3]);
        assert_abs_diff_eq!(t.cost, 9.0, epsilon = 1e-12);
        let two = Metric::from_line(&[0.0, 0.7]);
        assert_abs_diff_eq!(nearest_neighbor_tour(&two, 1).unwrap().cost, 1.4, epsilon = 1e-15);
        assert!(matches!(nearest_neighbor_tour(&two, 2), Err(HeuristicError::VertexOutOfRange { .. })));
    }

    #[test]
    fn insertion_on_line() {
        let t = insertion_tour(&line(), InsertionRule::Nearest, Seed::new(0)).unwrap();
        assert_eq!(t.order, vec![0, 1, 3, 2]);
        assert_abs_diff_eq!(t.cost, 9.0, epsilon = 1e-12);
        for rule in InsertionRule::ALL {
            let t = insertion_tour(&line(), rule, Seed::new(5)).unwrap();
            assert_abs_diff_eq!(t.cost, 9.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn insertion_on_triangle_is_optimal() {
        let m = Metric::from_line(&[0.0, 0.3, 1.0]);
        for rule in InsertionRule::ALL {
            let t = insertion_tour(&m, rule, Seed::new(1)).unwrap();
            assert_abs_diff_eq!(t.cost, exact_tsp(&m).unwrap().cost, epsilon = 1e-15);
        }
        assert!(matches!(
            insertion_tour(&Metric::from_line(&[0.0, 1.0]), InsertionRule::Nearest, Seed::new(1)),
            Err(HeuristicError::TooFewVertices { .. })
        ));
    }

    #[test]
    fn exact_tsp_small() {
        let m = Metric::from_line(&[0.0, 0.3, 1.0]);
        assert_abs_diff_eq!(exact_tsp(&m).unwrap().cost, 0.3 + 0.7 + 1.0, epsilon = 1e-15);
        let t = exact_tsp(&line()).unwrap();
        assert_abs_diff_eq!(t.cost, 9.0, epsilon = 1e-12);
        assert_eq!(Tour::new(&line(), t.order.clone()).unwrap().cost, t.cost);
    }

    #[test]
    fn exact_tsp_errors() {
        let big = Metric::from_line(&(0..19).map(f64::from).collect::<Vec<_>>());
        assert_eq!(exact_tsp(&big), Err(HeuristicError::SizeCapExceeded { n: 19, cap: 18 }));
        let inf = Metric::from_matrix(
            3,
            vec![0.0, 1.0, f64::INFINITY, 1.0, 0.0, f64::INFINITY, f64::INFINITY, f64::INFINITY, 0.0],
        )
        .unwrap();
        assert_eq!(exact_tsp(&inf), Err(HeuristicError::InfiniteDistance));
    }

    #[test]
    fn rule_names_round_trip() {
        for rule in InsertionRule::ALL {
            assert_eq!(rule.to_string().parse::<InsertionRule>(), Ok(rule));
        }
    }
}
