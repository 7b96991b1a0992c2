use super::{require_finite, HeuristicError, Matching};
use crate::metric::Metric;

/// Largest `n` for the subset dynamic program in [`exact_matching`].
pub const DEFAULT_MATCHING_CAP: usize = 20;

fn check_even(metric: &Metric) -> Result<(), HeuristicError> {
    match metric.n() {
        n if n % 2 == 1 => Err(HeuristicError::OddVertexCount(n)),
        _ => require_finite(metric),
    }
}

/// Repeatedly matches the closest pair of unmatched vertices.
pub fn greedy_matching(metric: &Metric) -> Result<Matching, HeuristicError> {
    check_even(metric)?;
    let n = metric.n();
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    // Stable sort keeps lexicographic order among equal distances.
    pairs.sort_by(|a, b| metric.d(a.0, a.1).total_cmp(&metric.d(b.0, b.1)));
    let mut matched = vec![false; n];
    let mut chosen = Vec::with_capacity(n / 2);
    for (u, v) in pairs {
        if !matched[u] && !matched[v] {
            matched[u] = true;
            matched[v] = true;
            chosen.push((u, v));
        }
    }
    Ok(Matching::from_pairs(metric, chosen))
}

/// Minimum-cost perfect matching by dynamic programming over vertex subsets:
/// the lowest unmatched vertex is paired with every other candidate.
pub fn exact_matching(metric: &Metric) -> Result<Matching, HeuristicError> {
    exact_matching_with_cap(metric, DEFAULT_MATCHING_CAP)
}

pub fn exact_matching_with_cap(metric: &Metric, cap: usize) -> Result<Matching, HeuristicError> {
    let n = metric.n();
    if n > cap {
        return Err(HeuristicError::SizeCapExceeded { n, cap });
    }
    check_even(metric)?;
    if n == 0 {
        return Ok(Matching { pairs: Vec::new(), cost: 0.0 });
    }
    let full = (1usize << n) - 1;
    // best[mask]: cheapest way to match the vertices in `mask`.
    let mut best = vec![f64::INFINITY; 1 << n];
    let mut partner = vec![u8::MAX; 1 << n];
    best[0] = 0.0;
    for mask in 1..=full {
        if mask.count_ones() % 2 == 1 {
            continue;
        }
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut bits = rest;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let cand = best[rest & !(1 << j)] + metric.d(i, j);
            if cand < best[mask] {
                best[mask] = cand;
                partner[mask] = j as u8;
            }
        }
    }
    let mut pairs = Vec::with_capacity(n / 2);
    let mut mask = full;
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        let j = partner[mask] as usize;
        pairs.push((i, j));
        mask &= !(1 << i) & !(1 << j);
    }
    Ok(Matching::from_pairs(metric, pairs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn line() -> Metric {
        Metric::from_line(&[0.0, 1.1, 2.0, 4.5])
    }

    #[test]
    fn greedy_on_line() {
        let m = greedy_matching(&line()).unwrap();
        assert_eq!(m.pairs, vec![(1, 2), (0, 3)]);
        assert_abs_diff_eq!(m.cost, 5.4, epsilon = 1e-12);
        assert!(m.is_perfect(4));
    }

    #[test]
    fn exact_on_line() {
        let m = exact_matching(&line()).unwrap();
        assert_eq!(m.pairs, vec![(0, 1), (2, 3)]);
        assert_abs_diff_eq!(m.cost, 3.6, epsilon = 1e-12);
    }

    #[test]
    fn two_vertices() {
        let metric = Metric::from_line(&[0.0, 0.7]);
        let g = greedy_matching(&metric).unwrap();
        let e = exact_matching(&metric).unwrap();
        assert_eq!(g, e);
        assert_eq!(g.pairs, vec![(0, 1)]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let odd = Metric::from_line(&[0.0, 1.0, 2.0]);
        assert_eq!(greedy_matching(&odd), Err(HeuristicError::OddVertexCount(3)));
        assert_eq!(exact_matching(&odd), Err(HeuristicError::OddVertexCount(3)));
        let inf = Metric::from_matrix(2, vec![0.0, f64::INFINITY, f64::INFINITY, 0.0]).unwrap();
        assert_eq!(greedy_matching(&inf), Err(HeuristicError::InfiniteDistance));
        let big = Metric::from_line(&(0..22).map(f64::from).collect::<Vec<_>>());
        assert_eq!(exact_matching(&big), Err(HeuristicError::SizeCapExceeded { n: 22, cap: 20 }));
    }
}
