//! Closed-form expectation, distribution and tail bounds.
//!
//! Every function here is a pure formula evaluation. Probability-valued
//! upper bounds that exceed one are vacuous; they are clamped to one and the
//! clamping is reported through [`BoundValue::clamped`] when evaluated by id.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("the ball tail bound needs n >= 5, got n = {0}")]
    NTooSmall(usize),
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("unknown formula id `{0}`")]
    UnknownFormula(String),
    #[error("missing parameter `{0}`")]
    MissingParameter(String),
}

/// `H_n = 1 + 1/2 + ... + 1/n`, summed directly; `H_0 = 0`.
pub fn harmonic(n: u64) -> f64 {
    (1..=n).map(|i| 1.0 / i as f64).sum()
}

/// `P(X <= a)` for `X = sum_{i=1}^n Exp(c * i)`, which equals
/// `(1 - e^{-ca})^n`.
pub fn exp_sum_cdf(c: f64, n: u32, a: f64) -> f64 {
    if a <= 0.0 {
        return 0.0;
    }
    (-(-c * a).exp_m1()).powi(n as i32)
}

/// Bracket on `E[tau_k(v)]`:
/// `(H_{k-1} + H_{n-1} - H_{n-k}) / (beta n)` and the same over `alpha n`.
pub fn tau_expectation_bounds(n: u64, k: u64, alpha: f64, beta: f64) -> (f64, f64) {
    assert!(1 <= k && k <= n, "need 1 <= k <= n");
    let core = harmonic(k - 1) + harmonic(n - 1) - harmonic(n - k);
    let core = core.max(0.0);
    (core / (beta * n as f64), core / (alpha * n as f64))
}

/// Pointwise bracket on `F_k(x) = P(tau_k(v) <= x)`.
///
/// The lower end is the larger of `(1 - e^{-alpha (n-k) x})^{k-1}` and
/// `(1 - e^{-alpha n x / 4})^n`; the upper end is `(1 - e^{-beta n x})^{k-1}`.
pub fn tau_cdf_bounds(x: f64, n: u64, k: u64, alpha: f64, beta: f64) -> (f64, f64) {
    assert!(1 <= k && k <= n, "need 1 <= k <= n");
    let one_minus_exp = |rate: f64| -(-rate * x).exp_m1();
    let nf = n as f64;
    let by_prefix = one_minus_exp(alpha * (nf - k as f64)).powi((k - 1) as i32);
    let by_halves = one_minus_exp(alpha * nf / 4.0).powi(n as i32);
    let upper = one_minus_exp(beta * nf).powi((k - 1) as i32);
    (by_prefix.max(by_halves), upper)
}

/// `P(Delta_max > c ln(n) / (alpha n)) <= n^{2 - c/4}`, clamped to 1.
pub fn diameter_tail(c: f64, n: u64) -> f64 {
    (n as f64).powf(2.0 - c / 4.0).min(1.0)
}

/// Threshold `min{exp(alpha delta n / 5), (n + 1) / 2}` below which the
/// ball `B_delta(v)` is small with probability at most
/// `exp(-alpha delta n / 5)`.
pub fn ball_tail(delta: f64, n: usize, alpha: f64) -> Result<(f64, f64), BoundsError> {
    if n < 5 {
        return Err(BoundsError::NTooSmall(n));
    }
    let rate = alpha * delta * n as f64 / 5.0;
    Ok((rate.exp().min((n as f64 + 1.0) / 2.0), (-rate).exp()))
}

/// `s_delta = min{exp(alpha delta n / 5), (n + 1) / 2}` and the cluster
/// count scale `n / s_delta`.
pub fn cluster_scale(delta: f64, n: usize, alpha: f64) -> (f64, f64) {
    let nf = n as f64;
    let s = (alpha * delta * nf / 5.0).exp().min((nf + 1.0) / 2.0);
    (s, nf / s)
}

/// Lower-tail bound `exp(-a_* mu (lambda - 1 - ln lambda))` for sums of
/// independent exponentials.
pub fn janson_lower_tail(lambda: f64, mu: f64, a_star: f64) -> f64 {
    if lambda <= 0.0 {
        return 0.0;
    }
    (-a_star * mu * (lambda - 1.0 - lambda.ln())).exp().min(1.0)
}

/// Tail bound for the sum of the `phi n` lightest edge weights:
/// `exp(phi n (2 + ln(c / (2 phi^2))))`, clamped to 1.
pub fn sm_tail(phi: f64, c: f64, n: u64) -> Result<f64, BoundsError> {
    let nf = n as f64;
    if !(phi > 0.0 && phi <= (nf - 1.0) / nf) {
        return Err(BoundsError::ParameterOutOfRange(format!("phi = {phi} must lie in (0, (n-1)/n] for n = {n}")));
    }
    let c_max = 2.0 * phi * phi / std::f64::consts::E;
    if !(c >= 0.0 && c <= c_max * (1.0 + 1e-15)) {
        return Err(BoundsError::ParameterOutOfRange(format!("c = {c} must lie in [0, 2 phi^2 / e] = [0, {c_max}]")));
    }
    if c == 0.0 {
        return Ok(0.0);
    }
    Ok((phi * nf * (2.0 + (c / (2.0 * phi * phi)).ln())).exp().min(1.0))
}

/// `ln C(n, k)` summed in log space.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    assert!(k <= n);
    let k = k.min(n - k);
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

/// Density of `sum_{i=k}^{n-1} Exp(beta i)`, the `(n-k)`-th smallest of
/// `n - 1` independent `Exp(beta)` variables:
/// `beta k C(n-1, k) e^{-beta k x} (1 - e^{-beta x})^{n-k-1}`.
pub fn kmedian_order_pdf(x: f64, n: u64, k: u64, beta: f64) -> f64 {
    assert!(1 <= k && k < n, "need 1 <= k <= n - 1");
    if x < 0.0 {
        return 0.0;
    }
    let power = n - k - 1;
    let mut log_f = (beta * k as f64).ln() + ln_binomial(n - 1, k) - beta * k as f64 * x;
    if power > 0 {
        if x == 0.0 {
            return 0.0;
        }
        log_f += power as f64 * (-(-beta * x).exp()).ln_1p();
    }
    log_f.exp()
}

/// Result of evaluating a formula by id, as printed by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundValue {
    pub formula: String,
    pub value: f64,
    /// Second component for formulas that return a pair.
    pub second: Option<f64>,
    pub inputs: BTreeMap<String, f64>,
    pub clamped: bool,
}

/// Formula ids accepted by [`evaluate`].
pub const FORMULA_IDS: &[&str] = &[
    "harmonic",
    "exp-sum-cdf",
    "tau-expectation",
    "tau-cdf",
    "diameter-tail",
    "ball-tail",
    "cluster-scale",
    "janson",
    "sm-tail",
    "kmedian-pdf",
];

/// Evaluates a formula from named parameters (as given on the command line).
pub fn evaluate(formula: &str, params: &BTreeMap<String, f64>) -> Result<BoundValue, BoundsError> {
    let get = |key: &str| -> Result<f64, BoundsError> {
        params.get(key).copied().ok_or_else(|| BoundsError::MissingParameter(key.to_string()))
    };
    let count = |key: &str| -> Result<u64, BoundsError> {
        let v = get(key)?;
        if v < 0.0 || v.fract() != 0.0 {
            return Err(BoundsError::ParameterOutOfRange(format!("{key} = {v} must be a nonnegative integer")));
        }
        Ok(v as u64)
    };
    let in_range = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(BoundsError::ParameterOutOfRange(what.to_string()))
        }
    };
    let cut_pair =
        |alpha: f64, beta: f64| in_range(alpha > 0.0 && alpha <= beta && beta <= 1.0, "need 0 < alpha <= beta <= 1");

    let mut clamped = false;
    let (value, second) = match formula {
        "harmonic" => (harmonic(count("n")?), None),
        "exp-sum-cdf" => {
            let (c, n, a) = (get("c")?, count("n")?, get("a")?);
            in_range(c > 0.0 && n >= 1 && a >= 0.0, "need c > 0, n >= 1, a >= 0")?;
            (exp_sum_cdf(c, n as u32, a), None)
        }
        "tau-expectation" => {
            let (n, k, alpha, beta) = (count("n")?, count("k")?, get("alpha")?, get("beta")?);
            in_range(1 <= k && k <= n, "need 1 <= k <= n")?;
            cut_pair(alpha, beta)?;
            let (lo, hi) = tau_expectation_bounds(n, k, alpha, beta);
            (lo, Some(hi))
        }
        "tau-cdf" => {
            let (x, n, k, alpha, beta) = (get("x")?, count("n")?, count("k")?, get("alpha")?, get("beta")?);
            in_range(x >= 0.0 && 1 <= k && k <= n, "need x >= 0 and 1 <= k <= n")?;
            cut_pair(alpha, beta)?;
            let (lo, hi) = tau_cdf_bounds(x, n, k, alpha, beta);
            (lo, Some(hi))
        }
        "diameter-tail" => {
            let (c, n) = (get("c")?, count("n")?);
            in_range(n >= 1, "need n >= 1")?;
            clamped = (n as f64).powf(2.0 - c / 4.0) > 1.0;
            (diameter_tail(c, n), None)
        }
        "ball-tail" => {
            let (delta, n, alpha) = (get("delta")?, count("n")?, get("alpha")?);
            in_range(delta >= 0.0, "need delta >= 0")?;
            let (threshold, prob) = ball_tail(delta, n as usize, alpha)?;
            (threshold, Some(prob))
        }
        "cluster-scale" => {
            let (delta, n, alpha) = (get("delta")?, count("n")?, get("alpha")?);
            in_range(delta >= 0.0 && n >= 1, "need delta >= 0 and n >= 1")?;
            let (s, scale) = cluster_scale(delta, n as usize, alpha);
            (s, Some(scale))
        }
        "janson" => {
            let (lambda, mu, a_star) = (get("lambda")?, get("mu")?, get("a_star")?);
            in_range(
                lambda > 0.0 && lambda <= 1.0 && mu > 0.0 && a_star > 0.0,
                "need 0 < lambda <= 1, mu > 0, a_star > 0",
            )?;
            (janson_lower_tail(lambda, mu, a_star), None)
        }
        "sm-tail" => {
            let (phi, c, n) = (get("phi")?, get("c")?, count("n")?);
            let raw = (phi * n as f64 * (2.0 + (c / (2.0 * phi * phi)).ln())).exp();
            clamped = raw > 1.0;
            (sm_tail(phi, c, n)?, None)
        }
        "kmedian-pdf" => {
            let (x, n, k, beta) = (get("x")?, count("n")?, count("k")?, get("beta")?);
            in_range(x >= 0.0 && 1 <= k && k < n && beta > 0.0, "need x >= 0, 1 <= k <= n-1, beta > 0")?;
            (kmedian_order_pdf(x, n, k, beta), None)
        }
        other => return Err(BoundsError::UnknownFormula(other.to_string())),
    };
    if clamped {
        log::debug!("{formula}: vacuous bound clamped to 1 for {params:?}");
    }
    Ok(BoundValue { formula: formula.to_string(), value, second, inputs: params.clone(), clamped })
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance
/// `tol`, started from 64 equal panels.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }
    // Fixed panels first, so a narrow peak cannot hide between the three
    // initial samples of one wide Simpson step.
    const PANELS: usize = 64;
    let width = (b - a) / PANELS as f64;
    (0..PANELS)
        .map(|i| {
            let lo = a + width * i as f64;
            let hi = if i + 1 == PANELS { b } else { lo + width };
            let (flo, fhi) = (f(lo), f(hi));
            let (m, fm, whole) = simpson(&f, lo, flo, hi, fhi);
            recurse(&f, lo, flo, hi, fhi, m, fm, whole, tol / PANELS as f64, 40)
        })
        .sum()
}
