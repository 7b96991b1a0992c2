//! Number formatting shared by the file formats and reports.

/// Formats `x` like C's `%.17g`: 17 significant digits, trailing zeros
/// removed, scientific notation outside `1e-5 <= |x| < 1e17`.
///
/// Seventeen significant digits round-trip every `f64` exactly.
/// Infinities are written as `inf` / `-inf` and NaN as `nan`.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        strip_zeros(format!("{x:.decimals$}"))
    } else {
        let mantissa = strip_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    }
}

fn strip_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    trimmed.to_string()
}

/// Parses a number written by [`g17`], accepting `inf`, `-inf` and `nan`.
pub fn parse_f64(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "+inf" | "infinity" => Some(f64::INFINITY),
        "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
        other => other.parse().ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_values() {
        assert_eq!(g17(1.0), "1");
        assert_eq!(g17(0.5), "0.5");
        assert_eq!(g17(-2.25), "-2.25");
        assert_eq!(g17(0.1), "0.10000000000000001");
        assert_eq!(g17(1485.0), "1485");
    }

    #[test]
    fn scientific_values() {
        assert_eq!(g17(1e-7), "9.9999999999999995e-08");
        assert_eq!(g17(1e20), "1e+20");
    }

    #[test]
    fn specials() {
        assert_eq!(g17(f64::INFINITY), "inf");
        assert_eq!(parse_f64("inf"), Some(f64::INFINITY));
        assert_eq!(g17(0.0), "0");
    }

    #[test]
    fn round_trips() {
        for &x in &[0.1, 1.0 / 3.0, 2.0f64.sqrt(), 1e-300, 123456.789e10, 6.02e23, 5e-6] {
            assert_eq!(parse_f64(&g17(x)), Some(x), "{x}");
        }
    }
}
