//! Deterministic number formatting for CSV/JSON emission.
//!
//! Values are rounded to 12 significant digits and printed with the fewest
//! digits that round-trip the rounded value, so identical runs produce
//! byte-identical output on any platform.

/// Rounds to 12 significant decimal digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Shortest representation (at most 12 significant digits) that parses back
/// to the rounded value. Plain decimal for moderate exponents, otherwise
/// scientific notation.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let r = round_sig(x);
    let mut sci = format!("{r:.11e}");
    for p in 0..=11usize {
        let s = format!("{r:.p$e}");
        if s.parse::<f64>() == Ok(r) {
            sci = s;
            break;
        }
    }
    // sci looks like "-3.7548e0"; expand small exponents to plain decimal
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-5..=14).contains(&exp) {
        return sci;
    }
    let neg = mant.starts_with('-');
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let point = 1 + exp; // digits before the decimal point
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        for _ in 0..(-point) {
            out.push('0');
        }
        out.push_str(digits.trim_end_matches('0'));
        if out.ends_with('.') {
            out.pop();
        }
    } else if (point as usize) >= digits.len() {
        out.push_str(&digits);
        for _ in 0..(point as usize - digits.len()) {
            out.push('0');
        }
    } else {
        out.push_str(&digits[..point as usize]);
        let frac = digits[point as usize..].trim_end_matches('0');
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
    }
    out
}

/// JSON number carrying the same 12-digit rounding.
pub fn json_num(x: f64) -> serde_json::Value {
    serde_json::Value::from(round_sig(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_are_shortest_and_round_trip() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(-2.5), "-2.5");
        assert_eq!(fmt_sig(0.25), "0.25");
        assert_eq!(fmt_sig(100.0), "100");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(1.5e-4), "0.00015");
        assert_eq!(fmt_sig(1.5e-7), "1.5e-7");
        assert_eq!(fmt_sig(1.5e-12), "1.5e-12");
        assert_eq!(fmt_sig(3.2949e0), "3.2949");
        let x = std::f64::consts::PI;
        let parsed: f64 = fmt_sig(x).parse().unwrap();
        assert!((parsed - x).abs() < 1e-11);
    }

    #[test]
    fn rounding_is_idempotent() {
        for &x in &[1.23456789012345e3, -9.87654321e-9, 4.0 * std::f64::consts::PI] {
            let r = round_sig(x);
            assert_eq!(round_sig(r), r);
            assert_eq!(fmt_sig(r), fmt_sig(x));
        }
    }
}
