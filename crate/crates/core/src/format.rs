//! Locale-independent number formatting for the text outputs.

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_value(v: f64) -> String {
    format!("{v}")
}

/// Formats with `digits` significant digits, `%g` style: fixed notation for
/// moderate exponents, scientific otherwise, trailing zeros stripped.
pub fn fmt_sig(v: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0".to_string();
    }
    // round first so the exponent reflects the rounded mantissa (9.99.. -> 10)
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = strip_zeros(mantissa);
        return format!("{mantissa}e{exp}");
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    strip_zeros(&format!("{v:.decimals$}")).to_string()
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// The 10-significant-digit format used for every TSV output.
pub fn fmt10(v: f64) -> String {
    fmt_sig(v, 10)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt10(0.0), "0");
        assert_eq!(fmt10(1.0), "1");
        assert_eq!(fmt10(-0.5), "-0.5");
        assert_eq!(fmt10(1.0 / 3.0), "0.3333333333");
        assert_eq!(fmt10(2.0 / 3.0), "0.6666666667");
        assert_eq!(fmt10(-1.039011e-12), "-1.039011e-12");
        assert_eq!(fmt10(123456.789), "123456.789");
        assert_eq!(fmt10(9.99999999999), "10");
        assert_eq!(fmt10(1.5e12), "1.5e12");
        assert_eq!(fmt_sig(0.000123456, 3), "0.000123");
    }
}
