//! Number formatting for the text file formats.

/// Formats `x` rounded to `digits` significant digits, in the shortest form that
/// reads back to the rounded value.
pub fn sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = round_sig(x, digits);
    let s = format!("{rounded:?}");
    s.strip_suffix(".0").map(str::to_string).unwrap_or(s)
}

/// `x` rounded to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(sig(1.0, 9), "1");
        assert_eq!(sig(0.123456789123, 9), "0.123456789");
        assert_eq!(sig(-2.5e-12, 3), "-2.5e-12");
        assert_eq!(sig(1.23456789012345, 12), "1.23456789012");
    }
}
