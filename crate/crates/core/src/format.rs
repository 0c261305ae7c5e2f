//! Number formatting for serialized outputs.

/// Fixed 6-decimal rendering used in dataset CSVs.
pub fn fixed(v: f64) -> String {
    if v.is_nan() {
        return String::new();
    }
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

pub fn fixed_opt(v: Option<f64>) -> String {
    v.map(fixed).unwrap_or_default()
}

/// Rounds to 12 significant digits so serialized statistics are stable
/// against last-bit floating point noise.
pub fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let s = format!("{v:.11e}");
    s.parse().unwrap_or(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_formats() {
        assert_eq!(fixed(1.0), "1.000000");
        assert_eq!(fixed(-1e-9), "0.000000");
        assert_eq!(fixed(f64::NAN), "");
        assert_eq!(fixed_opt(None), "");
    }

    #[test]
    fn round_sig_keeps_twelve_digits() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(1.234_567_890_123_456e-20), 1.234_567_890_12e-20);
    }
}
