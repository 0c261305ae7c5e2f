pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (n - 1 denominator), two-pass.
pub fn sample_sd(values: &[f64]) -> f64 {
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (values.len() as f64 - 1.0)).sqrt()
}

/// Type-7 quantile (linear interpolation between order statistics) of an
/// ascending slice. `p` is clamped to [0, 1].
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty slice");
    let p = p.clamp(0.0, 1.0);
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = h - lo as f64;
    if frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

/// Type-7 quantile of unsorted values.
pub fn quantile_type7(values: &[f64], p: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    quantile_sorted(&sorted, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type7_matches_hand_computation() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert!((quantile_type7(&v, 0.01) - 1.99).abs() < 1e-12);
        assert!((quantile_type7(&v, 0.99) - 99.01).abs() < 1e-12);
        assert_eq!(quantile_type7(&v, 0.0), 1.0);
        assert_eq!(quantile_type7(&v, 1.0), 100.0);
        let w = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 100.0];
        assert!((quantile_type7(&w, 0.25) - 3.25).abs() < 1e-12);
        assert!((quantile_type7(&w, 0.75) - 7.75).abs() < 1e-12);
    }

    #[test]
    fn sd_of_small_sample() {
        assert_eq!(sample_sd(&[1.0, 2.0, 3.0]), 1.0);
    }
}
