/// Iterations needed for 99% cumulative success: `t · ln(0.01) / ln(1 − p)`.
///
/// `p = 0` gives `+∞`; `p ≥ 0.99` gives `t`, since one run already meets the
/// 99% criterion.
pub fn time_to_solution(t: usize, p_s: f64) -> f64 {
    let t = t as f64;
    if p_s <= 0.0 {
        f64::INFINITY
    } else if p_s >= 0.99 {
        t
    } else {
        t * 0.01f64.ln() / (1.0 - p_s).ln()
    }
}

/// One-sided 95% Clopper–Pearson lower bound on `p` after `runs` hits in
/// `runs` trials, `0.05^(1/runs)`. `None` unless every run hit.
pub fn all_hit_lower_bound(hits: usize, runs: usize) -> Option<f64> {
    (runs > 0 && hits == runs).then(|| 0.05f64.powf(1.0 / runs as f64))
}

/// Median with infinities ordered last; the mean of the middle pair for even counts.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[mid] } else { (v[mid - 1] + v[mid]) / 2.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formula_cases() {
        assert_eq!(time_to_solution(100, 0.99), 100.0);
        assert_eq!(time_to_solution(100, 1.0), 100.0);
        assert_eq!(time_to_solution(100, 0.0), f64::INFINITY);
        assert!((time_to_solution(100, 0.5) - 664.385_618_977_472_4).abs() < 1e-9);
        // Just below the cap the formula itself is ≈ t.
        assert!((time_to_solution(100, 0.99 - 1e-12) - 100.0).abs() < 1e-6);
    }

    #[test]
    fn bounds_and_medians() {
        assert_eq!(all_hit_lower_bound(3, 4), None);
        assert!((all_hit_lower_bound(100, 100).unwrap() - 0.970_487_7).abs() < 1e-6);
        assert_eq!(median(&[1.0, 10.0, 100.0]), Some(10.0));
        assert_eq!(median(&[f64::INFINITY, 1.0, 10.0]), Some(10.0));
        assert_eq!(median(&[1.0, 3.0]), Some(2.0));
        assert_eq!(median(&[]), None);
    }

    proptest! {
        #[test]
        fn monotone_in_p_and_linear_in_t(p in 0.001f64..0.98, dp in 0.0001f64..0.009, t in 1usize..10_000) {
            prop_assert!(time_to_solution(t, p + dp) <= time_to_solution(t, p));
            prop_assert!(time_to_solution(t, p) >= t as f64);
            let ratio = time_to_solution(3 * t, p) / time_to_solution(t, p);
            prop_assert!((ratio - 3.0).abs() < 1e-12);
        }
    }
}
