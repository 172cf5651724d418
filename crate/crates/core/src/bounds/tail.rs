use super::ProbabilisticLevels;
use crate::error::{domain, Error, Result};

/// Upper limit for the sample-size searches.
pub const SEARCH_CAP: u64 = 1_000_000_000;

/// Relative slack when comparing a tail against `delta`, so that exact ties
/// (e.g. a tail of exactly 1/2 against delta = 1/2) are not lost to round-off.
const TIE_TOL: f64 = 1e-12;

/// `ln C(total, k)` as a sum of `ln((total - k + j) / j)`. Keeps the result
/// accurate when `total` is huge and `k` is small, where a difference of
/// log-gamma values would cancel catastrophically.
pub(crate) fn ln_choose(total: u64, k: u64) -> f64 {
    let k = k.min(total - k);
    let base = (total - k) as f64;
    (1..=k)
        .map(|j| (base + j as f64).ln() - (j as f64).ln())
        .sum()
}

/// Natural log of `sum_{i=0}^{n} C(N,i) eps^i (1-eps)^(N-i)`.
///
/// Terms are generated in log space and combined with log-sum-exp.
pub fn ln_binomial_tail(big_n: u64, n: u64, epsilon: f64) -> Result<f64> {
    if n > big_n {
        return Err(domain(format!("tail index n={n} exceeds N={big_n}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(domain(format!("epsilon must lie in (0,1), got {epsilon}")));
    }
    if n == big_n {
        return Ok(0.0);
    }
    let ln_eps = epsilon.ln();
    let ln_keep = (-epsilon).ln_1p();
    let nf = big_n as f64;

    let mut ln_terms = Vec::with_capacity(n as usize + 1);
    let mut ln_coef = 0.0;
    for i in 0..=n {
        if i > 0 {
            ln_coef += ((big_n - i + 1) as f64).ln() - (i as f64).ln();
        }
        let fi = i as f64;
        ln_terms.push(ln_coef + fi * ln_eps + (nf - fi) * ln_keep);
    }
    let peak = ln_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled: f64 = ln_terms.iter().map(|t| (t - peak).exp()).sum();
    // The sum is a probability; clamp the round-off above zero.
    Ok((peak + scaled.ln()).min(0.0))
}

/// `sum_{i=0}^{n} C(N,i) eps^i (1-eps)^(N-i)`, the probability that a
/// binomial(N, eps) count does not exceed `n`.
pub fn binomial_tail(big_n: u64, n: u64, epsilon: f64) -> Result<f64> {
    ln_binomial_tail(big_n, n, epsilon).map(f64::exp)
}

/// Smallest `N` with `sum_{i=0}^{n_theta} C(N,i) eps^i (1-eps)^(N-i) <= delta`.
pub fn smallest_scenario_n(levels: ProbabilisticLevels, n_theta: u64) -> Result<u64> {
    if n_theta == 0 {
        return Err(domain("n_theta must be at least 1"));
    }
    smallest_discarded_n(levels, n_theta, 0)
}

/// Smallest `N > r + n_theta` with
/// `C(r+n_theta, r) * sum_{i=0}^{r+n_theta} C(N,i) eps^i (1-eps)^(N-i) <= delta`.
///
/// With `r = 0` this is exactly [`smallest_scenario_n`].
pub fn smallest_discarded_n(levels: ProbabilisticLevels, n_theta: u64, r: u64) -> Result<u64> {
    if n_theta == 0 {
        return Err(domain("n_theta must be at least 1"));
    }
    let support = r
        .checked_add(n_theta)
        .filter(|s| *s < SEARCH_CAP)
        .ok_or(Error::Capacity { cap: SEARCH_CAP })?;
    let ln_lead = ln_choose(support, r);
    let ln_delta = levels.delta().ln();
    let eps = levels.epsilon();
    let holds = |big_n: u64| -> Result<bool> {
        Ok(ln_lead + ln_binomial_tail(big_n, support, eps)? <= ln_delta + TIE_TOL)
    };

    // `support` itself is never admissible (r < N - n_theta is required).
    let mut lo = support;
    let mut hi = (support + 1).max(2 * support);
    while !holds(hi)? {
        if hi >= SEARCH_CAP {
            return Err(Error::Capacity { cap: SEARCH_CAP });
        }
        lo = hi;
        hi = hi.saturating_mul(2).min(SEARCH_CAP);
    }
    // Tail is strictly decreasing in N beyond the support: bisect.
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn levels(e: f64, d: f64) -> ProbabilisticLevels {
        ProbabilisticLevels::new(e, d).unwrap()
    }

    #[test]
    fn tail_trivial_values() {
        assert!((binomial_tail(1, 0, 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!((binomial_tail(2, 1, 0.5).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(binomial_tail(7, 7, 0.3).unwrap(), 1.0);
    }

    #[test]
    fn tail_rejects_index_above_n() {
        assert!(matches!(binomial_tail(3, 4, 0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn tail_survives_huge_n() {
        // (1-eps)^N underflows in linear space long before this.
        let v = ln_binomial_tail(10_000_000, 5, 0.2).unwrap();
        assert!(v.is_finite() && v < -2.0e6);
    }

    #[test]
    fn ln_choose_small_cases() {
        assert_eq!(ln_choose(5, 0), 0.0);
        assert!((ln_choose(5, 2) - 10f64.ln()).abs() < 1e-14);
        assert!((ln_choose(155, 2) - (155.0 * 154.0 / 2.0f64).ln()).abs() < 1e-13);
    }

    #[test]
    fn scenario_n_half_half() {
        // Exact-rational oracle: N=3 is the first with (1/2)^N + N (1/2)^N <= 1/2.
        assert_eq!(smallest_scenario_n(levels(0.5, 0.5), 1).unwrap(), 3);
    }

    #[test]
    fn discarded_n_matches_rational_oracle() {
        // Frozen from an exact-rational evaluation of the discarded-constraint inequality.
        let l = levels(0.1, 1e-2);
        assert_eq!(smallest_discarded_n(l, 2, 0).unwrap(), 81);
        assert_eq!(smallest_discarded_n(l, 2, 1).unwrap(), 111);
        assert_eq!(smallest_discarded_n(l, 2, 2).unwrap(), 136);
    }

    #[test]
    fn discarded_n_reduces_to_scenario_n() {
        for &(e, d, n) in &[
            (0.2, 1e-2, 153),
            (0.1, 1e-4, 10),
            (0.05, 1e-6, 3),
            (0.5, 0.5, 1),
        ] {
            let l = levels(e, d);
            assert_eq!(
                smallest_discarded_n(l, n, 0).unwrap(),
                smallest_scenario_n(l, n).unwrap()
            );
        }
    }

    #[test]
    fn minimality_is_certified() {
        for &(e, d, n, r) in &[(0.2, 1e-2, 153, 0), (0.1, 1e-3, 4, 3), (0.01, 1e-5, 20, 0)] {
            let l = levels(e, d);
            let big_n = smallest_discarded_n(l, n, r).unwrap();
            let lead = ln_choose(r + n, r);
            let at = |m: u64| lead + ln_binomial_tail(m, r + n, e).unwrap();
            assert!(at(big_n) <= d.ln() + 1e-12);
            assert!(big_n - 1 <= r + n || at(big_n - 1) > d.ln());
        }
    }

    #[test]
    fn capacity_error_when_search_cap_is_exceeded() {
        let l = levels(1e-9, 1e-9);
        assert_eq!(
            smallest_scenario_n(l, 1000),
            Err(Error::Capacity { cap: SEARCH_CAP })
        );
    }
}
