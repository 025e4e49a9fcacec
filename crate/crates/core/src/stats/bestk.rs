//! Unbiased best-of-k estimators.
//!
//! `best_at_k` is the probability that a uniformly random size-k subset of
//! the n generated poses contains at least one success: 1 − C(n−c,k)/C(n,k).
//! Both binomials are computed exactly in integer arithmetic and the result
//! takes a single floating-point division, so it is the correctly rounded
//! value of the underlying rational (and equals c/n bit-for-bit at k = 1).
//!
//! `expected_max_at_k` extends the idea to a continuous per-pose score: the
//! expected maximum of the score over a random size-k subset, which reduces
//! to the plain mean at k = 1 and to the maximum at k = n.

use crate::error::{Error, Result};

/// Exact binomial coefficient, or `None` on u128 overflow. The running
/// product stays integral because each prefix is itself a binomial.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc.checked_mul((n - k + i) as u128)?;
        acc /= i as u128;
    }
    Some(acc)
}

fn checked_binomial(n: u64, k: u64) -> Result<u128> {
    binomial(n, k).ok_or_else(|| {
        Error::InvalidParameter(format!("binomial({n}, {k}) overflows 128-bit arithmetic"))
    })
}

/// Probability that k poses drawn without replacement from n (of which c
/// succeed) include at least one success.
pub fn best_at_k(n: usize, c: usize, k: usize) -> Result<f64> {
    if c > n {
        return Err(Error::InvalidParameter(format!(
            "success count {c} exceeds pose count {n}"
        )));
    }
    if k < 1 || k > n {
        return Err(Error::InvalidParameter(format!(
            "k must satisfy 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    let den = checked_binomial(n as u64, k as u64)?;
    let miss = checked_binomial((n - c) as u64, k as u64)?;
    // Single rounding step on exact integers: the hit count is den - miss.
    Ok((den - miss) as f64 / den as f64)
}

/// Expected maximum of a per-pose score over a uniformly random size-k
/// subset. With scores sorted ascending (1-based rank i), the maximum lands
/// on rank i with probability C(i−1, k−1)/C(n, k).
pub fn expected_max_at_k(values: &[f64], k: usize) -> Result<f64> {
    let n = values.len();
    if n == 0 {
        return Err(Error::InvalidParameter(
            "expected_max_at_k needs at least one value".to_string(),
        ));
    }
    if k < 1 || k > n {
        return Err(Error::InvalidParameter(format!(
            "k must satisfy 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "expected_max_at_k requires finite values".to_string(),
        ));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let den = checked_binomial(n as u64, k as u64)? as f64;
    let mut acc = 0.0;
    for (idx, &v) in sorted.iter().enumerate() {
        let i = idx + 1; // 1-based rank
        if i < k {
            continue;
        }
        let weight = checked_binomial((i - 1) as u64, (k - 1) as u64)? as f64;
        acc += weight * v;
    }
    Ok(acc / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials_match_pascal() {
        assert_eq!(binomial(0, 0), Some(1));
        assert_eq!(binomial(5, 2), Some(10));
        assert_eq!(binomial(20, 5), Some(15504));
        assert_eq!(binomial(20, 15), Some(15504));
        assert_eq!(binomial(4, 7), Some(0));
        // Pascal triangle identity on a block.
        for n in 1..25u64 {
            for k in 1..n {
                assert_eq!(
                    binomial(n, k).unwrap(),
                    binomial(n - 1, k - 1).unwrap() + binomial(n - 1, k).unwrap()
                );
            }
        }
    }

    #[test]
    fn spot_values_from_enumeration() {
        assert_eq!(best_at_k(20, 20, 5).unwrap(), 1.0);
        assert_eq!(best_at_k(20, 0, 5).unwrap(), 0.0);
        assert_eq!(best_at_k(20, 1, 5).unwrap(), 0.25);
        assert_eq!(best_at_k(5, 2, 3).unwrap(), 0.9);
    }

    #[test]
    fn k_equals_one_is_exactly_the_success_rate() {
        for n in 1..=30 {
            for c in 0..=n {
                assert_eq!(
                    best_at_k(n, c, 1).unwrap(),
                    c as f64 / n as f64,
                    "n={n}, c={c}"
                );
            }
        }
    }

    #[test]
    fn k_equals_n_hits_any_success() {
        for n in 1..=20 {
            assert_eq!(best_at_k(n, 0, n).unwrap(), 0.0);
            for c in 1..=n {
                assert_eq!(best_at_k(n, c, n).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn monotone_in_k_and_c() {
        for n in 1..=12 {
            for c in 0..=n {
                for k in 1..n {
                    assert!(
                        best_at_k(n, c, k).unwrap() <= best_at_k(n, c, k + 1).unwrap()
                    );
                }
            }
            for k in 1..=n {
                for c in 0..n {
                    assert!(
                        best_at_k(n, c, k).unwrap() <= best_at_k(n, c + 1, k).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn parameter_violations_error() {
        assert!(best_at_k(5, 6, 1).is_err());
        assert!(best_at_k(5, 2, 0).is_err());
        assert!(best_at_k(5, 2, 6).is_err());
    }

    #[test]
    fn expected_max_reduces_to_mean_and_max() {
        let v = [0.3, 0.9, 0.1, 0.5];
        let mean = expected_max_at_k(&v, 1).unwrap();
        assert!((mean - 0.45).abs() < 1e-15);
        let max = expected_max_at_k(&v, 4).unwrap();
        assert_eq!(max, 0.9);
    }

    #[test]
    fn expected_max_small_case_by_hand() {
        // n=3, k=2 over [a,b,c] ascending: P(max=b) = C(1,1)/C(3,2) = 1/3,
        // P(max=c) = C(2,1)/3 = 2/3.
        let v = [0.0, 0.3, 0.6];
        let got = expected_max_at_k(&v, 2).unwrap();
        let want = (0.3 + 2.0 * 0.6) / 3.0;
        assert!((got - want).abs() < 1e-15);
    }

    #[test]
    fn expected_max_monotone_in_k() {
        let v = [0.12, 0.77, 0.31, 0.55, 0.42, 0.9, 0.05];
        let mut prev = 0.0;
        for k in 1..=v.len() {
            let e = expected_max_at_k(&v, k).unwrap();
            assert!(e >= prev - 1e-15, "k={k}: {e} < {prev}");
            prev = e;
        }
    }

    #[test]
    fn expected_max_rejects_bad_input() {
        assert!(expected_max_at_k(&[], 1).is_err());
        assert!(expected_max_at_k(&[0.5], 2).is_err());
        assert!(expected_max_at_k(&[f64::NAN], 1).is_err());
    }
}
