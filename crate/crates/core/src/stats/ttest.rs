//! Paired one-sided significance testing between two methods, with the
//! star annotation used in the report charts.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// One-sided paired t-test for H₁: mean(a − b) > 0.
///
/// Returns the upper-tail p-value of t = mean(d)/(s_d/√n) under Student's t
/// with n−1 degrees of freedom. Zero-variance differences are degenerate by
/// convention: p = 0 when the mean difference is positive, else p = 1.
pub fn paired_one_sided_ttest(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidParameter(format!(
            "paired test needs equal lengths, got {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::InvalidParameter(
            "paired test needs at least two pairs".to_string(),
        ));
    }
    let n = a.len() as f64;
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    if var == 0.0 {
        return Ok(if mean > 0.0 { 0.0 } else { 1.0 });
    }
    let t = mean / (var / n).sqrt();
    let dist = StudentsT::new(0.0, 1.0, n - 1.0)
        .map_err(|e| Error::InvalidParameter(format!("t distribution: {e}")))?;
    Ok(1.0 - dist.cdf(t))
}

/// Bootstrap alternative to the t-test, kept behind an explicit call: the
/// p-value is the fraction of resampled paired mean differences that are
/// not positive, using the same pinned generator as `bootstrap` over pair
/// indices.
pub fn bootstrap_difference_pvalue(
    a: &[f64],
    b: &[f64],
    iters: u64,
    seed: u64,
) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidParameter(format!(
            "paired test needs equal lengths, got {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::InvalidParameter(
            "paired test needs at least one pair".to_string(),
        ));
    }
    if iters < 1 {
        return Err(Error::InvalidParameter(
            "bootstrap needs at least one iteration".to_string(),
        ));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let diffs = super::bootstrap::resample_means_seq(&d, iters, seed)?;
    let not_positive = diffs.iter().filter(|&&m| m <= 0.0).count();
    Ok(not_positive as f64 / iters as f64)
}

/// Star annotation: "***" for p ≤ 0.001, "**" for p ≤ 0.01, "*" for
/// p ≤ 0.05, empty otherwise.
pub fn significance_stars(p: f64) -> &'static str {
    if p <= 0.001 {
        "***"
    } else if p <= 0.01 {
        "**"
    } else if p <= 0.05 {
        "*"
    } else {
        ""
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_methods_are_not_significant() {
        let a = [1.0, 0.0, 1.0, 1.0, 0.0];
        assert_eq!(paired_one_sided_ttest(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn uniform_dominance_is_maximally_significant() {
        let a = [1.0, 1.0, 1.0, 1.0];
        let b = [0.0, 0.0, 0.0, 0.0];
        assert_eq!(paired_one_sided_ttest(&a, &b).unwrap(), 0.0);
        assert_eq!(paired_one_sided_ttest(&b, &a).unwrap(), 1.0);
    }

    #[test]
    fn textbook_fixture_matches_reference_p() {
        // d = [1, -1, 1, 1]: mean 0.5, sd 1, t = 1.0 at 3 degrees of
        // freedom; upper tail = 0.19550110947788527.
        let a = [1.0, 0.0, 1.0, 1.0];
        let b = [0.0, 1.0, 0.0, 0.0];
        let p = paired_one_sided_ttest(&a, &b).unwrap();
        assert!((p - 0.1955).abs() < 0.0005, "p = {p}");
    }

    #[test]
    fn negative_shift_gives_large_p() {
        let a = [0.0, 0.2, 0.1, 0.0, 0.3];
        let b = [0.5, 0.6, 0.4, 0.8, 0.5];
        let p = paired_one_sided_ttest(&a, &b).unwrap();
        assert!(p > 0.95);
    }

    #[test]
    fn length_mismatch_and_tiny_input_error() {
        assert!(paired_one_sided_ttest(&[1.0], &[1.0, 0.0]).is_err());
        assert!(paired_one_sided_ttest(&[1.0], &[0.0]).is_err());
    }

    #[test]
    fn star_thresholds_are_inclusive() {
        assert_eq!(significance_stars(0.0005), "***");
        assert_eq!(significance_stars(0.001), "***");
        assert_eq!(significance_stars(0.0011), "**");
        assert_eq!(significance_stars(0.01), "**");
        assert_eq!(significance_stars(0.011), "*");
        assert_eq!(significance_stars(0.03), "*");
        assert_eq!(significance_stars(0.05), "*");
        assert_eq!(significance_stars(0.0501), "");
        assert_eq!(significance_stars(0.2), "");
    }

    #[test]
    fn bootstrap_p_is_deterministic_and_sane() {
        let a = [1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0, 1.0];
        let b = [0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
        let p1 = bootstrap_difference_pvalue(&a, &b, 1000, 42).unwrap();
        let p2 = bootstrap_difference_pvalue(&a, &b, 1000, 42).unwrap();
        assert_eq!(p1, p2);
        assert!(p1 < 0.05, "clear dominance should be significant, p={p1}");

        let p_rev = bootstrap_difference_pvalue(&b, &a, 1000, 42).unwrap();
        assert!(p_rev > 0.5);
    }
}
