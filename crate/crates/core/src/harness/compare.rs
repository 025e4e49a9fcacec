//! Paired significance comparison of two runs over the same entry set.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{bootstrap_difference_pvalue, paired_one_sided_ttest, significance_stars};

use super::{Criterion, RunResults};

/// Outcome of comparing method A against method B on one criterion at one
/// pose budget. The test is one-sided: small p-values support "A beats B".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodComparison {
    pub metric_name: String,
    pub k: usize,
    pub mean_a: f64,
    pub mean_b: f64,
    /// `mean_a - mean_b`.
    pub delta: f64,
    /// One-sided paired t-test p-value for mean(A - B) > 0.
    pub p_value: f64,
    /// Star annotation for `p_value`.
    pub stars: String,
    /// Paired-bootstrap p-value, when requested.
    pub bootstrap_p: Option<f64>,
    pub n_entries: usize,
}

/// Compare two runs with the default (t-test only) settings.
pub fn compare_methods(
    a: &RunResults,
    b: &RunResults,
    k: usize,
    criterion: Criterion,
) -> Result<MethodComparison> {
    compare_methods_with(a, b, k, criterion, None)
}

/// Compare two runs; `bootstrap` optionally adds a paired-bootstrap p-value
/// computed with the given (iterations, seed).
///
/// Both runs must cover exactly the same entries; otherwise the error lists
/// the symmetric difference.
pub fn compare_methods_with(
    a: &RunResults,
    b: &RunResults,
    k: usize,
    criterion: Criterion,
    bootstrap: Option<(u64, u64)>,
) -> Result<MethodComparison> {
    let index = |r: &RunResults| -> BTreeMap<String, usize> {
        r.entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.entry_id.clone(), i))
            .collect()
    };
    let ia = index(a);
    let ib = index(b);
    let only_a: Vec<String> = ia.keys().filter(|k| !ib.contains_key(*k)).cloned().collect();
    let only_b: Vec<String> = ib.keys().filter(|k| !ia.contains_key(*k)).cloned().collect();
    if !only_a.is_empty() || !only_b.is_empty() {
        return Err(Error::EntrySetMismatch { only_a, only_b });
    }

    // Paired per-entry values in sorted entry order.
    let mut va = Vec::with_capacity(ia.len());
    let mut vb = Vec::with_capacity(ia.len());
    for (id, &i) in &ia {
        va.push(a.entries[i].criterion_value(criterion, k)?);
        vb.push(b.entries[ib[id]].criterion_value(criterion, k)?);
    }

    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let mean_a = mean(&va);
    let mean_b = mean(&vb);
    let p_value = paired_one_sided_ttest(&va, &vb)?;
    let bootstrap_p = match bootstrap {
        Some((iters, seed)) => Some(bootstrap_difference_pvalue(&va, &vb, iters, seed)?),
        None => None,
    };
    Ok(MethodComparison {
        metric_name: criterion.name().to_string(),
        k,
        mean_a,
        mean_b,
        delta: mean_a - mean_b,
        p_value,
        stars: significance_stars(p_value).to_string(),
        bootstrap_p,
        n_entries: ia.len(),
    })
}
