//! Aggregation statistics for pose-prediction benchmarks.
//!
//! A benchmark scores each structure from a fixed budget of sampled poses.
//! This module turns per-pose outcomes into the reported numbers:
//!
//! * [`best_at_k`] — the unbiased probability that a random size-`k` subset
//!   of the poses contains at least one success;
//! * [`expected_max_at_k`] — the continuous analogue for real-valued scores
//!   (expected maximum over a random size-`k` subset);
//! * [`aggregate`] / [`aggregate_continuous`] — means of the above over
//!   structures;
//! * [`bootstrap`] — deterministic resampling for mean ± SEM;
//! * [`paired_one_sided_ttest`] / [`significance_stars`] — paired
//!   significance between two methods on the same structures;
//! * [`select_max_confidence`] — the success flag of the top-ranked pose by
//!   model confidence.
//!
//! Everything here is pure and deterministic: the bootstrap uses a pinned
//! counter-based generator (see [`bootstrap`]) so results are identical
//! across platforms and across serial/parallel execution.

mod bestk;
mod bootstrap;
mod ttest;

pub use bestk::{best_at_k, binomial, expected_max_at_k};
pub use bootstrap::{bootstrap, bootstrap_parallel, mix64, DEFAULT_BOOTSTRAP_ITERS};
pub use ttest::{bootstrap_difference_pvalue, paired_one_sided_ttest, significance_stars};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One scored pose of a structure, reduced to what aggregation needs:
/// whether it succeeded under the criterion at hand, its raw metric value
/// (for continuous aggregation), and the model's confidence (for ranking).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseOutcome {
    /// Inference seed that produced the pose.
    pub seed: u32,
    /// Sample index within the seed.
    pub sample: u32,
    /// Did the pose meet the success criterion?
    pub success: bool,
    /// Model confidence used for top-1 ranking, if reported.
    pub confidence: Option<f64>,
    /// Raw metric value (e.g. an interface score), used by
    /// [`aggregate_continuous`].
    pub value: f64,
}

/// All pose outcomes for one structure under one named criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureOutcome {
    /// Benchmark entry this structure belongs to.
    pub entry_id: String,
    /// Number of poses scored (the pose budget, typically 20).
    pub n: usize,
    /// Number of poses that met the criterion.
    pub c: usize,
    /// Success flag of the single highest-confidence pose; `None` when any
    /// pose lacks a confidence value.
    pub confidence_best_success: Option<bool>,
    /// The per-pose records behind `n` and `c`.
    pub per_pose: Vec<PoseOutcome>,
}

impl StructureOutcome {
    /// Builds an outcome from raw poses, deriving `n`, `c`, and
    /// `confidence_best_success`.
    pub fn from_poses(entry_id: impl Into<String>, per_pose: Vec<PoseOutcome>) -> Self {
        let n = per_pose.len();
        let c = per_pose.iter().filter(|p| p.success).count();
        let mut out = StructureOutcome {
            entry_id: entry_id.into(),
            n,
            c,
            confidence_best_success: None,
            per_pose,
        };
        out.confidence_best_success = select_max_confidence(&out).ok();
        out
    }
}

/// Success flag of the single highest-confidence pose.
///
/// Ties on confidence break towards the smallest `(seed, sample)` pair so
/// the choice never depends on input order. Every pose must carry a finite
/// confidence value.
pub fn select_max_confidence(outcome: &StructureOutcome) -> Result<bool> {
    if outcome.per_pose.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "structure {} has no poses to rank",
            outcome.entry_id
        )));
    }
    if let Some(missing) = outcome
        .per_pose
        .iter()
        .filter(|p| !p.confidence.is_some_and(f64::is_finite))
        .min_by_key(|p| (p.seed, p.sample))
    {
        return Err(Error::MissingConfidence {
            seed: missing.seed,
            sample: missing.sample,
        });
    }
    let best = outcome
        .per_pose
        .iter()
        .min_by(|a, b| {
            let ca = a.confidence.expect("checked above");
            let cb = b.confidence.expect("checked above");
            // Highest confidence first, then smallest (seed, sample).
            cb.partial_cmp(&ca)
                .expect("finite confidences compare totally")
                .then_with(|| (a.seed, a.sample).cmp(&(b.seed, b.sample)))
        })
        .expect("nonempty checked above");
    Ok(best.success)
}

/// Mean of [`best_at_k`] over structures: the benchmark's headline success
/// rate at pose budget `k`.
///
/// Errors when `outcomes` is empty or any structure has fewer than `k`
/// poses.
pub fn aggregate(outcomes: &[StructureOutcome], k: usize) -> Result<f64> {
    if outcomes.is_empty() {
        return Err(Error::InvalidParameter(
            "aggregate needs at least one structure".to_string(),
        ));
    }
    let mut sum = 0.0;
    for o in outcomes {
        sum += best_at_k(o.n, o.c, k)?;
    }
    Ok(sum / outcomes.len() as f64)
}

/// Mean of [`expected_max_at_k`] over structures, applied to each
/// structure's per-pose metric values.
///
/// At `k = 1` this is the plain mean of the per-structure mean values; at
/// `k = n` it is the mean of per-structure maxima.
pub fn aggregate_continuous(outcomes: &[StructureOutcome], k: usize) -> Result<f64> {
    if outcomes.is_empty() {
        return Err(Error::InvalidParameter(
            "aggregate needs at least one structure".to_string(),
        ));
    }
    let mut sum = 0.0;
    for o in outcomes {
        let values: Vec<f64> = o.per_pose.iter().map(|p| p.value).collect();
        sum += expected_max_at_k(&values, k)?;
    }
    Ok(sum / outcomes.len() as f64)
}

/// One reported aggregate: a named metric at a pose budget `k`, with its
/// bootstrap mean, SEM, and the number of structures behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateResult {
    /// Name of the success criterion or metric.
    pub metric_name: String,
    /// Pose budget the aggregate was computed at.
    pub k: usize,
    /// Bootstrap mean of the per-structure values.
    pub mean: f64,
    /// Bootstrap standard error of the mean.
    pub sem: f64,
    /// Number of structures aggregated.
    pub n_structures: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pose(seed: u32, sample: u32, success: bool, confidence: f64, value: f64) -> PoseOutcome {
        PoseOutcome {
            seed,
            sample,
            success,
            confidence: Some(confidence),
            value,
        }
    }

    fn counted(entry: &str, n: usize, c: usize) -> StructureOutcome {
        let poses = (0..n)
            .map(|i| pose(i as u32, 0, i < c, 0.5, if i < c { 1.0 } else { 0.0 }))
            .collect();
        StructureOutcome::from_poses(entry, poses)
    }

    #[test]
    fn from_poses_counts_successes() {
        let s = counted("e1", 20, 7);
        assert_eq!(s.n, 20);
        assert_eq!(s.c, 7);
        assert_eq!(s.per_pose.len(), 20);
        assert_eq!(s.entry_id, "e1");
    }

    #[test]
    fn aggregate_of_full_and_empty_structures_is_half() {
        let outcomes = vec![counted("full", 20, 20), counted("none", 20, 0)];
        assert_eq!(aggregate(&outcomes, 5).unwrap(), 0.5);
    }

    #[test]
    fn aggregate_at_full_budget_hits_any_success() {
        let outcomes = vec![counted("one", 20, 1)];
        assert_eq!(aggregate(&outcomes, 20).unwrap(), 1.0);
    }

    #[test]
    fn aggregate_matches_per_structure_enumeration() {
        let outcomes = vec![counted("a", 5, 1), counted("b", 5, 2), counted("c", 5, 3)];
        let expected = (0.6 + 0.9 + 1.0) / 3.0;
        assert!((aggregate(&outcomes, 3).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn aggregate_rejects_empty_and_short_budgets() {
        assert!(aggregate(&[], 1).is_err());
        let outcomes = vec![counted("a", 5, 1)];
        assert!(aggregate(&outcomes, 6).is_err());
    }

    #[test]
    fn max_confidence_pose_decides_top1() {
        let s = StructureOutcome::from_poses(
            "e",
            vec![
                pose(0, 0, false, 0.2, 4.0),
                pose(0, 1, true, 0.9, 1.2),
                pose(1, 0, false, 0.5, 3.0),
            ],
        );
        assert_eq!(select_max_confidence(&s).unwrap(), true);
        assert_eq!(s.confidence_best_success, Some(true));
    }

    #[test]
    fn top1_is_false_when_every_pose_fails() {
        let s = StructureOutcome::from_poses(
            "e",
            vec![pose(0, 0, false, 0.2, 4.0), pose(0, 1, false, 0.9, 5.0)],
        );
        assert_eq!(select_max_confidence(&s).unwrap(), false);
    }

    #[test]
    fn confidence_ties_break_towards_earlier_seed_sample() {
        let s = StructureOutcome::from_poses(
            "e",
            vec![
                pose(2, 0, false, 0.9, 4.0),
                pose(1, 3, true, 0.9, 1.0),
                pose(1, 5, false, 0.9, 4.0),
            ],
        );
        // (1,3) precedes (1,5) and (2,0) at the shared maximum.
        assert_eq!(select_max_confidence(&s).unwrap(), true);
    }

    #[test]
    fn missing_confidence_is_reported_with_pose_identity() {
        let mut poses = vec![pose(0, 0, true, 0.9, 1.0), pose(0, 1, true, 0.8, 1.5)];
        poses[1].confidence = None;
        let s = StructureOutcome::from_poses("e", poses);
        assert_eq!(s.confidence_best_success, None);
        match select_max_confidence(&s) {
            Err(Error::MissingConfidence { seed: 0, sample: 1 }) => {}
            other => panic!("expected MissingConfidence, got {other:?}"),
        }
    }

    #[test]
    fn continuous_aggregate_is_mean_of_means_at_k1() {
        let a = StructureOutcome::from_poses(
            "a",
            vec![pose(0, 0, true, 0.5, 0.2), pose(0, 1, true, 0.5, 0.4)],
        );
        let b = StructureOutcome::from_poses(
            "b",
            vec![pose(0, 0, true, 0.5, 0.6), pose(0, 1, true, 0.5, 0.8)],
        );
        let got = aggregate_continuous(&[a, b], 1).unwrap();
        assert!((got - 0.5).abs() < 1e-12);
    }

    #[test]
    fn continuous_aggregate_is_mean_of_maxima_at_full_budget() {
        let a = StructureOutcome::from_poses(
            "a",
            vec![pose(0, 0, true, 0.5, 0.2), pose(0, 1, true, 0.5, 0.4)],
        );
        let b = StructureOutcome::from_poses(
            "b",
            vec![pose(0, 0, true, 0.5, 0.6), pose(0, 1, true, 0.5, 0.8)],
        );
        let got = aggregate_continuous(&[a, b], 2).unwrap();
        assert!((got - (0.4 + 0.8) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn aggregate_result_round_trips_through_json() {
        let r = AggregateResult {
            metric_name: "rmsd_lt_2".to_string(),
            k: 5,
            mean: 0.42,
            sem: 0.03,
            n_structures: 128,
        };
        let text = serde_json::to_string(&r).unwrap();
        let back: AggregateResult = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
