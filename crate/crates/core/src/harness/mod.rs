//! End-to-end benchmark runs: score every pose of every manifest entry,
//! aggregate per criterion and pose budget, and persist deterministic
//! artifacts (CSV, JSON, SVG, HTML).
//!
//! Orchestration rules:
//!
//! * poses are scored in parallel but reduced in a fixed order
//!   (entry_id, seed, sample), so thread count never affects output;
//! * a pose that cannot be scored (unreadable file, ligand graph mismatch)
//!   is recorded as a failed pose and counts as non-success for every
//!   criterion — failures never shrink the pose count;
//! * an entry whose ground truth cannot be loaded is skipped with a logged
//!   reason; every other entry contributes exactly its pose-budget rows.

mod compare;
mod persist;
mod report;
mod stratify;

pub use compare::{compare_methods, compare_methods_with, MethodComparison};
pub use persist::{load_run_results, write_outputs, RunPaths};
pub use report::{render_report, ReportBundle};
pub use stratify::{stratify, StratAxis, StratificationSpec, StratifiedAxis, Stratum, StratumAggregate};

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chem::{load_complex, load_ligand};
use crate::error::{Error, Result};
use crate::geom::{bisy_rmsd_with, lddt_pli, LddtConfig, RmsdConfig};
use crate::manifest::{Annotations, BenchmarkManifest, ManifestEntry, REQUIRED_POSES};
use crate::molgraph::graphs_match;
use crate::stats::{
    aggregate, aggregate_continuous, best_at_k, bootstrap, expected_max_at_k,
    select_max_confidence, AggregateResult, PoseOutcome, StructureOutcome,
    DEFAULT_BOOTSTRAP_ITERS,
};
use crate::structure::ComplexStructure;
use crate::validity::{run_checks_guarded, CheckConfig, CheckReport};
use crate::vec3::Vec3;

/// Success criteria a run can report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Criterion {
    /// Binding-site RMSD strictly below 2 Å.
    #[serde(rename = "rmsd_lt_2")]
    RmsdLt2,
    /// RMSD < 2 Å and the pose passes the full validity suite.
    #[serde(rename = "rmsd_lt_2_pb_valid")]
    RmsdLt2PbValid,
    /// Binding-site RMSD strictly below 1 Å.
    #[serde(rename = "rmsd_lt_1")]
    RmsdLt1,
    /// RMSD < 1 Å and the pose passes the full validity suite.
    #[serde(rename = "rmsd_lt_1_pb_valid")]
    RmsdLt1PbValid,
    /// Mean lDDT-PLI (continuous; aggregated as the expected best of k).
    #[serde(rename = "lddt_pli_mean")]
    LddtPliMean,
}

impl Criterion {
    /// All criteria in canonical report order.
    pub const ALL: [Criterion; 5] = [
        Criterion::RmsdLt2,
        Criterion::RmsdLt2PbValid,
        Criterion::RmsdLt1,
        Criterion::RmsdLt1PbValid,
        Criterion::LddtPliMean,
    ];

    /// Stable identifier used in config files and output columns.
    pub fn name(self) -> &'static str {
        match self {
            Criterion::RmsdLt2 => "rmsd_lt_2",
            Criterion::RmsdLt2PbValid => "rmsd_lt_2_pb_valid",
            Criterion::RmsdLt1 => "rmsd_lt_1",
            Criterion::RmsdLt1PbValid => "rmsd_lt_1_pb_valid",
            Criterion::LddtPliMean => "lddt_pli_mean",
        }
    }

    /// Human-readable label for charts and tables.
    pub fn label(self) -> &'static str {
        match self {
            Criterion::RmsdLt2 => "RMSD < 2 Å",
            Criterion::RmsdLt2PbValid => "RMSD < 2 Å, valid",
            Criterion::RmsdLt1 => "RMSD < 1 Å",
            Criterion::RmsdLt1PbValid => "RMSD < 1 Å, valid",
            Criterion::LddtPliMean => "lDDT-PLI",
        }
    }

    /// Parse the stable identifier.
    pub fn from_name(name: &str) -> Result<Criterion> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown criterion '{name}'")))
    }

    /// Continuous criteria aggregate metric values; binary ones count
    /// successes.
    pub fn is_continuous(self) -> bool {
        matches!(self, Criterion::LddtPliMean)
    }

    /// Binary success of one pose, `None` for continuous criteria.
    fn pose_success(self, s: &PoseScore) -> Option<bool> {
        let lt = |bound: f64| s.rmsd.is_some_and(|r| r < bound);
        match self {
            Criterion::RmsdLt2 => Some(lt(2.0)),
            Criterion::RmsdLt2PbValid => Some(lt(2.0) && s.pb_valid),
            Criterion::RmsdLt1 => Some(lt(1.0)),
            Criterion::RmsdLt1PbValid => Some(lt(1.0) && s.pb_valid),
            Criterion::LddtPliMean => None,
        }
    }
}

impl std::fmt::Display for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Bootstrap settings of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapConfig {
    pub iters: u64,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            iters: DEFAULT_BOOTSTRAP_ITERS,
            seed: 0,
        }
    }
}

/// Full configuration of a benchmark run. Every field has a default, so a
/// config file only needs the keys it wants to change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Pose budgets to report, each in [1, pose count].
    pub k_values: Vec<usize>,
    /// Criteria to report.
    pub criteria: Vec<Criterion>,
    pub bootstrap: BootstrapConfig,
    pub checks: CheckConfig,
    pub lddt: LddtConfig,
    pub rmsd: RmsdConfig,
    /// Worker threads for pose scoring; `None` uses the rayon default.
    pub workers: Option<usize>,
    /// Directory the run writes its artifacts into.
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            k_values: vec![1, 5, 20],
            criteria: Criterion::ALL.to_vec(),
            bootstrap: BootstrapConfig::default(),
            checks: CheckConfig::default(),
            lddt: LddtConfig::default(),
            rmsd: RmsdConfig::default(),
            workers: None,
            out_dir: PathBuf::from("poseval-out"),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_values.is_empty() {
            return Err(Error::Config("k_values must not be empty".into()));
        }
        for &k in &self.k_values {
            if k < 1 || k > REQUIRED_POSES {
                return Err(Error::Config(format!(
                    "k value {k} outside [1, {REQUIRED_POSES}]"
                )));
            }
        }
        if self.criteria.is_empty() {
            return Err(Error::Config("criteria must not be empty".into()));
        }
        if self.bootstrap.iters < 1 {
            return Err(Error::Config("bootstrap.iters must be at least 1".into()));
        }
        if let Some(w) = self.workers {
            if w < 1 {
                return Err(Error::Config("workers must be at least 1".into()));
            }
        }
        if !(self.rmsd.site_cutoff > 0.0) {
            return Err(Error::Config("rmsd.site_cutoff must be positive".into()));
        }
        self.checks.validate()?;
        self.lddt.validate()?;
        Ok(())
    }

    /// Sorted, de-duplicated pose budgets.
    fn sorted_k_values(&self) -> Vec<usize> {
        let mut ks = self.k_values.clone();
        ks.sort_unstable();
        ks.dedup();
        ks
    }

    /// Requested criteria in canonical order, de-duplicated.
    fn ordered_criteria(&self) -> Vec<Criterion> {
        Criterion::ALL
            .into_iter()
            .filter(|c| self.criteria.contains(c))
            .collect()
    }

    /// Apply environment overrides: `POSEVAL_WORKERS` (positive integer)
    /// and `POSEVAL_OUT_DIR` (path). `lookup` abstracts `std::env::var` so
    /// tests can inject values.
    pub fn apply_env_overrides(&mut self, lookup: &dyn Fn(&str) -> Option<String>) -> Result<()> {
        if let Some(raw) = lookup("POSEVAL_WORKERS") {
            let workers: usize = raw.parse().map_err(|_| {
                Error::Config(format!("POSEVAL_WORKERS must be a positive integer, got '{raw}'"))
            })?;
            if workers < 1 {
                return Err(Error::Config("POSEVAL_WORKERS must be at least 1".into()));
            }
            self.workers = Some(workers);
        }
        if let Some(dir) = lookup("POSEVAL_OUT_DIR") {
            if dir.is_empty() {
                return Err(Error::Config("POSEVAL_OUT_DIR must not be empty".into()));
            }
            self.out_dir = PathBuf::from(dir);
        }
        Ok(())
    }
}

/// Load a run configuration from a TOML file.
pub fn load_run_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let config: RunConfig =
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    config.validate()?;
    Ok(config)
}

/// Everything measured for one pose.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseMetrics {
    pub entry_id: String,
    pub seed: u32,
    pub sample: u32,
    /// Symmetry-corrected binding-site RMSD, Å; `None` when unscorable.
    pub rmsd: Option<f64>,
    /// Interface lDDT in [0, 1]; `None` when unscorable.
    pub lddt_pli: Option<f64>,
    /// Conjunction of all validity checks.
    pub pb_valid: bool,
    /// Full per-check outcomes.
    pub check_values: CheckReport,
    /// Model self-reported confidence, if the manifest carried one.
    pub confidence: Option<f64>,
    /// Scoring wall time in seconds. Excluded from persisted outputs so
    /// reruns stay byte-identical.
    #[serde(skip)]
    pub wall_time: f64,
    /// Why the pose could not be scored, when it could not.
    pub failure: Option<String>,
}

/// Per-pose scores reduced to what aggregation needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseScore {
    pub seed: u32,
    pub sample: u32,
    pub rmsd: Option<f64>,
    pub lddt_pli: Option<f64>,
    pub pb_valid: bool,
    pub confidence: Option<f64>,
}

impl From<&PoseMetrics> for PoseScore {
    fn from(m: &PoseMetrics) -> Self {
        PoseScore {
            seed: m.seed,
            sample: m.sample,
            rmsd: m.rmsd,
            lddt_pli: m.lddt_pli,
            pb_valid: m.pb_valid,
            confidence: m.confidence,
        }
    }
}

/// All pose scores of one entry, with its stratification annotations.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryOutcomes {
    pub entry_id: String,
    pub scores: Vec<PoseScore>,
    pub annotations: Option<Annotations>,
}

impl EntryOutcomes {
    pub fn n(&self) -> usize {
        self.scores.len()
    }

    /// Successful poses under a binary criterion; 0 for the continuous one.
    pub fn success_count(&self, criterion: Criterion) -> usize {
        self.scores
            .iter()
            .filter(|s| criterion.pose_success(s).unwrap_or(false))
            .count()
    }

    /// Per-pose lDDT values with unscorable poses at 0.
    pub fn lddt_values(&self) -> Vec<f64> {
        self.scores
            .iter()
            .map(|s| s.lddt_pli.unwrap_or(0.0))
            .collect()
    }

    /// The entry's contribution to an aggregate: best-of-k success
    /// probability for binary criteria, expected best lDDT for the
    /// continuous one.
    pub fn criterion_value(&self, criterion: Criterion, k: usize) -> Result<f64> {
        if criterion.is_continuous() {
            expected_max_at_k(&self.lddt_values(), k)
        } else {
            best_at_k(self.n(), self.success_count(criterion), k)
        }
    }

    /// View as a statistics outcome (success flags, confidences, lDDT
    /// values) under one criterion.
    pub fn structure_outcome(&self, criterion: Criterion) -> StructureOutcome {
        let per_pose = self
            .scores
            .iter()
            .map(|s| PoseOutcome {
                seed: s.seed,
                sample: s.sample,
                success: criterion.pose_success(s).unwrap_or(false),
                confidence: s.confidence,
                value: s.lddt_pli.unwrap_or(0.0),
            })
            .collect();
        StructureOutcome::from_poses(self.entry_id.clone(), per_pose)
    }
}

/// An entry the run could not score, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedEntry {
    pub id: String,
    pub reason: String,
}

/// Success rate of the single highest-confidence pose per entry, per binary
/// criterion. Only computed when every pose of every entry carries a
/// confidence value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceRanking {
    pub metric_name: String,
    pub success_rate: f64,
    pub n_structures: usize,
}

/// Complete output of one benchmark run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResults {
    pub dataset_name: String,
    /// Every scored pose, sorted by (entry_id, seed, sample).
    pub poses: Vec<PoseMetrics>,
    /// Per-entry score groups, sorted by entry_id.
    pub entries: Vec<EntryOutcomes>,
    /// One aggregate per requested criterion × pose budget.
    pub aggregates: Vec<AggregateResult>,
    /// Top-1-by-confidence success rates, when confidences are complete.
    pub confidence_ranking: Vec<ConfidenceRanking>,
    /// Entries that could not be scored.
    pub skipped: Vec<SkippedEntry>,
}

impl RunResults {
    /// The aggregate for a given criterion and pose budget, if reported.
    pub fn aggregate_for(&self, criterion: Criterion, k: usize) -> Option<&AggregateResult> {
        self.aggregates
            .iter()
            .find(|a| a.metric_name == criterion.name() && a.k == k)
    }
}

/// Run the benchmark: score every pose of every entry, then aggregate.
///
/// Entries whose ground truth cannot be loaded are skipped with a reason;
/// individual pose failures are recorded and scored as non-success. The
/// call fails only on invalid configuration or when no entry at all could
/// be scored.
pub fn run_benchmark(manifest: &BenchmarkManifest, config: &RunConfig) -> Result<RunResults> {
    config.validate()?;
    manifest.validate()?;

    // Ground truths load once, serially; they gate entry participation.
    let mut skipped = Vec::new();
    let mut jobs: Vec<EntryJob> = Vec::new();
    for entry in &manifest.entries {
        match load_entry_job(entry) {
            Ok(job) => jobs.push(job),
            Err(err) => skipped.push(SkippedEntry {
                id: entry.id.clone(),
                reason: err.to_string(),
            }),
        }
    }
    if jobs.is_empty() {
        return Err(Error::Other(format!(
            "no entry could be scored ({} skipped)",
            skipped.len()
        )));
    }

    // Pose scoring in parallel over (entry, pose) with an ordered collect.
    let tasks: Vec<(usize, usize)> = jobs
        .iter()
        .enumerate()
        .flat_map(|(ei, job)| (0..job.entry.poses.len()).map(move |pi| (ei, pi)))
        .collect();
    let score = |&(ei, pi): &(usize, usize)| -> PoseMetrics {
        let job = &jobs[ei];
        score_pose(job, &job.entry.poses[pi], config)
    };
    let mut poses: Vec<PoseMetrics> = match config.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?
            .install(|| tasks.par_iter().map(score).collect()),
        None => tasks.par_iter().map(score).collect(),
    };
    poses.sort_by(|a, b| {
        (&a.entry_id, a.seed, a.sample).cmp(&(&b.entry_id, b.seed, b.sample))
    });

    // Group into per-entry outcomes (poses are already sorted by entry).
    let mut entries: Vec<EntryOutcomes> = Vec::new();
    for m in &poses {
        if entries.last().map(|e| e.entry_id.as_str()) != Some(m.entry_id.as_str()) {
            let annotations = manifest
                .entries
                .iter()
                .find(|e| e.id == m.entry_id)
                .and_then(|e| e.annotations.clone());
            entries.push(EntryOutcomes {
                entry_id: m.entry_id.clone(),
                scores: Vec::new(),
                annotations,
            });
        }
        entries.last_mut().expect("just pushed").scores.push(m.into());
    }

    let aggregates = compute_aggregates(
        &entries,
        &config.ordered_criteria(),
        &config.sorted_k_values(),
        config.bootstrap,
    )?;
    let confidence_ranking = compute_confidence_ranking(&entries, &config.ordered_criteria());

    Ok(RunResults {
        dataset_name: manifest.dataset_name.clone(),
        poses,
        entries,
        aggregates,
        confidence_ranking,
        skipped,
    })
}

/// One aggregate per criterion × k over per-entry outcomes. The mean is the
/// exact sample mean; the SEM comes from the seeded bootstrap.
pub(crate) fn compute_aggregates(
    entries: &[EntryOutcomes],
    criteria: &[Criterion],
    k_values: &[usize],
    bs: BootstrapConfig,
) -> Result<Vec<AggregateResult>> {
    let mut aggregates = Vec::new();
    for &criterion in criteria {
        let outcomes: Vec<StructureOutcome> = entries
            .iter()
            .map(|e| e.structure_outcome(criterion))
            .collect();
        for &k in k_values {
            let mean = if criterion.is_continuous() {
                aggregate_continuous(&outcomes, k)?
            } else {
                aggregate(&outcomes, k)?
            };
            let values: Vec<f64> = entries
                .iter()
                .map(|e| e.criterion_value(criterion, k))
                .collect::<Result<_>>()?;
            let (_, sem) = bootstrap(&values, bs.iters, bs.seed)?;
            aggregates.push(AggregateResult {
                metric_name: criterion.name().to_string(),
                k,
                mean,
                sem,
                n_structures: entries.len(),
            });
        }
    }
    Ok(aggregates)
}

/// Fraction of entries whose highest-confidence pose succeeds, per binary
/// criterion; empty when any pose lacks a confidence value.
fn compute_confidence_ranking(
    entries: &[EntryOutcomes],
    criteria: &[Criterion],
) -> Vec<ConfidenceRanking> {
    let mut out = Vec::new();
    for &criterion in criteria {
        if criterion.is_continuous() {
            continue;
        }
        let mut hits = 0usize;
        for e in entries {
            match select_max_confidence(&e.structure_outcome(criterion)) {
                Ok(true) => hits += 1,
                Ok(false) => {}
                Err(_) => return Vec::new(),
            }
        }
        out.push(ConfidenceRanking {
            metric_name: criterion.name().to_string(),
            success_rate: hits as f64 / entries.len() as f64,
            n_structures: entries.len(),
        });
    }
    out
}

struct EntryJob<'a> {
    entry: &'a ManifestEntry,
    truth: ComplexStructure,
    /// Low-strain reference conformer (graph + coords in its own order).
    reference: Option<(crate::molgraph::MolecularGraph, Vec<Vec3>)>,
}

fn load_entry_job(entry: &ManifestEntry) -> Result<EntryJob<'_>> {
    let truth = load_complex(&entry.truth_path, entry.truth_ligand_path.as_deref())?;
    truth.primary_ligand()?;
    let reference = match &entry.reference_conformer_path {
        Some(path) => Some(load_ligand(path)?),
        None => None,
    };
    Ok(EntryJob {
        entry,
        truth,
        reference,
    })
}

fn score_pose(job: &EntryJob<'_>, pose: &crate::manifest::PoseRef, config: &RunConfig) -> PoseMetrics {
    let started = Instant::now();
    let base = PoseMetrics {
        entry_id: job.entry.id.clone(),
        seed: pose.seed,
        sample: pose.sample,
        rmsd: None,
        lddt_pli: None,
        pb_valid: false,
        check_values: CheckReport {
            results: Vec::new(),
            pb_valid: false,
        },
        confidence: pose.confidence,
        wall_time: 0.0,
        failure: None,
    };

    let pred = match load_complex(&pose.path, pose.ligand_path.as_deref()) {
        Ok(p) => p,
        Err(err) => {
            let check_values = run_checks_guarded(Some(&job.truth), None, None, &config.checks);
            return PoseMetrics {
                pb_valid: check_values.pb_valid,
                check_values,
                wall_time: started.elapsed().as_secs_f64(),
                failure: Some(format!("pose load failed: {err}")),
                ..base
            };
        }
    };

    let mut failures = Vec::new();
    let rmsd = match bisy_rmsd_with(&job.truth, &pred, &config.rmsd) {
        Ok(v) => Some(v),
        Err(err) => {
            failures.push(format!("rmsd: {err}"));
            None
        }
    };
    let lddt = match lddt_pli(&job.truth, &pred, &config.lddt) {
        Ok(v) => Some(v),
        Err(err) => {
            failures.push(format!("lddt_pli: {err}"));
            None
        }
    };
    let reference_coords = reference_in_pred_order(job, &pred);
    let check_values = run_checks_guarded(
        Some(&job.truth),
        Some(&pred),
        reference_coords.as_deref(),
        &config.checks,
    );
    PoseMetrics {
        rmsd,
        lddt_pli: lddt,
        pb_valid: check_values.pb_valid,
        check_values,
        wall_time: started.elapsed().as_secs_f64(),
        failure: if failures.is_empty() {
            None
        } else {
            Some(failures.join("; "))
        },
        ..base
    }
}

/// Reorder the entry's reference conformer into the predicted ligand's atom
/// order; `None` when there is no reference or the graphs do not match (the
/// strain check then reports itself as skipped).
fn reference_in_pred_order(job: &EntryJob<'_>, pred: &ComplexStructure) -> Option<Vec<Vec3>> {
    let (ref_graph, ref_coords) = job.reference.as_ref()?;
    let pred_graph = &pred.ligands.first()?.graph;
    // mapping[ref index] = pred index.
    let mapping = graphs_match(ref_graph, pred_graph)?;
    let mut out = vec![[0.0; 3]; ref_coords.len()];
    for (ref_i, &pred_i) in mapping.iter().enumerate() {
        out[pred_i] = ref_coords[ref_i];
    }
    Some(out)
}
