//! Benchmark manifests: one JSON document per dataset listing entries, their
//! ground-truth files, predicted poses, and optional stratification
//! annotations, plus the dataset-construction rules (release-date filtering,
//! pose-count normalization, template eligibility).

use std::path::{Path, PathBuf};

use chrono::Days;
// Re-exported so callers can construct release dates without naming the
// underlying date crate themselves.
pub use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::ResidueKey;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkManifest {
    pub dataset_name: String,
    pub entries: Vec<ManifestEntry>,
}

/// Pocket-conditioning regime of an entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Unconditional,
    Conditional,
}

/// Optional per-entry stratification annotations.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Annotations {
    /// Pocket similarity to the nearest training-set pocket, in [0, 1].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pocket_similarity: Option<f64>,
    /// Occurrences of the ligand in the training set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ligand_frequency: Option<u64>,
    /// Fingerprint similarity of the ligand to its nearest training ligand.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tanimoto: Option<f64>,
}

/// One predicted pose of an entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseRef {
    pub seed: u32,
    pub sample: u32,
    pub path: PathBuf,
    /// Separate ligand topology/coordinates file (needed when `path` is a
    /// PDB/mmCIF file, which carries no bond orders).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ligand_path: Option<PathBuf>,
    /// Model self-reported confidence used for confidence-ranked selection.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub release_date: NaiveDate,
    pub truth_path: PathBuf,
    /// Ground-truth ligand topology file when `truth_path` has no embedded
    /// ligand (PDB/mmCIF inputs).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth_ligand_path: Option<PathBuf>,
    /// Low-strain reference conformer for the internal-energy check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_conformer_path: Option<PathBuf>,
    pub poses: Vec<PoseRef>,
    pub regime: Regime,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pocket_residues: Option<Vec<ResidueKey>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotations: Option<Annotations>,
}

impl ManifestEntry {
    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for p in &self.poses {
            if !seen.insert((p.seed, p.sample)) {
                return Err(Error::Config(format!(
                    "entry '{}': duplicate pose (seed {}, sample {})",
                    self.id, p.seed, p.sample
                )));
            }
        }
        if let Some(a) = &self.annotations {
            for (name, v) in [
                ("pocket_similarity", a.pocket_similarity),
                ("tanimoto", a.tanimoto),
            ] {
                if let Some(x) = v {
                    if !(0.0..=1.0).contains(&x) {
                        return Err(Error::Config(format!(
                            "entry '{}': {name} {x} outside [0,1]",
                            self.id
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

impl BenchmarkManifest {
    pub fn validate(&self) -> Result<()> {
        let mut ids = std::collections::HashSet::new();
        for e in &self.entries {
            if !ids.insert(&e.id) {
                return Err(Error::Config(format!("duplicate entry id '{}'", e.id)));
            }
            e.validate()?;
        }
        Ok(())
    }

    /// Resolve every relative path against `base` (the manifest's directory).
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for e in &mut self.entries {
            fix(&mut e.truth_path);
            if let Some(p) = &mut e.truth_ligand_path {
                fix(p);
            }
            if let Some(p) = &mut e.reference_conformer_path {
                fix(p);
            }
            for pose in &mut e.poses {
                fix(&mut pose.path);
                if let Some(p) = &mut pose.ligand_path {
                    fix(p);
                }
            }
        }
    }
}

/// Load and validate a manifest, resolving relative paths against its parent
/// directory.
pub fn load_manifest(path: &Path) -> Result<BenchmarkManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut manifest: BenchmarkManifest = serde_json::from_str(&text)?;
    manifest.validate()?;
    if let Some(parent) = path.parent() {
        manifest.resolve_paths(parent);
    }
    Ok(manifest)
}

/// Boundary semantics for release-date filtering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DateFilterMode {
    /// Keep entries released on the cutoff date or later.
    OnOrAfter,
    /// Keep entries released strictly after the cutoff date.
    After,
}

/// Retain entries matching the date predicate; order preserved.
pub fn filter_by_release_date(
    manifest: &BenchmarkManifest,
    cutoff: NaiveDate,
    mode: DateFilterMode,
) -> BenchmarkManifest {
    let entries = manifest
        .entries
        .iter()
        .filter(|e| match mode {
            DateFilterMode::OnOrAfter => e.release_date >= cutoff,
            DateFilterMode::After => e.release_date > cutoff,
        })
        .cloned()
        .collect();
    BenchmarkManifest {
        dataset_name: manifest.dataset_name.clone(),
        entries,
    }
}

/// Number of poses every retained entry must have.
pub const REQUIRED_POSES: usize = 20;

/// Result of pose-count normalization: rejection is an outcome, not an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NormalizeOutcome {
    Accepted(ManifestEntry),
    Rejected {
        id: String,
        available: usize,
        required: usize,
    },
}

/// Keep the first `required` poses in (seed, sample) lexicographic order;
/// entries with fewer poses are rejected with a reason.
pub fn normalize_poses(entry: &ManifestEntry, required: usize) -> NormalizeOutcome {
    assert!(required > 0, "required pose count must be positive");
    if entry.poses.len() < required {
        return NormalizeOutcome::Rejected {
            id: entry.id.clone(),
            available: entry.poses.len(),
            required,
        };
    }
    let mut poses = entry.poses.clone();
    poses.sort_by_key(|p| (p.seed, p.sample));
    poses.truncate(required);
    let mut out = entry.clone();
    out.poses = poses;
    NormalizeOutcome::Accepted(out)
}

/// Minimum lead time of a template over the test structure, in days.
pub const TEMPLATE_LEAD_DAYS: u64 = 60;

/// A template structure may inform a prediction only if it was released no
/// later than the hard cutoff AND more than `TEMPLATE_LEAD_DAYS` days before
/// the test structure.
pub fn template_eligible(
    template_release: NaiveDate,
    test_release: NaiveDate,
    hard_cutoff: NaiveDate,
) -> bool {
    if template_release > hard_cutoff {
        return false;
    }
    match template_release.checked_add_days(Days::new(TEMPLATE_LEAD_DAYS)) {
        Some(shifted) => shifted < test_release,
        None => false,
    }
}
