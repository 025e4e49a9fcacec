//! Pocket-residue selection for conditional-mode benchmarking: pick at most
//! two protein residues that best localize the ligand's binding site, to be
//! handed to a model as pocket conditioning.
//!
//! Candidates are residues with a heavy atom within 6.0 Å of any ligand
//! heavy atom. Each candidate is scored by the median, over ligand heavy
//! atoms, of that atom's minimum distance to the residue's heavy atoms; the
//! smallest score wins, and a second residue is added only if it sits at
//! least eight positions away in the same chain (or on another chain).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::{ComplexStructure, ResidueKey, ResidueSite};
use crate::vec3;

/// Candidate inclusion radius around the ligand, Å.
pub const POCKET_CUTOFF: f64 = 6.0;

/// Minimum same-chain sequence-index separation between the two picks.
pub const MIN_SEQUENCE_SEPARATION: i64 = 8;

/// How a candidate residue's distance score is aggregated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MedianMode {
    /// Median over ligand heavy atoms of each atom's minimum distance to
    /// the residue (default).
    #[default]
    LigandAtoms,
    /// Median over all ligand-residue heavy-atom pairs closer than the
    /// cutoff. Kept as an alternative aggregation behind this flag.
    ContactPairs,
}

/// Up to two selected residues with their median distance scores (Å),
/// ordered by selection (best first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PocketSelection {
    pub residues: Vec<ResidueKey>,
    pub median_distances: Vec<f64>,
}

impl PocketSelection {
    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    /// Structural invariants: at most two residues, scores parallel, and
    /// same-chain pairs separated by at least eight sequence positions.
    pub fn validate(&self) -> Result<()> {
        if self.residues.len() > 2 {
            return Err(Error::InvalidParameter(format!(
                "pocket selection holds {} residues, expected at most 2",
                self.residues.len()
            )));
        }
        if self.residues.len() != self.median_distances.len() {
            return Err(Error::InvalidParameter(
                "pocket selection scores do not match residues".to_string(),
            ));
        }
        if let [a, b] = self.residues.as_slice() {
            if !sequence_separated(a, b) {
                return Err(Error::InvalidParameter(format!(
                    "pocket residues {a} and {b} violate the {MIN_SEQUENCE_SEPARATION}-residue separation"
                )));
            }
        }
        Ok(())
    }
}

fn sequence_separated(a: &ResidueKey, b: &ResidueKey) -> bool {
    a.chain_id != b.chain_id
        || (i64::from(a.seq_index) - i64::from(b.seq_index)).abs() >= MIN_SEQUENCE_SEPARATION
}

/// Select pocket residues with the default cutoff and scoring mode.
///
/// No candidate within the cutoff yields an empty selection, not an error;
/// callers surface that as a warning.
pub fn select_pocket_residues(truth: &ComplexStructure) -> Result<PocketSelection> {
    select_pocket_residues_with(truth, POCKET_CUTOFF, MedianMode::LigandAtoms)
}

pub fn select_pocket_residues_with(
    truth: &ComplexStructure,
    cutoff: f64,
    mode: MedianMode,
) -> Result<PocketSelection> {
    if !(cutoff > 0.0) || !cutoff.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "pocket cutoff must be positive, got {cutoff}"
        )));
    }
    let lig = truth
        .ligands
        .first()
        .ok_or_else(|| Error::TopologyMismatch("structure carries no ligand".to_string()))?;

    // Score every candidate residue; order by (score, key) for determinism.
    let mut scored: Vec<(f64, ResidueKey)> = Vec::new();
    for chain in &truth.chains {
        for residue in &chain.residues {
            if let Some(score) = score_residue(&lig.coords, residue, cutoff, mode) {
                scored.push((score, residue.key()));
            }
        }
    }
    scored.sort_by(|(sa, ka), (sb, kb)| {
        sa.partial_cmp(sb).expect("finite scores").then_with(|| ka.cmp(kb))
    });

    let mut residues = Vec::new();
    let mut median_distances = Vec::new();
    if let Some((first_score, first_key)) = scored.first().cloned() {
        residues.push(first_key.clone());
        median_distances.push(first_score);
        if let Some((second_score, second_key)) = scored
            .iter()
            .find(|(_, key)| sequence_separated(&first_key, key))
            .cloned()
        {
            residues.push(second_key);
            median_distances.push(second_score);
        }
    }

    let selection = PocketSelection {
        residues,
        median_distances,
    };
    selection.validate()?;
    Ok(selection)
}

/// Score a residue against the ligand, or `None` when it is not a candidate
/// (no heavy atom strictly within the cutoff).
fn score_residue(
    lig_coords: &[vec3::Vec3],
    residue: &ResidueSite,
    cutoff: f64,
    mode: MedianMode,
) -> Option<f64> {
    let heavy: Vec<vec3::Vec3> = residue
        .atoms
        .iter()
        .filter(|a| !a.element.is_hydrogen())
        .map(|a| a.coords)
        .collect();
    if heavy.is_empty() {
        return None;
    }
    let is_candidate = lig_coords
        .iter()
        .any(|&l| heavy.iter().any(|&r| vec3::dist(l, r) < cutoff));
    if !is_candidate {
        return None;
    }
    let score = match mode {
        MedianMode::LigandAtoms => {
            let mins: Vec<f64> = lig_coords
                .iter()
                .map(|&l| {
                    heavy
                        .iter()
                        .map(|&r| vec3::dist(l, r))
                        .fold(f64::INFINITY, f64::min)
                })
                .collect();
            median(mins)
        }
        MedianMode::ContactPairs => {
            let pairs: Vec<f64> = lig_coords
                .iter()
                .flat_map(|&l| heavy.iter().map(move |&r| vec3::dist(l, r)))
                .filter(|&d| d < cutoff)
                .collect();
            median(pairs)
        }
    };
    Some(score)
}

/// Median of an unordered list: middle element, or the mean of the two
/// middles for even lengths. The list is nonempty by construction.
fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}
