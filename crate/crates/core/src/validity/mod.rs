//! Physical-plausibility suite: 24 named checks over a predicted pose and
//! its environment, with the overall PB-valid flag as their conjunction.
//!
//! Check outcomes are recorded, never thrown: an unparseable input produces
//! a report with the load checks failed. Every report carries all 24 checks
//! exactly once, in a fixed documented order, so serialized outputs are
//! byte-stable.

mod environment;
mod geometry;
mod stereo;
mod topology;

use serde::{Deserialize, Serialize};

use crate::molgraph::graphs_match;
use crate::structure::ComplexStructure;
use crate::vec3::Vec3;

pub use environment::{check_environment, volume_overlap_fraction};
pub use geometry::check_geometry;
pub use stereo::check_stereo;
pub use topology::check_topology;

/// The 24 checks, in canonical report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CheckName {
    #[serde(rename = "mol_pred_loaded")]
    MolPredLoaded,
    #[serde(rename = "mol_true_loaded")]
    MolTrueLoaded,
    #[serde(rename = "mol_cond_loaded")]
    MolCondLoaded,
    #[serde(rename = "sanitization")]
    Sanitization,
    #[serde(rename = "all_atoms_connected")]
    AllAtomsConnected,
    #[serde(rename = "molecular_formula")]
    MolecularFormula,
    #[serde(rename = "molecular_bonds")]
    MolecularBonds,
    #[serde(rename = "double_bond_stereochemistry")]
    DoubleBondStereochemistry,
    #[serde(rename = "tetrahedral_chirality")]
    TetrahedralChirality,
    #[serde(rename = "bond_lengths")]
    BondLengths,
    #[serde(rename = "bond_angles")]
    BondAngles,
    #[serde(rename = "internal_steric_clash")]
    InternalStericClash,
    #[serde(rename = "aromatic_ring_flatness")]
    AromaticRingFlatness,
    #[serde(rename = "double_bond_flatness")]
    DoubleBondFlatness,
    #[serde(rename = "internal_energy")]
    InternalEnergy,
    #[serde(rename = "protein-ligand_maximum_distance")]
    ProteinLigandMaximumDistance,
    #[serde(rename = "minimum_distance_to_protein")]
    MinimumDistanceToProtein,
    #[serde(rename = "minimum_distance_to_organic_cofactors")]
    MinimumDistanceToOrganicCofactors,
    #[serde(rename = "minimum_distance_to_inorganic_cofactors")]
    MinimumDistanceToInorganicCofactors,
    #[serde(rename = "minimum_distance_to_waters")]
    MinimumDistanceToWaters,
    #[serde(rename = "volume_overlap_with_protein")]
    VolumeOverlapWithProtein,
    #[serde(rename = "volume_overlap_with_organic_cofactors")]
    VolumeOverlapWithOrganicCofactors,
    #[serde(rename = "volume_overlap_with_inorganic_cofactors")]
    VolumeOverlapWithInorganicCofactors,
    #[serde(rename = "volume_overlap_with_waters")]
    VolumeOverlapWithWaters,
}

impl CheckName {
    /// All 24 checks in canonical report order.
    pub const ALL: [CheckName; 24] = [
        CheckName::MolPredLoaded,
        CheckName::MolTrueLoaded,
        CheckName::MolCondLoaded,
        CheckName::Sanitization,
        CheckName::AllAtomsConnected,
        CheckName::MolecularFormula,
        CheckName::MolecularBonds,
        CheckName::DoubleBondStereochemistry,
        CheckName::TetrahedralChirality,
        CheckName::BondLengths,
        CheckName::BondAngles,
        CheckName::InternalStericClash,
        CheckName::AromaticRingFlatness,
        CheckName::DoubleBondFlatness,
        CheckName::InternalEnergy,
        CheckName::ProteinLigandMaximumDistance,
        CheckName::MinimumDistanceToProtein,
        CheckName::MinimumDistanceToOrganicCofactors,
        CheckName::MinimumDistanceToInorganicCofactors,
        CheckName::MinimumDistanceToWaters,
        CheckName::VolumeOverlapWithProtein,
        CheckName::VolumeOverlapWithOrganicCofactors,
        CheckName::VolumeOverlapWithInorganicCofactors,
        CheckName::VolumeOverlapWithWaters,
    ];

    /// Serialized snake_case name (note the hyphen in
    /// `protein-ligand_maximum_distance`).
    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::MolPredLoaded => "mol_pred_loaded",
            CheckName::MolTrueLoaded => "mol_true_loaded",
            CheckName::MolCondLoaded => "mol_cond_loaded",
            CheckName::Sanitization => "sanitization",
            CheckName::AllAtomsConnected => "all_atoms_connected",
            CheckName::MolecularFormula => "molecular_formula",
            CheckName::MolecularBonds => "molecular_bonds",
            CheckName::DoubleBondStereochemistry => "double_bond_stereochemistry",
            CheckName::TetrahedralChirality => "tetrahedral_chirality",
            CheckName::BondLengths => "bond_lengths",
            CheckName::BondAngles => "bond_angles",
            CheckName::InternalStericClash => "internal_steric_clash",
            CheckName::AromaticRingFlatness => "aromatic_ring_flatness",
            CheckName::DoubleBondFlatness => "double_bond_flatness",
            CheckName::InternalEnergy => "internal_energy",
            CheckName::ProteinLigandMaximumDistance => "protein-ligand_maximum_distance",
            CheckName::MinimumDistanceToProtein => "minimum_distance_to_protein",
            CheckName::MinimumDistanceToOrganicCofactors => {
                "minimum_distance_to_organic_cofactors"
            }
            CheckName::MinimumDistanceToInorganicCofactors => {
                "minimum_distance_to_inorganic_cofactors"
            }
            CheckName::MinimumDistanceToWaters => "minimum_distance_to_waters",
            CheckName::VolumeOverlapWithProtein => "volume_overlap_with_protein",
            CheckName::VolumeOverlapWithOrganicCofactors => {
                "volume_overlap_with_organic_cofactors"
            }
            CheckName::VolumeOverlapWithInorganicCofactors => {
                "volume_overlap_with_inorganic_cofactors"
            }
            CheckName::VolumeOverlapWithWaters => "volume_overlap_with_waters",
        }
    }
}

impl std::fmt::Display for CheckName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Parameters of the plausibility checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CheckConfig {
    /// Relative tolerance on bonded distances around the covalent-radii sum.
    pub bond_len_rel_tol: f64,
    /// Relative tolerance on bond angles around the hybridization ideal.
    pub angle_rel_tol: f64,
    /// Intramolecular clash factor on the vdW-radii sum (pairs >= 4 bonds apart).
    pub clash_vdw_factor: f64,
    /// Intermolecular minimum-distance factor on the vdW-radii sum.
    pub inter_vdw_factor: f64,
    /// Maximum allowed minimum ligand-protein heavy-atom distance, Å.
    pub max_lig_prot_dist: f64,
    /// Maximum out-of-plane deviation for flatness checks, Å.
    pub flatness_tol: f64,
    /// Maximum tolerated ligand-volume overlap fraction.
    pub volume_overlap_max: f64,
    /// Grid spacing for volume estimation, Å.
    pub grid_spacing: f64,
    /// Maximum tolerated pose/reference strain ratio.
    pub strain_ratio_max: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            bond_len_rel_tol: 0.25,
            angle_rel_tol: 0.25,
            clash_vdw_factor: 0.70,
            inter_vdw_factor: 0.75,
            max_lig_prot_dist: 5.0,
            flatness_tol: 0.25,
            volume_overlap_max: 0.075,
            grid_spacing: 0.25,
            strain_ratio_max: 100.0,
        }
    }
}

impl CheckConfig {
    pub fn validate(&self) -> crate::error::Result<()> {
        let positives = [
            ("bond_len_rel_tol", self.bond_len_rel_tol),
            ("angle_rel_tol", self.angle_rel_tol),
            ("clash_vdw_factor", self.clash_vdw_factor),
            ("inter_vdw_factor", self.inter_vdw_factor),
            ("max_lig_prot_dist", self.max_lig_prot_dist),
            ("flatness_tol", self.flatness_tol),
            ("volume_overlap_max", self.volume_overlap_max),
            ("grid_spacing", self.grid_spacing),
            ("strain_ratio_max", self.strain_ratio_max),
        ];
        for (name, v) in positives {
            if !(v > 0.0) || !v.is_finite() {
                return Err(crate::error::Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        for (name, v) in [
            ("bond_len_rel_tol", self.bond_len_rel_tol),
            ("angle_rel_tol", self.angle_rel_tol),
            ("clash_vdw_factor", self.clash_vdw_factor),
            ("inter_vdw_factor", self.inter_vdw_factor),
            ("volume_overlap_max", self.volume_overlap_max),
        ] {
            if v > 1.0 {
                return Err(crate::error::Error::InvalidParameter(format!(
                    "{name} is a fraction in (0,1], got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of a single check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub pass: bool,
    /// Measured quantity when the check has one (worst ratio, fraction, ...).
    pub value: Option<f64>,
    pub detail: String,
}

impl CheckResult {
    pub fn pass() -> Self {
        CheckResult {
            pass: true,
            value: None,
            detail: String::new(),
        }
    }

    pub fn passing(value: f64, detail: impl Into<String>) -> Self {
        CheckResult {
            pass: true,
            value: Some(value),
            detail: detail.into(),
        }
    }

    pub fn failing(value: Option<f64>, detail: impl Into<String>) -> Self {
        CheckResult {
            pass: false,
            value,
            detail: detail.into(),
        }
    }

    fn not_evaluated(reason: &str) -> Self {
        CheckResult {
            pass: false,
            value: None,
            detail: format!("not evaluated: {reason}"),
        }
    }
}

/// Full per-pose report: all 24 checks in canonical order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub results: Vec<(CheckName, CheckResult)>,
    pub pb_valid: bool,
}

impl CheckReport {
    /// Assemble from per-group partial results; any check not supplied is
    /// marked not-evaluated (failed). Panics if a name is supplied twice —
    /// that is a programming error, not a data condition.
    fn assemble(partials: Vec<(CheckName, CheckResult)>) -> Self {
        let mut slots: Vec<Option<CheckResult>> = vec![None; CheckName::ALL.len()];
        for (name, result) in partials {
            let idx = CheckName::ALL
                .iter()
                .position(|&n| n == name)
                .expect("known check name");
            assert!(
                slots[idx].is_none(),
                "check '{name}' supplied more than once"
            );
            slots[idx] = Some(result);
        }
        let results: Vec<(CheckName, CheckResult)> = CheckName::ALL
            .iter()
            .zip(slots)
            .map(|(&name, slot)| {
                (
                    name,
                    slot.unwrap_or_else(|| CheckResult::not_evaluated("missing input")),
                )
            })
            .collect();
        let pb_valid = results.iter().all(|(_, r)| r.pass);
        CheckReport { results, pb_valid }
    }

    /// Build a report from individually computed results. Checks not
    /// supplied are marked not-evaluated (failed); `pb_valid` is recomputed
    /// as the conjunction of all 24 outcomes. Panics if a name is supplied
    /// twice.
    pub fn from_results(results: Vec<(CheckName, CheckResult)>) -> Self {
        CheckReport::assemble(results)
    }

    pub fn get(&self, name: CheckName) -> &CheckResult {
        &self
            .results
            .iter()
            .find(|(n, _)| *n == name)
            .expect("all 24 checks present")
            .1
    }

    pub fn passed(&self, name: CheckName) -> bool {
        self.get(name).pass
    }
}

/// Run the full suite for a loaded truth/prediction pair.
///
/// `reference_coords`, when given, is the low-strain reference conformer for
/// the internal-energy check, in the atom order of the *predicted* ligand
/// graph.
pub fn run_all_checks(
    truth: &ComplexStructure,
    pred: &ComplexStructure,
    cfg: &CheckConfig,
) -> CheckReport {
    run_checks_guarded(Some(truth), Some(pred), None, cfg)
}

/// As `run_all_checks` with an optional internal-energy reference conformer.
pub fn run_all_checks_with_reference(
    truth: &ComplexStructure,
    pred: &ComplexStructure,
    reference_coords: Option<&[Vec3]>,
    cfg: &CheckConfig,
) -> CheckReport {
    run_checks_guarded(Some(truth), Some(pred), reference_coords, cfg)
}

/// Load-tolerant entry point: pass `None` for an input that failed to parse;
/// the corresponding load checks fail and everything depending on the
/// missing input is marked not-evaluated. Never faults.
pub fn run_checks_guarded(
    truth: Option<&ComplexStructure>,
    pred: Option<&ComplexStructure>,
    reference_coords: Option<&[Vec3]>,
    cfg: &CheckConfig,
) -> CheckReport {
    let mut partials: Vec<(CheckName, CheckResult)> = Vec::with_capacity(24);

    let pred_lig = pred.and_then(|p| p.ligands.first());
    let truth_lig = truth.and_then(|t| t.ligands.first());
    let pred_protein_ok = pred.map(|p| p.protein_atom_count() > 0).unwrap_or(false);

    partials.push((
        CheckName::MolPredLoaded,
        if pred_lig.is_some() {
            CheckResult::pass()
        } else {
            CheckResult::failing(None, "predicted ligand failed to load")
        },
    ));
    partials.push((
        CheckName::MolTrueLoaded,
        if truth_lig.is_some() {
            CheckResult::pass()
        } else {
            CheckResult::failing(None, "ground-truth ligand failed to load")
        },
    ));
    partials.push((
        CheckName::MolCondLoaded,
        if pred_protein_ok {
            CheckResult::pass()
        } else {
            CheckResult::failing(None, "conditioning protein failed to load")
        },
    ));

    if let (Some(tl), Some(pl)) = (truth_lig, pred_lig) {
        partials.extend(check_topology(&tl.graph, &pl.graph));
        let mapping = graphs_match(&pl.graph, &tl.graph);
        partials.extend(check_stereo(
            &tl.graph,
            &pl.graph,
            &pl.coords,
            mapping.as_deref(),
        ));
    }
    if let Some(pl) = pred_lig {
        partials.extend(check_geometry(&pl.graph, &pl.coords, reference_coords, cfg));
    }
    if let Some(p) = pred {
        if p.ligands.first().is_some() {
            partials.extend(check_environment(p, cfg));
        }
    }

    CheckReport::assemble(partials)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::Element;
    use crate::molgraph::{BondOrder, GraphAtom, GraphBond, MolecularGraph};
    use crate::testutil::complex_with;

    fn idealized_fixture() -> ComplexStructure {
        // Benzene at 1.39 Å bond length, planar, with a small pocket 3.5 Å away.
        let atoms = vec![GraphAtom::new(Element::C); 6];
        let bonds = (0..6)
            .map(|i| GraphBond::new(i, (i + 1) % 6, BondOrder::Aromatic))
            .collect();
        let graph = MolecularGraph::new(atoms, bonds).unwrap();
        let coords: Vec<[f64; 3]> = (0..6)
            .map(|i| {
                let a = std::f64::consts::PI / 3.0 * i as f64;
                [1.39 * a.cos(), 1.39 * a.sin(), 0.0]
            })
            .collect();
        complex_with(
            &[
                (1, [4.9, 0.0, 0.0]),
                (2, [0.0, 4.9, 1.0]),
                (3, [-4.9, 0.0, -1.0]),
                (4, [0.0, -4.9, 0.8]),
            ],
            graph,
            coords,
        )
    }

    #[test]
    fn idealized_pose_is_pb_valid() {
        let t = idealized_fixture();
        let report = run_all_checks(&t, &t, &CheckConfig::default());
        for (name, r) in &report.results {
            assert!(r.pass, "{name} failed: {}", r.detail);
        }
        assert!(report.pb_valid);
    }

    #[test]
    fn report_has_all_24_in_order() {
        let t = idealized_fixture();
        let report = run_all_checks(&t, &t, &CheckConfig::default());
        assert_eq!(report.results.len(), 24);
        for (i, (name, _)) in report.results.iter().enumerate() {
            assert_eq!(*name, CheckName::ALL[i]);
        }
        assert_eq!(
            report.results[15].0.as_str(),
            "protein-ligand_maximum_distance"
        );
    }

    #[test]
    fn missing_pred_fails_load_checks_without_fault() {
        let t = idealized_fixture();
        let report = run_checks_guarded(Some(&t), None, None, &CheckConfig::default());
        assert!(!report.passed(CheckName::MolPredLoaded));
        assert!(report.passed(CheckName::MolTrueLoaded));
        assert!(!report.pb_valid);
        assert_eq!(report.results.len(), 24);
    }

    #[test]
    fn single_failure_breaks_conjunction() {
        let t = idealized_fixture();
        let mut p = t.clone();
        // Stretch one ring bond far beyond tolerance.
        p.ligands[0].coords[0] = [5.0, 0.0, 0.0];
        let report = run_all_checks(&t, &p, &CheckConfig::default());
        assert!(!report.passed(CheckName::BondLengths));
        assert!(!report.pb_valid);
    }

    #[test]
    fn config_validation_rejects_nonsense() {
        let mut cfg = CheckConfig::default();
        cfg.grid_spacing = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = CheckConfig::default();
        cfg.clash_vdw_factor = 1.5;
        assert!(cfg.validate().is_err());
        assert!(CheckConfig::default().validate().is_ok());
    }

    #[test]
    fn check_names_serialize_verbatim() {
        let json = serde_json::to_string(&CheckName::ProteinLigandMaximumDistance).unwrap();
        assert_eq!(json, "\"protein-ligand_maximum_distance\"");
        let json = serde_json::to_string(&CheckName::MolPredLoaded).unwrap();
        assert_eq!(json, "\"mol_pred_loaded\"");
        let back: CheckName =
            serde_json::from_str("\"volume_overlap_with_waters\"").unwrap();
        assert_eq!(back, CheckName::VolumeOverlapWithWaters);
    }
}
