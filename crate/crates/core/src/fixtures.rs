//! Deterministic synthetic complexes and manifests for tests and benches.
//!
//! Not part of the stable API: everything here exists so integration tests,
//! the CLI test suite, and criterion benches can build small, fully
//! controlled inputs without duplicating geometry. The shapes are chosen so
//! the *intended* outcome of every metric is known by construction:
//!
//! * [`truth_complex`] is a benzene ligand under a four-residue pocket,
//!   passing the entire validity suite;
//! * [`pose_complex`] derives poses with a planted binding-site RMSD
//!   (rigid in-plane translation), a planted validity failure (one carbon
//!   pushed out of bonding range), or a mismatched ligand topology.

use std::path::{Path, PathBuf};

use crate::chem::canonical::save_complex;
use crate::elements::Element;
use crate::error::Result;
use crate::manifest::{Annotations, BenchmarkManifest, ManifestEntry, PoseRef, Regime};
use crate::molgraph::{BondOrder, GraphAtom, GraphBond, MolecularGraph};
use crate::structure::{
    AtomSite, CofactorGroups, ComplexStructure, Ligand, ProteinChain, ResidueSite,
};
use crate::vec3::Vec3;

/// Ideal benzene: aromatic C6 ring of radius 1.39 Å in the z = 0 plane.
pub fn benzene() -> (MolecularGraph, Vec<Vec3>) {
    let atoms = vec![GraphAtom::new(Element::C); 6];
    let bonds = (0..6)
        .map(|i| GraphBond::new(i, (i + 1) % 6, BondOrder::Aromatic))
        .collect();
    let graph = MolecularGraph::new(atoms, bonds).expect("benzene is well-formed");
    let coords = (0..6)
        .map(|i| {
            let a = std::f64::consts::PI / 3.0 * i as f64;
            [1.39 * a.cos(), 1.39 * a.sin(), 0.0]
        })
        .collect();
    (graph, coords)
}

/// Planar C5 ring with single bonds: same element as benzene but a different
/// formula and bond graph, for topology-mismatch poses.
pub fn pentane_ring() -> (MolecularGraph, Vec<Vec3>) {
    let atoms = vec![GraphAtom::new(Element::C); 5];
    let bonds = (0..5)
        .map(|i| GraphBond::new(i, (i + 1) % 5, BondOrder::Single))
        .collect();
    let graph = MolecularGraph::new(atoms, bonds).expect("C5 ring is well-formed");
    // Radius chosen so every edge is the ideal C-C single bond length.
    let r = 1.52 / (2.0 * (std::f64::consts::PI / 5.0).sin());
    let coords = (0..5)
        .map(|i| {
            let a = 2.0 * std::f64::consts::PI / 5.0 * i as f64;
            [r * a.cos(), r * a.sin(), 0.0]
        })
        .collect();
    (graph, coords)
}

fn atom(name: &str, element: Element, coords: Vec3) -> AtomSite {
    AtomSite {
        name: name.to_string(),
        element,
        coords,
        occupancy: 1.0,
        is_hetero: false,
    }
}

fn residue(seq: i32, name: &str, atoms: Vec<AtomSite>) -> ResidueSite {
    ResidueSite {
        chain_id: "A".to_string(),
        seq_index: seq,
        insertion_code: None,
        res_name: name.to_string(),
        atoms,
    }
}

/// Ground-truth complex: benzene centred at the origin below a sheet of four
/// pocket residues. Every validity check passes, the nearest protein atom
/// sits 3.8-4.0 Å from the ring (inside the 5 Å contact bound, outside any
/// clash or volume overlap), and the four alpha carbons are non-collinear so
/// binding-site superposition is well-posed.
pub fn truth_complex() -> ComplexStructure {
    let (graph, coords) = benzene();
    let chain = ProteinChain {
        id: "A".to_string(),
        residues: vec![
            residue(
                10,
                "LEU",
                vec![
                    atom("CA", Element::C, [4.0, 0.0, 4.0]),
                    atom("CB", Element::C, [0.0, 0.0, 3.8]),
                ],
            ),
            residue(11, "ALA", vec![atom("CA", Element::C, [-4.0, 2.0, 4.0])]),
            residue(12, "GLY", vec![atom("CA", Element::C, [2.0, -4.0, 5.0])]),
            residue(13, "SER", vec![atom("CA", Element::C, [-2.0, -3.0, 6.0])]),
        ],
    };
    ComplexStructure {
        chains: vec![chain],
        ligands: vec![Ligand { graph, coords }],
        cofactors: CofactorGroups::default(),
    }
}

/// How a planned pose should deviate from the truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PoseKind {
    /// Identical to the truth: RMSD 0, fully valid.
    Exact,
    /// Ligand rigidly translated along +x by this many Å (the planted
    /// binding-site RMSD). Stays inside the pocket-contact bound and clear
    /// of clashes for offsets up to ~3 Å.
    Offset(f64),
    /// One ring carbon pushed 1.2 Å outward: bond lengths fail, the pose is
    /// invalid, but the RMSD stays below 0.5 Å.
    BrokenValidity,
    /// Ligand replaced by a C5 ring: graph matching fails, so RMSD and
    /// lDDT-PLI are unscorable and formula/bond checks fail.
    WrongLigand,
    /// The pose file is not written at all: a load failure.
    MissingFile,
}

impl PoseKind {
    /// Planted binding-site RMSD, when the pose is scorable.
    pub fn planted_rmsd(self) -> Option<f64> {
        match self {
            PoseKind::Exact => Some(0.0),
            PoseKind::Offset(d) => Some(d),
            // One of six atoms moves 1.2 Å: sqrt(1.2^2 / 6).
            PoseKind::BrokenValidity => Some(1.2 / 6.0_f64.sqrt()),
            PoseKind::WrongLigand | PoseKind::MissingFile => None,
        }
    }

    /// Whether the pose passes the full validity suite.
    pub fn planted_valid(self) -> bool {
        matches!(self, PoseKind::Exact | PoseKind::Offset(_))
    }
}

/// A pose of [`truth_complex`] with the given planned deviation.
pub fn pose_complex(kind: PoseKind) -> ComplexStructure {
    let mut pose = truth_complex();
    match kind {
        PoseKind::Exact | PoseKind::MissingFile => {}
        PoseKind::Offset(d) => {
            for c in &mut pose.ligands[0].coords {
                c[0] += d;
            }
        }
        PoseKind::BrokenValidity => {
            // Atom 0 sits at (1.39, 0, 0); push it radially outward.
            pose.ligands[0].coords[0][0] += 1.2;
        }
        PoseKind::WrongLigand => {
            let (graph, coords) = pentane_ring();
            pose.ligands = vec![Ligand { graph, coords }];
        }
    }
    pose
}

/// One planned pose of a planned entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannedPose {
    pub seed: u32,
    pub sample: u32,
    pub kind: PoseKind,
    pub confidence: Option<f64>,
}

/// Standard 20-pose plan: seeds 1-4 × samples 1-5 in order, with `kinds`
/// cycled if shorter than 20 and confidence decreasing in plan order so the
/// first pose ranks highest.
pub fn planned_poses(kinds: &[PoseKind]) -> Vec<PlannedPose> {
    assert!(!kinds.is_empty(), "need at least one pose kind");
    (0..20)
        .map(|i| PlannedPose {
            seed: (i / 5) as u32 + 1,
            sample: (i % 5) as u32 + 1,
            kind: kinds[i % kinds.len()],
            confidence: Some(0.95 - 0.01 * i as f64),
        })
        .collect()
}

/// Writes truth and pose files for one entry under `dir/<id>/` and returns
/// the manifest entry with paths relative to `dir`.
pub fn write_planned_entry(
    dir: &Path,
    id: &str,
    release_date: &str,
    poses: &[PlannedPose],
) -> Result<ManifestEntry> {
    let entry_dir = dir.join(id);
    std::fs::create_dir_all(&entry_dir).map_err(|e| crate::error::Error::io(&entry_dir, e))?;
    save_complex(&entry_dir.join("truth.json"), &truth_complex())?;
    let mut pose_refs = Vec::new();
    for p in poses {
        let rel = PathBuf::from(id).join(format!("pose_s{}_{}.json", p.seed, p.sample));
        if p.kind != PoseKind::MissingFile {
            save_complex(&dir.join(&rel), &pose_complex(p.kind))?;
        }
        pose_refs.push(PoseRef {
            seed: p.seed,
            sample: p.sample,
            path: rel,
            ligand_path: None,
            confidence: p.confidence,
        });
    }
    Ok(ManifestEntry {
        id: id.to_string(),
        release_date: release_date.parse().expect("fixture date"),
        truth_path: PathBuf::from(id).join("truth.json"),
        truth_ligand_path: None,
        reference_conformer_path: None,
        poses: pose_refs,
        regime: Regime::Unconditional,
        pocket_residues: None,
        annotations: None,
    })
}

/// Attach stratification annotations to an entry.
pub fn with_annotations(
    mut entry: ManifestEntry,
    pocket_similarity: Option<f64>,
    ligand_frequency: Option<u64>,
    tanimoto: Option<f64>,
) -> ManifestEntry {
    entry.annotations = Some(Annotations {
        pocket_similarity,
        ligand_frequency,
        tanimoto,
    });
    entry
}

/// Serialize a manifest to `path` as JSON.
pub fn save_manifest(path: &Path, manifest: &BenchmarkManifest) -> Result<()> {
    let text = serde_json::to_string_pretty(manifest)?;
    std::fs::write(path, text).map_err(|e| crate::error::Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::bisy_rmsd;
    use crate::validity::{run_all_checks, CheckConfig};

    #[test]
    fn truth_passes_all_checks() {
        let truth = truth_complex();
        let report = run_all_checks(&truth, &truth, &CheckConfig::default());
        for (name, result) in &report.results {
            assert!(result.pass, "{name}: {}", result.detail);
        }
        assert!(report.pb_valid);
    }

    #[test]
    fn planted_rmsds_are_realized() {
        let truth = truth_complex();
        for kind in [
            PoseKind::Exact,
            PoseKind::Offset(1.5),
            PoseKind::Offset(3.0),
            PoseKind::BrokenValidity,
        ] {
            let pose = pose_complex(kind);
            let rmsd = bisy_rmsd(&truth, &pose).unwrap();
            let planted = kind.planted_rmsd().unwrap();
            assert!(
                (rmsd - planted).abs() < 1e-9,
                "{kind:?}: rmsd {rmsd} vs planted {planted}"
            );
        }
    }

    #[test]
    fn planted_validity_is_realized() {
        let truth = truth_complex();
        let cfg = CheckConfig::default();
        for kind in [
            PoseKind::Exact,
            PoseKind::Offset(1.5),
            PoseKind::Offset(3.0),
            PoseKind::BrokenValidity,
            PoseKind::WrongLigand,
        ] {
            let pose = pose_complex(kind);
            let report = run_all_checks(&truth, &pose, &cfg);
            assert_eq!(
                report.pb_valid,
                kind.planted_valid(),
                "{kind:?}: {:?}",
                report
                    .results
                    .iter()
                    .filter(|(_, r)| !r.pass)
                    .map(|(n, r)| format!("{n}: {}", r.detail))
                    .collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn planned_poses_cover_twenty_with_monotone_confidence() {
        let plan = planned_poses(&[PoseKind::Exact, PoseKind::Offset(3.0)]);
        assert_eq!(plan.len(), 20);
        assert_eq!(
            plan.iter().filter(|p| p.kind == PoseKind::Exact).count(),
            10
        );
        let confs: Vec<f64> = plan.iter().map(|p| p.confidence.unwrap()).collect();
        assert!(confs.windows(2).all(|w| w[0] > w[1]));
    }
}
