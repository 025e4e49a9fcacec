//! Binding-site-superposed, symmetry-corrected ligand RMSD.
//!
//! The predicted complex is superposed onto the truth once, using the alpha
//! carbons of the binding-site residues; the reported value is the minimum
//! heavy-atom ligand RMSD over all graph automorphisms composed with the
//! truth/prediction atom mapping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::molgraph::{automorphisms, graphs_match};
use crate::structure::ComplexStructure;
use crate::vec3::{self, Vec3};

use super::kabsch::kabsch;
use super::site::{binding_site, DEFAULT_SITE_CUTOFF};

/// Automorphism budget for symmetry correction.
pub const DEFAULT_MAX_AUTOMORPHISMS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RmsdConfig {
    /// Binding-site distance bound, Å.
    pub site_cutoff: f64,
    /// Cap on enumerated ligand automorphisms.
    pub max_automorphisms: usize,
}

impl Default for RmsdConfig {
    fn default() -> Self {
        RmsdConfig {
            site_cutoff: DEFAULT_SITE_CUTOFF,
            max_automorphisms: DEFAULT_MAX_AUTOMORPHISMS,
        }
    }
}

/// Symmetry-corrected binding-site-superposed ligand RMSD, in Å, with
/// default configuration.
pub fn bisy_rmsd(truth: &ComplexStructure, pred: &ComplexStructure) -> Result<f64> {
    bisy_rmsd_with(truth, pred, &RmsdConfig::default())
}

pub fn bisy_rmsd_with(
    truth: &ComplexStructure,
    pred: &ComplexStructure,
    cfg: &RmsdConfig,
) -> Result<f64> {
    let truth_lig = truth.primary_ligand()?;
    let pred_lig = pred.primary_ligand()?;

    // Atom correspondence: mapping[pred index] = truth index.
    let mapping = graphs_match(&pred_lig.graph, &truth_lig.graph).ok_or_else(|| {
        Error::TopologyMismatch(
            "predicted ligand graph does not match the ground-truth ligand".into(),
        )
    })?;

    // Superposition frame: binding-site alpha carbons, matched by residue key.
    // Truth residues without an alpha carbon cannot anchor the fit and are
    // skipped; a site residue missing from the prediction (or missing its
    // alpha carbon there) is a coverage failure.
    let site = binding_site(truth, cfg.site_cutoff)?;
    let mut pred_cas: Vec<Vec3> = Vec::with_capacity(site.len());
    let mut truth_cas: Vec<Vec3> = Vec::with_capacity(site.len());
    for key in &site {
        let truth_res = truth.residue(key).expect("site keys come from truth");
        let Some(truth_ca) = truth_res.ca() else {
            continue;
        };
        let pred_ca = pred
            .residue(key)
            .and_then(|r| r.ca())
            .ok_or_else(|| {
                Error::Coverage(format!(
                    "prediction lacks alpha carbon for binding-site residue {key}"
                ))
            })?;
        truth_cas.push(truth_ca.coords);
        pred_cas.push(pred_ca.coords);
    }
    if truth_cas.len() < 3 {
        return Err(Error::Coverage(format!(
            "only {} binding-site alpha-carbon pairs available; need at least 3",
            truth_cas.len()
        )));
    }

    // One superposition for the whole pose, not one per automorphism.
    let sup = kabsch(&pred_cas, &truth_cas, None)?;
    let moved: Vec<Vec3> = pred_lig.coords.iter().map(|&c| sup.apply(c)).collect();

    let autos = automorphisms(&truth_lig.graph, cfg.max_automorphisms)?;
    let n = moved.len();
    let mut best = f64::INFINITY;
    for sigma in &autos.perms {
        let mut ss = 0.0;
        for (pred_i, &truth_i) in mapping.iter().enumerate() {
            ss += vec3::dist_sq(moved[pred_i], truth_lig.coords[sigma[truth_i]]);
        }
        best = best.min((ss / n as f64).sqrt());
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::Element;
    use crate::molgraph::{BondOrder, GraphAtom, GraphBond, MolecularGraph};
    use crate::testutil::{complex_with, random_rotation, Rng};
    use rand::{Rng as _, SeedableRng};

    fn benzene_graph() -> MolecularGraph {
        let atoms = vec![GraphAtom::new(Element::C); 6];
        let bonds = (0..6)
            .map(|i| GraphBond::new(i, (i + 1) % 6, BondOrder::Aromatic))
            .collect();
        MolecularGraph::new(atoms, bonds).unwrap()
    }

    fn hexagon(radius: f64) -> Vec<Vec3> {
        (0..6)
            .map(|i| {
                let a = std::f64::consts::PI / 3.0 * i as f64;
                [radius * a.cos(), radius * a.sin(), 0.0]
            })
            .collect()
    }

    fn pocket_cas() -> Vec<(i32, Vec3)> {
        vec![
            (1, [6.0, 0.0, 0.0]),
            (2, [0.0, 6.0, 1.0]),
            (3, [-6.0, 0.0, -1.0]),
            (4, [0.0, -6.0, 0.5]),
            (5, [0.0, 0.0, 7.0]),
        ]
    }

    #[test]
    fn identical_pose_scores_zero() {
        let truth = complex_with(&pocket_cas(), benzene_graph(), hexagon(1.39));
        let pred = truth.clone();
        let r = bisy_rmsd(&truth, &pred).unwrap();
        assert!(r < 1e-9, "rmsd {r}");
    }

    #[test]
    fn rigid_motion_scores_zero() {
        let truth = complex_with(&pocket_cas(), benzene_graph(), hexagon(1.39));
        let mut rng = Rng::seed_from_u64(11);
        let rot = random_rotation(&mut rng);
        let pred = truth.transformed(&rot, [4.0, -2.0, 9.0]);
        assert!(bisy_rmsd(&truth, &pred).unwrap() < 1e-9);
    }

    #[test]
    fn ring_relabeling_needs_symmetry_correction() {
        let truth = complex_with(&pocket_cas(), benzene_graph(), hexagon(1.39));
        // Same geometry, labels rotated by one ring position.
        let coords = hexagon(1.39);
        let rotated: Vec<Vec3> = (0..6).map(|i| coords[(i + 1) % 6]).collect();
        let pred = complex_with(&pocket_cas(), benzene_graph(), rotated.clone());

        // Naive same-label RMSD is large...
        let naive: f64 = {
            let ss: f64 = (0..6)
                .map(|i| vec3::dist_sq(rotated[i], coords[i]))
                .sum();
            (ss / 6.0).sqrt()
        };
        assert!(naive > 1.0, "naive rmsd {naive}");
        // ...but the symmetry-corrected metric sees the identical pose.
        assert!(bisy_rmsd(&truth, &pred).unwrap() < 1e-9);
    }

    #[test]
    fn graph_mismatch_is_topology_error() {
        let truth = complex_with(&pocket_cas(), benzene_graph(), hexagon(1.39));
        let chain = MolecularGraph::new(
            vec![GraphAtom::new(Element::C); 6],
            (0..5)
                .map(|i| GraphBond::new(i, i + 1, BondOrder::Single))
                .collect(),
        )
        .unwrap();
        let pred = complex_with(&pocket_cas(), chain, hexagon(1.39));
        assert!(matches!(
            bisy_rmsd(&truth, &pred),
            Err(Error::TopologyMismatch(_))
        ));
    }

    #[test]
    fn missing_site_residue_is_coverage_error() {
        let truth = complex_with(&pocket_cas(), benzene_graph(), hexagon(1.39));
        let mut pred = truth.clone();
        pred.chains[0].residues.remove(0);
        assert!(matches!(bisy_rmsd(&truth, &pred), Err(Error::Coverage(_))));
    }

    #[test]
    fn known_displacement_reproduced() {
        let truth = complex_with(&pocket_cas(), benzene_graph(), hexagon(1.39));
        let mut pred = truth.clone();
        // Protein identical; every ligand atom shifted by the same 2 Å in z.
        for c in &mut pred.ligands[0].coords {
            c[2] += 2.0;
        }
        let r = bisy_rmsd(&truth, &pred).unwrap();
        assert!((r - 2.0).abs() < 1e-9, "rmsd {r}");
    }

    #[test]
    fn random_ligand_jitter_beats_brute_force_never() {
        // min over automorphisms equals brute force over permitted bijections
        // for this small symmetric ligand.
        let mut rng = Rng::seed_from_u64(5);
        let truth = complex_with(&pocket_cas(), benzene_graph(), hexagon(1.39));
        for _ in 0..5 {
            let mut pred = truth.clone();
            for c in &mut pred.ligands[0].coords {
                for x in c.iter_mut() {
                    *x += rng.gen_range(-0.6..0.6);
                }
            }
            let fast = bisy_rmsd(&truth, &pred).unwrap();
            // Brute force: all 12 ring symmetries explicitly.
            let autos = automorphisms(&truth.ligands[0].graph, 1000).unwrap();
            let mut best = f64::INFINITY;
            for sigma in &autos.perms {
                let ss: f64 = (0..6)
                    .map(|i| {
                        vec3::dist_sq(
                            pred.ligands[0].coords[i],
                            truth.ligands[0].coords[sigma[i]],
                        )
                    })
                    .sum();
                best = best.min((ss / 6.0).sqrt());
            }
            // Protein is identical so superposition is identity.
            assert!((fast - best).abs() < 1e-9, "fast {fast} vs brute {best}");
        }
    }
}
