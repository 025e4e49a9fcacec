//! lDDT of the protein-ligand interface: a superposition-free accuracy
//! score over interface distances, symmetry-corrected by maximizing over
//! ligand automorphisms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::molgraph::{automorphisms, graphs_match};
use crate::structure::ComplexStructure;
use crate::vec3::{self, Vec3};

use super::rmsd::DEFAULT_MAX_AUTOMORPHISMS;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LddtConfig {
    /// Interface pairs are those with true distance strictly below this, Å.
    pub inclusion_radius: f64,
    /// Preservation thresholds, Å; strictly increasing, all positive.
    pub thresholds: Vec<f64>,
    /// Cap on enumerated ligand automorphisms.
    pub max_automorphisms: usize,
}

impl Default for LddtConfig {
    fn default() -> Self {
        LddtConfig {
            inclusion_radius: 6.0,
            thresholds: vec![0.5, 1.0, 2.0, 4.0],
            max_automorphisms: DEFAULT_MAX_AUTOMORPHISMS,
        }
    }
}

impl LddtConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.inclusion_radius > 0.0) {
            return Err(Error::InvalidParameter(
                "lDDT inclusion radius must be positive".into(),
            ));
        }
        if self.thresholds.is_empty() {
            return Err(Error::InvalidParameter("lDDT needs thresholds".into()));
        }
        let increasing = self
            .thresholds
            .windows(2)
            .all(|w| w[0] < w[1]);
        if !increasing || self.thresholds[0] <= 0.0 {
            return Err(Error::InvalidParameter(
                "lDDT thresholds must be positive and strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

/// lDDT-PLI in [0, 1]. Pairs every ligand heavy atom with every protein
/// heavy atom whose true distance is inside the inclusion radius; a pair is
/// preserved under threshold τ when |d_pred − d_true| < τ. The score is the
/// preserved fraction averaged over thresholds, maximized over ligand
/// automorphisms. Protein atoms absent from the prediction count as
/// unpreserved at every threshold.
pub fn lddt_pli(
    truth: &ComplexStructure,
    pred: &ComplexStructure,
    cfg: &LddtConfig,
) -> Result<f64> {
    cfg.validate()?;
    let truth_lig = truth.primary_ligand()?;
    let pred_lig = pred.primary_ligand()?;
    let mapping = graphs_match(&pred_lig.graph, &truth_lig.graph).ok_or_else(|| {
        Error::TopologyMismatch(
            "predicted ligand graph does not match the ground-truth ligand".into(),
        )
    })?;
    // Invert: pred atom carrying truth-ligand atom t.
    let mut pred_of_truth = vec![usize::MAX; mapping.len()];
    for (pred_i, &truth_i) in mapping.iter().enumerate() {
        pred_of_truth[truth_i] = pred_i;
    }

    // Interface pairs in the truth frame, with the matching predicted
    // protein-atom position when present.
    struct Pair {
        lig: usize, // truth ligand atom index
        d_true: f64,
        pred_prot: Option<Vec3>,
    }
    let mut pairs: Vec<Pair> = Vec::new();
    for (res, atom) in truth.protein_atoms() {
        let key = res.key();
        let pred_atom_pos = pred
            .residue(&key)
            .and_then(|r| r.atoms.iter().find(|a| a.name == atom.name))
            .map(|a| a.coords);
        for (lig, &lc) in truth_lig.coords.iter().enumerate() {
            let d_true = vec3::dist(lc, atom.coords);
            if d_true < cfg.inclusion_radius {
                pairs.push(Pair {
                    lig,
                    d_true,
                    pred_prot: pred_atom_pos,
                });
            }
        }
    }
    if pairs.is_empty() {
        return Err(Error::EmptyInterface);
    }

    let autos = automorphisms(&truth_lig.graph, cfg.max_automorphisms)?;
    let n_pairs = pairs.len() as f64;
    let n_thresh = cfg.thresholds.len() as f64;
    let mut best = 0.0f64;
    for sigma in &autos.perms {
        let mut preserved = vec![0usize; cfg.thresholds.len()];
        for pair in &pairs {
            let Some(prot_pos) = pair.pred_prot else {
                continue; // counts as unpreserved everywhere
            };
            let pred_atom = pred_of_truth[sigma[pair.lig]];
            let d_pred = vec3::dist(pred_lig.coords[pred_atom], prot_pos);
            let delta = (d_pred - pair.d_true).abs();
            for (t, &tau) in cfg.thresholds.iter().enumerate() {
                if delta < tau {
                    preserved[t] += 1;
                }
            }
        }
        let score: f64 = preserved
            .iter()
            .map(|&c| c as f64 / n_pairs)
            .sum::<f64>()
            / n_thresh;
        best = best.max(score);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::Element;
    use crate::molgraph::{BondOrder, GraphAtom, GraphBond, MolecularGraph};
    use crate::testutil::{complex_with, random_rotation, Rng};
    use rand::SeedableRng;

    fn two_atom_ligand() -> MolecularGraph {
        MolecularGraph::new(
            vec![GraphAtom::new(Element::C), GraphAtom::new(Element::O)],
            vec![GraphBond::new(0, 1, BondOrder::Single)],
        )
        .unwrap()
    }

    fn fixture() -> ComplexStructure {
        complex_with(
            &[
                (1, [3.0, 0.0, 0.0]),
                (2, [0.0, 4.0, 0.0]),
                (3, [-3.5, 0.0, 1.0]),
                (4, [30.0, 30.0, 30.0]), // outside every interface
            ],
            two_atom_ligand(),
            vec![[0.0, 0.0, 0.0], [1.4, 0.0, 0.0]],
        )
    }

    #[test]
    fn identical_pose_scores_one() {
        let t = fixture();
        assert_eq!(lddt_pli(&t, &t, &LddtConfig::default()).unwrap(), 1.0);
    }

    #[test]
    fn rigid_motion_invariant_exactly() {
        let t = fixture();
        let mut rng = Rng::seed_from_u64(3);
        let rot = random_rotation(&mut rng);
        let moved = t.transformed(&rot, [100.0, -50.0, 8.0]);
        // Distance-based: no superposition, yet unchanged.
        let s = lddt_pli(&t, &moved, &LddtConfig::default()).unwrap();
        assert!(s > 0.999999999, "score {s}");
    }

    #[test]
    fn huge_perturbation_scores_zero() {
        let t = fixture();
        let mut p = t.clone();
        for c in &mut p.ligands[0].coords {
            c[2] += 50.0; // every interface distance off by far more than 4 Å
        }
        assert_eq!(lddt_pli(&t, &p, &LddtConfig::default()).unwrap(), 0.0);
    }

    #[test]
    fn single_pair_half_preserved() {
        // One CA at 5.0 Å from a single-atom ligand; prediction displaces the
        // ligand radially by 1.5 Å: passes thresholds 2 and 4, fails 0.5 and 1.
        let g = MolecularGraph::new(vec![GraphAtom::new(Element::C)], vec![]).unwrap();
        let t = complex_with(&[(1, [5.0, 0.0, 0.0])], g.clone(), vec![[0.0, 0.0, 0.0]]);
        let p = complex_with(&[(1, [5.0, 0.0, 0.0])], g, vec![[-1.5, 0.0, 0.0]]);
        let s = lddt_pli(&t, &p, &LddtConfig::default()).unwrap();
        assert_eq!(s, 0.5);
    }

    #[test]
    fn zero_interface_is_an_error() {
        let g = MolecularGraph::new(vec![GraphAtom::new(Element::C)], vec![]).unwrap();
        let t = complex_with(&[(1, [50.0, 0.0, 0.0])], g, vec![[0.0, 0.0, 0.0]]);
        assert!(matches!(
            lddt_pli(&t, &t, &LddtConfig::default()),
            Err(Error::EmptyInterface)
        ));
    }

    #[test]
    fn symmetry_correction_maximizes() {
        // Symmetric two-carbon ligand placed asymmetrically in the pocket;
        // prediction swaps the labels. Without correction half the pairs
        // shift; with it the score stays 1.
        let g = MolecularGraph::new(
            vec![GraphAtom::new(Element::C), GraphAtom::new(Element::C)],
            vec![GraphBond::new(0, 1, BondOrder::Single)],
        )
        .unwrap();
        let coords = vec![[0.0, 0.0, 0.0], [1.5, 0.0, 0.0]];
        let swapped = vec![[1.5, 0.0, 0.0], [0.0, 0.0, 0.0]];
        let cas = [(1, [3.0, 0.0, 0.0]), (2, [-2.5, 1.0, 0.0]), (3, [0.7, -3.0, 1.0])];
        let t = complex_with(&cas, g.clone(), coords);
        let p = complex_with(&cas, g, swapped);
        let s = lddt_pli(&t, &p, &LddtConfig::default()).unwrap();
        assert_eq!(s, 1.0);
    }

    #[test]
    fn shrinking_errors_never_lowers_score() {
        let t = fixture();
        let mut prev = -1.0;
        for &mag in [4.5, 2.5, 1.2, 0.7, 0.3, 0.0].iter() {
            let mut p = t.clone();
            for c in &mut p.ligands[0].coords {
                c[2] += mag;
            }
            let s = lddt_pli(&t, &p, &LddtConfig::default()).unwrap();
            assert!(
                s >= prev - 1e-12,
                "score {s} dropped below {prev} at magnitude {mag}"
            );
            prev = s;
        }
        assert_eq!(prev, 1.0);
    }

    #[test]
    fn config_validation() {
        let mut cfg = LddtConfig::default();
        cfg.thresholds = vec![1.0, 0.5];
        assert!(cfg.validate().is_err());
        cfg.thresholds = vec![-1.0, 0.5];
        assert!(cfg.validate().is_err());
        cfg.thresholds = vec![0.5];
        assert!(cfg.validate().is_ok());
        cfg.inclusion_radius = 0.0;
        assert!(cfg.validate().is_err());
    }
}
