//! Stereochemistry checks: do the predicted coordinates reproduce the
//! ground truth's declared tetrahedral parities and double-bond cis/trans
//! assignments?
//!
//! Both checks only assert stereo the ground-truth graph actually declares;
//! an input without flags passes vacuously. Comparison runs through the
//! truth->prediction atom correspondence, so without a bond-network match
//! the checks are recorded as not evaluated (and `molecular_bonds` has
//! already failed).

use super::{CheckName, CheckResult};
use crate::molgraph::{
    classify_bond_stereo, stereo_reference_neighbor, BondOrder, MolecularGraph,
};
use crate::vec3::{parity_sign, Vec3};

/// Stereo checks: `double_bond_stereochemistry`, `tetrahedral_chirality`.
///
/// `mapping` sends predicted atom indices to truth atom indices (as produced
/// by `graphs_match(pred, truth)`); `None` means no correspondence exists.
pub fn check_stereo(
    truth_graph: &MolecularGraph,
    pred_graph: &MolecularGraph,
    pred_coords: &[Vec3],
    mapping: Option<&[usize]>,
) -> Vec<(CheckName, CheckResult)> {
    let Some(mapping) = mapping else {
        let reason = "not evaluated: no atom correspondence with the ground truth";
        return vec![
            (
                CheckName::DoubleBondStereochemistry,
                CheckResult::failing(None, reason),
            ),
            (
                CheckName::TetrahedralChirality,
                CheckResult::failing(None, reason),
            ),
        ];
    };
    // Invert: pred_of[truth_index] = pred_index.
    let mut pred_of = vec![usize::MAX; truth_graph.atom_count()];
    for (pred_i, &truth_i) in mapping.iter().enumerate() {
        pred_of[truth_i] = pred_i;
    }

    vec![
        (
            CheckName::DoubleBondStereochemistry,
            double_bonds(truth_graph, pred_graph, pred_coords, &pred_of),
        ),
        (
            CheckName::TetrahedralChirality,
            tetrahedral(truth_graph, pred_coords, &pred_of),
        ),
    ]
}

fn double_bonds(
    truth_graph: &MolecularGraph,
    pred_graph: &MolecularGraph,
    pred_coords: &[Vec3],
    pred_of: &[usize],
) -> CheckResult {
    let _ = pred_graph; // correspondence already encodes the shared topology
    let mut offenders = Vec::new();
    for bond in truth_graph.bonds() {
        if bond.order != BondOrder::Double {
            continue;
        }
        let Some(expected) = bond.stereo else {
            continue;
        };
        // Same reference substituents the parser used for the truth flag.
        let (Some(a), Some(d)) = (
            stereo_reference_neighbor(truth_graph, bond.i, bond.j),
            stereo_reference_neighbor(truth_graph, bond.j, bond.i),
        ) else {
            continue;
        };
        let observed = classify_bond_stereo(
            pred_coords[pred_of[a]],
            pred_coords[pred_of[bond.i]],
            pred_coords[pred_of[bond.j]],
            pred_coords[pred_of[d]],
            0.0,
        );
        if observed != Some(expected) {
            offenders.push(format!(
                "bond {}-{}: expected {:?}, observed {}",
                bond.i,
                bond.j,
                expected,
                match observed {
                    Some(s) => format!("{s:?}"),
                    None => "ambiguous geometry".to_string(),
                }
            ));
        }
    }
    if offenders.is_empty() {
        CheckResult::pass()
    } else {
        CheckResult::failing(Some(offenders.len() as f64), offenders.join("; "))
    }
}

fn tetrahedral(
    truth_graph: &MolecularGraph,
    pred_coords: &[Vec3],
    pred_of: &[usize],
) -> CheckResult {
    let mut offenders = Vec::new();
    for c in 0..truth_graph.atom_count() {
        let Some(expected) = truth_graph.atom(c).tetrahedral_parity else {
            continue;
        };
        // Truth-index-sorted neighbours, mapped into the prediction; the
        // centre stands in as fourth point for three-coordinate centres.
        let neighbors: Vec<usize> =
            truth_graph.neighbors(c).iter().map(|&(n, _)| n).collect();
        if neighbors.len() < 3 || neighbors.len() > 4 {
            continue;
        }
        let mut pts: Vec<Vec3> = neighbors.iter().map(|&n| pred_coords[pred_of[n]]).collect();
        if pts.len() == 3 {
            pts.push(pred_coords[pred_of[c]]);
        }
        let observed = parity_sign(&[pts[0], pts[1], pts[2], pts[3]]);
        if observed != Some(expected) {
            offenders.push(format!(
                "atom {}: expected parity {expected:+}, observed {}",
                c,
                match observed {
                    Some(p) => format!("{p:+}"),
                    None => "flattened centre".to_string(),
                }
            ));
        }
    }
    if offenders.is_empty() {
        CheckResult::pass()
    } else {
        CheckResult::failing(Some(offenders.len() as f64), offenders.join("; "))
    }
}
