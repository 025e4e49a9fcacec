//! Load-independent chemistry checks on the predicted ligand graph:
//! valence sanity, connectivity, and agreement with the ground-truth
//! composition and bond network.

use super::{CheckName, CheckResult};
use crate::molgraph::{graphs_match, MolecularGraph};

/// Topology checks: `sanitization`, `all_atoms_connected`,
/// `molecular_formula`, `molecular_bonds`.
pub fn check_topology(
    truth_graph: &MolecularGraph,
    pred_graph: &MolecularGraph,
) -> Vec<(CheckName, CheckResult)> {
    vec![
        (CheckName::Sanitization, sanitization(pred_graph)),
        (
            CheckName::AllAtomsConnected,
            if pred_graph.is_connected() {
                CheckResult::pass()
            } else {
                CheckResult::failing(
                    Some(pred_graph.connected_components() as f64),
                    format!(
                        "ligand splits into {} fragments",
                        pred_graph.connected_components()
                    ),
                )
            },
        ),
        (
            CheckName::MolecularFormula,
            if pred_graph.element_counts() == truth_graph.element_counts() {
                CheckResult::pass()
            } else {
                CheckResult::failing(
                    None,
                    format!(
                        "formula mismatch: predicted {} vs expected {}",
                        pred_graph.molecular_formula(),
                        truth_graph.molecular_formula()
                    ),
                )
            },
        ),
        (
            CheckName::MolecularBonds,
            if graphs_match(pred_graph, truth_graph).is_some() {
                CheckResult::pass()
            } else {
                CheckResult::failing(None, "bond network does not match the ground truth")
            },
        ),
    ]
}

/// An atom sanitizes when its explicit valence can be completed to a
/// tabulated valence for its element and charge. Aromatic bonds count 1.5,
/// so a fused-ring junction (explicit 4.5) is admitted on carbon.
/// Elements without a tabulated valence are exempt.
fn sanitization(graph: &MolecularGraph) -> CheckResult {
    let mut offenders = Vec::new();
    for i in 0..graph.atom_count() {
        let allowed = graph.allowed_valences(i);
        if allowed.is_empty() {
            continue;
        }
        let explicit = graph.explicit_valence(i).floor() as i32;
        let max_allowed = *allowed.iter().max().expect("nonempty");
        if explicit > max_allowed {
            offenders.push(format!(
                "atom {} ({}): valence {} exceeds {}",
                i,
                graph.atom(i).element.symbol(),
                graph.explicit_valence(i),
                max_allowed
            ));
        }
    }
    if offenders.is_empty() {
        CheckResult::pass()
    } else {
        CheckResult::failing(Some(offenders.len() as f64), offenders.join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::fixtures;
    use crate::molgraph::{BondOrder, GraphAtom, GraphBond, MolecularGraph};

    fn get(results: &[(CheckName, CheckResult)], name: CheckName) -> &CheckResult {
        &results.iter().find(|(n, _)| *n == name).unwrap().1
    }

    #[test]
    fn identical_graphs_pass_everything() {
        let g = fixtures::benzene();
        let results = check_topology(&g, &g);
        assert_eq!(results.len(), 4);
        for (name, r) in &results {
            assert!(r.pass, "{name}: {}", r.detail);
        }
    }

    #[test]
    fn pentavalent_carbon_fails_sanitization() {
        let atoms = vec![GraphAtom::new(crate::Element::C); 6];
        let bonds = (1..6).map(|j| GraphBond::new(0, j, BondOrder::Single)).collect();
        let g = MolecularGraph::new(atoms, bonds).unwrap();
        let r = sanitization(&g);
        assert!(!r.pass);
        assert!(r.detail.contains("valence 5"));
    }

    #[test]
    fn charged_nitrogen_sanitizes_at_four_bonds() {
        // Ammonium-like: N(+) with 4 carbon neighbors is fine, neutral is not.
        let mut atoms = vec![GraphAtom::new(crate::Element::N)];
        atoms.extend(vec![GraphAtom::new(crate::Element::C); 4]);
        let bonds: Vec<GraphBond> =
            (1..5).map(|j| GraphBond::new(0, j, BondOrder::Single)).collect();
        let neutral = MolecularGraph::new(atoms.clone(), bonds.clone()).unwrap();
        assert!(!sanitization(&neutral).pass);

        atoms[0].formal_charge = 1;
        let charged = MolecularGraph::new(atoms, bonds).unwrap();
        assert!(sanitization(&charged).pass);
    }

    #[test]
    fn fused_aromatic_junction_sanitizes() {
        let g = fixtures::naphthalene();
        assert!(sanitization(&g).pass);
    }

    #[test]
    fn disconnected_graph_fails_connectivity() {
        let atoms = vec![GraphAtom::new(crate::Element::C); 4];
        let bonds = vec![
            GraphBond::new(0, 1, BondOrder::Single),
            GraphBond::new(2, 3, BondOrder::Single),
        ];
        let g = MolecularGraph::new_allow_fragments(atoms, bonds).unwrap();
        let results = check_topology(&g, &g);
        let r = get(&results, CheckName::AllAtomsConnected);
        assert!(!r.pass);
        assert_eq!(r.value, Some(2.0));
    }

    #[test]
    fn formula_mismatch_reports_both_formulas() {
        let benzene = fixtures::benzene();
        let ethanol = fixtures::ethanol();
        let results = check_topology(&benzene, &ethanol);
        let r = get(&results, CheckName::MolecularFormula);
        assert!(!r.pass);
        assert!(r.detail.contains("C2H6O") && r.detail.contains("C6H6"));
        assert!(!get(&results, CheckName::MolecularBonds).pass);
    }

    #[test]
    fn isomeric_bond_rewire_fails_bonds_only() {
        // Same formula (C4, three single bonds): n-butane chain vs isobutane star.
        let atoms = vec![GraphAtom::new(crate::Element::C); 4];
        let chain = MolecularGraph::new(
            atoms.clone(),
            vec![
                GraphBond::new(0, 1, BondOrder::Single),
                GraphBond::new(1, 2, BondOrder::Single),
                GraphBond::new(2, 3, BondOrder::Single),
            ],
        )
        .unwrap();
        let star = MolecularGraph::new(
            atoms,
            vec![
                GraphBond::new(0, 1, BondOrder::Single),
                GraphBond::new(0, 2, BondOrder::Single),
                GraphBond::new(0, 3, BondOrder::Single),
            ],
        )
        .unwrap();
        let results = check_topology(&chain, &star);
        assert!(get(&results, CheckName::MolecularFormula).pass);
        assert!(!get(&results, CheckName::MolecularBonds).pass);
    }
}
