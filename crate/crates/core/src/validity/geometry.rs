//! Intramolecular geometry checks on the predicted ligand conformation:
//! bonded distances, angles, self-clashes, planarity, and overall strain.
//!
//! Targets are simple tabulated ideals (covalent-radii sums, hybridization
//! angles, vdW-radii clash floors), not a force field; tolerances are wide
//! accordingly. Angles inside 3- and 4-membered rings are exempt from the
//! angle check — their ideals are dictated by the ring, not hybridization.

use std::collections::HashSet;

use nalgebra::{Matrix3, Vector3};

use super::{CheckConfig, CheckName, CheckResult};
use crate::molgraph::{perceive_rings, BondOrder, MolecularGraph};
use crate::vec3::{self, Vec3};

/// Geometry checks: `bond_lengths`, `bond_angles`, `internal_steric_clash`,
/// `aromatic_ring_flatness`, `double_bond_flatness`, `internal_energy`.
///
/// `reference_coords`, when given, is a low-strain conformer of the same
/// graph (same atom order as `graph`) used to normalize the strain ratio.
pub fn check_geometry(
    graph: &MolecularGraph,
    coords: &[Vec3],
    reference_coords: Option<&[Vec3]>,
    cfg: &CheckConfig,
) -> Vec<(CheckName, CheckResult)> {
    let rings = perceive_rings(graph);
    let exempt = small_ring_angle_exemptions(&rings);
    vec![
        (CheckName::BondLengths, bond_lengths(graph, coords, cfg)),
        (
            CheckName::BondAngles,
            bond_angles(graph, coords, &exempt, cfg),
        ),
        (
            CheckName::InternalStericClash,
            steric_clash(graph, coords, cfg),
        ),
        (
            CheckName::AromaticRingFlatness,
            aromatic_flatness(graph, coords, &rings, cfg),
        ),
        (
            CheckName::DoubleBondFlatness,
            double_bond_flatness(graph, coords, cfg),
        ),
        (
            CheckName::InternalEnergy,
            internal_energy(graph, coords, reference_coords, &exempt, cfg),
        ),
    ]
}

/// Angle triples (min-neighbour, centre, max-neighbour) whose geometry is
/// constrained by a 3- or 4-membered ring.
fn small_ring_angle_exemptions(rings: &[Vec<usize>]) -> HashSet<(usize, usize, usize)> {
    let mut exempt = HashSet::new();
    for ring in rings.iter().filter(|r| r.len() <= 4) {
        let n = ring.len();
        for k in 0..n {
            let a = ring[(k + n - 1) % n];
            let c = ring[k];
            let b = ring[(k + 1) % n];
            exempt.insert((a.min(b), c, a.max(b)));
        }
    }
    exempt
}

/// Ideal angle at an atom from its bond orders: sp (180°) with a triple or
/// cumulated double bonds, sp² (120°) with a double or aromatic bond,
/// sp³ (109.47°) otherwise.
fn ideal_angle_deg(graph: &MolecularGraph, i: usize) -> f64 {
    let mut doubles = 0;
    let mut has_sp2 = false;
    for &(_, order) in graph.neighbors(i) {
        match order {
            BondOrder::Triple => return 180.0,
            BondOrder::Double => {
                doubles += 1;
                has_sp2 = true;
            }
            BondOrder::Aromatic => has_sp2 = true,
            BondOrder::Single => {}
        }
    }
    if doubles >= 2 {
        180.0
    } else if has_sp2 {
        120.0
    } else {
        (-1.0f64 / 3.0).acos().to_degrees()
    }
}

fn bond_lengths(graph: &MolecularGraph, coords: &[Vec3], cfg: &CheckConfig) -> CheckResult {
    let mut worst: f64 = 0.0;
    let mut offenders = Vec::new();
    for bond in graph.bonds() {
        let ideal =
            graph.atom(bond.i).element.covalent_radius() + graph.atom(bond.j).element.covalent_radius();
        let d = vec3::dist(coords[bond.i], coords[bond.j]);
        let rel = (d / ideal - 1.0).abs();
        worst = worst.max(rel);
        if rel > cfg.bond_len_rel_tol {
            offenders.push(format!(
                "bond {}-{}: {:.2} Å outside [{:.2}, {:.2}]",
                bond.i,
                bond.j,
                d,
                ideal * (1.0 - cfg.bond_len_rel_tol),
                ideal * (1.0 + cfg.bond_len_rel_tol)
            ));
        }
    }
    if offenders.is_empty() {
        CheckResult::passing(worst, "")
    } else {
        CheckResult::failing(Some(worst), offenders.join("; "))
    }
}

fn bond_angles(
    graph: &MolecularGraph,
    coords: &[Vec3],
    exempt: &HashSet<(usize, usize, usize)>,
    cfg: &CheckConfig,
) -> CheckResult {
    let mut worst: f64 = 0.0;
    let mut offenders = Vec::new();
    for c in 0..graph.atom_count() {
        let nbrs: Vec<usize> = graph.neighbors(c).iter().map(|&(n, _)| n).collect();
        if nbrs.len() < 2 {
            continue;
        }
        let ideal = ideal_angle_deg(graph, c);
        for (ai, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[ai + 1..] {
                if exempt.contains(&(a.min(b), c, a.max(b))) {
                    continue;
                }
                let theta = vec3::angle_deg(coords[a], coords[c], coords[b]);
                let rel = (theta - ideal).abs() / ideal;
                worst = worst.max(rel);
                if rel > cfg.angle_rel_tol {
                    offenders.push(format!(
                        "angle {a}-{c}-{b}: {theta:.1}° vs ideal {ideal:.1}°"
                    ));
                }
            }
        }
    }
    if offenders.is_empty() {
        CheckResult::passing(worst, "")
    } else {
        CheckResult::failing(Some(worst), offenders.join("; "))
    }
}

/// Pairs of atoms four or more bonds apart (or in different fragments) must
/// keep at least `clash_vdw_factor` of their vdW-radii sum.
fn steric_clash(graph: &MolecularGraph, coords: &[Vec3], cfg: &CheckConfig) -> CheckResult {
    let mut worst_ratio = f64::INFINITY;
    let mut offenders = Vec::new();
    for i in 0..graph.atom_count() {
        let dist = graph.bond_distances(i);
        for j in (i + 1)..graph.atom_count() {
            if dist[j] < 4 {
                continue;
            }
            let vdw_sum =
                graph.atom(i).element.vdw_radius() + graph.atom(j).element.vdw_radius();
            let d = vec3::dist(coords[i], coords[j]);
            let ratio = d / vdw_sum;
            if ratio < worst_ratio {
                worst_ratio = ratio;
            }
            if d < cfg.clash_vdw_factor * vdw_sum {
                offenders.push(format!(
                    "atoms {i} and {j}: {d:.2} Å < {:.2} Å",
                    cfg.clash_vdw_factor * vdw_sum
                ));
            }
        }
    }
    let value = if worst_ratio.is_finite() {
        Some(worst_ratio)
    } else {
        None // no pair far enough apart in the graph to be checked
    };
    if offenders.is_empty() {
        CheckResult {
            pass: true,
            value,
            detail: String::new(),
        }
    } else {
        CheckResult::failing(value, offenders.join("; "))
    }
}

/// Maximum absolute out-of-plane deviation from the least-squares plane.
/// Three points or fewer are trivially planar.
fn max_plane_deviation(points: &[Vec3]) -> f64 {
    if points.len() <= 3 {
        return 0.0;
    }
    let c = vec3::centroid(points);
    let mut cov = Matrix3::<f64>::zeros();
    for p in points {
        let d = Vector3::new(p[0] - c[0], p[1] - c[1], p[2] - c[2]);
        cov += d * d.transpose();
    }
    let eig = cov.symmetric_eigen();
    let mut min_k = 0;
    for k in 1..3 {
        if eig.eigenvalues[k] < eig.eigenvalues[min_k] {
            min_k = k;
        }
    }
    let normal = eig.eigenvectors.column(min_k);
    points
        .iter()
        .map(|p| {
            let d = Vector3::new(p[0] - c[0], p[1] - c[1], p[2] - c[2]);
            d.dot(&normal).abs()
        })
        .fold(0.0, f64::max)
}

fn aromatic_flatness(
    graph: &MolecularGraph,
    coords: &[Vec3],
    rings: &[Vec<usize>],
    cfg: &CheckConfig,
) -> CheckResult {
    let mut worst: f64 = 0.0;
    let mut offenders = Vec::new();
    for ring in rings {
        let n = ring.len();
        let aromatic = (0..n).all(|k| {
            graph.bond_between(ring[k], ring[(k + 1) % n]) == Some(BondOrder::Aromatic)
        });
        if !aromatic {
            continue;
        }
        let pts: Vec<Vec3> = ring.iter().map(|&i| coords[i]).collect();
        let dev = max_plane_deviation(&pts);
        worst = worst.max(dev);
        if dev > cfg.flatness_tol {
            offenders.push(format!(
                "ring [{}]: {dev:.2} Å out of plane",
                ring.iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ));
        }
    }
    if offenders.is_empty() {
        CheckResult::passing(worst, "")
    } else {
        CheckResult::failing(Some(worst), offenders.join("; "))
    }
}

/// Each isolated double bond must be planar together with its substituents:
/// the frame is the two bonded atoms plus all their other neighbours.
fn double_bond_flatness(
    graph: &MolecularGraph,
    coords: &[Vec3],
    cfg: &CheckConfig,
) -> CheckResult {
    let mut worst: f64 = 0.0;
    let mut offenders = Vec::new();
    for bond in graph.bonds() {
        if bond.order != BondOrder::Double {
            continue;
        }
        let mut frame = vec![bond.i, bond.j];
        frame.extend(
            graph
                .neighbors(bond.i)
                .iter()
                .chain(graph.neighbors(bond.j))
                .map(|&(n, _)| n)
                .filter(|&n| n != bond.i && n != bond.j),
        );
        let pts: Vec<Vec3> = frame.iter().map(|&i| coords[i]).collect();
        let dev = max_plane_deviation(&pts);
        worst = worst.max(dev);
        if dev > cfg.flatness_tol {
            offenders.push(format!(
                "double bond {}-{}: {dev:.2} Å out of plane",
                bond.i, bond.j
            ));
        }
    }
    if offenders.is_empty() {
        CheckResult::passing(worst, "")
    } else {
        CheckResult::failing(Some(worst), offenders.join("; "))
    }
}

/// Dimensionless strain: squared relative bond stretch, squared relative
/// angle bend, and the repulsive branch of a 12-6 potential over pairs four
/// or more bonds apart. Zero for an idealized conformer.
fn strain(
    graph: &MolecularGraph,
    coords: &[Vec3],
    exempt: &HashSet<(usize, usize, usize)>,
) -> f64 {
    let mut total = 0.0;
    for bond in graph.bonds() {
        let ideal = graph.atom(bond.i).element.covalent_radius()
            + graph.atom(bond.j).element.covalent_radius();
        let d = vec3::dist(coords[bond.i], coords[bond.j]);
        total += ((d - ideal) / ideal).powi(2);
    }
    for c in 0..graph.atom_count() {
        let nbrs: Vec<usize> = graph.neighbors(c).iter().map(|&(n, _)| n).collect();
        let ideal = ideal_angle_deg(graph, c);
        for (ai, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[ai + 1..] {
                if exempt.contains(&(a.min(b), c, a.max(b))) {
                    continue;
                }
                let theta = vec3::angle_deg(coords[a], coords[c], coords[b]);
                total += ((theta - ideal) / ideal).powi(2);
            }
        }
    }
    for i in 0..graph.atom_count() {
        let dist = graph.bond_distances(i);
        for j in (i + 1)..graph.atom_count() {
            if dist[j] < 4 {
                continue;
            }
            let sigma =
                graph.atom(i).element.vdw_radius() + graph.atom(j).element.vdw_radius();
            let d = vec3::dist(coords[i], coords[j]).max(1e-3);
            let x6 = (sigma / d).powi(6);
            total += (x6 * x6 - 2.0 * x6).max(0.0);
        }
    }
    total
}

fn internal_energy(
    graph: &MolecularGraph,
    coords: &[Vec3],
    reference_coords: Option<&[Vec3]>,
    exempt: &HashSet<(usize, usize, usize)>,
    cfg: &CheckConfig,
) -> CheckResult {
    let Some(reference) = reference_coords else {
        return CheckResult {
            pass: true,
            value: None,
            detail: "skipped: no reference conformer provided".to_string(),
        };
    };
    const EPS: f64 = 1e-6;
    let pose = strain(graph, coords, exempt);
    let refv = strain(graph, reference, exempt);
    let ratio = (pose + EPS) / (refv + EPS);
    if ratio <= cfg.strain_ratio_max {
        CheckResult::passing(ratio, "")
    } else {
        CheckResult::failing(
            Some(ratio),
            format!(
                "strain ratio {ratio:.1} exceeds {:.1} (pose {pose:.3} vs reference {refv:.3})",
                cfg.strain_ratio_max
            ),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::{fixtures, GraphAtom, GraphBond};
    use crate::Element;

    fn get(results: &[(CheckName, CheckResult)], name: CheckName) -> &CheckResult {
        &results.iter().find(|(n, _)| *n == name).unwrap().1
    }

    fn cfg() -> CheckConfig {
        CheckConfig::default()
    }

    fn benzene_coords(radius: f64) -> Vec<Vec3> {
        (0..6)
            .map(|i| {
                let a = std::f64::consts::PI / 3.0 * i as f64;
                [radius * a.cos(), radius * a.sin(), 0.0]
            })
            .collect()
    }

    fn chain(n: usize) -> MolecularGraph {
        let atoms = vec![GraphAtom::new(Element::C); n];
        let bonds = (1..n).map(|j| GraphBond::new(j - 1, j, BondOrder::Single)).collect();
        MolecularGraph::new(atoms, bonds).unwrap()
    }

    #[test]
    fn ideal_benzene_passes_all_six() {
        let g = fixtures::benzene();
        let results = check_geometry(&g, &benzene_coords(1.39), None, &cfg());
        assert_eq!(results.len(), 6);
        for (name, r) in &results {
            assert!(r.pass, "{name}: {}", r.detail);
        }
    }

    #[test]
    fn stretched_and_squeezed_bonds_fail() {
        let g = chain(2);
        let long = vec![[0.0, 0.0, 0.0], [2.1, 0.0, 0.0]];
        let r = bond_lengths(&g, &long, &cfg());
        assert!(!r.pass, "2.10 Å C-C should exceed [1.14, 1.90]");
        assert!(r.detail.contains("outside"));

        let short = vec![[0.0, 0.0, 0.0], [0.9, 0.0, 0.0]];
        assert!(!bond_lengths(&g, &short, &cfg()).pass);

        let ok = vec![[0.0, 0.0, 0.0], [1.52, 0.0, 0.0]];
        let r = bond_lengths(&g, &ok, &cfg());
        assert!(r.pass);
        assert!(r.value.unwrap() < 1e-12);
    }

    #[test]
    fn sp3_angle_tolerance_window() {
        let g = chain(3);
        // 90° is within 25% of 109.47°, 60° is not.
        let near = vec![[1.5, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 1.5, 0.0]];
        assert!(bond_angles(&g, &near, &HashSet::new(), &cfg()).pass);

        let tight = vec![
            [1.5, 0.0, 0.0],
            [0.0, 0.0, 0.0],
            [0.75, 1.3, 0.0], // 60° at the centre
        ];
        let r = bond_angles(&g, &tight, &HashSet::new(), &cfg());
        assert!(!r.pass);
        assert!(r.detail.contains("60.0°"));
    }

    #[test]
    fn cyclopropane_angles_are_exempt() {
        let atoms = vec![GraphAtom::new(Element::C); 3];
        let bonds = vec![
            GraphBond::new(0, 1, BondOrder::Single),
            GraphBond::new(1, 2, BondOrder::Single),
            GraphBond::new(2, 0, BondOrder::Single),
        ];
        let g = MolecularGraph::new(atoms, bonds).unwrap();
        let side = 1.52;
        let coords = vec![
            [0.0, 0.0, 0.0],
            [side, 0.0, 0.0],
            [side / 2.0, side * 3f64.sqrt() / 2.0, 0.0],
        ];
        let results = check_geometry(&g, &coords, None, &cfg());
        assert!(
            get(&results, CheckName::BondAngles).pass,
            "60° ring-internal angles must not be judged against 109.47°"
        );
    }

    #[test]
    fn sp_center_expects_linearity() {
        // C0#C1-C2: the angle at C1 must be near 180°.
        let atoms = vec![GraphAtom::new(Element::C); 3];
        let bonds = vec![
            GraphBond::new(0, 1, BondOrder::Triple),
            GraphBond::new(1, 2, BondOrder::Single),
        ];
        let g = MolecularGraph::new(atoms, bonds).unwrap();
        let bent = vec![[-1.2, 0.0, 0.0], [0.0, 0.0, 0.0], [0.7, 1.3, 0.0]];
        let r = bond_angles(&g, &bent, &HashSet::new(), &cfg());
        assert!(!r.pass, "118° at an sp centre is way outside 25% of 180°");
        let straight = vec![[-1.2, 0.0, 0.0], [0.0, 0.0, 0.0], [1.5, 0.0, 0.0]];
        assert!(bond_angles(&g, &straight, &HashSet::new(), &cfg()).pass);
    }

    #[test]
    fn folded_chain_clashes() {
        // Pentane backbone folded so C0 and C4 (4 bonds apart) nearly touch.
        let g = chain(5);
        let mut coords: Vec<Vec3> = vec![
            [0.0, 0.0, 0.0],
            [1.5, 0.0, 0.0],
            [2.2, 1.3, 0.0],
            [1.5, 2.6, 0.0],
            [0.0, 2.6, 0.0],
        ];
        // Distance C0-C4 = 2.6 Å > 2.38 Å: no clash yet.
        let r = steric_clash(&g, &coords, &cfg());
        assert!(r.pass);
        assert!((r.value.unwrap() - 2.6 / 3.4).abs() < 1e-9);

        coords[4] = [0.0, 2.0, 0.0];
        let r = steric_clash(&g, &coords, &cfg());
        assert!(!r.pass, "2.0 Å < 0.70 × 3.4 Å");
        assert!(r.detail.contains("atoms 0 and 4"));
    }

    #[test]
    fn close_pairs_within_three_bonds_are_not_clashes() {
        // 1-3 neighbours sit ~2.5 Å apart in any normal molecule.
        let g = chain(4);
        let coords = vec![
            [0.0, 0.0, 0.0],
            [1.5, 0.0, 0.0],
            [2.2, 1.3, 0.0],
            [1.2, 2.4, 0.0],
        ];
        let r = steric_clash(&g, &coords, &cfg());
        assert!(r.pass);
        assert_eq!(r.value, None, "no pair is >= 4 bonds apart in a 4-chain");
    }

    #[test]
    fn bent_aromatic_ring_fails_flatness() {
        let g = fixtures::benzene();
        let mut coords = benzene_coords(1.39);
        coords[0][2] = 0.8;
        let rings = perceive_rings(&g);
        let r = aromatic_flatness(&g, &coords, &rings, &cfg());
        assert!(!r.pass);
        assert!(r.value.unwrap() > 0.25);
        assert!(aromatic_flatness(&g, &benzene_coords(1.39), &rings, &cfg()).pass);
    }

    #[test]
    fn saturated_ring_is_not_held_to_flatness() {
        // Cyclohexane (single bonds) in a chair-like pucker passes the
        // aromatic check vacuously.
        let atoms = vec![GraphAtom::new(Element::C); 6];
        let bonds = (0..6)
            .map(|i| GraphBond::new(i, (i + 1) % 6, BondOrder::Single))
            .collect();
        let g = MolecularGraph::new(atoms, bonds).unwrap();
        let mut coords = benzene_coords(1.45);
        for (i, c) in coords.iter_mut().enumerate() {
            c[2] = if i % 2 == 0 { 0.25 } else { -0.25 };
        }
        let rings = perceive_rings(&g);
        let r = aromatic_flatness(&g, &coords, &rings, &cfg());
        assert!(r.pass);
        assert_eq!(r.value, Some(0.0));
    }

    #[test]
    fn twisted_double_bond_fails_flatness() {
        // Tetrasubstituted ethylene: C2=C3 carries substituents 0,1 and 4,5.
        let atoms = vec![GraphAtom::new(Element::C); 6];
        let bonds = vec![
            GraphBond::new(0, 2, BondOrder::Single),
            GraphBond::new(1, 2, BondOrder::Single),
            GraphBond::new(2, 3, BondOrder::Double),
            GraphBond::new(3, 4, BondOrder::Single),
            GraphBond::new(3, 5, BondOrder::Single),
        ];
        let g = MolecularGraph::new(atoms, bonds).unwrap();
        let flat: Vec<Vec3> = vec![
            [-0.7, 1.2, 0.0],
            [-0.7, -1.2, 0.0],
            [0.0, 0.0, 0.0],
            [1.34, 0.0, 0.0],
            [2.04, 1.2, 0.0],
            [2.04, -1.2, 0.0],
        ];
        assert!(double_bond_flatness(&g, &flat, &cfg()).pass);

        // Rotate the 4/5 pair ~90° about the double-bond axis: no plane can
        // hold both wings any more.
        let mut twisted = flat.clone();
        twisted[4] = [2.04, 0.0, 1.2];
        twisted[5] = [2.04, 0.0, -1.2];
        let r = double_bond_flatness(&g, &twisted, &cfg());
        assert!(!r.pass);
        assert!(r.value.unwrap() > 0.25);
        assert!(r.detail.contains("double bond 2-3"));
    }

    #[test]
    fn strain_skips_without_reference_and_gates_with_one() {
        let g = chain(5);
        let relaxed: Vec<Vec3> = vec![
            [0.0, 0.0, 0.0],
            [1.52, 0.0, 0.0],
            [2.27, 1.32, 0.0],
            [3.79, 1.32, 0.0],
            [4.54, 2.64, 0.0],
        ];
        let exempt = HashSet::new();

        let skipped = internal_energy(&g, &relaxed, None, &exempt, &cfg());
        assert!(skipped.pass);
        assert!(skipped.detail.contains("skipped"));

        let same = internal_energy(&g, &relaxed, Some(&relaxed), &exempt, &cfg());
        assert!(same.pass);
        assert!((same.value.unwrap() - 1.0).abs() < 1e-9);

        // Compress the whole chain onto 0.5 Å spacing: bonds deeply squeezed
        // and the 1-5 pair (2.0 Å apart, vdW sum 3.4 Å) inside the repulsive
        // wall.
        let crushed: Vec<Vec3> = (0..5).map(|i| [i as f64 * 0.5, 0.0, 0.0]).collect();
        let r = internal_energy(&g, &crushed, Some(&relaxed), &exempt, &cfg());
        assert!(!r.pass);
        assert!(r.value.unwrap() > 100.0);
        assert!(r.detail.contains("strain ratio"));
    }

    #[test]
    fn strain_is_rigid_motion_invariant() {
        use crate::testutil::{mat_mul_vec, random_rotation, Rng};
        use rand::SeedableRng;
        let g = chain(5);
        let coords: Vec<Vec3> = vec![
            [0.0, 0.0, 0.0],
            [1.4, 0.3, 0.0],
            [2.3, 1.3, 0.2],
            [3.8, 1.2, 0.1],
            [4.4, 2.6, -0.3],
        ];
        let exempt = HashSet::new();
        let base = strain(&g, &coords, &exempt);
        let mut rng = Rng::seed_from_u64(7);
        let rot = random_rotation(&mut rng);
        let moved: Vec<Vec3> = coords
            .iter()
            .map(|&p| {
                let q = mat_mul_vec(&rot, p);
                [q[0] + 11.0, q[1] - 4.0, q[2] + 0.5]
            })
            .collect();
        let after = strain(&g, &moved, &exempt);
        assert!((base - after).abs() < 1e-9 * base.max(1.0));
    }
}
