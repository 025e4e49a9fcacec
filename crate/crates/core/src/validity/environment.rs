//! Intermolecular checks between the predicted ligand and the rest of the
//! predicted complex: one pocket-contact check, four minimum-distance
//! checks, and four volume-overlap checks (protein, organic cofactors,
//! inorganic cofactors, waters).
//!
//! Volume overlap is the fraction of the ligand's van-der-Waals volume that
//! falls inside a group's van-der-Waals volume, estimated on a cubic grid
//! anchored at the ligand centroid. Anchoring to the ligand makes the
//! estimate stable under translation (up to floating-point ties) and keeps
//! rotation sensitivity within the grid's resolution error.

use super::{CheckConfig, CheckName, CheckResult};
use crate::structure::ComplexStructure;
use crate::vec3::{self, Vec3};

/// A named atom group to measure the ligand against.
struct Group {
    min_dist_check: CheckName,
    overlap_check: CheckName,
    /// (center, vdW radius) per heavy atom; empty means the group is absent
    /// and both checks pass vacuously.
    spheres: Vec<(Vec3, f64)>,
}

/// Environment checks: `protein-ligand_maximum_distance`, the four
/// `minimum_distance_to_*`, and the four `volume_overlap_with_*`.
pub fn check_environment(
    pred: &ComplexStructure,
    cfg: &CheckConfig,
) -> Vec<(CheckName, CheckResult)> {
    let lig = pred.ligands.first().expect("caller checked ligand presence");
    let lig_spheres: Vec<(Vec3, f64)> = lig
        .coords
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, lig.graph.atom(i).element.vdw_radius()))
        .collect();

    let protein: Vec<(Vec3, f64)> = pred
        .protein_atoms()
        .filter(|(_, a)| !a.element.is_hydrogen())
        .map(|(_, a)| (a.coords, a.element.vdw_radius()))
        .collect();
    let cof = |atoms: &[crate::structure::CofactorAtom]| -> Vec<(Vec3, f64)> {
        atoms
            .iter()
            .filter(|a| !a.element.is_hydrogen())
            .map(|a| (a.coords, a.element.vdw_radius()))
            .collect()
    };

    let groups = [
        Group {
            min_dist_check: CheckName::MinimumDistanceToProtein,
            overlap_check: CheckName::VolumeOverlapWithProtein,
            spheres: protein,
        },
        Group {
            min_dist_check: CheckName::MinimumDistanceToOrganicCofactors,
            overlap_check: CheckName::VolumeOverlapWithOrganicCofactors,
            spheres: cof(&pred.cofactors.organic),
        },
        Group {
            min_dist_check: CheckName::MinimumDistanceToInorganicCofactors,
            overlap_check: CheckName::VolumeOverlapWithInorganicCofactors,
            spheres: cof(&pred.cofactors.inorganic),
        },
        Group {
            min_dist_check: CheckName::MinimumDistanceToWaters,
            overlap_check: CheckName::VolumeOverlapWithWaters,
            spheres: cof(&pred.cofactors.waters),
        },
    ];

    let mut out = Vec::with_capacity(9);
    out.push((
        CheckName::ProteinLigandMaximumDistance,
        pocket_contact(&lig_spheres, &groups[0].spheres, cfg),
    ));
    for g in &groups {
        out.push((g.min_dist_check, min_distance(&lig_spheres, g, cfg)));
    }
    for g in &groups {
        out.push((g.overlap_check, overlap(&lig_spheres, g, cfg)));
    }
    out
}

/// The ligand must touch the protein: its closest heavy-atom distance to
/// the protein may not exceed `max_lig_prot_dist`.
fn pocket_contact(
    lig: &[(Vec3, f64)],
    protein: &[(Vec3, f64)],
    cfg: &CheckConfig,
) -> CheckResult {
    if protein.is_empty() {
        return CheckResult::failing(None, "no protein atoms to measure against");
    }
    let mut min_d = f64::INFINITY;
    for &(lc, _) in lig {
        for &(pc, _) in protein {
            min_d = min_d.min(vec3::dist(lc, pc));
        }
    }
    if min_d <= cfg.max_lig_prot_dist {
        CheckResult::passing(min_d, "")
    } else {
        CheckResult::failing(
            Some(min_d),
            format!(
                "closest protein atom is {min_d:.2} Å away (limit {:.1} Å)",
                cfg.max_lig_prot_dist
            ),
        )
    }
}

/// Every ligand/group atom pair must keep at least `inter_vdw_factor` of
/// the pair's vdW-radii sum. Value: the worst distance/vdW-sum ratio.
fn min_distance(lig: &[(Vec3, f64)], group: &Group, cfg: &CheckConfig) -> CheckResult {
    if group.spheres.is_empty() {
        return CheckResult::pass();
    }
    let mut worst = f64::INFINITY;
    let mut offender = None;
    for (li, &(lc, lr)) in lig.iter().enumerate() {
        for &(gc, gr) in &group.spheres {
            let ratio = vec3::dist(lc, gc) / (lr + gr);
            if ratio < worst {
                worst = ratio;
                offender = Some((li, vec3::dist(lc, gc), cfg.inter_vdw_factor * (lr + gr)));
            }
        }
    }
    if worst >= cfg.inter_vdw_factor {
        CheckResult::passing(worst, "")
    } else {
        let (li, d, floor) = offender.expect("nonempty group");
        CheckResult::failing(
            Some(worst),
            format!("ligand atom {li} at {d:.2} Å, below the {floor:.2} Å floor"),
        )
    }
}

fn overlap(lig: &[(Vec3, f64)], group: &Group, cfg: &CheckConfig) -> CheckResult {
    if group.spheres.is_empty() {
        return CheckResult::pass();
    }
    let fraction = volume_overlap_fraction(lig, &group.spheres, cfg.grid_spacing);
    if fraction <= cfg.volume_overlap_max {
        CheckResult::passing(fraction, "")
    } else {
        CheckResult::failing(
            Some(fraction),
            format!(
                "{:.1}% of the ligand volume overlaps (limit {:.1}%)",
                fraction * 100.0,
                cfg.volume_overlap_max * 100.0
            ),
        )
    }
}

/// Fraction of the ligand's vdW volume lying inside the group's vdW volume,
/// estimated by counting cubic-grid points. The grid is anchored at the
/// ligand centroid and extends over the ligand's bounding box.
pub fn volume_overlap_fraction(
    lig: &[(Vec3, f64)],
    group: &[(Vec3, f64)],
    spacing: f64,
) -> f64 {
    if lig.is_empty() || group.is_empty() {
        return 0.0;
    }
    let centers: Vec<Vec3> = lig.iter().map(|&(c, _)| c).collect();
    let anchor = vec3::centroid(&centers);
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for &(c, r) in lig {
        for ax in 0..3 {
            lo[ax] = lo[ax].min(c[ax] - r);
            hi[ax] = hi[ax].max(c[ax] + r);
        }
    }
    // Only group spheres that can reach the ligand box matter.
    let near: Vec<(Vec3, f64)> = group
        .iter()
        .filter(|&&(c, r)| {
            (0..3).all(|ax| c[ax] + r >= lo[ax] && c[ax] - r <= hi[ax])
        })
        .copied()
        .collect();

    let steps = |ax: usize| -> std::ops::RangeInclusive<i64> {
        let a = ((lo[ax] - anchor[ax]) / spacing).floor() as i64;
        let b = ((hi[ax] - anchor[ax]) / spacing).ceil() as i64;
        a..=b
    };
    let lig_r2: Vec<(Vec3, f64)> = lig.iter().map(|&(c, r)| (c, r * r)).collect();
    let near_r2: Vec<(Vec3, f64)> = near.iter().map(|&(c, r)| (c, r * r)).collect();

    let mut in_lig = 0u64;
    let mut in_both = 0u64;
    for ix in steps(0) {
        for iy in steps(1) {
            for iz in steps(2) {
                let p = [
                    anchor[0] + ix as f64 * spacing,
                    anchor[1] + iy as f64 * spacing,
                    anchor[2] + iz as f64 * spacing,
                ];
                if !lig_r2.iter().any(|&(c, r2)| vec3::dist_sq(p, c) <= r2) {
                    continue;
                }
                in_lig += 1;
                if near_r2.iter().any(|&(c, r2)| vec3::dist_sq(p, c) <= r2) {
                    in_both += 1;
                }
            }
        }
    }
    if in_lig == 0 {
        0.0
    } else {
        in_both as f64 / in_lig as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::{GraphAtom, MolecularGraph};
    use crate::structure::CofactorAtom;
    use crate::testutil::complex_with;
    use crate::Element;

    fn get(results: &[(CheckName, CheckResult)], name: CheckName) -> &CheckResult {
        &results.iter().find(|(n, _)| *n == name).unwrap().1
    }

    /// Single-carbon ligand at the origin, one protein Cα at `prot`.
    fn one_carbon_complex(prot: Vec3) -> ComplexStructure {
        let graph =
            MolecularGraph::new(vec![GraphAtom::new(Element::C)], Vec::new()).unwrap();
        complex_with(&[(1, prot)], graph, vec![[0.0, 0.0, 0.0]])
    }

    fn water_at(c: Vec3) -> CofactorAtom {
        CofactorAtom {
            res_name: "HOH".to_string(),
            name: "O".to_string(),
            element: Element::O,
            coords: c,
        }
    }

    #[test]
    fn returns_all_nine_checks() {
        let c = one_carbon_complex([4.0, 0.0, 0.0]);
        let results = check_environment(&c, &CheckConfig::default());
        assert_eq!(results.len(), 9);
    }

    #[test]
    fn pocket_contact_boundary_is_inclusive() {
        let cfg = CheckConfig::default();
        let near = check_environment(&one_carbon_complex([5.0, 0.0, 0.0]), &cfg);
        let r = get(&near, CheckName::ProteinLigandMaximumDistance);
        assert!(r.pass, "exactly 5.0 Å still counts as touching");
        assert!((r.value.unwrap() - 5.0).abs() < 1e-12);

        let far = check_environment(&one_carbon_complex([5.05, 0.0, 0.0]), &cfg);
        let r = get(&far, CheckName::ProteinLigandMaximumDistance);
        assert!(!r.pass);
        assert!(r.detail.contains("closest protein atom"));
    }

    #[test]
    fn protein_clash_fails_min_distance() {
        // C vs protein C: floor = 0.75 x 3.40 = 2.55 Å.
        let cfg = CheckConfig::default();
        let clash = check_environment(&one_carbon_complex([2.4, 0.0, 0.0]), &cfg);
        let r = get(&clash, CheckName::MinimumDistanceToProtein);
        assert!(!r.pass);
        assert!((r.value.unwrap() - 2.4 / 3.4).abs() < 1e-12);

        let ok = check_environment(&one_carbon_complex([2.6, 0.0, 0.0]), &cfg);
        assert!(get(&ok, CheckName::MinimumDistanceToProtein).pass);
    }

    #[test]
    fn absent_groups_pass_vacuously() {
        let c = one_carbon_complex([4.0, 0.0, 0.0]);
        let results = check_environment(&c, &CheckConfig::default());
        for name in [
            CheckName::MinimumDistanceToOrganicCofactors,
            CheckName::MinimumDistanceToInorganicCofactors,
            CheckName::MinimumDistanceToWaters,
            CheckName::VolumeOverlapWithOrganicCofactors,
            CheckName::VolumeOverlapWithInorganicCofactors,
            CheckName::VolumeOverlapWithWaters,
        ] {
            let r = get(&results, name);
            assert!(r.pass, "{name} should pass with no group atoms");
            assert_eq!(r.value, None);
        }
    }

    #[test]
    fn water_clash_is_detected() {
        // O vs C: floor = 0.75 x (1.52 + 1.70) = 2.415 Å.
        let mut c = one_carbon_complex([4.0, 0.0, 0.0]);
        c.cofactors.waters.push(water_at([2.0, 0.0, 0.0]));
        let results = check_environment(&c, &CheckConfig::default());
        assert!(!get(&results, CheckName::MinimumDistanceToWaters).pass);
        assert!(get(&results, CheckName::MinimumDistanceToProtein).pass);
    }

    /// Analytic overlap fraction for two equal spheres of radius `r` at
    /// distance `d`: lens volume over sphere volume.
    fn equal_sphere_fraction(r: f64, d: f64) -> f64 {
        if d >= 2.0 * r {
            return 0.0;
        }
        (4.0 * r + d) * (2.0 * r - d).powi(2) / (16.0 * r.powi(3))
    }

    #[test]
    fn grid_overlap_matches_analytic_lens() {
        let r = 1.7;
        for d in [0.0, 0.8, 1.7, 2.5, 3.3] {
            let got = volume_overlap_fraction(
                &[([0.0, 0.0, 0.0], r)],
                &[([d, 0.0, 0.0], r)],
                0.25,
            );
            let want = equal_sphere_fraction(r, d);
            assert!(
                (got - want).abs() < 0.02,
                "d={d}: grid {got:.4} vs analytic {want:.4}"
            );
        }
    }

    #[test]
    fn overlap_outcomes_around_threshold() {
        // Ligand C (r 1.70) vs water O (r 1.52): deep overlap at 1.7 Å fails,
        // a ~2% graze at 2.8 Å passes with a nonzero value.
        let mut c = one_carbon_complex([4.0, 0.0, 0.0]);
        c.cofactors.waters.push(water_at([1.7, 0.0, 0.0]));
        let results = check_environment(&c, &CheckConfig::default());
        let r = get(&results, CheckName::VolumeOverlapWithWaters);
        assert!(!r.pass);
        assert!(r.value.unwrap() > 0.2);
        assert!(r.detail.contains("limit"));

        let mut c = one_carbon_complex([4.0, 0.0, 0.0]);
        c.cofactors.waters.push(water_at([2.8, 0.0, 0.0]));
        let results = check_environment(&c, &CheckConfig::default());
        let r = get(&results, CheckName::VolumeOverlapWithWaters);
        assert!(r.pass);
        let v = r.value.unwrap();
        assert!(v > 0.0 && v < 0.075, "small but nonzero overlap, got {v}");
    }

    #[test]
    fn overlap_is_translation_stable() {
        // Generic (non-lattice) coordinates: no grid point sits on a sphere
        // boundary, so the centroid-anchored grid reproduces the count
        // exactly after an arbitrary shift.
        let lig = [([0.213, -0.391, 1.007], 1.7), ([1.586, 0.322, 0.913], 1.55)];
        let grp = [([1.041, 1.177, 0.149], 1.52), ([-0.773, 0.508, 1.871], 1.7)];
        let base = volume_overlap_fraction(&lig, &grp, 0.25);
        let t = [13.7, -2.9, 101.3];
        let shift = |s: &[(Vec3, f64)]| -> Vec<(Vec3, f64)> {
            s.iter().map(|&(c, r)| (vec3::add(c, t), r)).collect()
        };
        let moved = volume_overlap_fraction(&shift(&lig), &shift(&grp), 0.25);
        assert!((base - moved).abs() < 1e-12, "{base} vs {moved}");
    }

    #[test]
    fn overlap_rotation_stays_within_grid_error() {
        use crate::testutil::{mat_mul_vec, random_rotation, Rng};
        use rand::SeedableRng;
        let lig = [([0.2, -0.4, 1.0], 1.7), ([1.6, 0.3, 0.9], 1.55)];
        let grp = [([1.0, 1.2, 0.1], 1.52), ([-0.8, 0.5, 1.9], 1.7)];
        let base = volume_overlap_fraction(&lig, &grp, 0.25);
        let mut rng = Rng::seed_from_u64(42);
        for _ in 0..5 {
            let rot = random_rotation(&mut rng);
            let spin = |s: &[(Vec3, f64)]| -> Vec<(Vec3, f64)> {
                s.iter().map(|&(c, r)| (mat_mul_vec(&rot, c), r)).collect()
            };
            let moved = volume_overlap_fraction(&spin(&lig), &spin(&grp), 0.25);
            assert!((base - moved).abs() < 0.02, "{base} vs {moved}");
        }
    }
}
