//! Shared helpers for unit tests: deterministic RNG, random rigid motions,
//! and quick construction of synthetic complexes.

use rand::Rng as _;

use crate::elements::Element;
use crate::molgraph::MolecularGraph;
use crate::structure::{
    AtomSite, CofactorGroups, ComplexStructure, Ligand, ProteinChain, ResidueSite,
};
use crate::vec3::Vec3;

pub use rand_chacha::ChaCha8Rng as Rng;

/// Row-major matrix * vector.
pub fn mat_mul_vec(m: &[[f64; 3]; 3], v: Vec3) -> Vec3 {
    crate::vec3::transform(m, [0.0; 3], v)
}

/// Uniform random proper rotation from a random unit quaternion.
pub fn random_rotation(rng: &mut Rng) -> [[f64; 3]; 3] {
    loop {
        let q: [f64; 4] = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let n2: f64 = q.iter().map(|x| x * x).sum();
        if n2 < 1e-6 || n2 > 1.0 {
            continue;
        }
        let n = n2.sqrt();
        let [w, x, y, z] = [q[0] / n, q[1] / n, q[2] / n, q[3] / n];
        return [
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - w * z),
                2.0 * (x * z + w * y),
            ],
            [
                2.0 * (x * y + w * z),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - w * x),
            ],
            [
                2.0 * (x * z - w * y),
                2.0 * (y * z + w * x),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ];
    }
}

/// A residue holding a single alpha-carbon at the given position.
pub fn ca_residue(chain: &str, seq: i32, coords: Vec3) -> ResidueSite {
    ResidueSite {
        chain_id: chain.to_string(),
        seq_index: seq,
        insertion_code: None,
        res_name: "GLY".into(),
        atoms: vec![AtomSite {
            name: "CA".into(),
            element: Element::C,
            coords,
            occupancy: 1.0,
            is_hetero: false,
        }],
    }
}

/// Build a single-chain complex from CA positions plus one ligand.
pub fn complex_with(
    cas: &[(i32, Vec3)],
    graph: MolecularGraph,
    lig_coords: Vec<Vec3>,
) -> ComplexStructure {
    let residues = cas
        .iter()
        .map(|&(seq, coords)| ca_residue("A", seq, coords))
        .collect();
    let c = ComplexStructure {
        chains: vec![ProteinChain {
            id: "A".into(),
            residues,
        }],
        ligands: vec![Ligand {
            graph,
            coords: lig_coords,
        }],
        cofactors: CofactorGroups::default(),
    };
    c.validate().expect("test complex is well-formed");
    c
}
