//! Molecular-graph algorithms: automorphism and isomorphism search for
//! symmetry-corrected RMSD, ring perception for flatness checks, and
//! circular fingerprints with Tanimoto similarity for stratification.

mod fingerprint;
mod graph;
mod iso;
mod rings;

pub use fingerprint::{
    circular_fingerprint, tanimoto, Fingerprint, DEFAULT_FP_BITS, DEFAULT_FP_RADIUS,
};
pub use graph::{
    classify_bond_stereo, stereo_reference_neighbor, BondOrder, BondStereo, GraphAtom,
    GraphBond, MolecularGraph,
};
pub use iso::{automorphisms, graphs_match, is_automorphism, Automorphisms};
pub use rings::perceive_rings;

#[cfg(test)]
pub(crate) use graph::test_graphs as fixtures;
