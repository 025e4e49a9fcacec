use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::elements::Element;
use crate::error::{Error, Result};

/// Bond multiplicity. Aromatic bonds come from input flags; no perception
/// is performed here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Stable small integer used in hashing and matching.
    pub fn code(self) -> u8 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Aromatic => 4,
        }
    }

    /// Contribution to explicit valence; aromatic counts 1.5.
    pub fn valence(self) -> f64 {
        match self {
            BondOrder::Single => 1.0,
            BondOrder::Double => 2.0,
            BondOrder::Triple => 3.0,
            BondOrder::Aromatic => 1.5,
        }
    }
}

/// Configured cis/trans assignment on a double bond.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BondStereo {
    Cis,
    Trans,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphAtom {
    pub element: Element,
    pub formal_charge: i8,
    /// Tetrahedral parity (+1/-1) when the input declared one; see
    /// `validity::check_stereo` for the signed-volume convention.
    pub tetrahedral_parity: Option<i8>,
}

impl GraphAtom {
    pub fn new(element: Element) -> Self {
        GraphAtom {
            element,
            formal_charge: 0,
            tetrahedral_parity: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphBond {
    pub i: usize,
    pub j: usize,
    pub order: BondOrder,
    pub stereo: Option<BondStereo>,
}

impl GraphBond {
    pub fn new(i: usize, j: usize, order: BondOrder) -> Self {
        GraphBond {
            i,
            j,
            order,
            stereo: None,
        }
    }
}

/// Ligand topology: heavy atoms with charges and optional parity, bonds with
/// orders and optional cis/trans flags. Simple graph, immutable once built.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MolecularGraph {
    atoms: Vec<GraphAtom>,
    bonds: Vec<GraphBond>,
    #[serde(skip)]
    #[serde(default)]
    adjacency_cache: std::sync::OnceLock<Vec<Vec<(usize, BondOrder)>>>,
}

impl PartialEq for MolecularGraph {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms && self.bonds == other.bonds
    }
}

impl MolecularGraph {
    /// Build a graph and require it to be a single connected component.
    pub fn new(atoms: Vec<GraphAtom>, bonds: Vec<GraphBond>) -> Result<Self> {
        let g = Self::new_allow_fragments(atoms, bonds)?;
        if !g.is_connected() {
            return Err(Error::InvalidParameter(
                "molecular graph is disconnected; use new_allow_fragments to permit".into(),
            ));
        }
        Ok(g)
    }

    /// Build a graph that may hold several fragments (the
    /// `all_atoms_connected` check reports on this later).
    pub fn new_allow_fragments(atoms: Vec<GraphAtom>, bonds: Vec<GraphBond>) -> Result<Self> {
        let n = atoms.len();
        let mut seen = std::collections::HashSet::new();
        for b in &bonds {
            if b.i >= n || b.j >= n {
                return Err(Error::InvalidParameter(format!(
                    "bond ({}, {}) references an atom outside 0..{}",
                    b.i, b.j, n
                )));
            }
            if b.i == b.j {
                return Err(Error::InvalidParameter(format!("self-loop on atom {}", b.i)));
            }
            let key = (b.i.min(b.j), b.i.max(b.j));
            if !seen.insert(key) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate bond between atoms {} and {}",
                    key.0, key.1
                )));
            }
        }
        Ok(MolecularGraph {
            atoms,
            bonds,
            adjacency_cache: std::sync::OnceLock::new(),
        })
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    pub fn atoms(&self) -> &[GraphAtom] {
        &self.atoms
    }

    pub fn bonds(&self) -> &[GraphBond] {
        &self.bonds
    }

    pub fn atom(&self, i: usize) -> &GraphAtom {
        &self.atoms[i]
    }

    /// Install perceived tetrahedral parities (parser use: perception needs
    /// the finished adjacency, so parities are set after construction).
    pub(crate) fn set_parities(&mut self, parities: &std::collections::HashMap<usize, i8>) {
        for (&i, &p) in parities {
            self.atoms[i].tetrahedral_parity = Some(p);
        }
    }

    /// Install perceived cis/trans flags, keyed by bond-list index
    /// (parser use, same staging as `set_parities`).
    pub(crate) fn set_bond_stereos(
        &mut self,
        stereos: &std::collections::HashMap<usize, BondStereo>,
    ) {
        for (&b, &s) in stereos {
            self.bonds[b].stereo = Some(s);
        }
    }

    fn adjacency(&self) -> &Vec<Vec<(usize, BondOrder)>> {
        self.adjacency_cache.get_or_init(|| {
            let mut adj = vec![Vec::new(); self.atoms.len()];
            for b in &self.bonds {
                adj[b.i].push((b.j, b.order));
                adj[b.j].push((b.i, b.order));
            }
            for list in &mut adj {
                list.sort_unstable_by_key(|&(j, o)| (j, o.code()));
            }
            adj
        })
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, BondOrder)] {
        &self.adjacency()[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency()[i].len()
    }

    pub fn bond_between(&self, i: usize, j: usize) -> Option<BondOrder> {
        self.neighbors(i)
            .iter()
            .find(|&&(k, _)| k == j)
            .map(|&(_, o)| o)
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components() <= 1
    }

    pub fn connected_components(&self) -> usize {
        let n = self.atoms.len();
        if n == 0 {
            return 0;
        }
        let mut seen = vec![false; n];
        let mut count = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(v) = queue.pop_front() {
                for &(w, _) in self.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        count
    }

    /// Bond-path distance (number of bonds) from `from` to every atom;
    /// unreachable atoms get usize::MAX.
    pub fn bond_distances(&self, from: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.atoms.len()];
        dist[from] = 0;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for &(w, _) in self.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Sum of explicit bond orders at an atom (aromatic counts 1.5).
    pub fn explicit_valence(&self, i: usize) -> f64 {
        self.neighbors(i).iter().map(|&(_, o)| o.valence()).sum()
    }

    /// Allowed total valences for an atom, adjusted by formal charge.
    /// Boron and carbon lose capacity with any charge; N/P/As/O/S/Se gain
    /// with positive charge and lose with negative. Elements without a
    /// tabulated valence return an empty list (exempt from the check).
    pub fn allowed_valences(&self, i: usize) -> Vec<i32> {
        let atom = &self.atoms[i];
        let base: &[i32] = match atom.element.symbol() {
            "H" | "F" | "Cl" | "Br" | "I" => &[1],
            "O" => &[2],
            "S" | "Se" => &[2, 4, 6],
            "B" => &[3],
            "N" => &[3],
            "P" | "As" => &[3, 5],
            "C" | "Si" => &[4],
            _ => return Vec::new(),
        };
        let q = atom.formal_charge as i32;
        let shift = match atom.element.symbol() {
            "B" | "C" | "Si" => -q.abs(),
            _ => q,
        };
        base.iter()
            .map(|v| v + shift)
            .filter(|v| *v >= 0)
            .collect()
    }

    /// Implicit hydrogens completing the atom to its smallest admissible
    /// valence; 0 for exotic elements and over-bonded atoms.
    pub fn implicit_hydrogens(&self, i: usize) -> u32 {
        let explicit = self.explicit_valence(i).ceil() as i32;
        self.allowed_valences(i)
            .iter()
            .filter(|&&v| v >= explicit)
            .map(|&v| (v - explicit) as u32)
            .min()
            .unwrap_or(0)
    }

    /// Multiset of elements over heavy atoms (atomic number -> count).
    pub fn element_counts(&self) -> BTreeMap<Element, usize> {
        let mut counts = BTreeMap::new();
        for a in &self.atoms {
            *counts.entry(a.element).or_insert(0) += 1;
        }
        counts
    }

    /// Hill-order molecular formula including implicit hydrogens,
    /// e.g. "C2H6O" for the ethanol heavy-atom graph.
    pub fn molecular_formula(&self) -> String {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        let mut h_total: usize = 0;
        for (i, a) in self.atoms.iter().enumerate() {
            if a.element.is_hydrogen() {
                h_total += 1;
            } else {
                *counts.entry(a.element.symbol()).or_insert(0) += 1;
                h_total += self.implicit_hydrogens(i) as usize;
            }
        }
        let carbons = counts.remove("C");
        let mut out = String::new();
        let mut push = |sym: &str, n: usize| {
            if n == 0 {
                return;
            }
            out.push_str(sym);
            if n > 1 {
                out.push_str(&n.to_string());
            }
        };
        if let Some(nc) = carbons {
            push("C", nc);
            push("H", h_total);
            for (sym, n) in counts {
                push(sym, n);
            }
        } else {
            // no carbon: strictly alphabetical, H in place
            counts.insert("H", h_total);
            let h = counts.remove("H").unwrap_or(0);
            let mut all: Vec<(&str, usize)> = counts.into_iter().collect();
            if h > 0 {
                all.push(("H", h));
            }
            all.sort_by_key(|&(s, _)| s);
            for (sym, n) in all {
                push(sym, n);
            }
        }
        out
    }
}

/// Geometric cis/trans classification of a double bond `i=j`, observed from
/// reference substituents `a` (bonded to `i`) and `d` (bonded to `j`): cis
/// when |dihedral a-i-j-d| is below 90°, trans above. Angles within
/// `ambiguous_band_deg` of 90°, and degenerate (near-collinear) frames,
/// yield `None`.
pub fn classify_bond_stereo(
    pa: crate::vec3::Vec3,
    pi: crate::vec3::Vec3,
    pj: crate::vec3::Vec3,
    pd: crate::vec3::Vec3,
    ambiguous_band_deg: f64,
) -> Option<BondStereo> {
    use crate::vec3 as v3;
    let b1 = v3::sub(pi, pa);
    let b2 = v3::sub(pj, pi);
    let b3 = v3::sub(pd, pj);
    let n1 = v3::cross(b1, b2);
    let n2 = v3::cross(b2, b3);
    let rel = 1e-6;
    if v3::norm(n1) < rel * v3::norm(b1) * v3::norm(b2)
        || v3::norm(n2) < rel * v3::norm(b2) * v3::norm(b3)
    {
        return None;
    }
    let phi = v3::dihedral_deg(pa, pi, pj, pd).abs();
    if phi < 90.0 - ambiguous_band_deg {
        Some(BondStereo::Cis)
    } else if phi > 90.0 + ambiguous_band_deg {
        Some(BondStereo::Trans)
    } else {
        None
    }
}

/// Reference substituent for bond-stereo classification: the lowest-index
/// neighbour of `center` other than `exclude`, or `None` for a terminal end.
pub fn stereo_reference_neighbor(
    graph: &MolecularGraph,
    center: usize,
    exclude: usize,
) -> Option<usize> {
    graph
        .neighbors(center)
        .iter()
        .map(|&(n, _)| n)
        .find(|&n| n != exclude)
}


#[cfg(test)]
mod tests {
    use super::test_graphs::*;
    use super::*;

    #[test]
    fn rejects_self_loops_and_duplicates() {
        let atoms = vec![atom("C"), atom("C")];
        assert!(MolecularGraph::new_allow_fragments(
            atoms.clone(),
            vec![GraphBond::new(0, 0, BondOrder::Single)]
        )
        .is_err());
        assert!(MolecularGraph::new_allow_fragments(
            atoms.clone(),
            vec![
                GraphBond::new(0, 1, BondOrder::Single),
                GraphBond::new(1, 0, BondOrder::Double)
            ]
        )
        .is_err());
        assert!(MolecularGraph::new_allow_fragments(
            atoms,
            vec![GraphBond::new(0, 5, BondOrder::Single)]
        )
        .is_err());
    }

    #[test]
    fn connectivity() {
        let g = MolecularGraph::new_allow_fragments(
            vec![atom("C"), atom("C"), atom("O")],
            vec![GraphBond::new(0, 1, BondOrder::Single)],
        )
        .unwrap();
        assert!(!g.is_connected());
        assert_eq!(g.connected_components(), 2);
        assert!(MolecularGraph::new(
            vec![atom("C"), atom("C"), atom("O")],
            vec![GraphBond::new(0, 1, BondOrder::Single)],
        )
        .is_err());
    }

    #[test]
    fn ethanol_formula_with_implicit_h() {
        let g = ethanol();
        assert_eq!(g.implicit_hydrogens(0), 3);
        assert_eq!(g.implicit_hydrogens(1), 2);
        assert_eq!(g.implicit_hydrogens(2), 1);
        assert_eq!(g.molecular_formula(), "C2H6O");
    }

    #[test]
    fn benzene_formula() {
        assert_eq!(benzene().molecular_formula(), "C6H6");
    }

    #[test]
    fn charge_adjusts_valence() {
        // ammonium-like N+: allowed valence 4
        let mut a = atom("N");
        a.formal_charge = 1;
        let g = MolecularGraph::new(vec![a], vec![]).unwrap();
        assert_eq!(g.allowed_valences(0), vec![4]);
        assert_eq!(g.implicit_hydrogens(0), 4);
        // alkoxide O-: allowed valence 1
        let mut o = atom("O");
        o.formal_charge = -1;
        let g = MolecularGraph::new(vec![o], vec![]).unwrap();
        assert_eq!(g.allowed_valences(0), vec![1]);
    }

    #[test]
    fn bond_distances_bfs() {
        let g = naphthalene();
        let d = g.bond_distances(2);
        assert_eq!(d[2], 0);
        assert_eq!(d[0], 1);
        assert_eq!(d[6], 2);
    }
}
