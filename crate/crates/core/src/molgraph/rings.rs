//! Ring perception: a minimum cycle basis via Horton's construction.
//! Candidate cycles are built from BFS shortest paths, sorted by length,
//! and kept when linearly independent over GF(2) on edge incidence vectors.

use std::collections::VecDeque;

use crate::molgraph::MolecularGraph;

fn bfs_tree(g: &MolecularGraph, root: usize) -> (Vec<usize>, Vec<usize>) {
    let n = g.atom_count();
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    dist[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &(w, _) in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    (dist, parent)
}

fn path_to_root(parent: &[usize], mut v: usize) -> Vec<usize> {
    let mut path = vec![v];
    while parent[v] != usize::MAX {
        v = parent[v];
        path.push(v);
    }
    path
}

/// Edge incidence bitset for GF(2) elimination.
fn edge_vector(g: &MolecularGraph, cycle: &[usize], edge_index: &impl Fn(usize, usize) -> usize) -> Vec<u64> {
    let words = (g.bond_count() + 63) / 64;
    let mut v = vec![0u64; words];
    for k in 0..cycle.len() {
        let e = edge_index(cycle[k], cycle[(k + 1) % cycle.len()]);
        v[e / 64] |= 1 << (e % 64);
    }
    v
}

/// Perceive rings as a minimum cycle basis. Each cycle is an ordered atom
/// walk; an acyclic graph yields an empty list. Cycles are reported sorted
/// by (length, atom sequence) for determinism.
pub fn perceive_rings(g: &MolecularGraph) -> Vec<Vec<usize>> {
    let n_cycles = g.bond_count() + g.connected_components();
    let n_cycles = n_cycles.saturating_sub(g.atom_count());
    if n_cycles == 0 {
        return Vec::new();
    }

    let mut edge_ids = std::collections::HashMap::new();
    for (e, b) in g.bonds().iter().enumerate() {
        edge_ids.insert((b.i.min(b.j), b.i.max(b.j)), e);
    }
    let edge_index = |a: usize, b: usize| edge_ids[&(a.min(b), a.max(b))];

    // Horton candidates: for every root v and every edge (x, y), the cycle
    // formed by tree paths v..x, v..y plus the edge, kept when the paths
    // only share v.
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    for root in 0..g.atom_count() {
        let (dist, parent) = bfs_tree(g, root);
        for b in g.bonds() {
            let (x, y) = (b.i, b.j);
            if dist[x] == usize::MAX || dist[y] == usize::MAX {
                continue;
            }
            if parent[x] == y || parent[y] == x {
                continue; // tree edge, no cycle
            }
            let px = path_to_root(&parent, x);
            let py = path_to_root(&parent, y);
            let shared: Vec<&usize> = px.iter().filter(|v| py.contains(v)).collect();
            if shared.len() != 1 || *shared[0] != root {
                continue;
            }
            // walk root -> x, edge to y, y -> root (excluding final root)
            let mut cycle: Vec<usize> = px.into_iter().rev().collect();
            let mut back = py;
            back.pop(); // drop root
            cycle.extend(back);
            candidates.push(cycle);
        }
    }

    // canonicalize to dedup: rotation/reflection-invariant key
    let canon = |c: &[usize]| {
        let mut best: Option<Vec<usize>> = None;
        let m = c.len();
        for rev in [false, true] {
            let seq: Vec<usize> = if rev { c.iter().rev().copied().collect() } else { c.to_vec() };
            for s in 0..m {
                let rot: Vec<usize> = (0..m).map(|k| seq[(s + k) % m]).collect();
                if best.as_ref().is_none_or(|b| rot < *b) {
                    best = Some(rot);
                }
            }
        }
        best.unwrap()
    };
    let mut seen = std::collections::HashSet::new();
    candidates.retain(|c| seen.insert(canon(c)));
    candidates.sort_by_key(|c| (c.len(), canon(c)));

    // greedy GF(2) independence, basis keyed by pivot bit
    let highest_bit = |v: &[u64]| -> Option<usize> {
        v.iter()
            .rposition(|&w| w != 0)
            .map(|i| i * 64 + 63 - v[i].leading_zeros() as usize)
    };
    let mut basis: std::collections::HashMap<usize, Vec<u64>> = std::collections::HashMap::new();
    let mut rings: Vec<Vec<usize>> = Vec::new();
    for cand in candidates {
        if rings.len() == n_cycles {
            break;
        }
        let mut v = edge_vector(g, &cand, &edge_index);
        while let Some(p) = highest_bit(&v) {
            match basis.get(&p) {
                Some(b) => {
                    for (vw, bw) in v.iter_mut().zip(b.iter()) {
                        *vw ^= bw;
                    }
                }
                None => {
                    basis.insert(p, v);
                    rings.push(cand);
                    break;
                }
            }
        }
    }
    rings
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::graph::test_graphs::*;
    use crate::molgraph::{BondOrder, GraphBond, MolecularGraph};

    #[test]
    fn benzene_one_ring() {
        let rings = perceive_rings(&benzene());
        assert_eq!(rings.len(), 1);
        assert_eq!(rings[0].len(), 6);
    }

    #[test]
    fn naphthalene_two_six_rings() {
        // oracle: cycle space dimension is 11 - 10 + 1 = 2, and brute-force
        // enumeration of simple cycles finds exactly three (6, 6, 10); the
        // minimum basis must be the two 6-cycles.
        let rings = perceive_rings(&naphthalene());
        assert_eq!(rings.len(), 2);
        assert!(rings.iter().all(|r| r.len() == 6));
        assert_ne!(rings[0], rings[1]);
    }

    #[test]
    fn acyclic_chain_no_rings() {
        assert!(perceive_rings(&ethanol()).is_empty());
    }

    #[test]
    fn ring_walks_are_closed() {
        for g in [benzene(), naphthalene()] {
            for ring in perceive_rings(&g) {
                for k in 0..ring.len() {
                    let (a, b) = (ring[k], ring[(k + 1) % ring.len()]);
                    assert!(g.bond_between(a, b).is_some(), "walk edge {a}-{b} missing");
                }
            }
        }
    }

    #[test]
    fn spiro_two_rings() {
        // two triangles sharing atom 0
        let atoms = vec![atom("C"); 5];
        let bonds = vec![
            GraphBond::new(0, 1, BondOrder::Single),
            GraphBond::new(1, 2, BondOrder::Single),
            GraphBond::new(2, 0, BondOrder::Single),
            GraphBond::new(0, 3, BondOrder::Single),
            GraphBond::new(3, 4, BondOrder::Single),
            GraphBond::new(4, 0, BondOrder::Single),
        ];
        let g = MolecularGraph::new(atoms, bonds).unwrap();
        let rings = perceive_rings(&g);
        assert_eq!(rings.len(), 2);
        assert!(rings.iter().all(|r| r.len() == 3));
    }
}
