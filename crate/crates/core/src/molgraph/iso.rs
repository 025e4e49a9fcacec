//! Automorphism and isomorphism search: color refinement (iterated
//! neighborhood hashing) to partition atoms, then backtracking over color
//! classes. Exact for drug-like molecules; the caller caps the group size
//! so pathological symmetry stays bounded.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::molgraph::MolecularGraph;

/// Result of automorphism enumeration. `truncated` is set when the group
/// was larger than the requested cap; the returned permutations are still
/// valid automorphisms (the identity is always present).
#[derive(Debug, Clone)]
pub struct Automorphisms {
    pub perms: Vec<Vec<usize>>,
    pub truncated: bool,
}

fn initial_color(g: &MolecularGraph, i: usize) -> u64 {
    let a = g.atom(i);
    ((a.element.atomic_number() as u64) << 16) ^ ((a.formal_charge as i64 as u64) & 0xffff)
}

/// One refinement pass over several graphs sharing a signature dictionary,
/// so colors stay comparable across graphs. Returns dense colors per graph.
fn refine_colors(graphs: &[&MolecularGraph]) -> Vec<Vec<u32>> {
    let mut colors: Vec<Vec<u64>> = graphs
        .iter()
        .map(|g| (0..g.atom_count()).map(|i| initial_color(g, i)).collect())
        .collect();
    let total: usize = graphs.iter().map(|g| g.atom_count()).sum();
    let mut dense: Vec<Vec<u32>> = Vec::new();
    let mut prev_classes = 0usize;
    for _round in 0..=total {
        // signature = (own color, sorted neighbor (bond code, color) list)
        let mut dict: HashMap<(u64, Vec<(u8, u64)>), u32> = HashMap::new();
        dense = Vec::with_capacity(graphs.len());
        for (gi, g) in graphs.iter().enumerate() {
            let mut out = Vec::with_capacity(g.atom_count());
            for i in 0..g.atom_count() {
                let mut nbr: Vec<(u8, u64)> = g
                    .neighbors(i)
                    .iter()
                    .map(|&(j, o)| (o.code(), colors[gi][j]))
                    .collect();
                nbr.sort_unstable();
                let key = (colors[gi][i], nbr);
                let next = dict.len() as u32;
                let c = *dict.entry(key).or_insert(next);
                out.push(c);
            }
            dense.push(out);
        }
        let classes = dict.len();
        if classes == prev_classes {
            break;
        }
        prev_classes = classes;
        colors = dense
            .iter()
            .map(|v| v.iter().map(|&c| c as u64).collect())
            .collect();
    }
    dense
}

struct Search<'a> {
    a: &'a MolecularGraph,
    b: &'a MolecularGraph,
    colors_a: Vec<u32>,
    colors_b: Vec<u32>,
    order: Vec<usize>,
    mapping: Vec<usize>,
    used: Vec<bool>,
    found: Vec<Vec<usize>>,
    limit: usize,
    truncated: bool,
}

impl<'a> Search<'a> {
    /// Edge-consistency of candidate pair (v in a) -> (w in b) against the
    /// atoms mapped so far. Both directions: every mapped neighbor of v must
    /// be a neighbor of w with the same order, and no extra edges may appear.
    fn feasible(&self, v: usize, w: usize) -> bool {
        if self.colors_a[v] != self.colors_b[w] {
            return false;
        }
        for &(u, order) in self.a.neighbors(v) {
            let mu = self.mapping[u];
            if mu != usize::MAX && self.b.bond_between(w, mu) != Some(order) {
                return false;
            }
        }
        for &(x, order) in self.b.neighbors(w) {
            if let Some(u) = self.mapping.iter().position(|&m| m == x) {
                if self.a.bond_between(v, u) != Some(order) {
                    return false;
                }
            }
        }
        true
    }

    fn run(&mut self, depth: usize) {
        if self.truncated {
            return;
        }
        if depth == self.order.len() {
            self.found.push(self.mapping.clone());
            if self.found.len() >= self.limit {
                self.truncated = true;
            }
            return;
        }
        let v = self.order[depth];
        for w in 0..self.b.atom_count() {
            if self.used[w] || !self.feasible(v, w) {
                continue;
            }
            self.mapping[v] = w;
            self.used[w] = true;
            self.run(depth + 1);
            self.mapping[v] = usize::MAX;
            self.used[w] = false;
            if self.truncated {
                return;
            }
        }
    }
}

fn search_mappings(
    a: &MolecularGraph,
    b: &MolecularGraph,
    limit: usize,
) -> (Vec<Vec<usize>>, bool) {
    if a.atom_count() != b.atom_count() || a.bond_count() != b.bond_count() {
        return (Vec::new(), false);
    }
    if a.atom_count() == 0 {
        return (vec![Vec::new()], false);
    }
    let dense = refine_colors(&[a, b]);
    let (colors_a, colors_b) = (dense[0].clone(), dense[1].clone());

    // color histograms must agree or no bijection exists
    let hist = |cs: &[u32]| {
        let mut h: HashMap<u32, usize> = HashMap::new();
        for &c in cs {
            *h.entry(c).or_insert(0) += 1;
        }
        h
    };
    if hist(&colors_a) != hist(&colors_b) {
        return (Vec::new(), false);
    }

    // visit rare colors first, tie-broken by index for determinism
    let mut class_size: HashMap<u32, usize> = HashMap::new();
    for &c in &colors_a {
        *class_size.entry(c).or_insert(0) += 1;
    }
    let mut order: Vec<usize> = (0..a.atom_count()).collect();
    order.sort_by_key(|&i| (class_size[&colors_a[i]], i));

    let n = a.atom_count();
    let mut search = Search {
        a,
        b,
        colors_a,
        colors_b,
        order,
        mapping: vec![usize::MAX; n],
        used: vec![false; n],
        found: Vec::new(),
        limit,
        truncated: false,
    };
    search.run(0);
    (search.found, search.truncated)
}

/// Enumerate atom permutations of `g` preserving element, formal charge,
/// and the bond multiset. The identity is always included. When the group
/// exceeds `max_count` the result is truncated and flagged.
pub fn automorphisms(g: &MolecularGraph, max_count: usize) -> Result<Automorphisms> {
    if max_count == 0 {
        return Err(Error::InvalidParameter("max_count must be positive".into()));
    }
    if !g.is_connected() {
        return Err(Error::InvalidParameter(
            "automorphism search requires a connected graph".into(),
        ));
    }
    let (mut perms, truncated) = search_mappings(g, g, max_count);
    // a truncated search may stop before reaching the identity; it is part
    // of the contract, so force it in
    let identity: Vec<usize> = (0..g.atom_count()).collect();
    if truncated && !perms.contains(&identity) {
        perms.pop();
        perms.push(identity);
    }
    // lexicographic order, independent of search order; identity sorts first
    perms.sort();
    debug_assert!(perms
        .first()
        .is_some_and(|p| p.iter().enumerate().all(|(i, &v)| i == v)));
    Ok(Automorphisms { perms, truncated })
}

/// Find one element/charge/bond-order-preserving bijection from atoms of
/// `a` onto atoms of `b`, or None when the graphs differ.
pub fn graphs_match(a: &MolecularGraph, b: &MolecularGraph) -> Option<Vec<usize>> {
    let (mappings, _) = search_mappings(a, b, 1);
    mappings.into_iter().next()
}

/// Brute-force check that a permutation preserves colored adjacency;
/// shared with tests and the RMSD symmetry-correction oracle.
pub fn is_automorphism(g: &MolecularGraph, perm: &[usize]) -> bool {
    if perm.len() != g.atom_count() {
        return false;
    }
    for (i, &pi) in perm.iter().enumerate() {
        let (ai, api) = (g.atom(i), g.atom(pi));
        if ai.element != api.element || ai.formal_charge != api.formal_charge {
            return false;
        }
    }
    for b in g.bonds() {
        if g.bond_between(perm[b.i], perm[b.j]) != Some(b.order) {
            return false;
        }
    }
    true
}
