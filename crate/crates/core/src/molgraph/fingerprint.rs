//! ECFP-style circular fingerprints hashed with FNV-1a over canonical
//! invariant tuples, so bit patterns are identical across runs, platforms,
//! and atom orderings. Radius 2 over 2048 bits approximates ECFP4.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::molgraph::MolecularGraph;

pub const DEFAULT_FP_RADIUS: u32 = 2;
pub const DEFAULT_FP_BITS: usize = 2048;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Fixed-width bit vector fingerprint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    words: Vec<u64>,
    nbits: usize,
    radius: u32,
}

impl Fingerprint {
    fn new(nbits: usize, radius: u32) -> Self {
        Fingerprint {
            words: vec![0; nbits.div_ceil(64)],
            nbits,
            radius,
        }
    }

    fn set(&mut self, idx: usize) {
        self.words[idx / 64] |= 1 << (idx % 64);
    }

    pub fn nbits(&self) -> usize {
        self.nbits
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn popcount(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn bit(&self, idx: usize) -> bool {
        self.words[idx / 64] >> (idx % 64) & 1 == 1
    }
}

/// Circular fingerprint: layer-0 invariants hash (element, charge, degree);
/// each further layer folds in the sorted (bond order, neighbor invariant)
/// list. Every (atom, layer) invariant sets one bit. `nbits` must be a
/// power of two.
pub fn circular_fingerprint(g: &MolecularGraph, radius: u32, nbits: usize) -> Fingerprint {
    assert!(nbits.is_power_of_two(), "nbits must be a power of two");
    let mask = (nbits - 1) as u64;
    let mut fp = Fingerprint::new(nbits, radius);

    let mut inv: Vec<u64> = (0..g.atom_count())
        .map(|i| {
            let a = g.atom(i);
            let mut bytes = Vec::with_capacity(8);
            bytes.extend((a.element.atomic_number() as u16).to_le_bytes());
            bytes.extend((a.formal_charge as i16).to_le_bytes());
            bytes.extend((g.degree(i) as u16).to_le_bytes());
            fnv1a(&bytes)
        })
        .collect();

    for &h in &inv {
        fp.set((h & mask) as usize);
    }
    for _layer in 1..=radius {
        let next: Vec<u64> = (0..g.atom_count())
            .map(|i| {
                let mut env: Vec<(u8, u64)> = g
                    .neighbors(i)
                    .iter()
                    .map(|&(j, o)| (o.code(), inv[j]))
                    .collect();
                env.sort_unstable();
                let mut bytes = Vec::with_capacity(8 + env.len() * 9);
                bytes.extend(inv[i].to_le_bytes());
                for (code, h) in env {
                    bytes.push(code);
                    bytes.extend(h.to_le_bytes());
                }
                fnv1a(&bytes)
            })
            .collect();
        for &h in &next {
            fp.set((h & mask) as usize);
        }
        inv = next;
    }
    fp
}

/// Tanimoto similarity |a AND b| / |a OR b|. Two empty vectors compare
/// as identical (1.0). Widths must agree.
pub fn tanimoto(a: &Fingerprint, b: &Fingerprint) -> Result<f64> {
    if a.nbits != b.nbits {
        return Err(Error::FingerprintWidth(a.nbits, b.nbits));
    }
    let mut inter = 0u32;
    let mut union = 0u32;
    for (wa, wb) in a.words.iter().zip(b.words.iter()) {
        inter += (wa & wb).count_ones();
        union += (wa | wb).count_ones();
    }
    if union == 0 {
        return Ok(1.0);
    }
    Ok(inter as f64 / union as f64)
}
