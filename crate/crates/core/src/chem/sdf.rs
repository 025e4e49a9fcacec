//! SDF / MOL V2000 ligand parser.
//!
//! Produces a heavy-atom `MolecularGraph` plus one coordinate per atom.
//! Hydrogens (and deuterium) are dropped and indices remapped; implicit
//! hydrogen counts are recovered from the valence model, so formulas are
//! preserved. Formal charges come from the atom-block charge code unless any
//! `M  CHG` property line is present, which supersedes all of them.
//!
//! Tetrahedral parity is perceived two ways:
//! - wedge bonds (stereo flag 1 = up, 6 = down) mark their begin atom; for
//!   flat files the wedge end is lifted out of plane before measuring,
//! - in 3D files, centres with four single-bond substituents whose branches
//!   are pairwise inequivalent under the graph's automorphisms get a
//!   geometry-derived parity.
//!
//! The parity convention is shared with the chirality check: neighbours
//! sorted by atom index, the centre standing in as fourth point when only
//! three neighbours are heavy (see `vec3::parity_sign`). Double-bond
//! cis/trans flags are read off coordinates the same way for flat and 3D
//! inputs, since a flat depiction encodes them in-plane.

use std::collections::HashMap;

use crate::elements::Element;
use crate::error::{Error, Result};
use crate::molgraph::{
    automorphisms, classify_bond_stereo, stereo_reference_neighbor, BondOrder, BondStereo,
    GraphAtom, GraphBond, MolecularGraph,
};
use crate::vec3::{parity_sign, Vec3};

/// Automorphism budget for stereocentre detection; if the search truncates,
/// geometry-derived parity is skipped rather than risk flagging equivalent
/// substituents.
const STEREO_AUTOMORPHISM_LIMIT: usize = 10_000;

struct SdfAtom {
    element: Element,
    coords: Vec3,
    charge: i8,
}

struct SdfBond {
    a: usize, // 0-based, original numbering
    b: usize,
    order: BondOrder,
    wedge: Option<i8>, // +1 up, -1 down, pointing from `a`
}

/// Parse the first record of an SDF/MOL file.
pub fn parse_sdf(text: &str) -> Result<(MolecularGraph, Vec<Vec3>)> {
    let lines: Vec<&str> = text.lines().collect();
    if lines.len() < 4 {
        return Err(Error::parse(lines.len(), "truncated SDF: missing counts line"));
    }
    let counts_line_no = 4;
    let counts = lines[3];
    if counts.contains("V3000") {
        return Err(Error::parse(counts_line_no, "V3000 records are not supported"));
    }
    let natoms: usize = fixed_usize(counts, 0, 3, counts_line_no, "atom count")?;
    let nbonds: usize = fixed_usize(counts, 3, 6, counts_line_no, "bond count")?;
    if lines.len() < 4 + natoms + nbonds {
        return Err(Error::parse(
            lines.len(),
            format!("truncated SDF: expected {natoms} atom and {nbonds} bond lines"),
        ));
    }

    let mut atoms = Vec::with_capacity(natoms);
    for i in 0..natoms {
        let line_no = 5 + i;
        let line = lines[4 + i];
        if line.len() < 34 {
            return Err(Error::parse(line_no, "atom line shorter than 34 columns"));
        }
        let x = fixed_f64(line, 0, 10, line_no, "x")?;
        let y = fixed_f64(line, 10, 20, line_no, "y")?;
        let z = fixed_f64(line, 20, 30, line_no, "z")?;
        let sym = line[31..34.min(line.len())].trim();
        let element = Element::from_symbol(if sym.eq_ignore_ascii_case("D") { "H" } else { sym })
            .map_err(|_| Error::parse(line_no, format!("unknown element symbol '{sym}'")))?;
        let charge_code: u8 = if line.len() >= 39 {
            fixed_usize(line, 36, 39, line_no, "charge code")? as u8
        } else {
            0
        };
        let charge = decode_charge(charge_code, line_no)?;
        atoms.push(SdfAtom {
            element,
            coords: [x, y, z],
            charge,
        });
    }

    let mut bonds = Vec::with_capacity(nbonds);
    for i in 0..nbonds {
        let line_no = 5 + natoms + i;
        let line = lines[4 + natoms + i];
        let a = fixed_usize(line, 0, 3, line_no, "bond atom 1")?;
        let b = fixed_usize(line, 3, 6, line_no, "bond atom 2")?;
        let t = fixed_usize(line, 6, 9, line_no, "bond type")?;
        let stereo = if line.len() > 9 {
            fixed_usize(line, 9, 12, line_no, "bond stereo")?
        } else {
            0
        };
        if a == 0 || b == 0 || a > natoms || b > natoms {
            return Err(Error::parse(
                line_no,
                format!("bond references atom {} outside 1..={natoms}", a.max(b)),
            ));
        }
        let order = match t {
            1 => BondOrder::Single,
            2 => BondOrder::Double,
            3 => BondOrder::Triple,
            4 => BondOrder::Aromatic,
            other => {
                return Err(Error::parse(line_no, format!("unsupported bond type {other}")))
            }
        };
        let wedge = match stereo {
            1 => Some(1),
            6 => Some(-1),
            _ => None,
        };
        bonds.push(SdfBond {
            a: a - 1,
            b: b - 1,
            order,
            wedge,
        });
    }

    // Property block: `M  CHG` supersedes all atom-block charges.
    let mut chg_pairs: Vec<(usize, i8)> = Vec::new();
    let mut saw_chg = false;
    for (i, line) in lines.iter().enumerate().skip(4 + natoms + nbonds) {
        let line_no = i + 1;
        if line.starts_with("M  END") || line.starts_with("$$$$") {
            break;
        }
        if let Some(rest) = line.strip_prefix("M  CHG") {
            saw_chg = true;
            let nums: Vec<i64> = rest
                .split_whitespace()
                .map(|t| {
                    t.parse::<i64>()
                        .map_err(|_| Error::parse(line_no, format!("bad M CHG token '{t}'")))
                })
                .collect::<Result<_>>()?;
            if nums.is_empty() || nums.len() != 1 + 2 * nums[0] as usize {
                return Err(Error::parse(line_no, "malformed M CHG line"));
            }
            for pair in nums[1..].chunks(2) {
                let idx = pair[0] as usize;
                if idx == 0 || idx > natoms {
                    return Err(Error::parse(
                        line_no,
                        format!("M CHG references atom {idx} outside 1..={natoms}"),
                    ));
                }
                chg_pairs.push((idx - 1, pair[1] as i8));
            }
        }
    }
    if saw_chg {
        for a in &mut atoms {
            a.charge = 0;
        }
        for (idx, q) in chg_pairs {
            atoms[idx].charge = q;
        }
    }

    assemble(atoms, bonds)
}

fn assemble(atoms: Vec<SdfAtom>, bonds: Vec<SdfBond>) -> Result<(MolecularGraph, Vec<Vec3>)> {
    // Map original indices to heavy indices.
    let mut heavy_of: Vec<Option<usize>> = Vec::with_capacity(atoms.len());
    let mut graph_atoms = Vec::new();
    let mut coords = Vec::new();
    for a in &atoms {
        if a.element.is_hydrogen() {
            heavy_of.push(None);
        } else {
            heavy_of.push(Some(graph_atoms.len()));
            graph_atoms.push(GraphAtom {
                element: a.element,
                formal_charge: a.charge,
                tetrahedral_parity: None,
            });
            coords.push(a.coords);
        }
    }
    if graph_atoms.is_empty() {
        return Err(Error::EmptyStructure);
    }

    let mut graph_bonds = Vec::new();
    for b in &bonds {
        if let (Some(i), Some(j)) = (heavy_of[b.a], heavy_of[b.b]) {
            graph_bonds.push(GraphBond {
                i,
                j,
                order: b.order,
                stereo: None,
            });
        }
    }

    let mut graph = MolecularGraph::new_allow_fragments(graph_atoms, graph_bonds)?;
    let is_3d = detect_3d(&atoms);
    let parities = perceive_parities(&graph, &atoms, &bonds, &heavy_of, is_3d);
    graph.set_parities(&parities);
    let stereos = perceive_bond_stereo(&graph, &coords);
    graph.set_bond_stereos(&stereos);

    Ok((graph, coords))
}

/// Cis/trans flags for double bonds, read off the coordinates (works for
/// both flat depictions and 3D conformers). Near-perpendicular geometries
/// are left unassigned rather than guessed.
fn perceive_bond_stereo(
    graph: &MolecularGraph,
    coords: &[Vec3],
) -> HashMap<usize, BondStereo> {
    const AMBIGUOUS_BAND_DEG: f64 = 5.0;
    let mut out = HashMap::new();
    for (bi, bond) in graph.bonds().iter().enumerate() {
        if bond.order != BondOrder::Double {
            continue;
        }
        let (Some(a), Some(d)) = (
            stereo_reference_neighbor(graph, bond.i, bond.j),
            stereo_reference_neighbor(graph, bond.j, bond.i),
        ) else {
            continue;
        };
        if let Some(s) = classify_bond_stereo(
            coords[a],
            coords[bond.i],
            coords[bond.j],
            coords[d],
            AMBIGUOUS_BAND_DEG,
        ) {
            out.insert(bi, s);
        }
    }
    out
}

fn detect_3d(atoms: &[SdfAtom]) -> bool {
    let z0 = atoms.first().map(|a| a.coords[2]).unwrap_or(0.0);
    atoms.iter().any(|a| (a.coords[2] - z0).abs() > 1e-3)
}

/// Parity per heavy atom; wedge flags take precedence, then 3D geometry for
/// automorphism-distinct tetra-coordinated centres.
fn perceive_parities(
    graph: &MolecularGraph,
    atoms: &[SdfAtom],
    bonds: &[SdfBond],
    heavy_of: &[Option<usize>],
    is_3d: bool,
) -> HashMap<usize, i8> {
    let mut out: HashMap<usize, i8> = HashMap::new();

    // Wedge-derived. For flat files, lift the wedge end out of plane; when the
    // wedge points at a dropped hydrogen, push the centre the opposite way.
    let mut lifted: Vec<Vec3> = atoms.iter().map(|a| a.coords).collect();
    if !is_3d {
        for b in bonds {
            if let Some(dir) = b.wedge {
                let dz = dir as f64;
                match heavy_of[b.b] {
                    Some(_) => lifted[b.b][2] += dz,
                    None => lifted[b.a][2] -= dz,
                }
            }
        }
    }
    for b in bonds {
        if b.wedge.is_none() {
            continue;
        }
        let Some(center) = heavy_of[b.a] else { continue };
        if out.contains_key(&center) {
            continue;
        }
        if let Some(p) = parity_from_coords(graph, center, |h| {
            lifted[original_index(heavy_of, h)]
        }) {
            out.insert(center, p);
        }
    }

    // Geometry-derived for 3D files: only centres with four single-bond
    // substituents (counting implicit hydrogens) whose heavy branches cannot
    // be swapped by any graph automorphism.
    if is_3d {
        if let Ok(auto) = automorphisms(graph, STEREO_AUTOMORPHISM_LIMIT) {
            if !auto.truncated {
                for center in 0..graph.atom_count() {
                    if out.contains_key(&center) {
                        continue;
                    }
                    if !is_tetra_candidate(graph, center) {
                        continue;
                    }
                    let neighbors: Vec<usize> =
                        graph.neighbors(center).iter().map(|&(n, _)| n).collect();
                    let distinct = auto.perms.iter().all(|p| {
                        p[center] != center || neighbors.iter().all(|&n| p[n] == n)
                    });
                    if !distinct {
                        continue;
                    }
                    if let Some(p) = parity_from_coords(graph, center, |h| {
                        atoms[original_index(heavy_of, h)].coords
                    }) {
                        out.insert(center, p);
                    }
                }
            }
        }
    }

    out
}

/// Recover the original atom index of heavy index `h`.
fn original_index(heavy_of: &[Option<usize>], h: usize) -> usize {
    heavy_of
        .iter()
        .position(|&m| m == Some(h))
        .expect("heavy index maps back to an original atom")
}

fn is_tetra_candidate(graph: &MolecularGraph, center: usize) -> bool {
    let neighbors = graph.neighbors(center);
    if neighbors.len() < 3 || neighbors.len() > 4 {
        return false;
    }
    if neighbors.iter().any(|&(_, o)| o != BondOrder::Single) {
        return false;
    }
    neighbors.len() + graph.implicit_hydrogens(center) as usize == 4
}

/// Measure parity at `center` from coordinates supplied per heavy index.
fn parity_from_coords(
    graph: &MolecularGraph,
    center: usize,
    coord_of: impl Fn(usize) -> Vec3,
) -> Option<i8> {
    let mut neighbors: Vec<usize> = graph.neighbors(center).iter().map(|&(n, _)| n).collect();
    neighbors.sort_unstable();
    let points: [Vec3; 4] = match neighbors.len() {
        3 => [
            coord_of(neighbors[0]),
            coord_of(neighbors[1]),
            coord_of(neighbors[2]),
            coord_of(center),
        ],
        4 => [
            coord_of(neighbors[0]),
            coord_of(neighbors[1]),
            coord_of(neighbors[2]),
            coord_of(neighbors[3]),
        ],
        _ => return None,
    };
    parity_sign(&points)
}

fn decode_charge(code: u8, line_no: usize) -> Result<i8> {
    // MDL charge codes: 0 none, 1..3 => +3..+1, 4 doublet radical, 5..7 => -1..-3.
    Ok(match code {
        0 | 4 => 0,
        1 => 3,
        2 => 2,
        3 => 1,
        5 => -1,
        6 => -2,
        7 => -3,
        other => {
            return Err(Error::parse(line_no, format!("invalid charge code {other}")));
        }
    })
}

fn fixed_usize(line: &str, start: usize, end: usize, line_no: usize, what: &str) -> Result<usize> {
    let s = line.get(start..end.min(line.len())).unwrap_or("").trim();
    if s.is_empty() {
        return Ok(0);
    }
    s.parse()
        .map_err(|_| Error::parse(line_no, format!("invalid {what} '{s}'")))
}

fn fixed_f64(line: &str, start: usize, end: usize, line_no: usize, what: &str) -> Result<f64> {
    let s = line.get(start..end.min(line.len())).unwrap_or("").trim();
    s.parse()
        .map_err(|_| Error::parse(line_no, format!("invalid {what} '{s}'")))
}
