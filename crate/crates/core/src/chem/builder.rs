//! Shared assembly logic for PDB and mmCIF parsing: alternate-location
//! resolution, hydrogen removal, and routing of residues into protein chains
//! versus cofactor groups.

use std::collections::HashMap;

use crate::elements::Element;
use crate::error::{Error, Result};
use crate::structure::{
    AtomSite, CofactorAtom, CofactorGroups, ComplexStructure, ProteinChain, ResidueSite,
};
use crate::vec3::Vec3;

/// Residue names treated as water regardless of record type.
const WATER_RES_NAMES: [&str; 3] = ["HOH", "WAT", "DOD"];

/// One atom record, format-agnostic.
#[derive(Debug, Clone)]
pub(crate) struct RawAtom {
    pub name: String,
    pub alt_loc: Option<char>,
    pub res_name: String,
    pub chain_id: String,
    pub seq_index: i32,
    pub insertion_code: Option<String>,
    pub coords: Vec3,
    pub occupancy: f64,
    pub element: Element,
    pub is_hetero: bool,
}

/// Assemble a complex from raw atom records, in file order.
///
/// - Alternate locations: for each (residue, atom name) the location with the
///   highest occupancy wins; ties break toward the smallest alt-loc
///   identifier, with "no identifier" ordering before any identifier.
/// - Hydrogen (and deuterium) atoms are dropped.
/// - Residues named HOH/WAT/DOD go to the water group. Other hetero residues
///   go to the organic cofactor group when they contain carbon, otherwise to
///   the inorganic group.
pub(crate) fn build_complex(raw: Vec<RawAtom>) -> Result<ComplexStructure> {
    // Group into residues preserving first-appearance order.
    let mut residue_order: Vec<(String, i32, Option<String>, String, bool)> = Vec::new();
    let mut residue_atoms: HashMap<(String, i32, Option<String>), Vec<RawAtom>> = HashMap::new();
    for atom in raw {
        if atom.element.is_hydrogen() {
            continue;
        }
        let key = (
            atom.chain_id.clone(),
            atom.seq_index,
            atom.insertion_code.clone(),
        );
        if !residue_atoms.contains_key(&key) {
            residue_order.push((
                key.0.clone(),
                key.1,
                key.2.clone(),
                atom.res_name.clone(),
                atom.is_hetero,
            ));
        }
        residue_atoms.entry(key).or_default().push(atom);
    }

    let mut chains: Vec<ProteinChain> = Vec::new();
    let mut cofactors = CofactorGroups::default();

    for (chain_id, seq_index, icode, res_name, is_hetero) in residue_order {
        let key = (chain_id.clone(), seq_index, icode.clone());
        let atoms = residue_atoms.remove(&key).expect("residue recorded in order list");
        let resolved = resolve_alt_locs(atoms);

        let is_water = WATER_RES_NAMES.contains(&res_name.as_str());
        if is_water || is_hetero {
            let group: &mut Vec<CofactorAtom> = if is_water {
                &mut cofactors.waters
            } else if resolved.iter().any(|a| a.element.is_carbon()) {
                &mut cofactors.organic
            } else {
                &mut cofactors.inorganic
            };
            for a in resolved {
                group.push(CofactorAtom {
                    res_name: res_name.clone(),
                    name: a.name,
                    element: a.element,
                    coords: a.coords,
                });
            }
        } else {
            let residue = ResidueSite {
                chain_id: chain_id.clone(),
                seq_index,
                insertion_code: icode,
                res_name,
                atoms: resolved
                    .into_iter()
                    .map(|a| AtomSite {
                        name: a.name,
                        element: a.element,
                        coords: a.coords,
                        occupancy: a.occupancy,
                        is_hetero: false,
                    })
                    .collect(),
            };
            match chains.iter_mut().find(|c| c.id == chain_id) {
                Some(chain) => chain.residues.push(residue),
                None => chains.push(ProteinChain {
                    id: chain_id,
                    residues: vec![residue],
                }),
            }
        }
    }

    if chains.iter().all(|c| c.residues.is_empty()) || chains.is_empty() {
        return Err(Error::EmptyStructure);
    }

    let complex = ComplexStructure {
        chains,
        ligands: Vec::new(),
        cofactors,
    };
    complex.validate()?;
    Ok(complex)
}

/// Keep one location per atom name: highest occupancy, ties broken by the
/// smaller alternate-location identifier (absent identifier first).
fn resolve_alt_locs(atoms: Vec<RawAtom>) -> Vec<RawAtom> {
    let mut best: Vec<RawAtom> = Vec::new();
    let mut index_of: HashMap<String, usize> = HashMap::new();
    for atom in atoms {
        match index_of.get(&atom.name) {
            None => {
                index_of.insert(atom.name.clone(), best.len());
                best.push(atom);
            }
            Some(&i) => {
                let cur = &best[i];
                let replace = atom.occupancy > cur.occupancy
                    || (atom.occupancy == cur.occupancy
                        && alt_rank(atom.alt_loc) < alt_rank(cur.alt_loc));
                if replace {
                    best[i] = atom;
                }
            }
        }
    }
    best
}

fn alt_rank(alt: Option<char>) -> (u8, char) {
    match alt {
        None => (0, '\0'),
        Some(c) => (1, c),
    }
}

/// Shared element derivation: explicit symbol field if present, else from the
/// atom name (first alphabetic characters). Deuterium maps to hydrogen so the
/// hydrogen filter catches it.
pub(crate) fn resolve_element(
    line_no: usize,
    explicit: Option<&str>,
    atom_name: &str,
) -> Result<Element> {
    let sym = match explicit {
        Some(s) if !s.trim().is_empty() => s.trim().to_string(),
        _ => {
            let letters: String = atom_name.chars().filter(|c| c.is_ascii_alphabetic()).collect();
            if letters.is_empty() {
                return Err(Error::parse(
                    line_no,
                    format!("cannot derive element from atom name '{atom_name}'"),
                ));
            }
            // Without an explicit element field, a one-letter reading of the
            // name is the only safe choice ("CA" is an alpha carbon, not
            // calcium). Two-letter element symbols must use the element field.
            letters[..1].to_string()
        }
    };
    let normalized = if sym.eq_ignore_ascii_case("D") { "H" } else { sym.as_str() };
    Element::from_symbol(normalized)
        .map_err(|_| Error::parse(line_no, format!("unknown element symbol '{sym}'")))
}
