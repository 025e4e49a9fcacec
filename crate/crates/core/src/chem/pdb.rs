//! Fixed-column PDB parser covering the subset needed for evaluation:
//! ATOM/HETATM coordinate records of the first model, with alternate-location
//! resolution and element derivation.

use crate::error::{Error, Result};
use crate::structure::ComplexStructure;

use super::builder::{build_complex, resolve_element, RawAtom};

/// Parse PDB text into a complex. Only the first model is read; hydrogens are
/// dropped; waters and hetero residues are routed to cofactor groups.
pub fn parse_pdb(text: &str) -> Result<ComplexStructure> {
    let mut raw = Vec::new();
    let mut model_seen = 0u32;

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let record = field(line, 0, 6);
        match record.as_str() {
            "MODEL" => {
                model_seen += 1;
                if model_seen > 1 {
                    break;
                }
            }
            "ENDMDL" => break,
            "ATOM" | "HETATM" => raw.push(parse_atom_line(line, line_no)?),
            _ => {}
        }
    }

    build_complex(raw)
}

fn parse_atom_line(line: &str, line_no: usize) -> Result<RawAtom> {
    if line.len() < 54 {
        return Err(Error::parse(
            line_no,
            "coordinate record shorter than 54 columns",
        ));
    }
    let record = field(line, 0, 6);
    let name = field(line, 12, 16);
    if name.is_empty() {
        return Err(Error::parse(line_no, "blank atom name"));
    }
    let alt_loc = match line.as_bytes().get(16).copied().unwrap_or(b' ') as char {
        ' ' => None,
        c => Some(c),
    };
    let res_name = field(line, 17, 20);
    let chain_id = field(line, 21, 22);
    let seq_index: i32 = field(line, 22, 26)
        .parse()
        .map_err(|_| Error::parse(line_no, "invalid residue sequence number"))?;
    let insertion_code = match line.as_bytes().get(26).copied().unwrap_or(b' ') as char {
        ' ' => None,
        c => Some(c.to_string()),
    };
    let x = parse_f64(&field(line, 30, 38), line_no, "x")?;
    let y = parse_f64(&field(line, 38, 46), line_no, "y")?;
    let z = parse_f64(&field(line, 46, 54), line_no, "z")?;
    let occupancy = {
        let s = field(line, 54, 60);
        if s.is_empty() {
            1.0
        } else {
            parse_f64(&s, line_no, "occupancy")?
        }
    };
    let element_field = field(line, 76, 78);
    let element = resolve_element(
        line_no,
        if element_field.is_empty() { None } else { Some(&element_field) },
        &name,
    )?;

    Ok(RawAtom {
        name,
        alt_loc,
        res_name,
        chain_id,
        seq_index,
        insertion_code,
        coords: [x, y, z],
        occupancy,
        element,
        is_hetero: record == "HETATM",
    })
}

/// Columns `[start, end)` of a fixed-width line, trimmed; out-of-range is empty.
fn field(line: &str, start: usize, end: usize) -> String {
    line.get(start..end.min(line.len()))
        .unwrap_or("")
        .trim()
        .to_string()
}

fn parse_f64(s: &str, line_no: usize, what: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::parse(line_no, format!("invalid {what} value '{s}'")))
}
