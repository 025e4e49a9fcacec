//! Minimal mmCIF reader for the `atom_site` loop.
//!
//! The tokenizer understands CIF quoting (single/double quotes, `;` text
//! blocks, `#` comments). Only `_atom_site` loops are consumed; every other
//! category is skipped. `auth_*` identifiers are preferred over `label_*`
//! ones so residue numbering matches what PDB-format files of the same entry
//! would produce.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::structure::ComplexStructure;

use super::builder::{build_complex, resolve_element, RawAtom};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Loop,
    DataBlock,
    Tag(String),
    Value(String),
}

pub fn parse_mmcif(text: &str) -> Result<ComplexStructure> {
    let tokens = tokenize(text)?;
    let raw = extract_atom_site(&tokens)?;
    build_complex(raw)
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let mut out = Vec::new();
    let mut lines = text.lines().enumerate().peekable();

    while let Some((idx, line)) = lines.next() {
        let line_no = idx + 1;
        if let Some(stripped) = line.strip_prefix(';') {
            // Multiline text value: consume until a line that is exactly ";".
            let mut value = String::from(stripped);
            let mut closed = false;
            for (_, l) in lines.by_ref() {
                if l.trim_end() == ";" {
                    closed = true;
                    break;
                }
                value.push('\n');
                value.push_str(l);
            }
            if !closed {
                return Err(Error::parse(line_no, "unterminated ';' text block"));
            }
            out.push((line_no, Token::Value(value)));
            continue;
        }

        let mut chars = line.char_indices().peekable();
        while let Some(&(start, c)) = chars.peek() {
            if c.is_whitespace() {
                chars.next();
                continue;
            }
            if c == '#' {
                break; // comment to end of line
            }
            if c == '\'' || c == '"' {
                chars.next();
                let quote = c;
                let mut value = String::new();
                let mut closed = false;
                while let Some((_, ch)) = chars.next() {
                    if ch == quote {
                        // A quote ends the value only before whitespace/EOL.
                        match chars.peek() {
                            None => {
                                closed = true;
                                break;
                            }
                            Some(&(_, next)) if next.is_whitespace() => {
                                closed = true;
                                break;
                            }
                            _ => value.push(ch),
                        }
                    } else {
                        value.push(ch);
                    }
                }
                if !closed {
                    return Err(Error::parse(line_no, "unterminated quoted value"));
                }
                out.push((line_no, Token::Value(value)));
                continue;
            }
            // Bare token.
            let mut end = line.len();
            while let Some(&(i, ch)) = chars.peek() {
                if ch.is_whitespace() {
                    end = i;
                    break;
                }
                chars.next();
            }
            if end == line.len() {
                // consumed to EOL
            }
            let word = &line[start..end];
            let token = if word.eq_ignore_ascii_case("loop_") {
                Token::Loop
            } else if word.to_ascii_lowercase().starts_with("data_") {
                Token::DataBlock
            } else if let Some(tag) = word.strip_prefix('_') {
                Token::Tag(tag.to_ascii_lowercase())
            } else {
                Token::Value(word.to_string())
            };
            out.push((line_no, token));
        }
    }
    Ok(out)
}

fn extract_atom_site(tokens: &[(usize, Token)]) -> Result<Vec<RawAtom>> {
    let mut i = 0;
    while i < tokens.len() {
        if tokens[i].1 != Token::Loop {
            i += 1;
            continue;
        }
        // Collect the tag header of this loop.
        let mut j = i + 1;
        let mut tags: Vec<String> = Vec::new();
        while j < tokens.len() {
            match &tokens[j].1 {
                Token::Tag(t) => {
                    tags.push(t.clone());
                    j += 1;
                }
                _ => break,
            }
        }
        let is_atom_site = tags.iter().all(|t| t.starts_with("atom_site."))
            && !tags.is_empty()
            && tags.iter().any(|t| t == "atom_site.cartn_x");
        if !is_atom_site {
            i = j.max(i + 1);
            continue;
        }

        // Read value rows until the next structural token.
        let header_line = tokens[i].0;
        let mut values: Vec<(usize, String)> = Vec::new();
        while j < tokens.len() {
            match &tokens[j].1 {
                Token::Value(v) => {
                    values.push((tokens[j].0, v.clone()));
                    j += 1;
                }
                _ => break,
            }
        }
        if values.is_empty() {
            return Err(Error::parse(header_line, "atom_site loop has no rows"));
        }
        if values.len() % tags.len() != 0 {
            return Err(Error::parse(
                header_line,
                format!(
                    "atom_site loop has {} values, not a multiple of {} columns",
                    values.len(),
                    tags.len()
                ),
            ));
        }

        let col: HashMap<&str, usize> = tags
            .iter()
            .enumerate()
            .map(|(k, t)| (t.as_str(), k))
            .collect();
        return rows_to_atoms(&col, &values, tags.len());
    }
    Err(Error::parse(0, "no atom_site loop found"))
}

fn rows_to_atoms(
    col: &HashMap<&str, usize>,
    values: &[(usize, String)],
    ncols: usize,
) -> Result<Vec<RawAtom>> {
    let get = |row: &[(usize, String)], names: &[&str]| -> Option<String> {
        for name in names {
            if let Some(&k) = col.get(format!("atom_site.{name}").to_ascii_lowercase().as_str()) {
                let v = row[k].1.as_str();
                if v != "." && v != "?" {
                    return Some(v.to_string());
                }
            }
        }
        None
    };

    let mut raw = Vec::new();
    let mut first_model: Option<String> = None;

    for row in values.chunks(ncols) {
        let line_no = row[0].0;
        if let Some(model) = get(row, &["pdbx_pdb_model_num"]) {
            match &first_model {
                None => first_model = Some(model),
                Some(m) if *m != model => continue, // later models skipped
                _ => {}
            }
        }

        let group = get(row, &["group_pdb"]).unwrap_or_else(|| "ATOM".into());
        let name = get(row, &["auth_atom_id", "label_atom_id"])
            .ok_or_else(|| Error::parse(line_no, "atom_site row lacks an atom id"))?;
        let res_name = get(row, &["auth_comp_id", "label_comp_id"])
            .ok_or_else(|| Error::parse(line_no, "atom_site row lacks a component id"))?;
        let chain_id = get(row, &["auth_asym_id", "label_asym_id"])
            .ok_or_else(|| Error::parse(line_no, "atom_site row lacks a chain id"))?;
        let seq_index: i32 = get(row, &["auth_seq_id", "label_seq_id"])
            .ok_or_else(|| Error::parse(line_no, "atom_site row lacks a sequence number"))?
            .parse()
            .map_err(|_| Error::parse(line_no, "invalid sequence number"))?;
        let parse_coord = |names: &[&str], what: &str| -> Result<f64> {
            get(row, names)
                .ok_or_else(|| Error::parse(line_no, format!("atom_site row lacks {what}")))?
                .parse()
                .map_err(|_| Error::parse(line_no, format!("invalid {what}")))
        };
        let x = parse_coord(&["cartn_x"], "Cartn_x")?;
        let y = parse_coord(&["cartn_y"], "Cartn_y")?;
        let z = parse_coord(&["cartn_z"], "Cartn_z")?;
        let occupancy = match get(row, &["occupancy"]) {
            Some(s) => s
                .parse()
                .map_err(|_| Error::parse(line_no, "invalid occupancy"))?,
            None => 1.0,
        };
        let alt = get(row, &["label_alt_id"]).and_then(|s| s.chars().next());
        let insertion_code = get(row, &["pdbx_pdb_ins_code"]);
        let type_symbol = get(row, &["type_symbol"]);
        let element = resolve_element(line_no, type_symbol.as_deref(), &name)?;

        raw.push(RawAtom {
            name,
            alt_loc: alt,
            res_name,
            chain_id,
            seq_index,
            insertion_code,
            coords: [x, y, z],
            occupancy,
            element,
            is_hetero: group.eq_ignore_ascii_case("HETATM"),
        });
    }
    Ok(raw)
}
