//! Structure and ligand file parsing.
//!
//! Supported inputs:
//! - PDB (fixed-column subset) and mmCIF (`atom_site` subset) for protein
//!   complexes,
//! - SDF / MOL V2000 for ligand topology and coordinates,
//! - the crate's own canonical complex JSON for lossless round-trips.
//!
//! Parsing is intentionally strict about what it understands and permissive
//! about what it ignores: unknown records are skipped, malformed fields in
//! records we do consume are hard errors carrying a line number.

mod builder;
pub mod canonical;
pub mod pdb;
pub mod sdf;

pub mod mmcif;

use std::path::Path;

use crate::error::{Error, Result};
use crate::molgraph::MolecularGraph;
use crate::structure::ComplexStructure;
use crate::vec3::Vec3;


/// On-disk format of a protein complex file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureFormat {
    Pdb,
    Mmcif,
    /// Canonical complex JSON written by this crate.
    Complex,
}

impl StructureFormat {
    /// Infer the format from a file extension.
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .unwrap_or_default();
        match ext.as_str() {
            "pdb" | "ent" => Ok(StructureFormat::Pdb),
            "cif" | "mmcif" => Ok(StructureFormat::Mmcif),
            "json" => Ok(StructureFormat::Complex),
            other => Err(Error::InvalidParameter(format!(
                "unrecognized structure file extension '{other}' for {}",
                path.display()
            ))),
        }
    }
}

/// Parse a protein complex from raw bytes in the given format.
pub fn parse_protein_structure(bytes: &[u8], format: StructureFormat) -> Result<ComplexStructure> {
    let text = std::str::from_utf8(bytes)
        .map_err(|_| Error::parse(0, "file is not valid UTF-8"))?;
    match format {
        StructureFormat::Pdb => pdb::parse_pdb(text),
        StructureFormat::Mmcif => mmcif::parse_mmcif(text),
        StructureFormat::Complex => canonical::read_complex_json(text),
    }
}

/// Load a protein complex from disk, inferring the format from the extension.
pub fn load_structure(path: &Path) -> Result<ComplexStructure> {
    let format = StructureFormat::from_path(path)?;
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_protein_structure(&bytes, format)
}

/// Load a ligand (topology + coordinates) from an SDF/MOL file.
pub fn load_ligand(path: &Path) -> Result<(MolecularGraph, Vec<Vec3>)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|_| Error::parse(0, "file is not valid UTF-8"))?;
    sdf::parse_sdf(text)
}

/// Load a complex and optionally attach a designated ligand instance from a
/// separate topology file. PDB/mmCIF inputs carry no ligand bond orders, so
/// entries using those formats must supply the ligand separately.
pub fn load_complex(structure_path: &Path, ligand_path: Option<&Path>) -> Result<ComplexStructure> {
    let structure = load_structure(structure_path)?;
    match ligand_path {
        Some(lp) => {
            let (graph, coords) = load_ligand(lp)?;
            let s = structure.with_primary_ligand(graph, coords);
            s.validate()?;
            Ok(s)
        }
        None => {
            if structure.ligands.is_empty() {
                return Err(Error::InvalidParameter(format!(
                    "{} contains no ligand and no ligand file was given",
                    structure_path.display()
                )));
            }
            Ok(structure)
        }
    }
}
