//! Complex-structure domain types: protein chains of residues with heavy
//! atoms, ligand instances carrying full topology, and non-target cofactor
//! groups (organic / inorganic / water). Everything is immutable after
//! parsing and safe to share across threads.

use serde::{Deserialize, Serialize};

use crate::elements::Element;
use crate::error::{Error, Result};
use crate::molgraph::MolecularGraph;
use crate::vec3::{self, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomSite {
    pub name: String,
    pub element: Element,
    pub coords: Vec3,
    pub occupancy: f64,
    pub is_hetero: bool,
}

impl AtomSite {
    pub fn validate(&self) -> Result<()> {
        if !self.coords.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite coordinates on atom '{}'",
                self.name
            )));
        }
        if !(0.0..=1.0).contains(&self.occupancy) {
            return Err(Error::InvalidParameter(format!(
                "occupancy {} outside [0,1] on atom '{}'",
                self.occupancy, self.name
            )));
        }
        Ok(())
    }
}

/// Identity of a residue: author chain, author numbering, insertion code.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ResidueKey {
    pub chain_id: String,
    pub seq_index: i32,
    pub insertion_code: Option<String>,
}

impl std::fmt::Display for ResidueKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.chain_id, self.seq_index)?;
        if let Some(ic) = &self.insertion_code {
            write!(f, "{ic}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidueSite {
    pub chain_id: String,
    pub seq_index: i32,
    pub insertion_code: Option<String>,
    pub res_name: String,
    pub atoms: Vec<AtomSite>,
}

impl ResidueSite {
    pub fn key(&self) -> ResidueKey {
        ResidueKey {
            chain_id: self.chain_id.clone(),
            seq_index: self.seq_index,
            insertion_code: self.insertion_code.clone(),
        }
    }

    /// Alpha-carbon site, when present.
    pub fn ca(&self) -> Option<&AtomSite> {
        self.atoms.iter().find(|a| a.name == "CA")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProteinChain {
    pub id: String,
    pub residues: Vec<ResidueSite>,
}

/// A ligand instance: heavy-atom topology plus one coordinate per graph atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ligand {
    pub graph: MolecularGraph,
    pub coords: Vec<Vec3>,
}

/// One atom of a non-target component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CofactorAtom {
    pub res_name: String,
    pub name: String,
    pub element: Element,
    pub coords: Vec3,
}

/// Disjoint partition of non-target components.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CofactorGroups {
    pub organic: Vec<CofactorAtom>,
    pub inorganic: Vec<CofactorAtom>,
    pub waters: Vec<CofactorAtom>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexStructure {
    pub chains: Vec<ProteinChain>,
    pub ligands: Vec<Ligand>,
    pub cofactors: CofactorGroups,
}

impl ComplexStructure {
    pub fn validate(&self) -> Result<()> {
        let mut keys = std::collections::HashSet::new();
        for chain in &self.chains {
            for res in &chain.residues {
                if !keys.insert(res.key()) {
                    return Err(Error::InvalidParameter(format!(
                        "duplicate residue key {}",
                        res.key()
                    )));
                }
                for a in &res.atoms {
                    a.validate()?;
                }
            }
        }
        for (i, lig) in self.ligands.iter().enumerate() {
            if lig.coords.len() != lig.graph.atom_count() {
                return Err(Error::InvalidParameter(format!(
                    "ligand {} has {} coordinates for {} graph atoms",
                    i,
                    lig.coords.len(),
                    lig.graph.atom_count()
                )));
            }
        }
        Ok(())
    }

    /// The evaluated ligand: the manifest-designated instance sits first.
    pub fn primary_ligand(&self) -> Result<&Ligand> {
        self.ligands
            .first()
            .ok_or_else(|| Error::InvalidParameter("structure has no ligand".into()))
    }

    /// Insert a ligand at the front, making it the designated instance.
    pub fn with_primary_ligand(mut self, graph: MolecularGraph, coords: Vec<Vec3>) -> Self {
        self.ligands.insert(0, Ligand { graph, coords });
        self
    }

    pub fn protein_atom_count(&self) -> usize {
        self.chains
            .iter()
            .flat_map(|c| &c.residues)
            .map(|r| r.atoms.len())
            .sum()
    }

    /// All protein heavy-atom coordinates with their residue keys.
    pub fn protein_atoms(&self) -> impl Iterator<Item = (&ResidueSite, &AtomSite)> {
        self.chains
            .iter()
            .flat_map(|c| &c.residues)
            .flat_map(|r| r.atoms.iter().map(move |a| (r, a)))
    }

    pub fn residue(&self, key: &ResidueKey) -> Option<&ResidueSite> {
        self.chains
            .iter()
            .find(|c| c.id == key.chain_id)?
            .residues
            .iter()
            .find(|r| {
                r.seq_index == key.seq_index && r.insertion_code == key.insertion_code
            })
    }

    /// Apply a proper rigid motion to every coordinate (protein, ligands,
    /// cofactors). Used when probing rigid-motion invariance.
    pub fn transformed(&self, rot: &[[f64; 3]; 3], trans: Vec3) -> Self {
        let mut out = self.clone();
        for chain in &mut out.chains {
            for res in &mut chain.residues {
                for a in &mut res.atoms {
                    a.coords = vec3::transform(rot, trans, a.coords);
                }
            }
        }
        for lig in &mut out.ligands {
            for c in &mut lig.coords {
                *c = vec3::transform(rot, trans, *c);
            }
        }
        for group in [
            &mut out.cofactors.organic,
            &mut out.cofactors.inorganic,
            &mut out.cofactors.waters,
        ] {
            for a in group {
                a.coords = vec3::transform(rot, trans, a.coords);
            }
        }
        out
    }
}
