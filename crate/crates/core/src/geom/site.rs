//! Binding-site selection: the residues surrounding the true ligand.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::structure::{ComplexStructure, ResidueKey};
use crate::vec3;

/// Default heavy-atom distance bound defining the binding site, in Å.
pub const DEFAULT_SITE_CUTOFF: f64 = 10.0;

/// Residues of `truth` with any heavy atom strictly within `cutoff` of any
/// heavy atom of the designated ligand. Returned sorted by residue key.
pub fn binding_site(truth: &ComplexStructure, cutoff: f64) -> Result<BTreeSet<ResidueKey>> {
    if !(cutoff > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "site cutoff must be positive, got {cutoff}"
        )));
    }
    let ligand = truth.primary_ligand()?;
    let cutoff_sq = cutoff * cutoff;
    let mut site = BTreeSet::new();
    for chain in &truth.chains {
        for res in &chain.residues {
            let near = res.atoms.iter().any(|a| {
                ligand
                    .coords
                    .iter()
                    .any(|&lc| vec3::dist_sq(a.coords, lc) < cutoff_sq)
            });
            if near {
                site.insert(res.key());
            }
        }
    }
    if site.is_empty() {
        return Err(Error::EmptyBindingSite);
    }
    Ok(site)
}
