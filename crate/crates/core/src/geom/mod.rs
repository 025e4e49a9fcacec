//! Superposition and accuracy metrics: Kabsch alignment, binding-site
//! selection, symmetry-corrected binding-site-superposed ligand RMSD, and
//! interface lDDT.

mod kabsch;
mod lddt;
mod rmsd;
mod site;

pub use kabsch::{kabsch, Superposition};
pub use lddt::{lddt_pli, LddtConfig};
pub use rmsd::{bisy_rmsd, bisy_rmsd_with, RmsdConfig, DEFAULT_MAX_AUTOMORPHISMS};
pub use site::{binding_site, DEFAULT_SITE_CUTOFF};
