//! Core library for a protein-ligand cofolding benchmark harness.
//!
//! The crate evaluates predicted complexes against experimental ground truth:
//! symmetry-corrected binding-site RMSD, superposition-free lDDT-PLI, a
//! physical-validity check suite, unbiased best-of-k aggregation with
//! bootstrap uncertainty and paired significance testing, stratified
//! generalization analysis, and deterministic end-to-end benchmark runs.

pub mod chem;
pub mod elements;
pub mod error;
#[doc(hidden)]
pub mod fixtures;
pub mod geom;
pub mod harness;
pub mod manifest;
pub mod molgraph;
pub mod pocketsel;
pub mod stats;
pub mod structure;
pub mod validity;
pub mod vec3;

#[cfg(test)]
pub(crate) mod testutil;

pub use elements::Element;
pub use error::{Error, Result};
pub use geom::{
    binding_site, bisy_rmsd, bisy_rmsd_with, kabsch, lddt_pli, LddtConfig, RmsdConfig,
    Superposition, DEFAULT_SITE_CUTOFF,
};
pub use harness::{
    compare_methods, compare_methods_with, load_run_config, load_run_results, render_report,
    run_benchmark, stratify, write_outputs, BootstrapConfig, ConfidenceRanking, Criterion,
    EntryOutcomes, MethodComparison, PoseMetrics, PoseScore, ReportBundle, RunConfig, RunPaths,
    RunResults, SkippedEntry, StratAxis, StratificationSpec, StratifiedAxis, Stratum,
    StratumAggregate,
};
pub use manifest::{
    filter_by_release_date, load_manifest, normalize_poses, template_eligible, Annotations,
    BenchmarkManifest, DateFilterMode, ManifestEntry, NormalizeOutcome, PoseRef, Regime,
    REQUIRED_POSES, TEMPLATE_LEAD_DAYS,
};
pub use molgraph::{
    automorphisms, circular_fingerprint, graphs_match, perceive_rings, tanimoto, Automorphisms,
    BondOrder, BondStereo, Fingerprint, GraphAtom, GraphBond, MolecularGraph,
};
pub use pocketsel::{
    select_pocket_residues, select_pocket_residues_with, MedianMode, PocketSelection,
    MIN_SEQUENCE_SEPARATION, POCKET_CUTOFF,
};
pub use stats::{
    aggregate, aggregate_continuous, best_at_k, bootstrap, bootstrap_parallel,
    expected_max_at_k, paired_one_sided_ttest, select_max_confidence, significance_stars,
    AggregateResult, PoseOutcome, StructureOutcome, DEFAULT_BOOTSTRAP_ITERS,
};
pub use structure::{
    AtomSite, CofactorAtom, CofactorGroups, ComplexStructure, Ligand, ProteinChain, ResidueKey,
    ResidueSite,
};
pub use validity::{
    run_all_checks, run_all_checks_with_reference, run_checks_guarded, volume_overlap_fraction,
    CheckConfig, CheckName, CheckReport, CheckResult,
};
pub use vec3::Vec3;
