//! `poseval` command-line interface.
//!
//! Exit codes: 0 on success, 1 on usage or configuration errors, 2 on data
//! errors (unreadable or malformed inputs, mismatched run contents).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use poseval::chem::{load_complex, load_ligand};
use poseval::{
    bisy_rmsd_with, compare_methods_with, graphs_match, lddt_pli, load_manifest,
    load_run_config, load_run_results, render_report, run_benchmark, run_checks_guarded,
    select_pocket_residues_with, stratify, write_outputs, CheckConfig, ComplexStructure,
    Criterion, Error, LddtConfig, MedianMode, ReportBundle, Result, RmsdConfig, RunConfig,
    RunResults, StratAxis, StratificationSpec, Vec3, POCKET_CUTOFF,
};

#[derive(Parser)]
#[command(
    name = "poseval",
    version,
    about = "Protein-ligand pose benchmarking: scoring, validity checks, and aggregate statistics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full benchmark over a manifest and write all artifacts.
    Run(RunArgs),
    /// Score one predicted pose against its ground truth.
    Score(ScoreArgs),
    /// Run the physical-validity check suite on one pose.
    Validate(ValidateArgs),
    /// Select conditional-mode pocket residues from a ground-truth complex.
    Pocket(PocketArgs),
    /// Stratify a finished run along generalization axes.
    Stratify(StratifyArgs),
    /// Compare two finished runs with a paired one-sided significance test.
    Compare(CompareArgs),
    /// Render a chart/table/index report bundle from finished runs.
    Report(ReportArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Benchmark manifest (JSON).
    #[arg(long)]
    manifest: PathBuf,
    /// Run configuration (TOML); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config, and is itself overridden by
    /// POSEVAL_OUT_DIR.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; overrides the config, and is itself overridden by
    /// POSEVAL_WORKERS.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct ScoreArgs {
    /// Ground-truth complex.
    #[arg(long)]
    truth: PathBuf,
    /// Ground-truth ligand in a separate file, if not embedded.
    #[arg(long)]
    truth_ligand: Option<PathBuf>,
    /// Predicted complex.
    #[arg(long)]
    pred: PathBuf,
    /// Predicted ligand in a separate file, if not embedded.
    #[arg(long)]
    pred_ligand: Option<PathBuf>,
    /// Low-strain reference conformer for the internal-energy check.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Also compute lDDT-PLI.
    #[arg(long)]
    lddt: bool,
    /// Also run the validity check suite.
    #[arg(long)]
    checks: bool,
}

#[derive(Args)]
struct ValidateArgs {
    /// Ground-truth complex.
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    truth_ligand: Option<PathBuf>,
    /// Predicted complex.
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    pred_ligand: Option<PathBuf>,
    /// Low-strain reference conformer for the internal-energy check.
    #[arg(long)]
    reference: Option<PathBuf>,
}

#[derive(Args)]
struct PocketArgs {
    /// Ground-truth complex to pick the pocket from.
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    truth_ligand: Option<PathBuf>,
    /// Contact cutoff in Å.
    #[arg(long, default_value_t = POCKET_CUTOFF)]
    cutoff: f64,
    /// Aggregate over contact pairs instead of per-ligand-atom minima.
    #[arg(long)]
    contact_pairs: bool,
}

#[derive(Args)]
struct StratifyArgs {
    /// Finished run directory.
    #[arg(long)]
    run: PathBuf,
    /// Manifest the run was produced from (source of the annotations).
    #[arg(long)]
    manifest: PathBuf,
    /// Single axis to stratify (default: all axes).
    #[arg(long)]
    axis: Option<String>,
    /// Comma-separated custom bin edges; requires --axis.
    #[arg(long)]
    edges: Option<String>,
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Run directory of method A.
    #[arg(long)]
    run_a: PathBuf,
    /// Run directory of method B (the baseline).
    #[arg(long)]
    run_b: PathBuf,
    /// Display name of method A.
    #[arg(long, default_value = "A")]
    name_a: String,
    /// Display name of method B.
    #[arg(long, default_value = "B")]
    name_b: String,
    /// Pose budgets to compare (default: every budget both runs report).
    #[arg(long = "k")]
    k_values: Vec<usize>,
    /// Criteria to compare (default: every criterion both runs report).
    #[arg(long = "criterion")]
    criteria: Vec<String>,
    /// Also report a paired-bootstrap p-value.
    #[arg(long)]
    bootstrap: bool,
    #[arg(long, default_value_t = 1000)]
    bootstrap_iters: u64,
    #[arg(long, default_value_t = 0)]
    bootstrap_seed: u64,
}

#[derive(Args)]
struct ReportArgs {
    /// Run directory; repeat for side-by-side methods (first is baseline).
    #[arg(long = "run", required = true)]
    runs: Vec<PathBuf>,
    /// Method display name per --run, in the same order.
    #[arg(long = "name")]
    names: Vec<String>,
    /// Directory to write chart.svg, table.csv, and index.html into.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "poseval report")]
    title: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits 0 for --help/--version; everything else is usage.
            let code = if e.exit_code() == 0 { 0 } else { 1 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

/// Usage/configuration problems exit 1, data problems exit 2.
fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::InvalidParameter(_) => 1,
        _ => 2,
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Score(args) => cmd_score(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Pocket(args) => cmd_pocket(args),
        Command::Stratify(args) => cmd_stratify(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Report(args) => cmd_report(args),
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let mut config = match &args.config {
        Some(path) => load_run_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = args.out {
        config.out_dir = out;
    }
    if let Some(workers) = args.workers {
        config.workers = Some(workers);
    }
    config.apply_env_overrides(&|key| std::env::var(key).ok())?;
    config.validate()?;

    let manifest = load_manifest(&args.manifest)?;
    let results = run_benchmark(&manifest, &config)?;
    let out_dir = config.out_dir.clone();
    let paths = write_outputs(&results, &config, &out_dir)?;

    println!("dataset: {}", results.dataset_name);
    println!(
        "entries scored: {} (skipped: {})",
        results.entries.len(),
        results.skipped.len()
    );
    for s in &results.skipped {
        println!("  skipped {}: {}", s.id, s.reason);
    }
    println!("poses scored: {}", results.poses.len());
    for a in &results.aggregates {
        println!(
            "{:<20} k={:<3} {:.3} \u{00b1} {:.3}  (n={})",
            a.metric_name, a.k, a.mean, a.sem, a.n_structures
        );
    }
    for r in &results.confidence_ranking {
        println!(
            "{:<20} top-1 by confidence: {:.3}  (n={})",
            r.metric_name, r.success_rate, r.n_structures
        );
    }
    println!("artifacts: {}", paths.dir.display());
    Ok(())
}

/// Load an optional reference conformer and reorder its coordinates into
/// the predicted ligand's atom order; `None` when the graphs differ.
fn reference_for(pred: &ComplexStructure, path: Option<&Path>) -> Result<Option<Vec<Vec3>>> {
    let Some(path) = path else { return Ok(None) };
    let (ref_graph, ref_coords) = load_ligand(path)?;
    let Some(ligand) = pred.ligands.first() else {
        return Ok(None);
    };
    Ok(graphs_match(&ref_graph, &ligand.graph).map(|mapping| {
        let mut out = vec![[0.0; 3]; ref_coords.len()];
        for (ref_i, &pred_i) in mapping.iter().enumerate() {
            out[pred_i] = ref_coords[ref_i];
        }
        out
    }))
}

fn cmd_score(args: ScoreArgs) -> Result<()> {
    let truth = load_complex(&args.truth, args.truth_ligand.as_deref())?;
    let pred = load_complex(&args.pred, args.pred_ligand.as_deref())?;
    let mut doc = serde_json::Map::new();
    doc.insert(
        "rmsd".to_string(),
        json!(bisy_rmsd_with(&truth, &pred, &RmsdConfig::default())?),
    );
    if args.lddt {
        doc.insert(
            "lddt_pli".to_string(),
            json!(lddt_pli(&truth, &pred, &LddtConfig::default())?),
        );
    }
    if args.checks {
        let reference = reference_for(&pred, args.reference.as_deref())?;
        let report = run_checks_guarded(
            Some(&truth),
            Some(&pred),
            reference.as_deref(),
            &CheckConfig::default(),
        );
        doc.insert("pb_valid".to_string(), json!(report.pb_valid));
        let mut checks = serde_json::Map::new();
        for (name, r) in &report.results {
            checks.insert(
                name.as_str().to_string(),
                json!({"pass": r.pass, "value": r.value, "detail": r.detail}),
            );
        }
        doc.insert("checks".to_string(), serde_json::Value::Object(checks));
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&serde_json::Value::Object(doc))?
    );
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> Result<()> {
    let truth = load_complex(&args.truth, args.truth_ligand.as_deref())?;
    let pred = load_complex(&args.pred, args.pred_ligand.as_deref())?;
    let reference = reference_for(&pred, args.reference.as_deref())?;
    let report = run_checks_guarded(
        Some(&truth),
        Some(&pred),
        reference.as_deref(),
        &CheckConfig::default(),
    );
    for (name, r) in &report.results {
        let status = if r.pass { "PASS" } else { "FAIL" };
        let value = r
            .value
            .map_or_else(String::new, |v| format!(" value={v:.4}"));
        let detail = if r.detail.is_empty() {
            String::new()
        } else {
            format!("  {}", r.detail)
        };
        println!("[{status}] {:<42}{value}{detail}", name.as_str());
    }
    println!("pb_valid: {}", report.pb_valid);
    Ok(())
}

fn cmd_pocket(args: PocketArgs) -> Result<()> {
    let truth = load_complex(&args.truth, args.truth_ligand.as_deref())?;
    let mode = if args.contact_pairs {
        MedianMode::ContactPairs
    } else {
        MedianMode::LigandAtoms
    };
    let selection = select_pocket_residues_with(&truth, args.cutoff, mode)?;
    if selection.is_empty() {
        println!("no pocket residues within {:.2} Å", args.cutoff);
        return Ok(());
    }
    for (key, dist) in selection
        .residues
        .iter()
        .zip(&selection.median_distances)
    {
        println!("{key} median_distance={dist:.3}");
    }
    Ok(())
}

/// The configuration a finished run was produced with, read from its
/// `run.json`.
fn run_config_of(dir: &Path) -> Result<RunConfig> {
    let path = dir.join("run.json");
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let doc: serde_json::Value = serde_json::from_str(&text)?;
    let config = doc
        .get("config")
        .cloned()
        .ok_or_else(|| Error::Other(format!("{}: missing 'config' section", path.display())))?;
    Ok(serde_json::from_value(config)?)
}

fn cmd_stratify(args: StratifyArgs) -> Result<()> {
    if args.edges.is_some() && args.axis.is_none() {
        return Err(Error::Config("--edges requires --axis".to_string()));
    }
    let results = load_run_results(&args.run)?;
    let config = run_config_of(&args.run)?;
    let manifest = load_manifest(&args.manifest)?;

    // Run artifacts do not persist annotations; re-attach them from the
    // manifest the run was produced from.
    let mut entries = results.entries;
    for e in &mut entries {
        e.annotations = manifest
            .entries
            .iter()
            .find(|m| m.id == e.entry_id)
            .and_then(|m| m.annotations.clone());
    }

    let axes: Vec<StratAxis> = match &args.axis {
        Some(name) => vec![StratAxis::from_name(name)?],
        None => StratAxis::ALL.to_vec(),
    };
    let mut stratified = Vec::new();
    for axis in axes {
        let spec = match &args.edges {
            Some(edges) => {
                let bin_edges: Vec<f64> = edges
                    .split(',')
                    .map(|s| {
                        s.trim().parse::<f64>().map_err(|e| {
                            Error::Config(format!("bad bin edge '{}': {e}", s.trim()))
                        })
                    })
                    .collect::<Result<_>>()?;
                let spec = StratificationSpec { axis, bin_edges };
                spec.validate()?;
                spec
            }
            None => StratificationSpec::default_for(axis),
        };
        stratified.push(stratify(
            &entries,
            &spec,
            &config.criteria,
            &config.k_values,
            config.bootstrap,
        )?);
    }
    let mut text = serde_json::to_string_pretty(&json!({ "axes": stratified }))?;
    text.push('\n');
    match &args.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let a = load_run_results(&args.run_a)?;
    let b = load_run_results(&args.run_b)?;

    let ks: Vec<usize> = if args.k_values.is_empty() {
        shared_ks(&a, &b)
    } else {
        let mut ks = args.k_values.clone();
        ks.sort_unstable();
        ks.dedup();
        ks
    };
    let criteria: Vec<Criterion> = if args.criteria.is_empty() {
        Criterion::ALL
            .into_iter()
            .filter(|c| {
                [&a, &b].iter().all(|r| {
                    r.aggregates.iter().any(|g| g.metric_name == c.name())
                })
            })
            .collect()
    } else {
        args.criteria
            .iter()
            .map(|s| Criterion::from_name(s))
            .collect::<Result<_>>()?
    };
    if ks.is_empty() || criteria.is_empty() {
        return Err(Error::Config(
            "the runs share no criterion/pose-budget aggregates to compare".to_string(),
        ));
    }

    let bootstrap = args
        .bootstrap
        .then_some((args.bootstrap_iters, args.bootstrap_seed));
    println!(
        "comparing {} (A) against {} (B); one-sided H1: A > B",
        args.name_a, args.name_b
    );
    for criterion in criteria {
        for &k in &ks {
            let cmp = compare_methods_with(&a, &b, k, criterion, bootstrap)?;
            let boot = cmp
                .bootstrap_p
                .map_or_else(String::new, |p| format!("  boot_p={p:.4}"));
            println!(
                "{:<20} k={:<3} A={:.3} B={:.3} delta={:+.3} p={:.4}{boot} {}",
                cmp.metric_name, cmp.k, cmp.mean_a, cmp.mean_b, cmp.delta, cmp.p_value, cmp.stars
            );
        }
    }
    Ok(())
}

/// Pose budgets reported by both runs, ascending.
fn shared_ks(a: &RunResults, b: &RunResults) -> Vec<usize> {
    let mut ks: Vec<usize> = a
        .aggregates
        .iter()
        .map(|g| g.k)
        .filter(|&k| b.aggregates.iter().any(|g| g.k == k))
        .collect();
    ks.sort_unstable();
    ks.dedup();
    ks
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    if !args.names.is_empty() && args.names.len() != args.runs.len() {
        return Err(Error::Config(format!(
            "got {} --name values for {} --run directories",
            args.names.len(),
            args.runs.len()
        )));
    }
    let runs: Vec<RunResults> = args
        .runs
        .iter()
        .map(|dir| load_run_results(dir))
        .collect::<Result<_>>()?;
    let names: Vec<String> = if args.names.is_empty() {
        args.runs
            .iter()
            .enumerate()
            .map(|(i, dir)| {
                dir.file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_else(|| format!("run{}", i + 1))
            })
            .collect()
    } else {
        args.names.clone()
    };
    let bundle = ReportBundle {
        title: args.title.clone(),
        methods: names.into_iter().zip(runs.iter()).collect(),
    };
    for path in render_report(&bundle, &args.out)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
