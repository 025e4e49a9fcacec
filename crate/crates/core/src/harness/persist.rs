//! Deterministic run artifacts on disk.
//!
//! A run directory contains:
//!
//! * `poses.csv` — one row per scored pose with metrics, per-check pass
//!   flags, and the failure reason if any;
//! * `aggregates.json` — per criterion × pose-budget aggregates plus the
//!   confidence-ranking section;
//! * `stratified.json` — the default stratification over every axis;
//! * `report/` — `chart.svg`, `table.csv`, `index.html`;
//! * `run.json` — written last: config, its hash, skipped entries, and the
//!   SHA-256 of every other artifact.
//!
//! Nothing time- or machine-dependent is written (wall times are dropped),
//! so rerunning the same configuration produces byte-identical files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::stats::AggregateResult;
use crate::validity::{CheckName, CheckReport, CheckResult};

use super::report::{render_report, ReportBundle};
use super::stratify::{stratify, StratAxis, StratificationSpec, StratifiedAxis};
use super::{ConfidenceRanking, EntryOutcomes, PoseMetrics, RunConfig, RunResults, SkippedEntry};

/// Locations of the artifacts inside a run directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunPaths {
    pub dir: PathBuf,
    pub poses_csv: PathBuf,
    pub aggregates_json: PathBuf,
    pub stratified_json: PathBuf,
    pub report_dir: PathBuf,
    pub run_json: PathBuf,
}

impl RunPaths {
    pub fn new(dir: &Path) -> RunPaths {
        RunPaths {
            dir: dir.to_path_buf(),
            poses_csv: dir.join("poses.csv"),
            aggregates_json: dir.join("aggregates.json"),
            stratified_json: dir.join("stratified.json"),
            report_dir: dir.join("report"),
            run_json: dir.join("run.json"),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct AggregatesDoc {
    dataset_name: String,
    n_entries: usize,
    aggregates: Vec<AggregateResult>,
    confidence_ranking: Vec<ConfidenceRanking>,
}

#[derive(Debug, Serialize, Deserialize)]
struct StratifiedDoc {
    axes: Vec<StratifiedAxis>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RunDoc {
    version: String,
    config: RunConfig,
    /// SHA-256 of the canonical JSON serialization of `config`.
    config_sha256: String,
    skipped: Vec<SkippedEntry>,
    /// SHA-256 of every other artifact, keyed by path relative to the run
    /// directory.
    files: BTreeMap<String, String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn pretty_json<T: Serialize>(value: &T, what: &str) -> Result<Vec<u8>> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Other(format!("serialize {what}: {e}")))?;
    text.push('\n');
    Ok(text.into_bytes())
}

/// Write every artifact of a finished run into `dir` (created if needed)
/// and return the paths. `run.json` is written last so its hash manifest
/// covers the final content of every other file.
pub fn write_outputs(results: &RunResults, config: &RunConfig, dir: &Path) -> Result<RunPaths> {
    let paths = RunPaths::new(dir);
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let mut files: BTreeMap<String, String> = BTreeMap::new();
    let mut record = |paths_dir: &Path, path: &Path, bytes: &[u8]| {
        let rel = path
            .strip_prefix(paths_dir)
            .unwrap_or(path)
            .to_string_lossy()
            .into_owned();
        files.insert(rel, sha256_hex(bytes));
    };

    let csv_bytes = poses_to_csv(&results.poses)?;
    fs::write(&paths.poses_csv, &csv_bytes).map_err(|e| Error::io(&paths.poses_csv, e))?;
    record(dir, &paths.poses_csv, &csv_bytes);

    let aggregates = AggregatesDoc {
        dataset_name: results.dataset_name.clone(),
        n_entries: results.entries.len(),
        aggregates: results.aggregates.clone(),
        confidence_ranking: results.confidence_ranking.clone(),
    };
    let agg_bytes = pretty_json(&aggregates, "aggregates")?;
    fs::write(&paths.aggregates_json, &agg_bytes)
        .map_err(|e| Error::io(&paths.aggregates_json, e))?;
    record(dir, &paths.aggregates_json, &agg_bytes);

    let mut axes = Vec::new();
    for axis in StratAxis::ALL {
        axes.push(stratify(
            &results.entries,
            &StratificationSpec::default_for(axis),
            &config.ordered_criteria(),
            &config.sorted_k_values(),
            config.bootstrap,
        )?);
    }
    let strat_bytes = pretty_json(&StratifiedDoc { axes }, "stratification")?;
    fs::write(&paths.stratified_json, &strat_bytes)
        .map_err(|e| Error::io(&paths.stratified_json, e))?;
    record(dir, &paths.stratified_json, &strat_bytes);

    let bundle = ReportBundle {
        title: format!("poseval report: {}", results.dataset_name),
        methods: vec![("run".to_string(), results)],
    };
    for path in render_report(&bundle, &paths.report_dir)? {
        let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        record(dir, &path, &bytes);
    }

    let run_doc = RunDoc {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        config_sha256: sha256_hex(&serde_json::to_vec(config).map_err(|e| {
            Error::Other(format!("serialize config: {e}"))
        })?),
        skipped: results.skipped.clone(),
        files,
    };
    let run_bytes = pretty_json(&run_doc, "run metadata")?;
    fs::write(&paths.run_json, &run_bytes).map_err(|e| Error::io(&paths.run_json, e))?;

    Ok(paths)
}

/// Reload a run directory into `RunResults`.
///
/// The inverse of `write_outputs` up to information the artifacts drop:
/// wall times are zero, per-check measured values and details are empty
/// (only pass flags are persisted), and entry annotations are `None` —
/// stratification artifacts are computed at write time, and re-stratifying
/// a loaded run needs the manifest's annotations again.
pub fn load_run_results(dir: &Path) -> Result<RunResults> {
    let paths = RunPaths::new(dir);

    let agg_text = fs::read_to_string(&paths.aggregates_json)
        .map_err(|e| Error::io(&paths.aggregates_json, e))?;
    let agg_doc: AggregatesDoc = serde_json::from_str(&agg_text).map_err(|e| {
        Error::Other(format!("{}: {e}", paths.aggregates_json.display()))
    })?;

    let run_text =
        fs::read_to_string(&paths.run_json).map_err(|e| Error::io(&paths.run_json, e))?;
    let run_doc: RunDoc = serde_json::from_str(&run_text)
        .map_err(|e| Error::Other(format!("{}: {e}", paths.run_json.display())))?;

    let mut poses = poses_from_csv(&paths.poses_csv)?;
    poses.sort_by(|a, b| (&a.entry_id, a.seed, a.sample).cmp(&(&b.entry_id, b.seed, b.sample)));

    let mut entries: Vec<EntryOutcomes> = Vec::new();
    for m in &poses {
        if entries.last().map(|e| e.entry_id.as_str()) != Some(m.entry_id.as_str()) {
            entries.push(EntryOutcomes {
                entry_id: m.entry_id.clone(),
                scores: Vec::new(),
                annotations: None,
            });
        }
        entries.last_mut().expect("just pushed").scores.push(m.into());
    }

    Ok(RunResults {
        dataset_name: agg_doc.dataset_name,
        poses,
        entries,
        aggregates: agg_doc.aggregates,
        confidence_ranking: agg_doc.confidence_ranking,
        skipped: run_doc.skipped,
    })
}

/// Shortest round-trip decimal form; empty for absent values.
fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn poses_to_csv(poses: &[PoseMetrics]) -> Result<Vec<u8>> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "entry_id".to_string(),
        "seed".to_string(),
        "sample".to_string(),
        "rmsd".to_string(),
        "lddt_pli".to_string(),
        "pb_valid".to_string(),
        "confidence".to_string(),
    ];
    header.extend(CheckName::ALL.iter().map(|c| c.as_str().to_string()));
    header.push("failure".to_string());
    wtr.write_record(&header)
        .map_err(|e| Error::Other(format!("poses.csv header: {e}")))?;

    for pose in poses {
        let mut row = vec![
            pose.entry_id.clone(),
            pose.seed.to_string(),
            pose.sample.to_string(),
            fmt_opt_f64(pose.rmsd),
            fmt_opt_f64(pose.lddt_pli),
            pose.pb_valid.to_string(),
            fmt_opt_f64(pose.confidence),
        ];
        for name in CheckName::ALL {
            let cell = pose
                .check_values
                .results
                .iter()
                .find(|(n, _)| *n == name)
                .map_or_else(String::new, |(_, r)| r.pass.to_string());
            row.push(cell);
        }
        row.push(pose.failure.clone().unwrap_or_default());
        wtr.write_record(&row)
            .map_err(|e| Error::Other(format!("poses.csv row: {e}")))?;
    }
    wtr.into_inner()
        .map_err(|e| Error::Other(format!("poses.csv flush: {e}")))
}

fn poses_from_csv(path: &Path) -> Result<Vec<PoseMetrics>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| {
        Error::Other(format!("{}: {e}", path.display()))
    })?;
    let headers = rdr
        .headers()
        .map_err(|e| Error::Other(format!("{}: {e}", path.display())))?
        .clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Other(format!("{}: missing column '{name}'", path.display())))
    };
    let c_entry = col("entry_id")?;
    let c_seed = col("seed")?;
    let c_sample = col("sample")?;
    let c_rmsd = col("rmsd")?;
    let c_lddt = col("lddt_pli")?;
    let c_valid = col("pb_valid")?;
    let c_conf = col("confidence")?;
    let c_fail = col("failure")?;
    let check_cols: Vec<(CheckName, usize)> = CheckName::ALL
        .iter()
        .map(|&name| col(name.as_str()).map(|i| (name, i)))
        .collect::<Result<_>>()?;

    let parse_f64 = |s: &str, what: &str, row: usize| -> Result<Option<f64>> {
        if s.is_empty() {
            return Ok(None);
        }
        s.parse::<f64>().map(Some).map_err(|e| {
            Error::Other(format!("{}: row {row} {what}: {e}", path.display()))
        })
    };

    let mut poses = Vec::new();
    for (row_idx, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| {
            Error::Other(format!("{}: row {row_idx}: {e}", path.display()))
        })?;
        let get = |i: usize| record.get(i).unwrap_or("");
        let parse_u32 = |s: &str, what: &str| -> Result<u32> {
            s.parse().map_err(|e| {
                Error::Other(format!("{}: row {row_idx} {what}: {e}", path.display()))
            })
        };
        let parse_bool = |s: &str, what: &str| -> Result<bool> {
            s.parse().map_err(|e| {
                Error::Other(format!("{}: row {row_idx} {what}: {e}", path.display()))
            })
        };

        let pb_valid = parse_bool(get(c_valid), "pb_valid")?;
        let mut results = Vec::new();
        for &(name, i) in &check_cols {
            let cell = get(i);
            if cell.is_empty() {
                continue;
            }
            results.push((
                name,
                CheckResult {
                    pass: parse_bool(cell, name.as_str())?,
                    value: None,
                    detail: String::new(),
                },
            ));
        }
        let failure = get(c_fail);
        poses.push(PoseMetrics {
            entry_id: get(c_entry).to_string(),
            seed: parse_u32(get(c_seed), "seed")?,
            sample: parse_u32(get(c_sample), "sample")?,
            rmsd: parse_f64(get(c_rmsd), "rmsd", row_idx)?,
            lddt_pli: parse_f64(get(c_lddt), "lddt_pli", row_idx)?,
            pb_valid,
            check_values: CheckReport { results, pb_valid },
            confidence: parse_f64(get(c_conf), "confidence", row_idx)?,
            wall_time: 0.0,
            failure: (!failure.is_empty()).then(|| failure.to_string()),
        });
    }
    Ok(poses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{planned_poses, save_manifest, write_planned_entry, PoseKind};
    use crate::harness::run_benchmark;
    use crate::manifest::{load_manifest, BenchmarkManifest};

    fn fixture_results() -> (RunResults, RunConfig) {
        let dir = tempfile::tempdir().unwrap();
        let mut entries = Vec::new();
        for (id, kinds) in [
            ("a", vec![PoseKind::Exact, PoseKind::Offset(3.0)]),
            ("b", vec![PoseKind::Offset(1.5), PoseKind::BrokenValidity]),
        ] {
            entries.push(
                write_planned_entry(dir.path(), id, "2022-01-01", &planned_poses(&kinds))
                    .unwrap(),
            );
        }
        let manifest = BenchmarkManifest {
            dataset_name: "persist-fixture".into(),
            entries,
        };
        save_manifest(&dir.path().join("manifest.json"), &manifest).unwrap();
        let manifest = load_manifest(&dir.path().join("manifest.json")).unwrap();
        let config = RunConfig::default();
        let results = run_benchmark(&manifest, &config).unwrap();
        (results, config)
    }

    #[test]
    fn write_then_load_roundtrips_everything_persisted() {
        let (results, config) = fixture_results();
        let out = tempfile::tempdir().unwrap();
        let paths = write_outputs(&results, &config, out.path()).unwrap();
        for p in [
            &paths.poses_csv,
            &paths.aggregates_json,
            &paths.stratified_json,
            &paths.run_json,
        ] {
            assert!(p.is_file(), "{} missing", p.display());
        }

        let loaded = load_run_results(out.path()).unwrap();
        assert_eq!(loaded.dataset_name, results.dataset_name);
        assert_eq!(loaded.aggregates, results.aggregates);
        assert_eq!(loaded.confidence_ranking, results.confidence_ranking);
        assert_eq!(loaded.skipped, results.skipped);
        assert_eq!(loaded.entries, results.entries);
        assert_eq!(loaded.poses.len(), results.poses.len());
        for (l, r) in loaded.poses.iter().zip(&results.poses) {
            assert_eq!(l.entry_id, r.entry_id);
            assert_eq!((l.seed, l.sample), (r.seed, r.sample));
            assert_eq!(l.rmsd.map(f64::to_bits), r.rmsd.map(f64::to_bits));
            assert_eq!(l.lddt_pli.map(f64::to_bits), r.lddt_pli.map(f64::to_bits));
            assert_eq!(l.pb_valid, r.pb_valid);
            assert_eq!(l.confidence, r.confidence);
            assert_eq!(l.failure, r.failure);
            let flags = |m: &PoseMetrics| -> Vec<(CheckName, bool)> {
                m.check_values
                    .results
                    .iter()
                    .map(|(n, r)| (*n, r.pass))
                    .collect()
            };
            assert_eq!(flags(l), flags(r));
        }
    }

    #[test]
    fn reruns_write_byte_identical_artifacts() {
        let (results, config) = fixture_results();
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        write_outputs(&results, &config, d1.path()).unwrap();
        write_outputs(&results, &config, d2.path()).unwrap();
        for rel in [
            "poses.csv",
            "aggregates.json",
            "stratified.json",
            "report/chart.svg",
            "report/table.csv",
            "report/index.html",
            "run.json",
        ] {
            let x = std::fs::read(d1.path().join(rel)).unwrap();
            let y = std::fs::read(d2.path().join(rel)).unwrap();
            assert_eq!(x, y, "{rel} differs between reruns");
        }
    }

    #[test]
    fn poses_csv_conserves_counting_and_headers() {
        let (results, config) = fixture_results();
        let out = tempfile::tempdir().unwrap();
        let paths = write_outputs(&results, &config, out.path()).unwrap();
        let text = std::fs::read_to_string(&paths.poses_csv).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        for name in CheckName::ALL {
            assert!(header.contains(name.as_str()), "header lacks {name}");
        }
        assert_eq!(lines.count(), 2 * 20, "rows = entries × poses");
    }

    #[test]
    fn run_json_hashes_cover_and_match_all_artifacts() {
        let (results, config) = fixture_results();
        let out = tempfile::tempdir().unwrap();
        let paths = write_outputs(&results, &config, out.path()).unwrap();
        let doc: RunDoc =
            serde_json::from_str(&std::fs::read_to_string(&paths.run_json).unwrap()).unwrap();
        let expected_keys = [
            "poses.csv",
            "aggregates.json",
            "stratified.json",
            "report/chart.svg",
            "report/table.csv",
            "report/index.html",
        ];
        assert_eq!(
            doc.files.keys().cloned().collect::<Vec<_>>(),
            {
                let mut k: Vec<String> = expected_keys.iter().map(|s| s.to_string()).collect();
                k.sort();
                k
            }
        );
        for (rel, recorded) in &doc.files {
            let bytes = std::fs::read(out.path().join(rel)).unwrap();
            assert_eq!(&sha256_hex(&bytes), recorded, "{rel} hash mismatch");
        }
        assert_eq!(
            doc.config_sha256,
            sha256_hex(&serde_json::to_vec(&config).unwrap())
        );
        assert_eq!(doc.config, config);
        assert_eq!(doc.version, env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn stratified_json_covers_all_axes_and_reports_missing_annotations() {
        let (results, config) = fixture_results();
        let out = tempfile::tempdir().unwrap();
        let paths = write_outputs(&results, &config, out.path()).unwrap();
        let doc: StratifiedDoc =
            serde_json::from_str(&std::fs::read_to_string(&paths.stratified_json).unwrap())
                .unwrap();
        assert_eq!(doc.axes.len(), 3);
        // The fixture has no annotations: every entry lands in the
        // missing list and every stratum mean is null.
        for axis in &doc.axes {
            assert_eq!(axis.missing_annotation, ["a", "b"]);
            for stratum in &axis.strata {
                assert_eq!(stratum.n, 0);
                assert!(stratum.aggregates.iter().all(|a| a.mean.is_none()));
            }
        }
    }
}
