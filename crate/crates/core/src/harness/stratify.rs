//! Stratified aggregates: entries binned by a training-set-similarity
//! annotation, with per-bin best-of-k aggregates and bootstrap SEMs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::bootstrap;

use super::{BootstrapConfig, Criterion, EntryOutcomes};

/// Annotation axis an entry set can be stratified by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StratAxis {
    /// Pocket similarity to the training set, in [0, 1].
    PocketSimilarity,
    /// Occurrences of the ligand in the training set (a count).
    LigandFrequency,
    /// Ligand fingerprint similarity to the training set, in [0, 1].
    Tanimoto,
}

impl StratAxis {
    pub const ALL: [StratAxis; 3] = [
        StratAxis::PocketSimilarity,
        StratAxis::LigandFrequency,
        StratAxis::Tanimoto,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StratAxis::PocketSimilarity => "pocket_similarity",
            StratAxis::LigandFrequency => "ligand_frequency",
            StratAxis::Tanimoto => "tanimoto",
        }
    }

    pub fn from_name(name: &str) -> Result<StratAxis> {
        StratAxis::ALL
            .into_iter()
            .find(|a| a.name() == name)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown stratification axis '{name}'")))
    }

    /// The entry's annotation value on this axis.
    fn value(self, e: &EntryOutcomes) -> Option<f64> {
        let a = e.annotations.as_ref()?;
        match self {
            StratAxis::PocketSimilarity => a.pocket_similarity,
            StratAxis::LigandFrequency => a.ligand_frequency.map(|f| f as f64),
            StratAxis::Tanimoto => a.tanimoto,
        }
    }
}

impl std::fmt::Display for StratAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One stratification request: an axis and its bin boundaries.
///
/// Similarity axes use half-open cells `[e_i, e_{i+1})` over consecutive
/// edges — a value on a boundary belongs to the upper bin — except that the
/// final cell is closed so the axis maximum is representable.
///
/// The frequency axis is a count axis: `bin_edges` are inclusive upper
/// bounds, and the bins are the exact-zero bin `{0}`, then `[1, u_1]`,
/// `(u_1, u_2]`, …, and finally `(u_last, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratificationSpec {
    pub axis: StratAxis,
    pub bin_edges: Vec<f64>,
}

impl StratificationSpec {
    /// The default binning for an axis: similarity axes get
    /// [0, 0.2, 0.4, 0.6, 0.8, 1.0]; the frequency axis gets {0}, [1, 10],
    /// (10, ∞).
    pub fn default_for(axis: StratAxis) -> Self {
        let bin_edges = match axis {
            StratAxis::LigandFrequency => vec![10.0],
            _ => vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0],
        };
        StratificationSpec { axis, bin_edges }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.bin_edges.iter().all(|e| e.is_finite()) {
            return Err(Error::InvalidParameter(
                "stratification edges must be finite".into(),
            ));
        }
        if !self.bin_edges.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(
                "stratification edges must be strictly increasing".into(),
            ));
        }
        let min_edges = if self.axis == StratAxis::LigandFrequency {
            1
        } else {
            2
        };
        if self.bin_edges.len() < min_edges {
            return Err(Error::InvalidParameter(format!(
                "axis {} needs at least {min_edges} bin edge(s)",
                self.axis
            )));
        }
        Ok(())
    }

    /// Number of bins the spec defines.
    fn bin_count(&self) -> usize {
        match self.axis {
            // {0}, one per upper bound, and the overflow bin.
            StratAxis::LigandFrequency => self.bin_edges.len() + 2,
            _ => self.bin_edges.len() - 1,
        }
    }

    /// Bin label, matching the binning rules documented on the type.
    fn bin_label(&self, bin: usize) -> String {
        match self.axis {
            StratAxis::LigandFrequency => {
                if bin == 0 {
                    "0".to_string()
                } else if bin <= self.bin_edges.len() {
                    let hi = self.bin_edges[bin - 1];
                    let lo = if bin == 1 {
                        1.0
                    } else {
                        self.bin_edges[bin - 2] + 1.0
                    };
                    format!("{lo:.0}-{hi:.0}")
                } else {
                    format!(">{:.0}", self.bin_edges[self.bin_edges.len() - 1])
                }
            }
            _ => {
                let lo = self.bin_edges[bin];
                let hi = self.bin_edges[bin + 1];
                let close = if bin + 2 == self.bin_edges.len() {
                    "]"
                } else {
                    ")"
                };
                format!("[{lo},{hi}{close}")
            }
        }
    }

    /// Bin index of a value, or `None` when it falls outside every bin.
    fn locate(&self, value: f64) -> Option<usize> {
        if !value.is_finite() {
            return None;
        }
        match self.axis {
            StratAxis::LigandFrequency => {
                if value < 0.0 {
                    return None;
                }
                if value == 0.0 {
                    return Some(0);
                }
                for (i, &hi) in self.bin_edges.iter().enumerate() {
                    if value <= hi {
                        return Some(i + 1);
                    }
                }
                Some(self.bin_edges.len() + 1)
            }
            _ => {
                let last = self.bin_edges.len() - 1;
                if value == self.bin_edges[last] {
                    // Final cell is closed on the right.
                    return Some(last - 1);
                }
                (0..last).find(|&i| self.bin_edges[i] <= value && value < self.bin_edges[i + 1])
            }
        }
    }
}

/// A per-bin aggregate; `mean`/`sem` are `None` for empty bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumAggregate {
    pub metric_name: String,
    pub k: usize,
    pub mean: Option<f64>,
    pub sem: Option<f64>,
    pub n_structures: usize,
}

/// One bin of a stratified axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stratum {
    pub label: String,
    pub n: usize,
    pub entry_ids: Vec<String>,
    pub aggregates: Vec<StratumAggregate>,
}

/// A fully stratified axis: every bin (including empty ones) plus the
/// entries that had to be excluded for missing or out-of-range annotations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratifiedAxis {
    pub axis: StratAxis,
    pub bin_edges: Vec<f64>,
    pub strata: Vec<Stratum>,
    /// Entries without the axis annotation.
    pub missing_annotation: Vec<String>,
    /// Entries whose annotation falls outside every bin.
    pub out_of_range: Vec<String>,
}

/// Assign entries to bins and aggregate each bin per criterion × k.
///
/// Entries lacking the annotation are excluded and reported; bins with no
/// entries are still emitted, with null means.
pub fn stratify(
    entries: &[EntryOutcomes],
    spec: &StratificationSpec,
    criteria: &[Criterion],
    k_values: &[usize],
    bs: BootstrapConfig,
) -> Result<StratifiedAxis> {
    spec.validate()?;
    let mut bins: Vec<Vec<&EntryOutcomes>> = vec![Vec::new(); spec.bin_count()];
    let mut missing = Vec::new();
    let mut out_of_range = Vec::new();
    for e in entries {
        match spec.axis.value(e) {
            None => missing.push(e.entry_id.clone()),
            Some(v) => match spec.locate(v) {
                Some(b) => bins[b].push(e),
                None => out_of_range.push(e.entry_id.clone()),
            },
        }
    }

    let mut strata = Vec::with_capacity(bins.len());
    for (b, members) in bins.iter().enumerate() {
        let mut aggregates = Vec::new();
        for &criterion in criteria {
            for &k in k_values {
                if members.is_empty() {
                    aggregates.push(StratumAggregate {
                        metric_name: criterion.name().to_string(),
                        k,
                        mean: None,
                        sem: None,
                        n_structures: 0,
                    });
                    continue;
                }
                let values: Vec<f64> = members
                    .iter()
                    .map(|e| e.criterion_value(criterion, k))
                    .collect::<Result<_>>()?;
                let mean = values.iter().sum::<f64>() / values.len() as f64;
                let (_, sem) = bootstrap(&values, bs.iters, bs.seed)?;
                aggregates.push(StratumAggregate {
                    metric_name: criterion.name().to_string(),
                    k,
                    mean: Some(mean),
                    sem: Some(sem),
                    n_structures: members.len(),
                });
            }
        }
        strata.push(Stratum {
            label: spec.bin_label(b),
            n: members.len(),
            entry_ids: members.iter().map(|e| e.entry_id.clone()).collect(),
            aggregates,
        });
    }
    Ok(StratifiedAxis {
        axis: spec.axis,
        bin_edges: spec.bin_edges.clone(),
        strata,
        missing_annotation: missing,
        out_of_range,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::PoseScore;
    use crate::manifest::Annotations;

    fn entry(id: &str, successes: usize, ann: Annotations) -> EntryOutcomes {
        let scores = (0..20)
            .map(|i| PoseScore {
                seed: i as u32 / 5 + 1,
                sample: i as u32 % 5 + 1,
                rmsd: Some(if i < successes { 0.5 } else { 4.0 }),
                lddt_pli: Some(if i < successes { 0.9 } else { 0.3 }),
                pb_valid: true,
                confidence: None,
            })
            .collect();
        EntryOutcomes {
            entry_id: id.to_string(),
            scores,
            annotations: Some(ann),
        }
    }

    fn sim(v: f64) -> Annotations {
        Annotations {
            pocket_similarity: Some(v),
            ligand_frequency: None,
            tanimoto: None,
        }
    }

    fn freq(v: u64) -> Annotations {
        Annotations {
            pocket_similarity: None,
            ligand_frequency: Some(v),
            tanimoto: None,
        }
    }

    const BS: BootstrapConfig = BootstrapConfig { iters: 50, seed: 7 };

    #[test]
    fn similarity_values_land_in_half_open_bins() {
        let entries = vec![entry("low", 20, sim(0.1)), entry("high", 0, sim(0.5))];
        let spec = StratificationSpec {
            axis: StratAxis::PocketSimilarity,
            bin_edges: vec![0.0, 0.2, 1.0],
        };
        let out = stratify(&entries, &spec, &[Criterion::RmsdLt2], &[1], BS).unwrap();
        assert_eq!(out.strata.len(), 2);
        assert_eq!(out.strata[0].n, 1);
        assert_eq!(out.strata[0].entry_ids, ["low"]);
        assert_eq!(out.strata[1].n, 1);
        assert_eq!(out.strata[0].aggregates[0].mean, Some(1.0));
        assert_eq!(out.strata[1].aggregates[0].mean, Some(0.0));
    }

    #[test]
    fn boundary_value_goes_to_upper_bin() {
        let entries = vec![entry("edge", 10, sim(0.2))];
        let spec = StratificationSpec {
            axis: StratAxis::PocketSimilarity,
            bin_edges: vec![0.0, 0.2, 1.0],
        };
        let out = stratify(&entries, &spec, &[Criterion::RmsdLt2], &[1], BS).unwrap();
        assert_eq!(out.strata[0].n, 0);
        assert_eq!(out.strata[1].n, 1);
        // Empty bin still emitted, with null mean.
        assert_eq!(out.strata[0].aggregates[0].mean, None);
        assert_eq!(out.strata[0].aggregates[0].n_structures, 0);
    }

    #[test]
    fn axis_maximum_lands_in_final_closed_bin() {
        let entries = vec![entry("max", 10, sim(1.0))];
        let spec = StratificationSpec::default_for(StratAxis::PocketSimilarity);
        let out = stratify(&entries, &spec, &[Criterion::RmsdLt2], &[1], BS).unwrap();
        assert_eq!(out.strata.last().unwrap().n, 1);
        assert!(out.out_of_range.is_empty());
    }

    #[test]
    fn frequency_zero_bin_is_exact() {
        let entries = vec![
            entry("z1", 20, freq(0)),
            entry("z2", 0, freq(0)),
            entry("mid", 10, freq(3)),
            entry("ten", 10, freq(10)),
            entry("high", 10, freq(11)),
        ];
        let spec = StratificationSpec::default_for(StratAxis::LigandFrequency);
        let out = stratify(&entries, &spec, &[Criterion::RmsdLt2], &[1], BS).unwrap();
        let ns: Vec<usize> = out.strata.iter().map(|s| s.n).collect();
        assert_eq!(ns, [2, 2, 1]);
        assert_eq!(out.strata[0].label, "0");
        assert_eq!(out.strata[1].label, "1-10");
        assert_eq!(out.strata[2].label, ">10");
    }

    #[test]
    fn missing_annotations_are_reported_not_fatal() {
        let mut bare = entry("bare", 5, sim(0.5));
        bare.annotations = None;
        let entries = vec![entry("ok", 5, sim(0.5)), bare];
        let spec = StratificationSpec::default_for(StratAxis::PocketSimilarity);
        let out = stratify(&entries, &spec, &[Criterion::RmsdLt2], &[1], BS).unwrap();
        assert_eq!(out.missing_annotation, ["bare"]);
        assert_eq!(out.strata.iter().map(|s| s.n).sum::<usize>(), 1);
    }

    #[test]
    fn out_of_range_values_are_reported() {
        let entries = vec![entry("neg", 5, sim(0.5))];
        let spec = StratificationSpec {
            axis: StratAxis::PocketSimilarity,
            bin_edges: vec![0.6, 0.8, 1.0],
        };
        let out = stratify(&entries, &spec, &[Criterion::RmsdLt2], &[1], BS).unwrap();
        assert_eq!(out.out_of_range, ["neg"]);
    }

    #[test]
    fn spec_validation_rejects_bad_edges() {
        for edges in [vec![], vec![0.5], vec![0.2, 0.2], vec![0.4, 0.2]] {
            let spec = StratificationSpec {
                axis: StratAxis::Tanimoto,
                bin_edges: edges,
            };
            assert!(spec.validate().is_err(), "{:?}", spec.bin_edges);
        }
        assert!(StratificationSpec {
            axis: StratAxis::LigandFrequency,
            bin_edges: vec![10.0],
        }
        .validate()
        .is_ok());
    }

    #[test]
    fn per_bin_aggregates_cover_every_criterion_and_k() {
        let entries = vec![entry("a", 10, sim(0.1)), entry("b", 5, sim(0.1))];
        let spec = StratificationSpec::default_for(StratAxis::PocketSimilarity);
        let ks = [1usize, 5, 20];
        let out = stratify(&entries, &spec, &Criterion::ALL, &ks, BS).unwrap();
        for s in &out.strata {
            assert_eq!(s.aggregates.len(), Criterion::ALL.len() * ks.len());
        }
        let first = &out.strata[0];
        assert_eq!(first.n, 2);
        let a = first
            .aggregates
            .iter()
            .find(|a| a.metric_name == "rmsd_lt_2" && a.k == 1)
            .unwrap();
        assert_eq!(a.mean, Some((0.5 + 0.25) / 2.0));
        assert!(a.sem.unwrap() > 0.0);
    }
}
