//! Benchmark report structure and emission.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classifiers::Hyperparams;
use crate::error::{Error, Result};
use crate::features::{FeatureDescriptor, FeatureGroup};
use crate::selection::SelectionRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSet {
    Group(FeatureGroup),
    BestOfAll,
}

impl FeatureSet {
    pub fn name(&self) -> String {
        match self {
            FeatureSet::Group(g) => g.name().to_string(),
            FeatureSet::BestOfAll => "best_of_all".to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CellOutcome {
    Ok {
        accuracy_pct: f64,
        selection: SelectionRecord,
    },
    Failed {
        error: String,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CellResult {
    pub dataset: String,
    pub classifier: String,
    pub feature_set: FeatureSet,
    pub outcome: CellOutcome,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SetAggregate {
    pub feature_set: FeatureSet,
    /// Mean/std over datasets with a successful cell; None when every
    /// cell failed.
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub n_ok: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AggregateRow {
    pub classifier: String,
    pub per_set: Vec<SetAggregate>,
    /// Best and second-best GROUP columns (best-of-all excluded), ties
    /// broken toward the lower std, then report order.
    pub best_group: Option<FeatureSet>,
    pub second_group: Option<FeatureSet>,
    /// Mean accuracy gaps mirroring the published analysis.
    pub delta_best_minus_second: Option<f64>,
    pub delta_all_minus_best_group: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReportMeta {
    /// Excluded from determinism comparisons.
    pub generated_at: String,
    pub tool_version: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BenchmarkReport {
    pub schema_version: u32,
    pub global_seed: u64,
    pub dataset_ids: Vec<String>,
    pub classifiers: Vec<String>,
    /// Column order shared by cells and aggregates.
    pub feature_sets: Vec<FeatureSet>,
    pub cells: Vec<CellResult>,
    pub aggregates: Vec<AggregateRow>,
    /// classifier -> descriptor family -> how often selected.
    pub family_distribution: BTreeMap<String, BTreeMap<String, usize>>,
    pub hyperparams: BTreeMap<String, Hyperparams>,
    pub config_echo: serde_json::Value,
    pub meta: ReportMeta,
}

impl BenchmarkReport {
    pub fn cell(&self, dataset: &str, classifier: &str, set: FeatureSet) -> Option<&CellResult> {
        self.cells.iter().find(|c| {
            c.dataset == dataset && c.classifier == classifier && c.feature_set == set
        })
    }

    /// Population mean/std of the successful cells of one column.
    fn column_stats(&self, classifier: &str, set: FeatureSet) -> (Option<f64>, Option<f64>, usize) {
        let accs: Vec<f64> = self
            .cells
            .iter()
            .filter(|c| c.classifier == classifier && c.feature_set == set)
            .filter_map(|c| match &c.outcome {
                CellOutcome::Ok { accuracy_pct, .. } => Some(*accuracy_pct),
                CellOutcome::Failed { .. } => None,
            })
            .collect();
        if accs.is_empty() {
            return (None, None, 0);
        }
        let mean = accs.iter().sum::<f64>() / accs.len() as f64;
        let var = accs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / accs.len() as f64;
        (Some(mean), Some(var.sqrt()), accs.len())
    }

    /// Recompute every aggregate row from the cells.
    pub fn recompute_aggregates(&self) -> Vec<AggregateRow> {
        self.classifiers
            .iter()
            .map(|classifier| {
                let per_set: Vec<SetAggregate> = self
                    .feature_sets
                    .iter()
                    .map(|&set| {
                        let (mean, std, n_ok) = self.column_stats(classifier, set);
                        SetAggregate {
                            feature_set: set,
                            mean,
                            std,
                            n_ok,
                        }
                    })
                    .collect();

                // flags among group columns only
                let mut groups: Vec<&SetAggregate> = per_set
                    .iter()
                    .filter(|s| matches!(s.feature_set, FeatureSet::Group(_)) && s.mean.is_some())
                    .collect();
                groups.sort_by(|a, b| {
                    b.mean
                        .partial_cmp(&a.mean)
                        .unwrap()
                        .then(a.std.partial_cmp(&b.std).unwrap())
                });
                let best_group = groups.first().map(|s| s.feature_set);
                let second_group = groups.get(1).map(|s| s.feature_set);
                let delta_best_minus_second = match (groups.first(), groups.get(1)) {
                    (Some(a), Some(b)) => Some(a.mean.unwrap() - b.mean.unwrap()),
                    _ => None,
                };
                let all_mean = per_set
                    .iter()
                    .find(|s| s.feature_set == FeatureSet::BestOfAll)
                    .and_then(|s| s.mean);
                let delta_all_minus_best_group = match (all_mean, groups.first()) {
                    (Some(a), Some(b)) => Some(a - b.mean.unwrap()),
                    _ => None,
                };
                AggregateRow {
                    classifier: classifier.clone(),
                    per_set,
                    best_group,
                    second_group,
                    delta_best_minus_second,
                    delta_all_minus_best_group,
                }
            })
            .collect()
    }

    /// Internal consistency: stored aggregates equal recomputation.
    pub fn verify_aggregates(&self) -> Result<()> {
        let fresh = self.recompute_aggregates();
        if fresh.len() != self.aggregates.len() {
            return Err(Error::structural("aggregate row count mismatch"));
        }
        for (a, b) in self.aggregates.iter().zip(&fresh) {
            if a.classifier != b.classifier {
                return Err(Error::structural("aggregate row order mismatch"));
            }
            for (x, y) in a.per_set.iter().zip(&b.per_set) {
                let close = |p: Option<f64>, q: Option<f64>| match (p, q) {
                    (None, None) => true,
                    (Some(p), Some(q)) => (p - q).abs() < 1e-9,
                    _ => false,
                };
                if !close(x.mean, y.mean) || !close(x.std, y.std) {
                    return Err(Error::structural(format!(
                        "aggregate mismatch for {} / {}",
                        a.classifier,
                        x.feature_set.name()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Histogram of descriptor families among selected column indices.
pub fn feature_family_distribution(
    indices: &[usize],
    descriptors: &[FeatureDescriptor],
) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for &c in indices {
        *counts.entry(descriptors[c].family.clone()).or_insert(0) += 1;
    }
    counts
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Csv,
    Json,
    Plotdata,
}

fn fmt_cell(mean: Option<f64>, std: Option<f64>) -> String {
    match (mean, std) {
        (Some(m), Some(s)) => format!("{m:.1} / {s:.1}"),
        _ => "failed".to_string(),
    }
}

/// Write the report in one format; returns the files written. All
/// writes are atomic (temp file + rename).
pub fn emit_report(report: &BenchmarkReport, format: ReportFormat, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    match format {
        ReportFormat::Json => {
            let path = dir.join("report.json");
            let body = serde_json::to_string_pretty(report)?;
            crate::cache::write_atomic(&path, body.as_bytes())?;
            written.push(path);
        }
        ReportFormat::Csv => {
            // the classifier x feature-set aggregate grid
            let mut grid = String::new();
            grid.push_str("classifier");
            for set in &report.feature_sets {
                grid.push_str(&format!(",{}", set.name()));
            }
            grid.push_str(",best_group,second_group,delta_best_minus_second,delta_all_minus_best_group\n");
            for row in &report.aggregates {
                grid.push_str(&row.classifier);
                for s in &row.per_set {
                    grid.push_str(&format!(",{}", fmt_cell(s.mean, s.std)));
                }
                grid.push_str(&format!(
                    ",{},{},{},{}\n",
                    row.best_group.map_or_else(|| "-".into(), |s| s.name()),
                    row.second_group.map_or_else(|| "-".into(), |s| s.name()),
                    row.delta_best_minus_second
                        .map_or_else(|| "-".into(), |d| format!("{d:.2}")),
                    row.delta_all_minus_best_group
                        .map_or_else(|| "-".into(), |d| format!("{d:.2}")),
                ));
            }
            let path = dir.join("accuracy_grid.csv");
            crate::cache::write_atomic(&path, grid.as_bytes())?;
            written.push(path);

            // one per-dataset grid per classifier
            let per_dir = dir.join("per_dataset");
            std::fs::create_dir_all(&per_dir).map_err(|e| Error::io(&per_dir, e))?;
            for classifier in &report.classifiers {
                let mut body = String::from("dataset");
                for set in &report.feature_sets {
                    body.push_str(&format!(",{}", set.name()));
                }
                body.push('\n');
                for ds in &report.dataset_ids {
                    body.push_str(ds);
                    for &set in &report.feature_sets {
                        let text = match report.cell(ds, classifier, set) {
                            Some(cell) => match &cell.outcome {
                                CellOutcome::Ok { accuracy_pct, .. } => {
                                    format!("{accuracy_pct:.1}")
                                }
                                CellOutcome::Failed { .. } => "failed".to_string(),
                            },
                            None => "-".to_string(),
                        };
                        body.push_str(&format!(",{text}"));
                    }
                    body.push('\n');
                }
                let path = per_dir.join(format!("{classifier}.csv"));
                crate::cache::write_atomic(&path, body.as_bytes())?;
                written.push(path);
            }

            // histogram of selected descriptor families
            let mut body = String::from("classifier,family,count\n");
            for (classifier, families) in &report.family_distribution {
                for (family, count) in families {
                    body.push_str(&format!("{classifier},{family},{count}\n"));
                }
            }
            let path = dir.join("family_distribution.csv");
            crate::cache::write_atomic(&path, body.as_bytes())?;
            written.push(path);
        }
        ReportFormat::Plotdata => {
            let mut body = String::from("dataset,classifier,feature_set,accuracy_pct\n");
            for cell in &report.cells {
                if let CellOutcome::Ok { accuracy_pct, .. } = &cell.outcome {
                    body.push_str(&format!(
                        "{},{},{},{}\n",
                        cell.dataset,
                        cell.classifier,
                        cell.feature_set.name(),
                        accuracy_pct
                    ));
                }
            }
            let path = dir.join("plotdata.csv");
            crate::cache::write_atomic(&path, body.as_bytes())?;
            written.push(path);
        }
    }
    Ok(written)
}
