//! The benchmark driver: per dataset and classifier, select features
//! per group and across groups, then score the held-out third.
//!
//! The work is split into stages with serializable boundaries so the
//! CLI can cache each one: prepare (split + normalize), select (wrapper
//! searches), train (final models + held-out accuracy), assemble
//! (aggregation into the report). `run_benchmark` composes them all
//! in-process.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::classifiers::{self, ClassifierSpec, Samples, TrainedModel};
use crate::error::{Error, Result};
use crate::evaluation::report::{
    feature_family_distribution, BenchmarkReport, CellOutcome, CellResult, FeatureSet, ReportMeta,
};
use crate::evaluation::split::{drop_overlapping_test, make_split, SplitMode, SplitPlan};
use crate::features::{FeatureGroup, FeatureMatrix};
use crate::parallel::*;
use crate::rng::derive_seed;
use crate::selection::{
    select_across_groups, select_within_group, FeatureSubset, SelectionConfig, SelectionRecord,
    SubsetEvaluator,
};

/// One dataset ready for evaluation: raw (un-normalized) features plus
/// the window origins needed for overlap-aware splitting.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetInput {
    pub id: String,
    pub matrix: FeatureMatrix,
    /// (recording, start sample) per trial row.
    pub origins: Vec<(usize, usize)>,
    pub window_len: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct EvalConfig {
    pub train_ratio: f64,
    pub split_mode: SplitMode,
    /// Drop test windows that overlap training windows in time.
    pub drop_overlap: bool,
    pub selection: SelectionConfig,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            train_ratio: 2.0 / 3.0,
            split_mode: SplitMode::StratifiedRandom,
            drop_overlap: false,
            selection: SelectionConfig::default(),
        }
    }
}

/// Dataset after splitting and train-statistics normalization.
pub struct PreparedDataset {
    pub id: String,
    pub matrix: FeatureMatrix,
    pub plan: SplitPlan,
    pub groups: Vec<FeatureGroup>,
}

pub fn prepare_dataset(
    input: &DatasetInput,
    cfg: &EvalConfig,
    seed: u64,
) -> Result<PreparedDataset> {
    let mut plan = make_split(
        &input.matrix.labels,
        cfg.train_ratio,
        cfg.split_mode,
        derive_seed(seed, &["split", &input.id]),
    )?;
    if cfg.drop_overlap {
        drop_overlapping_test(&mut plan, &input.origins, input.window_len);
        if plan.test.is_empty() {
            return Err(Error::domain(format!(
                "dataset {}: overlap dropping removed every test window",
                input.id
            )));
        }
    }
    // z-score with training-population statistics only
    let mut matrix = input.matrix.clone();
    let norm = matrix.fit_normalization(&plan.train);
    matrix.apply_normalization(&norm)?;
    let groups: Vec<FeatureGroup> = FeatureGroup::ALL
        .into_iter()
        .filter(|g| !matrix.group_columns(*g).is_empty())
        .collect();
    Ok(PreparedDataset {
        id: input.id.clone(),
        matrix,
        plan,
        groups,
    })
}

/// Selection-stage output for one (dataset, classifier) pair: one entry
/// per feature set, either the chosen subset or the failure cause.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SelectionCell {
    pub feature_set: FeatureSet,
    pub result: std::result::Result<SelectionRecord, String>,
}

/// Run the wrapper searches for every feature set of one pair.
/// Failures are per-cell; one failed group never blocks the others.
pub fn select_stage(
    prep: &PreparedDataset,
    spec: &ClassifierSpec,
    cfg: &EvalConfig,
    seed: u64,
) -> Vec<SelectionCell> {
    let classifier = spec.kind.name().to_string();
    let evaluator = SubsetEvaluator::new(
        &prep.matrix,
        spec.clone(),
        cfg.selection.protocol,
        prep.plan.train.clone(),
        prep.plan.test.clone(),
        derive_seed(seed, &["wrapper", &prep.id, &classifier]),
    );
    let mut cells = Vec::new();
    let mut winners: Vec<FeatureSubset> = Vec::new();

    for &group in &prep.groups {
        let cell_seed = derive_seed(seed, &["cell", &prep.id, &classifier, group.name()]);
        let result =
            select_within_group(&prep.matrix, group, &evaluator, &cfg.selection, cell_seed)
                .map(|subset| {
                    let record = SelectionRecord::new(
                        &subset,
                        &prep.matrix,
                        Some(group),
                        cell_seed,
                        cfg.selection.protocol,
                    );
                    winners.push(subset);
                    record
                })
                .map_err(|e| e.to_string());
        cells.push(SelectionCell {
            feature_set: FeatureSet::Group(group),
            result,
        });
    }

    let all_seed = derive_seed(seed, &["cell", &prep.id, &classifier, "all"]);
    let result = if winners.is_empty() {
        Err("no group stage succeeded".to_string())
    } else {
        select_across_groups(&prep.matrix, &winners, &evaluator, &cfg.selection, all_seed)
            .map(|subset| {
                SelectionRecord::new(&subset, &prep.matrix, None, all_seed, cfg.selection.protocol)
            })
            .map_err(|e| e.to_string())
    };
    cells.push(SelectionCell {
        feature_set: FeatureSet::BestOfAll,
        result,
    });
    cells
}

/// Train the final model for one selected subset and score the held-out
/// rows. Returns the model for optional persistence.
pub fn train_final(
    prep: &PreparedDataset,
    spec: &ClassifierSpec,
    subset: &[usize],
    seed: u64,
) -> Result<(TrainedModel, f64)> {
    let gather = |rows: &[usize]| -> (Samples, Vec<u32>) {
        let mut x = Vec::with_capacity(rows.len() * subset.len());
        for &r in rows {
            let row = prep.matrix.row(r);
            for &c in subset {
                x.push(row[c]);
            }
        }
        (
            Samples {
                x,
                n: rows.len(),
                d: subset.len(),
            },
            rows.iter().map(|&r| prep.matrix.labels[r]).collect(),
        )
    };
    let (x_train, y_train) = gather(&prep.plan.train);
    let model = classifiers::train(spec, &x_train, &y_train, seed)?;
    let (x_test, y_test) = gather(&prep.plan.test);
    let pred = classifiers::predict(&model, &x_test)?;
    let acc = crate::evaluation::split::accuracy(&pred, &y_test)?;
    Ok((model, acc))
}

/// Turn selection-stage output into report cells (training stage).
pub fn train_stage(
    prep: &PreparedDataset,
    spec: &ClassifierSpec,
    selections: &[SelectionCell],
) -> Vec<CellResult> {
    let classifier = spec.kind.name().to_string();
    selections
        .iter()
        .map(|cell| {
            let outcome = match &cell.result {
                Ok(record) => {
                    match train_final(prep, spec, &record.indices, record.seed) {
                        Ok((_, accuracy_pct)) => CellOutcome::Ok {
                            accuracy_pct,
                            selection: record.clone(),
                        },
                        Err(e) => CellOutcome::Failed {
                            error: e.to_string(),
                        },
                    }
                }
                Err(e) => CellOutcome::Failed { error: e.clone() },
            };
            CellResult {
                dataset: prep.id.clone(),
                classifier: classifier.clone(),
                feature_set: cell.feature_set,
                outcome,
            }
        })
        .collect()
}

/// Aggregate cells from all pairs into the final report.
pub fn assemble_report(
    dataset_ids: Vec<String>,
    classifiers: &[ClassifierSpec],
    feature_sets: Vec<FeatureSet>,
    cells: Vec<CellResult>,
    descriptor_lookup: &dyn Fn(&str) -> Option<Vec<crate::features::FeatureDescriptor>>,
    seed: u64,
    config_echo: serde_json::Value,
) -> Result<BenchmarkReport> {
    // selected-family histogram per classifier, over all ok cells
    let mut family_distribution: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    for cell in &cells {
        if let CellOutcome::Ok { selection, .. } = &cell.outcome {
            let Some(descriptors) = descriptor_lookup(&cell.dataset) else {
                return Err(Error::structural(format!(
                    "no descriptors for dataset {}",
                    cell.dataset
                )));
            };
            let counts = feature_family_distribution(&selection.indices, &descriptors);
            let entry = family_distribution.entry(cell.classifier.clone()).or_default();
            for (family, count) in counts {
                *entry.entry(family).or_insert(0) += count;
            }
        }
    }

    let hyperparams: BTreeMap<String, crate::classifiers::Hyperparams> = classifiers
        .iter()
        .map(|s| (s.kind.name().to_string(), s.hyperparams.clone()))
        .collect();

    let mut report = BenchmarkReport {
        schema_version: 1,
        global_seed: seed,
        dataset_ids,
        classifiers: classifiers.iter().map(|s| s.kind.name().to_string()).collect(),
        feature_sets,
        cells,
        aggregates: Vec::new(),
        family_distribution,
        hyperparams,
        config_echo,
        meta: ReportMeta {
            generated_at: timestamp(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        },
    };
    report.aggregates = report.recompute_aggregates();
    report.verify_aggregates()?;
    Ok(report)
}

/// Run the full grid in-process: every dataset x classifier x feature
/// set. `config_echo` is embedded verbatim in the report so a run is
/// fully reproducible from its own output.
pub fn run_benchmark(
    inputs: &[DatasetInput],
    classifiers: &[ClassifierSpec],
    cfg: &EvalConfig,
    seed: u64,
    config_echo: serde_json::Value,
) -> Result<BenchmarkReport> {
    if inputs.is_empty() {
        return Err(Error::domain("benchmark needs at least one dataset"));
    }
    if classifiers.is_empty() {
        return Err(Error::domain("benchmark needs at least one classifier"));
    }
    let prepared: Vec<PreparedDataset> = inputs
        .iter()
        .map(|input| prepare_dataset(input, cfg, seed))
        .collect::<Result<_>>()?;

    // independent (dataset, classifier) jobs
    let jobs: Vec<(usize, usize)> = (0..prepared.len())
        .flat_map(|d| (0..classifiers.len()).map(move |c| (d, c)))
        .collect();
    let cell_blocks: Vec<Vec<CellResult>> = jobs
        .par_iter()
        .map(|&(d, c)| {
            let selections = select_stage(&prepared[d], &classifiers[c], cfg, seed);
            train_stage(&prepared[d], &classifiers[c], &selections)
        })
        .collect();
    let cells: Vec<CellResult> = cell_blocks.into_iter().flatten().collect();

    let feature_sets: Vec<FeatureSet> = prepared[0]
        .groups
        .iter()
        .map(|&g| FeatureSet::Group(g))
        .chain(std::iter::once(FeatureSet::BestOfAll))
        .collect();

    let lookup = |id: &str| -> Option<Vec<crate::features::FeatureDescriptor>> {
        prepared
            .iter()
            .find(|p| p.id == id)
            .map(|p| p.matrix.descriptors.clone())
    };
    assemble_report(
        inputs.iter().map(|i| i.id.clone()).collect(),
        classifiers,
        feature_sets,
        cells,
        &lookup,
        seed,
        config_echo,
    )
}

fn timestamp() -> String {
    let now = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("unix:{now}")
}
