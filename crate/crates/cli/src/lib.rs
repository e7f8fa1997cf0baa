//! Pipeline orchestration behind the `bcibench` binary: staged
//! execution (extract, select, train, report) with content-hashed
//! caches between stages, plus the synthetic-data generator.

use std::path::{Path, PathBuf};

use bcibench_core::cache;
use bcibench_core::config::{DatasetConfig, RunConfig};
use bcibench_core::error::Error as CoreError;
use bcibench_core::evaluation::{
    self, assemble_report, emit_report, prepare_dataset, select_stage, train_final, train_stage,
    BenchmarkReport, CellResult, DatasetInput, FeatureSet, ReportFormat, SelectionCell,
};
use bcibench_core::features::build_feature_matrix;
use bcibench_core::selection::WrapperProtocol;
use bcibench_core::signal::{
    bandpass, downsample, load_recording, relabel_for_pair, save_recording, segment,
    synth_recording, FileFormat, SynthSpec, Trial,
};

/// Exit codes fixed by the CLI contract.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Map a core error to the documented exit code.
pub fn exit_code_for(err: &CoreError) -> i32 {
    match err {
        CoreError::Config { .. } | CoreError::Serde(_) => EXIT_CONFIG,
        CoreError::Io { .. } | CoreError::CacheVersion { .. } | CoreError::MalformedInput { .. } => {
            EXIT_IO
        }
        _ => EXIT_FAILURE,
    }
}

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub paper_faithful: bool,
    pub output_dir: Option<PathBuf>,
}

/// Read and validate a config file, applying CLI/env overrides.
pub fn load_config(path: &Path, overrides: &Overrides) -> Result<RunConfig, CoreError> {
    let text = std::fs::read_to_string(path).map_err(|e| CoreError::io(path, e))?;
    let mut cfg = RunConfig::from_json(&text)?;
    if let Some(seed) = overrides.seed {
        cfg.seed = seed;
    }
    if overrides.paper_faithful {
        cfg.evaluation.selection.protocol = WrapperProtocol::PaperFaithful;
    }
    if let Some(dir) = &overrides.output_dir {
        cfg.output_dir = dir.clone();
    } else if let Ok(dir) = std::env::var("BCIBENCH_OUTPUT_DIR") {
        if !dir.is_empty() {
            cfg.output_dir = PathBuf::from(dir);
        }
    }
    Ok(cfg)
}

fn cache_dir(cfg: &RunConfig) -> PathBuf {
    cfg.output_dir.join("cache")
}

fn feature_cache_path(cfg: &RunConfig, ds: &DatasetConfig) -> PathBuf {
    cache_dir(cfg).join(format!("features_{}.feat", ds.id))
}

fn selection_cache_path(cfg: &RunConfig, ds_id: &str, classifier: &str) -> PathBuf {
    cache_dir(cfg).join(format!("selection_{ds_id}_{classifier}.json"))
}

fn cells_cache_path(cfg: &RunConfig, ds_id: &str, classifier: &str) -> PathBuf {
    cache_dir(cfg).join(format!("cells_{ds_id}_{classifier}.json"))
}

/// Outcome of one stage over one unit of work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageStatus {
    Computed,
    CacheHit,
}

/// Build (or reuse) the feature cache for every dataset. Returns per
/// dataset: (input, extraction hash, status).
pub fn cmd_extract(
    cfg: &RunConfig,
) -> Result<Vec<(DatasetInput, String, StageStatus)>, CoreError> {
    let mut out = Vec::new();
    for ds in &cfg.datasets {
        let source_hashes: Vec<String> = ds
            .paths
            .iter()
            .map(|p| cache::hash_file(p))
            .collect::<Result<_, _>>()?;
        let input_hash = cfg.extraction_hash(ds, &source_hashes)?;
        let path = feature_cache_path(cfg, ds);
        if path.exists() {
            match cache::load_feature_cache(&path) {
                Ok((input, stored_hash)) if stored_hash == input_hash => {
                    out.push((input, input_hash, StageStatus::CacheHit));
                    continue;
                }
                Ok(_) => {} // stale: recompute below
                Err(e @ CoreError::CacheVersion { .. }) => return Err(e),
                Err(_) => {} // unreadable: recompute
            }
        }
        let input = extract_dataset(cfg, ds)?;
        cache::save_feature_cache(&path, &input, &input_hash)?;
        out.push((input, input_hash, StageStatus::Computed));
    }
    Ok(out)
}

/// Load, preprocess, window, and extract one dataset.
fn extract_dataset(cfg: &RunConfig, ds: &DatasetConfig) -> Result<DatasetInput, CoreError> {
    let opts = ds.load_options();
    let p = &cfg.preprocessing;
    let mut trials: Vec<Trial> = Vec::new();
    for (rec_idx, path) in ds.paths.iter().enumerate() {
        let raw = load_recording(path, &opts)?;
        let filtered = bandpass(&raw, p.band_low_hz, p.band_high_hz)?;
        let decimated = downsample(&filtered, p.target_fs_hz)?;
        let mut windows = segment(&decimated, p.window_s, p.hop_s)?;
        for t in windows.iter_mut() {
            t.origin.0 = rec_idx;
        }
        trials.extend(windows);
    }
    let trials = relabel_for_pair(trials, ds.task_pair);
    if trials.is_empty() {
        return Err(CoreError::domain(format!(
            "dataset {}: no trials match task pair {:?}",
            ds.id, ds.task_pair
        )));
    }
    let window_len = trials[0].window_len();
    let origins = trials.iter().map(|t| t.origin).collect();
    let matrix = build_feature_matrix(&trials, &cfg.features)?;
    Ok(DatasetInput {
        id: ds.id.clone(),
        matrix,
        origins,
        window_len,
    })
}

/// Wrapper searches for every (dataset, classifier), cached.
pub fn cmd_select(
    cfg: &RunConfig,
) -> Result<Vec<(String, String, Vec<SelectionCell>, StageStatus)>, CoreError> {
    let features = cmd_extract(cfg)?;
    let mut out = Vec::new();
    for (input, feat_hash, _) in &features {
        let prep = prepare_dataset(input, &cfg.evaluation, cfg.seed)?;
        for spec in &cfg.classifiers {
            let classifier = spec.kind.name().to_string();
            let input_hash =
                cache::hash_of(&(feat_hash, &cfg.evaluation, spec, cfg.seed))?;
            let path = selection_cache_path(cfg, &input.id, &classifier);
            if let Some((cells, stored)) =
                cache::load_stage::<Vec<SelectionCell>>(&path)?
            {
                if stored == input_hash {
                    out.push((input.id.clone(), classifier, cells, StageStatus::CacheHit));
                    continue;
                }
            }
            let cells = select_stage(&prep, spec, &cfg.evaluation, cfg.seed);
            cache::save_stage(&path, &input_hash, &cells)?;
            out.push((input.id.clone(), classifier, cells, StageStatus::Computed));
        }
    }
    Ok(out)
}

/// Final model training per selected subset, cached; writes model files.
pub fn cmd_train(cfg: &RunConfig) -> Result<Vec<(CellResult, StageStatus)>, CoreError> {
    let features = cmd_extract(cfg)?;
    let selections = cmd_select(cfg)?;
    let models_dir = cfg.output_dir.join("models");
    let mut out = Vec::new();
    for (input, feat_hash, _) in &features {
        let prep = prepare_dataset(input, &cfg.evaluation, cfg.seed)?;
        for spec in &cfg.classifiers {
            let classifier = spec.kind.name().to_string();
            let cells_for_pair: &Vec<SelectionCell> = selections
                .iter()
                .find(|(ds, clf, _, _)| ds == &input.id && clf == &classifier)
                .map(|(_, _, cells, _)| cells)
                .ok_or_else(|| {
                    CoreError::structural(format!(
                        "selection output missing for {} / {classifier}; regenerate upstream",
                        input.id
                    ))
                })?;
            let input_hash =
                cache::hash_of(&(feat_hash, &cfg.evaluation, spec, cfg.seed, cells_for_pair))?;
            let path = cells_cache_path(cfg, &input.id, &classifier);
            if let Some((cells, stored)) = cache::load_stage::<Vec<CellResult>>(&path)? {
                if stored == input_hash {
                    out.extend(cells.into_iter().map(|c| (c, StageStatus::CacheHit)));
                    continue;
                }
            }
            let cells = train_stage(&prep, spec, cells_for_pair);
            // persist final models alongside the cells
            for cell in &cells {
                if let evaluation::CellOutcome::Ok { selection, .. } = &cell.outcome {
                    if let Ok((model, _)) =
                        train_final(&prep, spec, &selection.indices, selection.seed)
                    {
                        let name = format!(
                            "{}_{}_{}.json",
                            input.id,
                            classifier,
                            cell.feature_set.name()
                        );
                        let body = serde_json::to_string_pretty(&model)?;
                        cache::write_atomic(&models_dir.join(name), body.as_bytes())?;
                    }
                }
            }
            cache::save_stage(&path, &input_hash, &cells)?;
            out.extend(cells.into_iter().map(|c| (c, StageStatus::Computed)));
        }
    }
    Ok(out)
}

/// Merge all cells into the report and emit every format.
pub fn cmd_report(cfg: &RunConfig) -> Result<BenchmarkReport, CoreError> {
    let features = cmd_extract(cfg)?;
    let cells: Vec<CellResult> = cmd_train(cfg)?.into_iter().map(|(c, _)| c).collect();

    // column order: groups present in the first dataset, then best-of-all
    let first_prep = prepare_dataset(&features[0].0, &cfg.evaluation, cfg.seed)?;
    let feature_sets: Vec<FeatureSet> = first_prep
        .groups
        .iter()
        .map(|&g| FeatureSet::Group(g))
        .chain(std::iter::once(FeatureSet::BestOfAll))
        .collect();

    let lookup = |id: &str| {
        features
            .iter()
            .find(|(input, _, _)| input.id == id)
            .map(|(input, _, _)| input.matrix.descriptors.clone())
    };
    let report = assemble_report(
        cfg.datasets.iter().map(|d| d.id.clone()).collect(),
        &cfg.classifiers,
        feature_sets,
        cells,
        &lookup,
        cfg.seed,
        serde_json::to_value(cfg)?,
    )?;

    let report_dir = cfg.output_dir.join("report");
    emit_report(&report, ReportFormat::Json, &report_dir)?;
    emit_report(&report, ReportFormat::Csv, &report_dir)?;
    emit_report(&report, ReportFormat::Plotdata, &report_dir)?;
    Ok(report)
}

/// Full pipeline. Returns the report and whether any cell failed.
pub fn cmd_run(cfg: &RunConfig) -> Result<(BenchmarkReport, bool), CoreError> {
    let report = cmd_report(cfg)?;
    let any_failed = report
        .cells
        .iter()
        .any(|c| matches!(c.outcome, evaluation::CellOutcome::Failed { .. }));
    Ok((report, any_failed))
}

/// Generate dataset files from a synthetic spec. One CSV per count,
/// with derived seeds; byte-identical across reruns.
pub fn cmd_synth(
    spec_path: &Path,
    seed: u64,
    out_dir: &Path,
    count: usize,
) -> Result<Vec<PathBuf>, CoreError> {
    let text = std::fs::read_to_string(spec_path).map_err(|e| CoreError::io(spec_path, e))?;
    let spec: SynthSpec = serde_json::from_str(&text)?;
    spec.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|e| CoreError::io(out_dir, e))?;
    let mut written = Vec::new();
    for i in 0..count.max(1) {
        let session_seed = bcibench_core_seed(seed, i);
        let rec = synth_recording(&spec, session_seed)?;
        let path = out_dir.join(format!("synth_{seed}_{i}.csv"));
        save_recording(&path, &rec, FileFormat::Csv)?;
        written.push(path);
    }
    Ok(written)
}

fn bcibench_core_seed(seed: u64, session: usize) -> u64 {
    // sessions get distinct but reproducible seeds
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(session as u64)
}

/// Configure the global thread pool. No-op without the parallel
/// feature or when the pool was already built.
pub fn configure_jobs(jobs: Option<usize>) {
    #[cfg(feature = "parallel")]
    if let Some(n) = jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = jobs;
}
