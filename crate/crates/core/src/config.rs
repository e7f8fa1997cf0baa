//! Run configuration: one JSON file drives the whole pipeline.
//!
//! Defaults resolve to the standard protocol values: 0.5-45 Hz band,
//! 128 Hz target rate, 1 s windows with 0.5 s hop, a 200-feature
//! shortlist, top 20 within a group, top 25 across groups (5 for
//! ANFIS), and a 2/3 training split.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::classifiers::{ClassifierKind, ClassifierSpec};
use crate::error::{Error, Result};
use crate::evaluation::EvalConfig;
use crate::features::FeatureConfig;
use crate::signal::{FileFormat, LoadOptions};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DatasetConfig {
    pub id: String,
    pub paths: Vec<PathBuf>,
    #[serde(default = "default_format")]
    pub format: FileFormat,
    /// Sampling rate of the source files.
    pub fs: f64,
    #[serde(default)]
    pub has_header: bool,
    /// Zero-based column carrying per-sample task labels.
    pub label_column: usize,
    /// The two task ids mapped to classes 0 and 1.
    pub task_pair: (u32, u32),
}

fn default_format() -> FileFormat {
    FileFormat::Csv
}

impl DatasetConfig {
    pub fn load_options(&self) -> LoadOptions {
        LoadOptions {
            format: self.format,
            fs: self.fs,
            has_header: self.has_header,
            label_column: Some(self.label_column),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct PreprocessConfig {
    pub band_low_hz: f64,
    pub band_high_hz: f64,
    pub target_fs_hz: f64,
    pub window_s: f64,
    pub hop_s: f64,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            band_low_hz: 0.5,
            band_high_hz: 45.0,
            target_fs_hz: 128.0,
            window_s: 1.0,
            hop_s: 0.5,
        }
    }
}

fn default_classifiers() -> Vec<ClassifierSpec> {
    ClassifierKind::ALL.into_iter().map(ClassifierSpec::new).collect()
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("bcibench-out")
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    pub datasets: Vec<DatasetConfig>,
    #[serde(default)]
    pub preprocessing: PreprocessConfig,
    #[serde(default)]
    pub features: FeatureConfig,
    #[serde(default)]
    pub evaluation: EvalConfig,
    #[serde(default = "default_classifiers")]
    pub classifiers: Vec<ClassifierSpec>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() {
            return Err(Error::config("datasets", "at least one dataset required"));
        }
        for (i, ds) in self.datasets.iter().enumerate() {
            let field = |name: &str| format!("datasets[{i}].{name}");
            if ds.id.is_empty() {
                return Err(Error::config(field("id"), "must be non-empty"));
            }
            if ds.id.contains(['/', '\\', ' ']) {
                return Err(Error::config(
                    field("id"),
                    "must not contain path separators or spaces",
                ));
            }
            if ds.paths.is_empty() {
                return Err(Error::config(field("paths"), "at least one recording path"));
            }
            if !(ds.fs > 0.0) {
                return Err(Error::config(field("fs"), "sampling rate must be positive"));
            }
            if ds.task_pair.0 == ds.task_pair.1 {
                return Err(Error::config(
                    field("task_pair"),
                    "task pair must name two distinct tasks",
                ));
            }
        }
        if self
            .datasets
            .iter()
            .enumerate()
            .any(|(i, a)| self.datasets[..i].iter().any(|b| b.id == a.id))
        {
            return Err(Error::config("datasets", "dataset ids must be unique"));
        }

        let p = &self.preprocessing;
        if !(p.band_low_hz > 0.0 && p.band_low_hz < p.band_high_hz) {
            return Err(Error::config(
                "preprocessing.band_low_hz/band_high_hz",
                "need 0 < low < high",
            ));
        }
        if !(p.target_fs_hz > 2.0 * p.band_high_hz) {
            return Err(Error::config(
                "preprocessing.target_fs_hz",
                "target rate must exceed twice the band's high edge",
            ));
        }
        if !(p.window_s > 0.0 && p.hop_s > 0.0 && p.hop_s <= p.window_s) {
            return Err(Error::config(
                "preprocessing.window_s/hop_s",
                "need window > 0 and 0 < hop <= window",
            ));
        }

        let e = &self.evaluation;
        if !(e.train_ratio > 0.0 && e.train_ratio < 1.0) {
            return Err(Error::config("evaluation.train_ratio", "must be in (0, 1)"));
        }
        let s = &e.selection;
        if s.shortlist == 0 || s.k_within == 0 || s.k_across == 0 || s.k_anfis == 0 {
            return Err(Error::config(
                "evaluation.selection",
                "shortlist and subset sizes must be >= 1",
            ));
        }
        if s.ga.population < 4 {
            return Err(Error::config(
                "evaluation.selection.ga.population",
                "must be >= 4",
            ));
        }

        if self.classifiers.is_empty() {
            return Err(Error::config("classifiers", "at least one classifier required"));
        }
        for spec in &self.classifiers {
            spec.validate()?;
        }
        if self
            .classifiers
            .iter()
            .enumerate()
            .any(|(i, a)| self.classifiers[..i].iter().any(|b| b.kind == a.kind))
        {
            return Err(Error::config("classifiers", "classifier kinds must be unique"));
        }
        Ok(())
    }

    /// Hash of everything that influences feature extraction for one
    /// dataset (source bytes are hashed separately).
    pub fn extraction_hash(&self, ds: &DatasetConfig, source_hashes: &[String]) -> Result<String> {
        crate::cache::hash_of(&(ds, &self.preprocessing, &self.features, source_hashes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> String {
        r#"{
            "datasets": [
                {"id": "ds1", "paths": ["a.csv"], "fs": 512.0, "label_column": 4, "task_pair": [1, 2]}
            ]
        }"#
        .to_string()
    }

    #[test]
    fn minimal_config_fills_protocol_defaults() {
        let cfg = RunConfig::from_json(&minimal_json()).unwrap();
        assert_eq!(cfg.preprocessing.band_low_hz, 0.5);
        assert_eq!(cfg.preprocessing.band_high_hz, 45.0);
        assert_eq!(cfg.preprocessing.target_fs_hz, 128.0);
        assert_eq!(cfg.preprocessing.window_s, 1.0);
        assert_eq!(cfg.preprocessing.hop_s, 0.5);
        assert_eq!(cfg.evaluation.selection.shortlist, 200);
        assert_eq!(cfg.evaluation.selection.k_within, 20);
        assert_eq!(cfg.evaluation.selection.k_across, 25);
        assert_eq!(cfg.evaluation.selection.k_anfis, 5);
        assert!((cfg.evaluation.train_ratio - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(cfg.classifiers.len(), 12);
    }

    #[test]
    fn invalid_fields_name_the_field() {
        let bad = r#"{"datasets": [
            {"id": "ds1", "paths": [], "fs": 512.0, "label_column": 0, "task_pair": [1, 2]}
        ]}"#;
        let err = RunConfig::from_json(bad).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("datasets[0].paths"), "{text}");

        let bad = r#"{"datasets": [
            {"id": "ds1", "paths": ["a"], "fs": 512.0, "label_column": 0, "task_pair": [2, 2]}
        ]}"#;
        assert!(RunConfig::from_json(bad)
            .unwrap_err()
            .to_string()
            .contains("task_pair"));
    }

    #[test]
    fn config_echo_roundtrips() {
        let cfg = RunConfig::from_json(&minimal_json()).unwrap();
        let echo = serde_json::to_string(&cfg).unwrap();
        let back = RunConfig::from_json(&echo).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn extraction_hash_tracks_inputs() {
        let cfg = RunConfig::from_json(&minimal_json()).unwrap();
        let h1 = cfg
            .extraction_hash(&cfg.datasets[0], &["s1".into()])
            .unwrap();
        let h2 = cfg
            .extraction_hash(&cfg.datasets[0], &["s2".into()])
            .unwrap();
        assert_ne!(h1, h2);

        let mut cfg2 = cfg.clone();
        cfg2.preprocessing.band_high_hz = 40.0;
        let h3 = cfg2
            .extraction_hash(&cfg2.datasets[0], &["s1".into()])
            .unwrap();
        assert_ne!(h1, h3);
    }
}
