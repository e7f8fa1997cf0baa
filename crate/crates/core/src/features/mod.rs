//! The six classical feature groups and the feature matrix.
//!
//! Group 1 statistics (moments, cumulants, correlation, form factor,
//! variance), group 2 entropies (Shannon/Renyi/Tsallis, Lempel-Ziv,
//! approximate entropy, neural complexity), group 3 AR coefficients,
//! group 4 band energies, group 5 DCT/DST coefficients, group 6 wavelet
//! coefficients. Every emitted column carries a [`FeatureDescriptor`]
//! identifying exactly what was computed and from which channels.

pub mod ar;
pub mod energy;
pub mod entropy;
pub mod statistics;
pub mod transforms;
pub mod wavelet;

mod spectrum;

pub use ar::fit_ar;
pub use energy::band_energy;
pub use entropy::extract_entropy;
pub use statistics::extract_statistics;
pub use transforms::dct_dst;
pub use wavelet::wavelet_coeffs;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel::*;
use crate::signal::Trial;

/// The six classical feature groups, in report order.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum FeatureGroup {
    Statistic,
    Entropy,
    Ar,
    Energy,
    DctDst,
    Wavelet,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 6] = [
        FeatureGroup::Statistic,
        FeatureGroup::Entropy,
        FeatureGroup::Ar,
        FeatureGroup::Energy,
        FeatureGroup::DctDst,
        FeatureGroup::Wavelet,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FeatureGroup::Statistic => "statistic",
            FeatureGroup::Entropy => "entropy",
            FeatureGroup::Ar => "ar",
            FeatureGroup::Energy => "energy",
            FeatureGroup::DctDst => "dct_dst",
            FeatureGroup::Wavelet => "wavelet",
        }
    }
}

/// Identity of one feature column: what was computed, over which
/// channels, with which parameters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FeatureDescriptor {
    pub group: FeatureGroup,
    /// e.g. "moment", "correlation", "renyi", "ar_coef", "band_energy",
    /// "dct", "db3".
    pub family: String,
    pub channels: Vec<usize>,
    /// Ordered key=value parameters ("order=3", "q=2", "band=8-13").
    pub params: Vec<(String, String)>,
}

impl FeatureDescriptor {
    pub fn new(
        group: FeatureGroup,
        family: &str,
        channels: Vec<usize>,
        params: &[(&str, String)],
    ) -> Self {
        FeatureDescriptor {
            group,
            family: family.to_string(),
            channels,
            params: params
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
        }
    }

    /// Compact text form used in cache headers and reports.
    pub fn label(&self) -> String {
        let chans = self
            .channels
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let params = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(",");
        format!("{}:{}[{}]{{{}}}", self.group.name(), self.family, chans, params)
    }
}

/// Shape information shared by all trials of a dataset; descriptor
/// layouts depend only on this and the config, never on sample values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialShape {
    pub n_channels: usize,
    pub window_len: usize,
    pub fs: f64,
}

impl TrialShape {
    pub fn of(trial: &Trial) -> Self {
        TrialShape {
            n_channels: trial.n_channels(),
            window_len: trial.window_len(),
            fs: trial.fs,
        }
    }
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

fn default_groups() -> BTreeSet<FeatureGroup> {
    FeatureGroup::ALL.into_iter().collect()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct StatisticsConfig {
    /// Random sample sizes for 3- and 4-channel cumulants; all pairs are
    /// always included.
    pub cumulant_triples: usize,
    pub cumulant_quads: usize,
    pub seed: u64,
}

impl Default for StatisticsConfig {
    fn default() -> Self {
        StatisticsConfig {
            cumulant_triples: 200,
            cumulant_quads: 100,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct EntropyConfig {
    /// Orders for Renyi and Tsallis entropies; 1 is excluded (Shannon).
    pub q_grid: Vec<f64>,
    pub histogram_bins: usize,
    pub apen_m: usize,
    /// Tolerance r = apen_r_mult * channel std.
    pub apen_r_mult: f64,
}

impl Default for EntropyConfig {
    fn default() -> Self {
        EntropyConfig {
            q_grid: vec![-5.0, -2.0, -1.0, 0.5, 1.5, 2.0, 3.0, 5.0],
            histogram_bins: 64,
            apen_m: 2,
            apen_r_mult: 0.2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct ArConfig {
    pub orders: Vec<usize>,
}

impl Default for ArConfig {
    fn default() -> Self {
        ArConfig {
            orders: vec![4, 8, 16, 32],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct EnergyConfig {
    /// The four classic EEG bands by default.
    pub bands: Vec<(f64, f64)>,
    /// Contiguous fine bins of this width tiled over `fine_range`.
    pub fine_bin_hz: f64,
    pub fine_range: (f64, f64),
}

impl Default for EnergyConfig {
    fn default() -> Self {
        EnergyConfig {
            bands: vec![(0.5, 4.0), (4.0, 8.0), (8.0, 13.0), (13.0, 22.0)],
            fine_bin_hz: 2.0,
            fine_range: (0.5, 45.0),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct DctDstConfig {
    /// Number of leading coefficients kept per transform.
    pub k: usize,
}

impl Default for DctDstConfig {
    fn default() -> Self {
        DctDstConfig { k: 32 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct WaveletConfig {
    pub families: Vec<wavelet::WaveletFamily>,
    pub levels: usize,
}

impl Default for WaveletConfig {
    fn default() -> Self {
        WaveletConfig {
            families: vec![
                wavelet::WaveletFamily::Haar,
                wavelet::WaveletFamily::Db2,
                wavelet::WaveletFamily::Db3,
                wavelet::WaveletFamily::Db4,
                wavelet::WaveletFamily::Db5,
            ],
            levels: 4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct FeatureConfig {
    pub groups: BTreeSet<FeatureGroup>,
    pub statistics: StatisticsConfig,
    pub entropy: EntropyConfig,
    pub ar: ArConfig,
    pub energy: EnergyConfig,
    pub dct_dst: DctDstConfig,
    pub wavelet: WaveletConfig,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            groups: default_groups(),
            statistics: StatisticsConfig::default(),
            entropy: EntropyConfig::default(),
            ar: ArConfig::default(),
            energy: EnergyConfig::default(),
            dct_dst: DctDstConfig::default(),
            wavelet: WaveletConfig::default(),
        }
    }
}

// ---------------------------------------------------------------------------
// Feature matrix
// ---------------------------------------------------------------------------

/// Per-column normalization state.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub enum Normalization {
    Raw,
    /// Population (1/n) statistics of the fitting rows; columns with
    /// std 0 are mapped to all-zeros and keep std 0 here.
    Zscore { means: Vec<f64>, stds: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FeatureMatrix {
    /// Row-major `[trial][feature]`.
    pub values: Vec<f64>,
    pub n_rows: usize,
    pub n_cols: usize,
    pub descriptors: Vec<FeatureDescriptor>,
    pub labels: Vec<u32>,
    pub normalization: Normalization,
    /// Count of degenerate fallbacks (zero-variance channels etc.)
    /// encountered during extraction.
    pub degenerate_cells: usize,
}

impl FeatureMatrix {
    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.n_cols..(r + 1) * self.n_cols]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.n_rows).map(|r| self.values[r * self.n_cols + c]).collect()
    }

    /// Indices of columns belonging to one group.
    pub fn group_columns(&self, group: FeatureGroup) -> Vec<usize> {
        self.descriptors
            .iter()
            .enumerate()
            .filter(|(_, d)| d.group == group)
            .map(|(i, _)| i)
            .collect()
    }

    /// Fit z-score parameters on the given rows (population std).
    pub fn fit_normalization(&self, rows: &[usize]) -> Normalization {
        let n = rows.len().max(1) as f64;
        let mut means = vec![0.0; self.n_cols];
        let mut stds = vec![0.0; self.n_cols];
        for &r in rows {
            for (c, v) in self.row(r).iter().enumerate() {
                means[c] += v;
            }
        }
        for m in means.iter_mut() {
            *m /= n;
        }
        for &r in rows {
            for (c, v) in self.row(r).iter().enumerate() {
                stds[c] += (v - means[c]).powi(2);
            }
        }
        for s in stds.iter_mut() {
            *s = (*s / n).sqrt();
        }
        Normalization::Zscore { means, stds }
    }

    /// Apply previously fitted parameters to every row.
    pub fn apply_normalization(&mut self, norm: &Normalization) -> Result<()> {
        let Normalization::Zscore { means, stds } = norm else {
            return Ok(());
        };
        if means.len() != self.n_cols {
            return Err(Error::structural(format!(
                "normalization has {} columns, matrix has {}",
                means.len(),
                self.n_cols
            )));
        }
        for r in 0..self.n_rows {
            let row = &mut self.values[r * self.n_cols..(r + 1) * self.n_cols];
            for c in 0..self.n_cols {
                row[c] = if stds[c] > 0.0 {
                    (row[c] - means[c]) / stds[c]
                } else {
                    0.0
                };
            }
        }
        self.normalization = norm.clone();
        Ok(())
    }

    /// Z-score in place using all rows as the fitting population.
    pub fn normalize(&mut self) -> Result<()> {
        let rows: Vec<usize> = (0..self.n_rows).collect();
        let norm = self.fit_normalization(&rows);
        self.apply_normalization(&norm)
    }
}

/// Descriptor layout for the enabled groups: the exact column order
/// `build_feature_matrix` produces.
pub fn descriptor_layout(shape: TrialShape, cfg: &FeatureConfig) -> Vec<FeatureDescriptor> {
    let mut out = Vec::new();
    for group in FeatureGroup::ALL {
        if !cfg.groups.contains(&group) {
            continue;
        }
        match group {
            FeatureGroup::Statistic => statistics::descriptors(shape, &cfg.statistics, &mut out),
            FeatureGroup::Entropy => entropy::descriptors(shape, &cfg.entropy, &mut out),
            FeatureGroup::Ar => ar::descriptors(shape, &cfg.ar, &mut out),
            FeatureGroup::Energy => energy::descriptors(shape, &cfg.energy, &mut out),
            FeatureGroup::DctDst => transforms::descriptors(shape, &cfg.dct_dst, &mut out),
            FeatureGroup::Wavelet => wavelet::descriptors(shape, &cfg.wavelet, &mut out),
        }
    }
    out
}

/// Extract one trial's feature row in layout order.
pub fn extract_row(trial: &Trial, cfg: &FeatureConfig) -> Result<(Vec<f64>, usize)> {
    let mut values = Vec::new();
    let mut degenerate = 0usize;
    for group in FeatureGroup::ALL {
        if !cfg.groups.contains(&group) {
            continue;
        }
        match group {
            FeatureGroup::Statistic => {
                statistics::extract(trial, &cfg.statistics, &mut values, &mut degenerate)?
            }
            FeatureGroup::Entropy => {
                entropy::extract(trial, &cfg.entropy, &mut values, &mut degenerate)?
            }
            FeatureGroup::Ar => ar::extract(trial, &cfg.ar, &mut values, &mut degenerate)?,
            FeatureGroup::Energy => energy::extract(trial, &cfg.energy, &mut values)?,
            FeatureGroup::DctDst => transforms::extract(trial, &cfg.dct_dst, &mut values)?,
            FeatureGroup::Wavelet => wavelet::extract(trial, &cfg.wavelet, &mut values)?,
        }
    }
    Ok((values, degenerate))
}

/// Build the full matrix: one row per trial, columns in deterministic
/// (group, family, channels, params) layout order. Rows are extracted
/// in parallel; output is independent of scheduling.
pub fn build_feature_matrix(trials: &[Trial], cfg: &FeatureConfig) -> Result<FeatureMatrix> {
    if trials.is_empty() {
        return Err(Error::structural("no trials to extract features from"));
    }
    let shape = TrialShape::of(&trials[0]);
    if trials
        .iter()
        .any(|t| TrialShape::of(t) != shape)
    {
        return Err(Error::structural("trials have inconsistent shapes"));
    }
    let descriptors = descriptor_layout(shape, cfg);
    if descriptors.is_empty() {
        return Err(Error::structural("no feature groups enabled"));
    }

    let rows: Vec<Result<(Vec<f64>, usize)>> = trials
        .par_iter()
        .map(|t| extract_row(t, cfg))
        .collect();

    let n_cols = descriptors.len();
    let mut values = Vec::with_capacity(trials.len() * n_cols);
    let mut degenerate_cells = 0usize;
    for row in rows {
        let (v, deg) = row?;
        if v.len() != n_cols {
            return Err(Error::structural(format!(
                "extractor produced {} values for a {}-column layout",
                v.len(),
                n_cols
            )));
        }
        if let Some(bad) = v.iter().position(|x| !x.is_finite()) {
            return Err(Error::structural(format!(
                "non-finite value in column {} ({})",
                bad,
                descriptors[bad].label()
            )));
        }
        degenerate_cells += deg;
        values.extend_from_slice(&v);
    }

    Ok(FeatureMatrix {
        values,
        n_rows: trials.len(),
        n_cols,
        descriptors,
        labels: trials.iter().map(|t| t.label).collect(),
        normalization: Normalization::Raw,
        degenerate_cells,
    })
}


#[cfg(test)]
mod tests {
    use super::*;
    use test_util::*;

    #[test]
    fn layout_matches_extraction_width() {
        let trial = noise_trial(3, 64, 128.0, 5);
        let mut cfg = FeatureConfig::default();
        cfg.ar.orders = vec![4, 8];
        cfg.wavelet.levels = 3;
        let layout = descriptor_layout(TrialShape::of(&trial), &cfg);
        let (row, _) = extract_row(&trial, &cfg).unwrap();
        assert_eq!(layout.len(), row.len());
    }

    #[test]
    fn descriptors_are_unique() {
        let trial = noise_trial(4, 128, 128.0, 5);
        let layout = descriptor_layout(TrialShape::of(&trial), &FeatureConfig::default());
        let mut seen = std::collections::HashSet::new();
        for d in &layout {
            assert!(seen.insert(d.label()), "duplicate descriptor {}", d.label());
        }
    }

    #[test]
    fn build_is_deterministic_and_rejects_empty() {
        let trials: Vec<_> = (0..6).map(|i| noise_trial(2, 64, 128.0, i)).collect();
        let mut cfg = FeatureConfig::default();
        cfg.groups = [FeatureGroup::Energy, FeatureGroup::Statistic].into_iter().collect();
        let a = build_feature_matrix(&trials, &cfg).unwrap();
        let b = build_feature_matrix(&trials, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n_rows, 6);
        assert!(build_feature_matrix(&[], &cfg).is_err());
    }

    #[test]
    fn inconsistent_shapes_rejected() {
        let t1 = noise_trial(2, 64, 128.0, 1);
        let t2 = noise_trial(2, 32, 128.0, 2);
        let cfg = FeatureConfig::default();
        assert!(build_feature_matrix(&[t1, t2], &cfg).is_err());
    }

    #[test]
    fn zscore_normalization_contract() {
        let col = |m: &FeatureMatrix, c: usize| m.column(c);
        let trials: Vec<_> = (0..8).map(|i| noise_trial(2, 64, 128.0, 100 + i)).collect();
        let mut cfg = FeatureConfig::default();
        cfg.groups = [FeatureGroup::Energy].into_iter().collect();
        let mut m = build_feature_matrix(&trials, &cfg).unwrap();
        m.normalize().unwrap();
        for c in 0..m.n_cols {
            let v = col(&m, c);
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let std = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64).sqrt();
            assert!(mean.abs() < 1e-9, "col {c} mean {mean}");
            assert!(
                (std - 1.0).abs() < 1e-9 || std == 0.0,
                "col {c} std {std}"
            );
        }
    }

    #[test]
    fn constant_column_normalizes_to_zero() {
        let trials: Vec<_> = (0..4).map(|_| constant_trial(1, 64, 128.0, 5.0)).collect();
        let mut cfg = FeatureConfig::default();
        cfg.groups = [FeatureGroup::Statistic].into_iter().collect();
        let mut m = build_feature_matrix(&trials, &cfg).unwrap();
        m.normalize().unwrap();
        assert!(m.values.iter().all(|&v| v == 0.0));
        let Normalization::Zscore { stds, .. } = &m.normalization else {
            panic!("not normalized")
        };
        assert!(stds.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn train_statistics_transfer_to_held_out_rows() {
        let trials: Vec<_> = (0..10).map(|i| noise_trial(2, 64, 128.0, 50 + i)).collect();
        let mut cfg = FeatureConfig::default();
        cfg.groups = [FeatureGroup::Energy].into_iter().collect();
        let full = build_feature_matrix(&trials, &cfg).unwrap();

        // normalize train rows only, apply to everything
        let train_rows: Vec<usize> = (0..7).collect();
        let norm = full.fit_normalization(&train_rows);
        let mut both = full.clone();
        both.apply_normalization(&norm).unwrap();

        // independently: the transform of a held-out row must use train
        // statistics, not its own
        let Normalization::Zscore { means, stds } = &norm else { unreachable!() };
        let r = 9usize;
        for c in 0..full.n_cols {
            let expect = if stds[c] > 0.0 {
                (full.row(r)[c] - means[c]) / stds[c]
            } else {
                0.0
            };
            assert!((both.row(r)[c] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn no_nan_for_degenerate_trials() {
        // constant window and a single spike must both stay finite
        let mut spike = constant_trial(2, 128, 128.0, 0.0);
        spike.samples[0][10] = 1.0;
        let trials = vec![constant_trial(2, 128, 128.0, 3.0), spike];
        let cfg = FeatureConfig::default();
        let m = build_feature_matrix(&trials, &cfg).unwrap();
        assert!(m.values.iter().all(|v| v.is_finite()));
        assert!(m.degenerate_cells > 0, "constant channels should be flagged");
    }
}
