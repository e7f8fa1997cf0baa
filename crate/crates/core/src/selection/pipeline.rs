//! The two selection stages composed: filter ranking to a shortlist,
//! then a wrapper search, per feature group and across groups.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureGroup, FeatureMatrix};
use crate::selection::genetic::genetic_select;
use crate::selection::ranking::{rank_columns, shortlist};
use crate::selection::sffs::{exhaustive_select, sffs};
use crate::selection::wrapper::SubsetEvaluator;
use crate::selection::{FeatureSubset, SearchMethod, SelectionConfig};

fn run_search(
    evaluator: &SubsetEvaluator<'_>,
    pool: &[usize],
    k: usize,
    cfg: &SelectionConfig,
    seed: u64,
) -> Result<FeatureSubset> {
    // ANFIS rule count doubles per added feature; keep the floating
    // search from wandering far above the target size
    let extra = if evaluator.spec.kind.is_anfis() {
        cfg.sffs_extra.min(1)
    } else {
        cfg.sffs_extra
    };
    match cfg.method {
        SearchMethod::Sffs => sffs(evaluator, pool, k, extra),
        SearchMethod::Genetic => genetic_select(evaluator, pool, k, &cfg.ga, seed),
        SearchMethod::Exhaustive => exhaustive_select(evaluator, pool, k),
    }
}

/// Stage for one feature group: rank the group's columns, shortlist,
/// then wrapper-search for the classifier's subset size.
pub fn select_within_group(
    matrix: &FeatureMatrix,
    group: FeatureGroup,
    evaluator: &SubsetEvaluator<'_>,
    cfg: &SelectionConfig,
    seed: u64,
) -> Result<FeatureSubset> {
    let cols = matrix.group_columns(group);
    if cols.is_empty() {
        return Err(Error::domain(format!(
            "group {} has no columns in this matrix",
            group.name()
        )));
    }
    let ranked = rank_columns(matrix, &cols, cfg.demote_exponent)?;
    let pool = shortlist(&ranked, cfg.shortlist);
    let k = cfg.k_for(evaluator.spec.kind).min(pool.len()).max(1);
    run_search(evaluator, &pool, k, cfg, seed)
}

/// Stage across groups: the pool is the union of the per-group winners.
pub fn select_across_groups(
    matrix: &FeatureMatrix,
    per_group: &[FeatureSubset],
    evaluator: &SubsetEvaluator<'_>,
    cfg: &SelectionConfig,
    seed: u64,
) -> Result<FeatureSubset> {
    if per_group.is_empty() {
        return Err(Error::domain("need at least one per-group subset"));
    }
    let mut pool: Vec<usize> = per_group
        .iter()
        .flat_map(|s| s.indices.iter().copied())
        .collect();
    pool.sort_unstable();
    pool.dedup();
    for &c in &pool {
        if c >= matrix.n_cols {
            return Err(Error::structural(format!(
                "subset references column {c} outside the matrix"
            )));
        }
    }
    let k = cfg.k_across_for(evaluator.spec.kind).min(pool.len()).max(1);
    run_search(evaluator, &pool, k, cfg, seed)
}

/// Serializable record of one selection outcome, as written to the
/// selection cache and echoed in reports.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SelectionRecord {
    pub classifier: String,
    /// Group name or "all" for the across-groups stage.
    pub group: String,
    pub method: SearchMethod,
    pub indices: Vec<usize>,
    /// Text labels of the selected columns.
    pub descriptors: Vec<String>,
    pub criterion: f64,
    pub seed: u64,
    pub protocol: crate::selection::WrapperProtocol,
}

impl SelectionRecord {
    pub fn new(
        subset: &FeatureSubset,
        matrix: &FeatureMatrix,
        group: Option<FeatureGroup>,
        seed: u64,
        protocol: crate::selection::WrapperProtocol,
    ) -> Self {
        SelectionRecord {
            classifier: subset.classifier.name().to_string(),
            group: group.map_or_else(|| "all".to_string(), |g| g.name().to_string()),
            method: subset.method,
            indices: subset.indices.clone(),
            descriptors: subset
                .indices
                .iter()
                .map(|&c| matrix.descriptors[c].label())
                .collect(),
            criterion: subset.criterion,
            seed,
            protocol,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{ClassifierKind, ClassifierSpec};
    use crate::features::{build_feature_matrix, FeatureConfig};
    use crate::selection::wrapper::WrapperProtocol;
    use crate::signal::{segment, synth_recording, ChannelComponent, ClassModel, SynthSpec};

    fn two_band_matrix() -> FeatureMatrix {
        // class 0 lives at 10 Hz, class 1 at 20 Hz, one noisy channel
        let spec = SynthSpec {
            fs: 128.0,
            n_channels: 2,
            block_s: 6.0,
            blocks_per_class: 4,
            classes: vec![
                ClassModel {
                    label: 0,
                    components: vec![
                        ChannelComponent::Sine { freq_hz: 10.0, amplitude: 1.0, channels: None },
                        ChannelComponent::Noise { sigma: 0.4, channels: None },
                    ],
                },
                ClassModel {
                    label: 1,
                    components: vec![
                        ChannelComponent::Sine { freq_hz: 20.0, amplitude: 1.0, channels: None },
                        ChannelComponent::Noise { sigma: 0.4, channels: None },
                    ],
                },
            ],
        };
        let rec = synth_recording(&spec, 17).unwrap();
        let trials = segment(&rec, 1.0, 0.5).unwrap();
        let mut cfg = FeatureConfig::default();
        cfg.groups = [crate::features::FeatureGroup::Energy, crate::features::FeatureGroup::Statistic]
            .into_iter()
            .collect();
        cfg.ar.orders = vec![4];
        let mut m = build_feature_matrix(&trials, &cfg).unwrap();
        m.normalize().unwrap();
        m
    }

    fn make_eval<'a>(m: &'a FeatureMatrix, kind: ClassifierKind) -> SubsetEvaluator<'a> {
        let train: Vec<usize> = (0..m.n_rows).filter(|i| i % 3 != 2).collect();
        let test: Vec<usize> = (0..m.n_rows).filter(|i| i % 3 == 2).collect();
        SubsetEvaluator::new(
            m,
            ClassifierSpec::new(kind),
            WrapperProtocol::InnerCv { folds: 3 },
            train,
            test,
            5,
        )
    }

    #[test]
    fn energy_group_selection_separates_the_bands() {
        let m = two_band_matrix();
        let eval = make_eval(&m, ClassifierKind::Bayes);
        let mut cfg = SelectionConfig::default();
        cfg.shortlist = 30;
        cfg.k_within = 4;
        let subset =
            select_within_group(&m, crate::features::FeatureGroup::Energy, &eval, &cfg, 3).unwrap();
        assert_eq!(subset.indices.len(), 4);
        assert!(
            subset.criterion > 0.9,
            "energy subset criterion {}",
            subset.criterion
        );
        // all selected columns must be energy columns
        for &c in &subset.indices {
            assert_eq!(m.descriptors[c].group, crate::features::FeatureGroup::Energy);
        }
    }

    #[test]
    fn anfis_gets_the_reduced_subset_size() {
        let m = two_band_matrix();
        let mut eval = make_eval(&m, ClassifierKind::Anfis1);
        // keep the ANFIS trainer light for the test
        eval.spec.hyperparams.anfis_epochs = 2;
        let mut cfg = SelectionConfig::default();
        cfg.shortlist = 8;
        cfg.k_anfis = 5;
        cfg.sffs_extra = 0;
        let subset =
            select_within_group(&m, crate::features::FeatureGroup::Energy, &eval, &cfg, 3).unwrap();
        assert_eq!(subset.indices.len(), 5);
    }

    #[test]
    fn small_group_clamps_subset_size() {
        let m = two_band_matrix();
        let eval = make_eval(&m, ClassifierKind::Bayes);
        let mut cfg = SelectionConfig::default();
        cfg.shortlist = 3; // smaller than k_within
        cfg.k_within = 20;
        let subset =
            select_within_group(&m, crate::features::FeatureGroup::Energy, &eval, &cfg, 1).unwrap();
        assert_eq!(subset.indices.len(), 3);
    }

    #[test]
    fn across_groups_pools_winners() {
        let m = two_band_matrix();
        let eval = make_eval(&m, ClassifierKind::Bayes);
        let mut cfg = SelectionConfig::default();
        cfg.shortlist = 20;
        cfg.k_within = 3;
        cfg.k_across = 4;
        let energy =
            select_within_group(&m, crate::features::FeatureGroup::Energy, &eval, &cfg, 3).unwrap();
        let stats = select_within_group(
            &m,
            crate::features::FeatureGroup::Statistic,
            &eval,
            &cfg,
            4,
        )
        .unwrap();
        let across =
            select_across_groups(&m, &[energy.clone(), stats.clone()], &eval, &cfg, 5).unwrap();
        assert_eq!(across.indices.len(), 4);
        let pool: std::collections::HashSet<usize> = energy
            .indices
            .iter()
            .chain(stats.indices.iter())
            .copied()
            .collect();
        assert!(across.indices.iter().all(|c| pool.contains(c)));
    }

    #[test]
    fn empty_group_is_a_domain_error() {
        let m = two_band_matrix();
        let eval = make_eval(&m, ClassifierKind::Bayes);
        let cfg = SelectionConfig::default();
        let err = select_within_group(&m, crate::features::FeatureGroup::Wavelet, &eval, &cfg, 0);
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn selection_record_serializes_with_descriptors() {
        let m = two_band_matrix();
        let eval = make_eval(&m, ClassifierKind::Bayes);
        let mut cfg = SelectionConfig::default();
        cfg.shortlist = 10;
        cfg.k_within = 2;
        let subset =
            select_within_group(&m, crate::features::FeatureGroup::Energy, &eval, &cfg, 3).unwrap();
        let record = SelectionRecord::new(
            &subset,
            &m,
            Some(crate::features::FeatureGroup::Energy),
            3,
            WrapperProtocol::InnerCv { folds: 3 },
        );
        let json = serde_json::to_string(&record).unwrap();
        let back: SelectionRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, record);
        assert!(back.descriptors[0].contains("band_energy"));
    }
}
