//! Two-stage feature selection.
//!
//! Stage 1 (classifier-independent): every feature column is scored by
//! three separability measures (Mahalanobis, Bhattacharyya, scatter
//! ratio), the min-max-normalized scores are summed, correlated
//! features are demoted, and the best 200 survive.
//!
//! Stage 2 (classifier-dependent): a wrapper search over the shortlist
//! using trained-classifier accuracy as the criterion — floating
//! sequential forward selection or a genetic algorithm, with an
//! exhaustive search available for small pools and test oracles.

mod genetic;
mod pipeline;
mod ranking;
mod separability;
mod sffs;
mod wrapper;

pub use genetic::{genetic_select, GaParams};
pub use pipeline::{select_across_groups, select_within_group, SelectionRecord};
pub use ranking::{rank_columns, rank_independent, shortlist, RankedFeatures};
pub use separability::{bhattacharyya_1d, mahalanobis_1d, scatter_1d};
pub use sffs::{exhaustive_select, sffs};
pub use wrapper::{wrapper_criterion, SubsetCriterion, SubsetEvaluator, WrapperProtocol};

use serde::{Deserialize, Serialize};

use crate::classifiers::ClassifierKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMethod {
    Sffs,
    Genetic,
    Exhaustive,
}

/// Result of a wrapper search: the chosen column indices and the
/// criterion they achieved.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FeatureSubset {
    /// Sorted column indices into the originating feature matrix.
    pub indices: Vec<usize>,
    /// Wrapper accuracy fraction in [0, 1].
    pub criterion: f64,
    pub classifier: ClassifierKind,
    pub method: SearchMethod,
}

/// Knobs for both selection stages.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct SelectionConfig {
    pub method: SearchMethod,
    /// Shortlist size after the filter stage.
    pub shortlist: usize,
    /// Subset size within one group.
    pub k_within: usize,
    /// Subset size across groups.
    pub k_across: usize,
    /// Reduced subset size for ANFIS classifiers.
    pub k_anfis: usize,
    pub protocol: WrapperProtocol,
    pub ga: GaParams,
    /// Extra SFFS forward steps past the target size, allowing the
    /// floating removals to improve the best subset of target size.
    pub sffs_extra: usize,
    /// Exponent on |rho| in the correlation demotion.
    pub demote_exponent: f64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            method: SearchMethod::Sffs,
            shortlist: 200,
            k_within: 20,
            k_across: 25,
            k_anfis: 5,
            protocol: WrapperProtocol::InnerCv { folds: 3 },
            ga: GaParams::default(),
            sffs_extra: 3,
            demote_exponent: 1.0,
        }
    }
}

impl SelectionConfig {
    /// Per-classifier subset size for the within-group stage.
    pub fn k_for(&self, kind: ClassifierKind) -> usize {
        if kind.is_anfis() {
            self.k_anfis
        } else {
            self.k_within
        }
    }

    /// Per-classifier subset size for the across-groups stage.
    pub fn k_across_for(&self, kind: ClassifierKind) -> usize {
        if kind.is_anfis() {
            self.k_anfis
        } else {
            self.k_across
        }
    }
}
