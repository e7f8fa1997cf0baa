//! Train/test protocol, accuracy grids, and report emission.

mod benchmark;
mod report;
mod split;

pub use benchmark::{
    assemble_report, prepare_dataset, run_benchmark, select_stage, train_final, train_stage,
    DatasetInput, EvalConfig, PreparedDataset, SelectionCell,
};
pub use report::{
    emit_report, feature_family_distribution, AggregateRow, BenchmarkReport, CellOutcome,
    CellResult, FeatureSet, ReportFormat, ReportMeta, SetAggregate,
};
pub use split::{accuracy, drop_overlapping_test, make_split, SplitMode, SplitPlan};
