//! Confusion-matrix metrics and the scenario-grid experiment harness.

mod experiment;
mod metrics;
mod report;

pub use experiment::{
    ranking_names_to_ids, run_experiment, ExperimentArtifacts, ExperimentConfig, ScenarioKind,
};
pub use metrics::{confusion, false_alarm_rate, percent, sensitivity, ConfusionCounts};
pub use report::{ExperimentReport, ImportanceReport, MetricCell, MetricRow, MetricTable};
