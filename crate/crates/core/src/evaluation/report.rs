use serde::{Deserialize, Serialize};

use crate::dataset::TransactionDb;
use crate::error::Result;
use crate::evaluation::experiment::ExperimentConfig;
use crate::evaluation::metrics::{percent, ConfusionCounts};
use crate::importance::{ExclusiveMode, ImportanceTable};

pub const REPORT_VERSION: u32 = 1;

/// Machine-readable experiment report; the JSON form is byte-reproducible
/// for a fixed input, config, and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub version: u32,
    pub config: ExperimentConfig,
    pub dataset: DatasetSummary,
    pub importance: ImportanceReport,
    pub knn: MetricTable,
    pub bayes: MetricTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub total: usize,
    pub positives: usize,
    pub train_total: usize,
    pub train_positives: usize,
    pub test_total: usize,
    pub test_positives: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemScoreEntry {
    pub item: String,
    pub variable: String,
    pub bin: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableScoreEntry {
    pub variable: String,
    pub score: f64,
}

/// Item- and variable-level scores with the ranking and drop list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub exclusive_mode: ExclusiveMode,
    pub item_scores: Vec<ItemScoreEntry>,
    /// In variable order, one entry per variable.
    pub variable_scores: Vec<VariableScoreEntry>,
    /// Variable names, most important first.
    pub ranking: Vec<String>,
    /// The `drop_k` least important variables.
    pub dropped: Vec<String>,
    /// Whether the alternative exclusive-item resolution would rank
    /// variables differently on this data.
    pub alt_exclusive_ranking_differs: bool,
}

impl ImportanceReport {
    pub fn from_table(
        table: &ImportanceTable,
        db: &TransactionDb,
        mode: ExclusiveMode,
        dropped_ids: &[usize],
        alt_differs: bool,
    ) -> Self {
        let item_scores = table
            .item_scores
            .iter()
            .map(|(&item, &score)| ItemScoreEntry {
                item: db.display_label(item),
                variable: table.variable_names[item.variable_id].clone(),
                bin: item.bin_id,
                score,
            })
            .collect();
        let variable_scores = table
            .variable_names
            .iter()
            .zip(&table.variable_scores)
            .map(|(name, &score)| VariableScoreEntry {
                variable: name.clone(),
                score,
            })
            .collect();
        ImportanceReport {
            exclusive_mode: mode,
            item_scores,
            variable_scores,
            ranking: table
                .ranking
                .iter()
                .map(|&v| table.variable_names[v].clone())
                .collect(),
            dropped: dropped_ids
                .iter()
                .map(|&v| table.variable_names[v].clone())
                .collect(),
            alt_exclusive_ranking_differs: alt_differs,
        }
    }

    /// Two-column table plus ranking and drop list.
    pub fn render_text(&self) -> String {
        let mut out = String::from("Variable importance (FP-tree)\n");
        out.push_str(&format!("{:<12}{}\n", "Variable", "Importance"));
        for entry in &self.variable_scores {
            out.push_str(&format!("{:<12}{:.4}\n", entry.variable, entry.score));
        }
        out.push_str(&format!("Ranking: {}\n", self.ranking.join(" > ")));
        if !self.dropped.is_empty() {
            out.push_str(&format!(
                "Dropped ({} least important): {}\n",
                self.dropped.len(),
                self.dropped.join(", ")
            ));
        }
        if self.alt_exclusive_ranking_differs {
            out.push_str(&format!(
                "note: the {} exclusive-item resolution ranks variables differently on this data\n",
                match self.exclusive_mode {
                    ExclusiveMode::Structural => ExclusiveMode::ItemIdentity,
                    ExclusiveMode::ItemIdentity => ExclusiveMode::Structural,
                }
            ));
        }
        out
    }
}

/// One scenario-by-hyperparameter grid of sensitivity / false-alarm cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricTable {
    pub title: String,
    /// Hyperparameter labels, e.g. `k=2` or `NED (3)`.
    pub columns: Vec<String>,
    pub rows: Vec<MetricRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub scenario: String,
    pub kept_variables: Vec<String>,
    pub cells: Vec<MetricCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricCell {
    /// The hyperparameter column this cell belongs to.
    pub column: String,
    pub sensitivity: f64,
    pub false_alarm_rate: f64,
    pub sensitivity_pct: String,
    pub false_alarm_rate_pct: String,
    pub confusion: ConfusionCounts,
}

impl MetricCell {
    pub fn new(column: &str, sens: f64, far: f64, confusion: ConfusionCounts) -> Self {
        MetricCell {
            column: column.to_string(),
            sensitivity: sens,
            false_alarm_rate: far,
            sensitivity_pct: percent(sens),
            false_alarm_rate_pct: percent(far),
            confusion,
        }
    }
}

impl MetricTable {
    /// Aligned text table: one scenario block with a sensitivity row and a
    /// false-alarm row per hyperparameter column.
    pub fn render_text(&self) -> String {
        let mut out = format!("{}\n", self.title);
        out.push_str(&format!("{:<20}{:<18}", "Variable selection", "Criteria"));
        for col in &self.columns {
            out.push_str(&format!("{col:<10}"));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("{:<20}{:<18}", row.scenario, "Sensitivity"));
            for cell in &row.cells {
                out.push_str(&format!("{:<10}", cell.sensitivity_pct));
            }
            out.push('\n');
            out.push_str(&format!("{:<20}{:<18}", "", "False alarm rate"));
            for cell in &row.cells {
                out.push_str(&format!("{:<10}", cell.false_alarm_rate_pct));
            }
            out.push('\n');
        }
        out
    }
}

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Human-readable report: config echo, dataset summary, importance
    /// table, and both metric grids.
    pub fn render_text(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        out.push_str(&format!(
            "Run config: seed={} min_support={} fcm_clusters={} drop_k={} tau={} alpha={} \
             test_fraction={} exclusive_mode={}\n",
            c.seed,
            c.min_support,
            c.fcm_clusters,
            c.drop_k,
            c.threshold,
            c.alpha,
            c.test_fraction,
            c.exclusive_mode,
        ));
        let d = &self.dataset;
        out.push_str(&format!(
            "Dataset: {} records ({} positive); train {} ({} positive), test {} ({} positive)\n\n",
            d.total, d.positives, d.train_total, d.train_positives, d.test_total, d.test_positives
        ));
        out.push_str(&self.importance.render_text());
        out.push('\n');
        out.push_str(&self.knn.render_text());
        out.push('\n');
        out.push_str(&self.bayes.render_text());
        out
    }
}
