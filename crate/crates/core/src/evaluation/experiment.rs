use serde::{Deserialize, Serialize};

use crate::classifiers::{bn_fit, knn_fit, BayesNet, KnnModel};
use crate::dataset::{
    discretize, stratified_split, Discretizer, RawRecord, TransactionDb, NUM_VARIABLES,
    VARIABLE_NAMES,
};
use crate::error::{Error, Result, StageExt};
use crate::evaluation::metrics::{confusion, false_alarm_rate, sensitivity};
use crate::evaluation::report::{
    DatasetSummary, ExperimentReport, ImportanceReport, MetricCell, MetricRow, MetricTable,
    REPORT_VERSION,
};
use crate::fptree::{branches, FPTree, FrequentPattern, MiningConfig};
use crate::importance::{
    annotate_ropr, importance_with_divergence, select_variables, ExclusiveMode, ImportanceTable,
};

/// Everything a full experiment run needs. Defaults follow the protocol
/// where it pins a value (tau = 0.2, drop_k = 2, k in {2,3}, NED bins in
/// {3,4}, c = 3) and toolkit choices elsewhere (sigma = 0.1, m = 2,
/// alpha = 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub test_fraction: f64,
    pub min_support: f64,
    pub fcm_clusters: usize,
    pub fcm_fuzzifier: f64,
    pub fcm_tol: f64,
    pub fcm_max_iter: usize,
    pub drop_k: usize,
    pub knn_k: Vec<usize>,
    pub ned_bins: Vec<usize>,
    pub threshold: f64,
    pub alpha: f64,
    pub exclusive_mode: ExclusiveMode,
    /// Externally supplied ranking (variable names, most important first)
    /// for the third scenario.
    pub external_ranking: Option<Vec<String>>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            test_fraction: 0.2,
            min_support: 0.1,
            fcm_clusters: 3,
            fcm_fuzzifier: crate::dataset::DEFAULT_FUZZIFIER,
            fcm_tol: crate::dataset::DEFAULT_TOL,
            fcm_max_iter: crate::dataset::DEFAULT_MAX_ITER,
            drop_k: 2,
            knn_k: vec![2, 3],
            ned_bins: vec![3, 4],
            threshold: 0.2,
            alpha: 1.0,
            exclusive_mode: ExclusiveMode::Structural,
            external_ranking: None,
        }
    }
}

impl ExperimentConfig {
    /// Checks every numeric field against its operation's preconditions
    /// before any work starts.
    pub fn validate(&self) -> Result<()> {
        if !(self.min_support > 0.0 && self.min_support <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "min_support must be in (0, 1], got {}",
                self.min_support
            )));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "test_fraction must be in (0, 1), got {}",
                self.test_fraction
            )));
        }
        if self.fcm_clusters < 2 {
            return Err(Error::InvalidConfig(format!(
                "fcm_clusters must be at least 2, got {}",
                self.fcm_clusters
            )));
        }
        if !(self.fcm_fuzzifier > 1.0) {
            return Err(Error::InvalidConfig(format!(
                "fcm_fuzzifier must be greater than 1, got {}",
                self.fcm_fuzzifier
            )));
        }
        if !(self.fcm_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "fcm_tol must be positive, got {}",
                self.fcm_tol
            )));
        }
        if self.fcm_max_iter == 0 {
            return Err(Error::InvalidConfig("fcm_max_iter must be at least 1".into()));
        }
        if self.drop_k >= NUM_VARIABLES {
            return Err(Error::InvalidConfig(format!(
                "drop_k must be below {NUM_VARIABLES}, got {}",
                self.drop_k
            )));
        }
        if self.knn_k.is_empty() || self.knn_k.iter().any(|&k| k == 0) {
            return Err(Error::InvalidConfig(
                "knn_k must list at least one k, each at least 1".into(),
            ));
        }
        if self.ned_bins.is_empty() || self.ned_bins.iter().any(|&b| b < 2) {
            return Err(Error::InvalidConfig(
                "ned_bins must list at least one bin count, each at least 2".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::InvalidConfig(format!(
                "threshold must be in [0, 1], got {}",
                self.threshold
            )));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if let Some(ranking) = &self.external_ranking {
            validate_external_ranking(ranking)?;
        }
        Ok(())
    }
}

fn validate_external_ranking(ranking: &[String]) -> Result<()> {
    ranking_names_to_ids(ranking).map(|_| ())
}

/// Maps a full variable ranking given by name (most important first) to
/// variable ids, rejecting anything that is not a permutation of the schema.
pub fn ranking_names_to_ids(ranking: &[String]) -> Result<Vec<usize>> {
    if ranking.len() != NUM_VARIABLES {
        return Err(Error::InvalidConfig(format!(
            "external_ranking must list all {NUM_VARIABLES} variables, got {}",
            ranking.len()
        )));
    }
    let mut seen = vec![false; NUM_VARIABLES];
    let mut ids = Vec::with_capacity(NUM_VARIABLES);
    for name in ranking {
        match VARIABLE_NAMES.iter().position(|&n| n == name) {
            Some(v) if !seen[v] => {
                seen[v] = true;
                ids.push(v);
            }
            Some(_) => {
                return Err(Error::InvalidConfig(format!(
                    "external_ranking repeats variable `{name}`"
                )))
            }
            None => {
                return Err(Error::InvalidConfig(format!(
                    "external_ranking names unknown variable `{name}`"
                )))
            }
        }
    }
    Ok(ids)
}

/// Which variable set a scenario evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    AllVariables,
    FpTree,
    External,
}

impl ScenarioKind {
    pub fn label(&self) -> &'static str {
        match self {
            ScenarioKind::AllVariables => "All variables",
            ScenarioKind::FpTree => "FP Tree",
            ScenarioKind::External => "External ranking",
        }
    }

    pub fn slug(&self) -> &'static str {
        match self {
            ScenarioKind::AllVariables => "all",
            ScenarioKind::FpTree => "fptree",
            ScenarioKind::External => "external",
        }
    }
}

/// The report plus every fitted artifact a caller may want to serialize.
#[derive(Debug, Clone)]
pub struct ExperimentArtifacts {
    pub report: ExperimentReport,
    pub importance: ImportanceTable,
    pub patterns: Vec<FrequentPattern>,
    pub discretizer: Discretizer,
    pub train_db: TransactionDb,
    pub knn_models: Vec<(ScenarioKind, usize, KnnModel)>,
    pub bn_models: Vec<(ScenarioKind, usize, BayesNet)>,
}

/// Runs the whole protocol: split, train-side FCM discretization, mining,
/// ranking, selection, classifier training per scenario, and held-out
/// evaluation. Fully deterministic for a fixed input, config, and seed.
pub fn run_experiment(
    records: &[RawRecord],
    config: &ExperimentConfig,
) -> Result<ExperimentArtifacts> {
    config.validate().stage("config")?;

    let (train, test) = stratified_split(records, config.test_fraction, config.seed)
        .stage("split")?;

    let discretizer = Discretizer::fit_fcm(
        &train,
        config.fcm_clusters,
        config.fcm_fuzzifier,
        config.fcm_tol,
        config.fcm_max_iter,
    )
    .stage("discretize")?;
    let train_db = discretize(&train, &discretizer).stage("discretize")?;

    let mining = MiningConfig::new(config.min_support).stage("mine")?;
    let tree = FPTree::from_db(&train_db, &mining).stage("mine")?;
    let mut patterns = branches(&tree, &train_db);
    annotate_ropr(&mut patterns, &train_db).stage("mine")?;

    let (importance, alt_differs) =
        importance_with_divergence(&tree, &train_db, config.exclusive_mode).stage("rank")?;
    if alt_differs {
        log::info!(
            "exclusive-item resolutions disagree on the variable ranking under {}",
            config.exclusive_mode
        );
    }

    let kept_fp = select_variables(&importance, config.drop_k).stage("rank")?;
    let dropped_fp: Vec<usize> = importance.ranking[NUM_VARIABLES - config.drop_k..].to_vec();

    let mut scenarios: Vec<(ScenarioKind, Vec<usize>)> = vec![
        (ScenarioKind::AllVariables, (0..NUM_VARIABLES).collect()),
        (ScenarioKind::FpTree, kept_fp),
    ];
    if let Some(ranking) = &config.external_ranking {
        let ids = ranking_names_to_ids(ranking).stage("rank")?;
        let mut kept: Vec<usize> = ids[..NUM_VARIABLES - config.drop_k].to_vec();
        kept.sort_unstable();
        scenarios.push((ScenarioKind::External, kept));
    }

    let test_labels: Vec<bool> = test.iter().map(|r| r.label).collect();
    let mut knn_models = Vec::new();
    let mut bn_models = Vec::new();
    let mut knn_rows = Vec::new();
    let mut bn_rows = Vec::new();
    let knn_columns: Vec<String> = config.knn_k.iter().map(|k| format!("k={k}")).collect();
    let bn_columns: Vec<String> = config
        .ned_bins
        .iter()
        .map(|b| format!("NED ({b})"))
        .collect();

    for (kind, kept) in &scenarios {
        let kept_names: Vec<String> = kept
            .iter()
            .map(|&v| VARIABLE_NAMES[v].to_string())
            .collect();

        let mut knn_cells = Vec::new();
        for (&k, column) in config.knn_k.iter().zip(&knn_columns) {
            let model = knn_fit(&train, kept, k).stage("train")?;
            let preds = model.predict_all(&test);
            let counts = confusion(&preds, &test_labels).stage("evaluate")?;
            let sens = sensitivity(&counts).stage("evaluate")?;
            let far = false_alarm_rate(&counts).stage("evaluate")?;
            knn_cells.push(MetricCell::new(column, sens, far, counts));
            knn_models.push((*kind, k, model));
        }
        knn_rows.push(MetricRow {
            scenario: kind.label().to_string(),
            kept_variables: kept_names.clone(),
            cells: knn_cells,
        });

        let mut bn_cells = Vec::new();
        for (&n_bins, column) in config.ned_bins.iter().zip(&bn_columns) {
            let mut model = bn_fit(&train, kept, n_bins, config.alpha).stage("train")?;
            model.threshold = config.threshold;
            let preds = model.predict_all(&test);
            let counts = confusion(&preds, &test_labels).stage("evaluate")?;
            let sens = sensitivity(&counts).stage("evaluate")?;
            let far = false_alarm_rate(&counts).stage("evaluate")?;
            bn_cells.push(MetricCell::new(column, sens, far, counts));
            bn_models.push((*kind, n_bins, model));
        }
        bn_rows.push(MetricRow {
            scenario: kind.label().to_string(),
            kept_variables: kept_names,
            cells: bn_cells,
        });
    }

    let report = ExperimentReport {
        version: REPORT_VERSION,
        config: config.clone(),
        dataset: DatasetSummary {
            total: records.len(),
            positives: records.iter().filter(|r| r.label).count(),
            train_total: train.len(),
            train_positives: train.iter().filter(|r| r.label).count(),
            test_total: test.len(),
            test_positives: test.iter().filter(|r| r.label).count(),
        },
        importance: ImportanceReport::from_table(
            &importance,
            &train_db,
            config.exclusive_mode,
            &dropped_fp,
            alt_differs,
        ),
        knn: MetricTable {
            title: "Performance of k-NN".into(),
            columns: knn_columns,
            rows: knn_rows,
        },
        bayes: MetricTable {
            title: "Performance of Bayesian network".into(),
            columns: bn_columns,
            rows: bn_rows,
        },
    };

    Ok(ExperimentArtifacts {
        report,
        importance,
        patterns,
        discretizer,
        train_db,
        knn_models,
        bn_models,
    })
}
