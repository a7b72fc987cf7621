use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "ropr-miner",
    version,
    about = "FP-tree/ROPR variable selection and risk classification toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate a synthetic labeled dataset CSV
    Generate(GenerateArgs),
    /// Fit per-variable discretization models and save them as JSON
    Discretize(DiscretizeArgs),
    /// Mine branch frequent patterns from a dataset
    Mine(MineArgs),
    /// Compute the variable importance table and ranking
    Rank(RankArgs),
    /// Train classifiers on a training CSV and save them as JSON
    Train(TrainArgs),
    /// Evaluate a serialized model on a labeled CSV
    Evaluate(EvaluateArgs),
    /// Run the full experiment pipeline and write all reports
    Pipeline(PipelineArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Fcm,
    Ned,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ExclusiveModeArg {
    Structural,
    ItemIdentity,
}

impl From<ExclusiveModeArg> for ropr_core::importance::ExclusiveMode {
    fn from(arg: ExclusiveModeArg) -> Self {
        match arg {
            ExclusiveModeArg::Structural => Self::Structural,
            ExclusiveModeArg::ItemIdentity => Self::ItemIdentity,
        }
    }
}

#[derive(clap::Args)]
pub struct GenerateArgs {
    /// Output CSV path
    #[arg(long)]
    pub output: PathBuf,
    /// Number of positive (label 1) records
    #[arg(long, default_value_t = 174)]
    pub pos: usize,
    /// Number of negative (label 0) records
    #[arg(long, default_value_t = 569)]
    pub neg: usize,
    /// Variable indices carrying planted signal (repeatable)
    #[arg(long = "informative", value_delimiter = ',', default_values_t = vec![2, 5])]
    pub informative: Vec<usize>,
    /// Positive-class mean shift in noise standard deviations
    #[arg(long = "effect-size", default_value_t = 2.0)]
    pub effect_size: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(clap::Args)]
pub struct DiscretizeArgs {
    /// Input CSV path
    #[arg(long)]
    pub input: PathBuf,
    /// Output JSON path for the fitted models
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Fcm)]
    pub method: MethodArg,
    /// FCM clusters per variable
    #[arg(long = "fcm-clusters", default_value_t = 3)]
    pub fcm_clusters: usize,
    /// FCM fuzzifier m
    #[arg(long = "fcm-fuzzifier", default_value_t = 2.0)]
    pub fcm_fuzzifier: f64,
    /// Equal-width bin count (ned method)
    #[arg(long = "ned-bins", default_value_t = 4)]
    pub ned_bins: usize,
}

#[derive(clap::Args)]
pub struct MineArgs {
    /// Input CSV path
    #[arg(long)]
    pub input: PathBuf,
    /// Discretization models JSON from `discretize` (fitted fresh if absent)
    #[arg(long)]
    pub models: Option<PathBuf>,
    /// Minimum support ratio sigma
    #[arg(long = "min-support", default_value_t = 0.1)]
    pub min_support: f64,
    #[arg(long = "fcm-clusters", default_value_t = 3)]
    pub fcm_clusters: usize,
    #[arg(long = "fcm-fuzzifier", default_value_t = 2.0)]
    pub fcm_fuzzifier: f64,
    /// Output path for mined patterns (JSON lines)
    #[arg(long)]
    pub output: PathBuf,
    /// Optional path for an indented text rendering of the tree
    #[arg(long = "tree-out")]
    pub tree_out: Option<PathBuf>,
}

#[derive(clap::Args)]
pub struct RankArgs {
    /// Input CSV path
    #[arg(long)]
    pub input: PathBuf,
    /// Discretization models JSON from `discretize` (fitted fresh if absent)
    #[arg(long)]
    pub models: Option<PathBuf>,
    #[arg(long = "min-support", default_value_t = 0.1)]
    pub min_support: f64,
    #[arg(long = "fcm-clusters", default_value_t = 3)]
    pub fcm_clusters: usize,
    #[arg(long = "fcm-fuzzifier", default_value_t = 2.0)]
    pub fcm_fuzzifier: f64,
    /// How many lowest-scored variables to drop
    #[arg(long = "drop-least", default_value_t = 2)]
    pub drop_k: usize,
    #[arg(long = "exclusive-mode", value_enum, default_value_t = ExclusiveModeArg::Structural)]
    pub exclusive_mode: ExclusiveModeArg,
    /// Output directory (importance.json and importance.txt)
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(clap::Args)]
pub struct TrainArgs {
    /// Training CSV path
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory for model JSON files
    #[arg(long)]
    pub output: PathBuf,
    /// k values for k-NN (repeatable or comma separated)
    #[arg(long = "knn-k", value_delimiter = ',', default_values_t = vec![2, 3])]
    pub knn_k: Vec<usize>,
    /// Equal-width bin counts for the Bayesian network
    #[arg(long = "ned-bins", value_delimiter = ',', default_values_t = vec![3, 4])]
    pub ned_bins: Vec<usize>,
    /// Laplace smoothing pseudo-count
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Posterior decision threshold tau
    #[arg(long, default_value_t = 0.2)]
    pub threshold: f64,
    /// Drop this many least-important variables per the ranking source
    #[arg(long = "drop-least", default_value_t = 0)]
    pub drop_k: usize,
    /// importance.json from `rank` supplying the variable ranking
    #[arg(long, conflicts_with = "external_ranking")]
    pub importance: Option<PathBuf>,
    /// Text file with one variable name per line, most important first
    #[arg(long = "external-ranking")]
    pub external_ranking: Option<PathBuf>,
}

#[derive(clap::Args)]
pub struct EvaluateArgs {
    /// Serialized model JSON (knn or bayes)
    #[arg(long)]
    pub model: PathBuf,
    /// Labeled CSV to evaluate on
    #[arg(long)]
    pub input: PathBuf,
    /// Output path for metrics JSON
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(clap::Args)]
pub struct PipelineArgs {
    /// Input CSV path
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory for all reports, models, and the manifest
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "min-support", default_value_t = 0.1)]
    pub min_support: f64,
    #[arg(long = "fcm-clusters", default_value_t = 3)]
    pub fcm_clusters: usize,
    #[arg(long = "fcm-fuzzifier", default_value_t = 2.0)]
    pub fcm_fuzzifier: f64,
    #[arg(long = "ned-bins", value_delimiter = ',', default_values_t = vec![3, 4])]
    pub ned_bins: Vec<usize>,
    #[arg(long = "drop-least", default_value_t = 2)]
    pub drop_k: usize,
    #[arg(long = "knn-k", value_delimiter = ',', default_values_t = vec![2, 3])]
    pub knn_k: Vec<usize>,
    /// Posterior decision threshold tau
    #[arg(long, default_value_t = 0.2)]
    pub threshold: f64,
    /// Laplace smoothing pseudo-count
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long = "test-fraction", default_value_t = 0.2)]
    pub test_fraction: f64,
    /// Text file with one variable name per line, most important first;
    /// enables the third scenario
    #[arg(long = "external-ranking")]
    pub external_ranking: Option<PathBuf>,
    #[arg(long = "exclusive-mode", value_enum, default_value_t = ExclusiveModeArg::Structural)]
    pub exclusive_mode: ExclusiveModeArg,
}
