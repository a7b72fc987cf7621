use std::fs;
use std::path::{Path, PathBuf};

use ropr_core::classifiers::{bn_fit, BayesNet, KnnModel};
use ropr_core::dataset::{
    discretize, generate_synthetic, load_csv, write_csv, Discretizer, RawRecord, TransactionDb,
    DEFAULT_MAX_ITER, DEFAULT_TOL, NUM_VARIABLES,
};
use ropr_core::error::Error as CoreError;
use ropr_core::evaluation::{
    confusion, false_alarm_rate, percent, ranking_names_to_ids, run_experiment, sensitivity,
    ExperimentConfig,
};
use ropr_core::fptree::{branches, FPTree, MiningConfig};
use ropr_core::importance::{importance_with_divergence, select_variables};
use ropr_core::evaluation::ImportanceReport;
use sha2::{Digest, Sha256};

use crate::args::*;

/// CLI-level error: configuration problems exit 2, component failures
/// exit 1.
pub enum CliError {
    Config(String),
    Run(CoreError),
}

/// Maps core parameter names to their CLI flag spellings so validation
/// messages name the flag the user typed.
const FLAG_NAMES: &[(&str, &str)] = &[
    ("min_support", "--min-support"),
    ("test_fraction", "--test-fraction"),
    ("fcm_clusters", "--fcm-clusters"),
    ("fcm cluster count", "--fcm-clusters"),
    ("fcm_fuzzifier", "--fcm-fuzzifier"),
    ("fcm fuzzifier", "--fcm-fuzzifier"),
    ("ned_bins", "--ned-bins"),
    ("ned bin count", "--ned-bins"),
    ("drop_k", "--drop-least"),
    ("knn_k", "--knn-k"),
    ("threshold", "--threshold"),
    ("alpha", "--alpha"),
    ("external_ranking", "--external-ranking"),
    ("effect size", "--effect-size"),
    ("informative variable index", "--informative index"),
];

fn flag_spelling(msg: &str) -> String {
    let mut out = msg.to_string();
    for (param, flag) in FLAG_NAMES {
        out = out.replace(param, flag);
    }
    out
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidConfig(msg) => CliError::Config(flag_spelling(&msg)),
            CoreError::Stage { stage, source } if stage == "config" => match *source {
                CoreError::InvalidConfig(msg) => CliError::Config(flag_spelling(&msg)),
                other => CliError::Run(other.at_stage("config")),
            },
            other => CliError::Run(other),
        }
    }
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Generate(args) => generate(args),
        Command::Discretize(args) => discretize_cmd(args),
        Command::Mine(args) => mine(args),
        Command::Rank(args) => rank(args),
        Command::Train(args) => train(args),
        Command::Evaluate(args) => evaluate(args),
        Command::Pipeline(args) => pipeline(args),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CoreError::from(e).at_stage("write"))
        .map_err(CliError::from)
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CoreError::from(e).at_stage("load"))
        .map_err(CliError::from)
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path)
        .map_err(|e| CoreError::from(e).at_stage("write"))
        .map_err(CliError::from)
}

fn generate(args: GenerateArgs) -> Result<(), CliError> {
    let records = generate_synthetic(
        args.pos,
        args.neg,
        &args.informative,
        args.effect_size,
        args.seed,
    )?;
    write_csv(&args.output, &records).map_err(|e| e.at_stage("write"))?;
    log::info!(
        "wrote {} records ({} positive) to {}",
        records.len(),
        args.pos,
        args.output.display()
    );
    Ok(())
}

fn fit_or_load_models(
    records: &[RawRecord],
    models: &Option<PathBuf>,
    fcm_clusters: usize,
    fcm_fuzzifier: f64,
) -> Result<Discretizer, CliError> {
    match models {
        Some(path) => {
            Ok(Discretizer::from_json(&read_file(path)?).map_err(|e| e.at_stage("load"))?)
        }
        None => Ok(Discretizer::fit_fcm(
            records,
            fcm_clusters,
            fcm_fuzzifier,
            DEFAULT_TOL,
            DEFAULT_MAX_ITER,
        )
        .map_err(|e| e.at_stage("discretize"))?),
    }
}

fn discretize_cmd(args: DiscretizeArgs) -> Result<(), CliError> {
    let records = load_csv(&args.input).map_err(|e| e.at_stage("load"))?;
    let disc = match args.method {
        MethodArg::Fcm => Discretizer::fit_fcm(
            &records,
            args.fcm_clusters,
            args.fcm_fuzzifier,
            DEFAULT_TOL,
            DEFAULT_MAX_ITER,
        ),
        MethodArg::Ned => Discretizer::fit_ned(&records, args.ned_bins),
    }
    .map_err(|e| e.at_stage("discretize"))?;
    write_file(&args.output, &disc.to_json()?)?;
    log::info!("wrote discretization models to {}", args.output.display());
    Ok(())
}

fn mine_common(
    input: &Path,
    models: &Option<PathBuf>,
    min_support: f64,
    fcm_clusters: usize,
    fcm_fuzzifier: f64,
) -> Result<(TransactionDb, FPTree, Vec<ropr_core::fptree::FrequentPattern>), CliError> {
    let records = load_csv(input).map_err(|e| e.at_stage("load"))?;
    let disc = fit_or_load_models(&records, models, fcm_clusters, fcm_fuzzifier)?;
    let db = discretize(&records, &disc).map_err(|e| e.at_stage("discretize"))?;
    let config = MiningConfig::new(min_support)?;
    let tree = FPTree::from_db(&db, &config).map_err(|e| e.at_stage("mine"))?;
    let mut patterns = branches(&tree, &db);
    ropr_core::importance::annotate_ropr(&mut patterns, &db).map_err(|e| e.at_stage("mine"))?;
    Ok((db, tree, patterns))
}

fn patterns_jsonl(
    patterns: &[ropr_core::fptree::FrequentPattern],
    db: &TransactionDb,
) -> Result<String, CliError> {
    let mut out = String::new();
    for p in patterns {
        let line = serde_json::to_string(&p.to_record(db)).map_err(CoreError::from)?;
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

fn mine(args: MineArgs) -> Result<(), CliError> {
    let (db, tree, patterns) = mine_common(
        &args.input,
        &args.models,
        args.min_support,
        args.fcm_clusters,
        args.fcm_fuzzifier,
    )?;
    write_file(&args.output, &patterns_jsonl(&patterns, &db)?)?;
    if let Some(tree_out) = &args.tree_out {
        write_file(tree_out, &tree.render(&db))?;
    }
    log::info!(
        "mined {} branch patterns over {} transactions",
        patterns.len(),
        db.tn()
    );
    Ok(())
}

fn rank(args: RankArgs) -> Result<(), CliError> {
    let (db, tree, _) = mine_common(
        &args.input,
        &args.models,
        args.min_support,
        args.fcm_clusters,
        args.fcm_fuzzifier,
    )?;
    if args.drop_k >= NUM_VARIABLES {
        return Err(CliError::Config(format!(
            "--drop-least must be below {NUM_VARIABLES}, got {}",
            args.drop_k
        )));
    }
    let (table, differs) = importance_with_divergence(&tree, &db, args.exclusive_mode.into())
        .map_err(|e| e.at_stage("rank"))?;
    let kept = select_variables(&table, args.drop_k).map_err(|e| e.at_stage("rank"))?;
    let dropped: Vec<usize> = table.ranking[NUM_VARIABLES - args.drop_k..].to_vec();
    let report = ImportanceReport::from_table(
        &table,
        &db,
        args.exclusive_mode.into(),
        &dropped,
        differs,
    );
    create_dir(&args.output)?;
    let json = serde_json::to_string_pretty(&report).map_err(CoreError::from)?;
    write_file(&args.output.join("importance.json"), &json)?;
    write_file(&args.output.join("importance.txt"), &report.render_text())?;
    log::info!(
        "ranking: {:?}; kept {} variables",
        report.ranking,
        kept.len()
    );
    Ok(())
}

/// Resolves the kept-variable set from a ranking source and a drop count.
fn resolve_kept(
    importance: &Option<PathBuf>,
    external: &Option<PathBuf>,
    drop_k: usize,
) -> Result<Vec<usize>, CliError> {
    if drop_k >= NUM_VARIABLES {
        return Err(CliError::Config(format!(
            "--drop-least must be below {NUM_VARIABLES}, got {drop_k}"
        )));
    }
    let names: Option<Vec<String>> = match (importance, external) {
        (Some(path), _) => {
            let value: serde_json::Value =
                serde_json::from_str(&read_file(path)?).map_err(CoreError::from)?;
            let ranking = value
                .get("ranking")
                .and_then(|r| r.as_array())
                .ok_or_else(|| {
                    CliError::Run(
                        CoreError::Contract(format!(
                            "{} has no `ranking` array; is it an importance.json from `rank`?",
                            path.display()
                        ))
                        .at_stage("load"),
                    )
                })?;
            Some(
                ranking
                    .iter()
                    .map(|v| v.as_str().unwrap_or_default().to_string())
                    .collect(),
            )
        }
        (None, Some(path)) => Some(read_ranking_file(path)?),
        (None, None) => None,
    };
    match names {
        Some(names) => {
            let ids = ranking_names_to_ids(&names)?;
            let mut kept: Vec<usize> = ids[..NUM_VARIABLES - drop_k].to_vec();
            kept.sort_unstable();
            Ok(kept)
        }
        None => Ok((0..NUM_VARIABLES).collect()),
    }
}

fn read_ranking_file(path: &Path) -> Result<Vec<String>, CliError> {
    Ok(read_file(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect())
}

fn train(args: TrainArgs) -> Result<(), CliError> {
    let records = load_csv(&args.input).map_err(|e| e.at_stage("load"))?;
    let kept = resolve_kept(&args.importance, &args.external_ranking, args.drop_k)?;
    create_dir(&args.output)?;
    for &k in &args.knn_k {
        let model = ropr_core::classifiers::knn_fit(&records, &kept, k)
            .map_err(|e| e.at_stage("train"))?;
        write_file(&args.output.join(format!("knn_k{k}.json")), &model.to_json()?)?;
    }
    for &n_bins in &args.ned_bins {
        let mut model =
            bn_fit(&records, &kept, n_bins, args.alpha).map_err(|e| e.at_stage("train"))?;
        model.threshold = args.threshold;
        write_file(
            &args.output.join(format!("bayes_ned{n_bins}.json")),
            &model.to_json()?,
        )?;
    }
    log::info!(
        "trained {} k-NN and {} Bayesian network models on {} records",
        args.knn_k.len(),
        args.ned_bins.len(),
        records.len()
    );
    Ok(())
}

fn evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    let records = load_csv(&args.input).map_err(|e| e.at_stage("load"))?;
    let raw = read_file(&args.model)?;
    let probe: serde_json::Value = serde_json::from_str(&raw).map_err(CoreError::from)?;
    let kind = probe
        .get("model")
        .and_then(|m| m.as_str())
        .unwrap_or_default()
        .to_string();
    let predictions: Vec<bool> = match kind.as_str() {
        "knn" => KnnModel::from_json(&raw)
            .map_err(|e| e.at_stage("load"))?
            .predict_all(&records),
        "bayes" => BayesNet::from_json(&raw)
            .map_err(|e| e.at_stage("load"))?
            .predict_all(&records),
        other => {
            return Err(CliError::Run(
                CoreError::Contract(format!(
                    "unknown model kind `{other}` in {}",
                    args.model.display()
                ))
                .at_stage("load"),
            ))
        }
    };
    let labels: Vec<bool> = records.iter().map(|r| r.label).collect();
    let counts = confusion(&predictions, &labels).map_err(|e| e.at_stage("evaluate"))?;
    let sens = sensitivity(&counts).map_err(|e| e.at_stage("evaluate"))?;
    let far = false_alarm_rate(&counts).map_err(|e| e.at_stage("evaluate"))?;
    let metrics = serde_json::json!({
        "version": 1,
        "model": kind,
        "records": records.len(),
        "confusion": counts,
        "sensitivity": sens,
        "false_alarm_rate": far,
        "sensitivity_pct": percent(sens),
        "false_alarm_rate_pct": percent(far),
    });
    let pretty = serde_json::to_string_pretty(&metrics).map_err(CoreError::from)?;
    write_file(&args.output, &pretty)?;
    log::info!(
        "sensitivity {} false alarm {} on {} records",
        percent(sens),
        percent(far),
        records.len()
    );
    Ok(())
}

fn pipeline(args: PipelineArgs) -> Result<(), CliError> {
    let external_ranking = match &args.external_ranking {
        Some(path) => Some(read_ranking_file(path)?),
        None => None,
    };
    let config = ExperimentConfig {
        seed: args.seed,
        test_fraction: args.test_fraction,
        min_support: args.min_support,
        fcm_clusters: args.fcm_clusters,
        fcm_fuzzifier: args.fcm_fuzzifier,
        fcm_tol: DEFAULT_TOL,
        fcm_max_iter: DEFAULT_MAX_ITER,
        drop_k: args.drop_k,
        knn_k: args.knn_k.clone(),
        ned_bins: args.ned_bins.clone(),
        threshold: args.threshold,
        alpha: args.alpha,
        exclusive_mode: args.exclusive_mode.into(),
        external_ranking,
    };
    // fail on bad flags before touching the input
    config.validate()?;

    let input_bytes =
        fs::read(&args.input).map_err(|e| CoreError::from(e).at_stage("load"))?;
    let input_sha256 = hex::encode(Sha256::digest(&input_bytes));
    let records = load_csv(&args.input).map_err(|e| e.at_stage("load"))?;

    let artifacts = run_experiment(&records, &config)?;

    create_dir(&args.output)?;
    let models_dir = args.output.join("models");
    create_dir(&models_dir)?;

    let manifest = serde_json::json!({
        "version": 1,
        "command": "pipeline",
        "input": args.input.display().to_string(),
        "input_sha256": input_sha256,
        "config": serde_json::to_value(&config).map_err(CoreError::from)?,
    });
    write_file(
        &args.output.join("manifest.json"),
        &serde_json::to_string_pretty(&manifest).map_err(CoreError::from)?,
    )?;
    write_file(&args.output.join("report.json"), &artifacts.report.to_json()?)?;
    write_file(&args.output.join("report.txt"), &artifacts.report.render_text())?;
    let importance_json =
        serde_json::to_string_pretty(&artifacts.report.importance).map_err(CoreError::from)?;
    write_file(&args.output.join("importance.json"), &importance_json)?;
    write_file(
        &args.output.join("importance.txt"),
        &artifacts.report.importance.render_text(),
    )?;
    write_file(
        &args.output.join("patterns.jsonl"),
        &patterns_jsonl(&artifacts.patterns, &artifacts.train_db)?,
    )?;
    write_file(
        &models_dir.join("discretizer.json"),
        &artifacts.discretizer.to_json()?,
    )?;
    for (kind, k, model) in &artifacts.knn_models {
        write_file(
            &models_dir.join(format!("knn_{}_k{k}.json", kind.slug())),
            &model.to_json()?,
        )?;
    }
    for (kind, n_bins, model) in &artifacts.bn_models {
        write_file(
            &models_dir.join(format!("bayes_{}_ned{n_bins}.json", kind.slug())),
            &model.to_json()?,
        )?;
    }
    log::info!("pipeline outputs written to {}", args.output.display());
    Ok(())
}
