use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::{fit_ned, NedModel, RawRecord, VARIABLE_NAMES};
use crate::error::{Error, Result};

pub const BN_MODEL_VERSION: u32 = 1;
/// Posterior decision threshold.
pub const DEFAULT_THRESHOLD: f64 = 0.2;
/// Laplace smoothing pseudo-count.
pub const DEFAULT_ALPHA: f64 = 1.0;

/// Observed counts for one parent configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigCount {
    pub n: usize,
    pub n_positive: usize,
}

/// All-parents Bayesian network: the label node is the child of every kept
/// variable, each discretized by equal-width bins fitted on training data.
///
/// Conditional probabilities are smoothed frequency estimates
/// `(n1 + alpha) / (n + 2 alpha)` for observed parent configurations; unseen
/// configurations fall back to the smoothed prior. With several parents and
/// bins most configurations are unseen, so the fallback is load-bearing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesNet {
    pub version: u32,
    pub model: String,
    pub kept_variables: Vec<usize>,
    pub ned: Vec<NedModel>,
    /// Training-mass fraction per variable per bin, for the model summary.
    pub bin_mass: Vec<Vec<f64>>,
    /// Keyed by bin ids of the kept variables joined with '-'.
    pub table: BTreeMap<String, ConfigCount>,
    pub train_total: usize,
    pub train_positive: usize,
    pub alpha: f64,
    pub threshold: f64,
}

/// Fits the network on training records.
pub fn bn_fit(
    train: &[RawRecord],
    kept_variables: &[usize],
    n_bins: usize,
    alpha: f64,
) -> Result<BayesNet> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if kept_variables.is_empty() {
        return Err(Error::InvalidConfig(
            "no variables kept for the Bayesian network".into(),
        ));
    }
    if train.is_empty() {
        return Err(Error::DegenerateInput("empty training set".into()));
    }
    let mut ned = Vec::with_capacity(kept_variables.len());
    for &v in kept_variables {
        let column: Vec<f64> = train.iter().map(|r| r.values[v]).collect();
        let model = fit_ned(&column, n_bins).map_err(|e| match e {
            Error::DegenerateInput(msg) => {
                Error::DegenerateInput(format!("variable `{}`: {msg}", VARIABLE_NAMES[v]))
            }
            other => other,
        })?;
        ned.push(model);
    }

    let mut bin_mass = vec![vec![0.0; n_bins]; kept_variables.len()];
    let mut table: BTreeMap<String, ConfigCount> = BTreeMap::new();
    for rec in train {
        let bins = assign_bins(&ned, kept_variables, rec);
        for (j, &b) in bins.iter().enumerate() {
            bin_mass[j][b] += 1.0;
        }
        let entry = table.entry(config_key(&bins)).or_insert(ConfigCount {
            n: 0,
            n_positive: 0,
        });
        entry.n += 1;
        if rec.label {
            entry.n_positive += 1;
        }
    }
    let n = train.len() as f64;
    for row in &mut bin_mass {
        for mass in row.iter_mut() {
            *mass /= n;
        }
    }

    Ok(BayesNet {
        version: BN_MODEL_VERSION,
        model: "bayes".into(),
        kept_variables: kept_variables.to_vec(),
        ned,
        bin_mass,
        table,
        train_total: train.len(),
        train_positive: train.iter().filter(|r| r.label).count(),
        alpha,
        threshold: DEFAULT_THRESHOLD,
    })
}

fn assign_bins(ned: &[NedModel], kept: &[usize], rec: &RawRecord) -> Vec<usize> {
    kept.iter()
        .enumerate()
        .map(|(j, &v)| ned[j].assign(rec.values[v]))
        .collect()
}

fn config_key(bins: &[usize]) -> String {
    bins.iter()
        .map(|b| b.to_string())
        .collect::<Vec<_>>()
        .join("-")
}

impl BayesNet {
    /// Smoothed P(positive), used when a configuration was never observed.
    pub fn prior(&self) -> f64 {
        (self.train_positive as f64 + self.alpha) / (self.train_total as f64 + 2.0 * self.alpha)
    }

    /// Smoothed P(positive | configuration of the record); falls back to the
    /// prior for configurations absent from training.
    pub fn posterior(&self, record: &RawRecord) -> f64 {
        let bins = assign_bins(&self.ned, &self.kept_variables, record);
        match self.table.get(&config_key(&bins)) {
            Some(c) => {
                (c.n_positive as f64 + self.alpha) / (c.n as f64 + 2.0 * self.alpha)
            }
            None => self.prior(),
        }
    }

    /// Predicts positive iff the posterior strictly exceeds the threshold.
    pub fn predict(&self, record: &RawRecord) -> bool {
        self.predict_with(record, self.threshold)
    }

    pub fn predict_with(&self, record: &RawRecord, threshold: f64) -> bool {
        debug_assert!((0.0..=1.0).contains(&threshold));
        self.posterior(record) > threshold
    }

    pub fn predict_all(&self, records: &[RawRecord]) -> Vec<bool> {
        records.iter().map(|r| self.predict(r)).collect()
    }

    /// Human-readable summary: parameters, prior, and per-variable interval
    /// masses over the training data.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "Bayesian network: {} variables, NED {}, alpha {}, tau {}\n\
             prior P(positive) = {:.4} ({} of {} training records positive)\n",
            self.kept_variables.len(),
            self.ned.first().map(|m| m.n_bins).unwrap_or(0),
            self.alpha,
            self.threshold,
            self.prior(),
            self.train_positive,
            self.train_total,
        );
        for (j, &v) in self.kept_variables.iter().enumerate() {
            let name = VARIABLE_NAMES.get(v).copied().unwrap_or("var?");
            out.push_str(&format!("{name}:\n"));
            for (b, mass) in self.bin_mass[j].iter().enumerate() {
                out.push_str(&format!(
                    "  {}: {:.1}%\n",
                    self.ned[j].interval_label(b),
                    mass * 100.0
                ));
            }
        }
        out.push_str(&format!(
            "observed configurations: {}\n",
            self.table.len()
        ));
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let m: BayesNet = serde_json::from_str(json)?;
        if m.version != BN_MODEL_VERSION {
            return Err(Error::InvalidConfig(format!(
                "unsupported bayes model version {}",
                m.version
            )));
        }
        if m.model != "bayes" {
            return Err(Error::InvalidConfig(format!(
                "expected a bayes model, found `{}`",
                m.model
            )));
        }
        Ok(m)
    }
}
