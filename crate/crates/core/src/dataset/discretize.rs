use serde::{Deserialize, Serialize};

use crate::dataset::fcm::FcmModel;
use crate::dataset::ned::NedModel;
use crate::dataset::record::{RawRecord, NUM_VARIABLES, VARIABLE_NAMES};
use crate::error::{Error, Result};

pub const DISCRETIZER_VERSION: u32 = 1;

/// A discrete item: one bin of one variable. Identity is the
/// `(variable_id, bin_id)` pair; display labels are derived.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct Item {
    pub variable_id: usize,
    pub bin_id: usize,
}

impl Item {
    pub fn new(variable_id: usize, bin_id: usize) -> Self {
        Self {
            variable_id,
            bin_id,
        }
    }
}

/// A discretized record: a set of items plus the binary label.
///
/// Items are kept sorted by `(variable_id, bin_id)` and deduplicated, so a
/// transaction behaves as a set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    items: Vec<Item>,
    pub label: bool,
}

impl Transaction {
    pub fn new(mut items: Vec<Item>, label: bool) -> Self {
        items.sort_unstable();
        items.dedup();
        Self { items, label }
    }

    /// Items in sorted order. Mining re-sorts them in frequency order.
    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn contains(&self, item: Item) -> bool {
        self.items.binary_search(&item).is_ok()
    }

    pub fn contains_all(&self, pattern: &[Item]) -> bool {
        pattern.iter().all(|&i| self.contains(i))
    }
}

/// An ordered collection of transactions with the variable naming context
/// needed to render items.
#[derive(Debug, Clone, PartialEq)]
pub struct TransactionDb {
    pub transactions: Vec<Transaction>,
    pub variable_names: Vec<String>,
    bins_per_variable: Vec<usize>,
}

impl TransactionDb {
    /// Builds a database from arbitrary item sets, inferring bin counts.
    pub fn new(transactions: Vec<Transaction>, variable_names: Vec<String>) -> Self {
        let mut bins = vec![0usize; variable_names.len()];
        for t in &transactions {
            for item in t.items() {
                if item.variable_id < bins.len() {
                    bins[item.variable_id] = bins[item.variable_id].max(item.bin_id + 1);
                }
            }
        }
        Self {
            transactions,
            variable_names,
            bins_per_variable: bins,
        }
    }

    /// Total transaction count (TN).
    pub fn tn(&self) -> usize {
        self.transactions.len()
    }

    pub fn positive_count(&self) -> usize {
        self.transactions.iter().filter(|t| t.label).count()
    }

    pub fn n_variables(&self) -> usize {
        self.variable_names.len()
    }

    /// Derived display label, e.g. `mean_vol_high`.
    pub fn display_label(&self, item: Item) -> String {
        let var = self
            .variable_names
            .get(item.variable_id)
            .map(String::as_str)
            .unwrap_or("var?");
        let n_bins = self
            .bins_per_variable
            .get(item.variable_id)
            .copied()
            .unwrap_or(0);
        format!("{var}_{}", bin_name(item.bin_id, n_bins))
    }
}

fn bin_name(bin_id: usize, n_bins: usize) -> String {
    match (n_bins, bin_id) {
        (2, 0) => "low".into(),
        (2, 1) => "high".into(),
        (3, 0) => "low".into(),
        (3, 1) => "medium".into(),
        (3, 2) => "high".into(),
        _ => format!("b{bin_id}"),
    }
}

/// Per-variable discretization method and parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum VariableModel {
    Fcm(FcmModel),
    Ned(NedModel),
}

impl VariableModel {
    pub fn assign(&self, x: f64) -> usize {
        match self {
            VariableModel::Fcm(m) => m.assign(x),
            VariableModel::Ned(m) => m.assign(x),
        }
    }

    pub fn n_bins(&self) -> usize {
        match self {
            VariableModel::Fcm(m) => m.n_bins(),
            VariableModel::Ned(m) => m.n_bins,
        }
    }
}

/// One fitted model per variable, serializable for reuse between train and
/// test runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discretizer {
    pub version: u32,
    pub variable_names: Vec<String>,
    pub models: Vec<VariableModel>,
}

impl Discretizer {
    /// Fits an FCM model per variable on the given records.
    pub fn fit_fcm(
        records: &[RawRecord],
        c: usize,
        m: f64,
        tol: f64,
        max_iter: usize,
    ) -> Result<Self> {
        let models = (0..NUM_VARIABLES)
            .map(|v| {
                let column: Vec<f64> = records.iter().map(|r| r.values[v]).collect();
                crate::dataset::fcm::fit_fcm(&column, c, m, tol, max_iter)
                    .map(VariableModel::Fcm)
                    .map_err(|e| match e {
                        Error::DegenerateInput(msg) => Error::DegenerateInput(format!(
                            "variable `{}`: {msg}",
                            VARIABLE_NAMES[v]
                        )),
                        other => other,
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            version: DISCRETIZER_VERSION,
            variable_names: VARIABLE_NAMES.iter().map(|s| s.to_string()).collect(),
            models,
        })
    }

    /// Fits an equal-width model per variable on the given records.
    pub fn fit_ned(records: &[RawRecord], n_bins: usize) -> Result<Self> {
        let models = (0..NUM_VARIABLES)
            .map(|v| {
                let column: Vec<f64> = records.iter().map(|r| r.values[v]).collect();
                crate::dataset::ned::fit_ned(&column, n_bins)
                    .map(VariableModel::Ned)
                    .map_err(|e| match e {
                        Error::DegenerateInput(msg) => Error::DegenerateInput(format!(
                            "variable `{}`: {msg}",
                            VARIABLE_NAMES[v]
                        )),
                        other => other,
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            version: DISCRETIZER_VERSION,
            variable_names: VARIABLE_NAMES.iter().map(|s| s.to_string()).collect(),
            models,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let d: Discretizer = serde_json::from_str(json)?;
        if d.version != DISCRETIZER_VERSION {
            return Err(Error::InvalidConfig(format!(
                "unsupported discretizer version {}",
                d.version
            )));
        }
        if d.models.len() != d.variable_names.len() {
            return Err(Error::InvalidConfig(
                "discretizer model count does not match variable names".into(),
            ));
        }
        Ok(d)
    }
}

/// Turns records into a transaction database: exactly one item per variable
/// per record.
pub fn discretize(records: &[RawRecord], discretizer: &Discretizer) -> Result<TransactionDb> {
    if discretizer.models.len() != NUM_VARIABLES {
        return Err(Error::InvalidConfig(format!(
            "discretizer covers {} variables, records have {NUM_VARIABLES}",
            discretizer.models.len()
        )));
    }
    let transactions = records
        .iter()
        .map(|rec| {
            let items = discretizer
                .models
                .iter()
                .enumerate()
                .map(|(v, model)| Item::new(v, model.assign(rec.values[v])))
                .collect();
            Transaction::new(items, rec.label)
        })
        .collect();
    let mut db = TransactionDb::new(transactions, discretizer.variable_names.clone());
    // bin counts come from the models, not from observed assignments
    db.bins_per_variable = discretizer.models.iter().map(|m| m.n_bins()).collect();
    Ok(db)
}
