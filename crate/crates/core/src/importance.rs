//! Variable importance scoring.
//!
//! Each branch pattern gets a relative object purity ratio (ROPR): the
//! absolute difference between the pattern's positive-label proportion and
//! the database's global positive proportion. Every transaction then accrues
//! each corresponding branch's ROPR onto the transaction items that are
//! exclusive to that branch, and variable scores are the sums of their items'
//! scores.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::dataset::{Item, TransactionDb};
use crate::error::{Error, Result};
use crate::fptree::{branches, FPTree, FrequentPattern};

/// How a branch's exclusive items are resolved.
///
/// `Structural` takes the suffix strictly below the branch's deepest
/// branching node. `ItemIdentity` takes the branch's items that appear in no
/// other branch. The two agree on trees where no item recurs across
/// branches and can diverge otherwise; reports note when the resulting
/// variable rankings differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusiveMode {
    #[default]
    Structural,
    ItemIdentity,
}

impl std::fmt::Display for ExclusiveMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExclusiveMode::Structural => write!(f, "structural"),
            ExclusiveMode::ItemIdentity => write!(f, "item_identity"),
        }
    }
}

/// Accrued per-item scores, keyed deterministically.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ItemScores(pub BTreeMap<Item, f64>);

impl ItemScores {
    pub fn get(&self, item: Item) -> f64 {
        self.0.get(&item).copied().unwrap_or(0.0)
    }
}

/// Item- and variable-level importance with the final ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceTable {
    pub item_scores: BTreeMap<Item, f64>,
    /// Indexed by variable id; variables with no surviving items score 0.
    pub variable_scores: Vec<f64>,
    /// Variable ids sorted by descending score, ties by ascending id.
    pub ranking: Vec<usize>,
    pub variable_names: Vec<String>,
}

/// ROPR of a pattern: |positive/support - db_positive/TN|, computed with an
/// integer numerator so the value is exact under label inversion.
pub fn ropr(db: &TransactionDb, pattern: &FrequentPattern) -> Result<f64> {
    ropr_from_counts(
        pattern.support,
        pattern.positive_count,
        db.tn(),
        db.positive_count(),
    )
}

pub fn ropr_from_counts(
    support: usize,
    positive: usize,
    tn: usize,
    db_positive: usize,
) -> Result<f64> {
    if support == 0 {
        return Err(Error::UndefinedRatio);
    }
    debug_assert!(positive <= support && support <= tn && db_positive <= tn);
    let numerator =
        (positive as i128 * tn as i128 - db_positive as i128 * support as i128).unsigned_abs();
    Ok(numerator as f64 / (support as i128 * tn as i128) as f64)
}

/// Fills the `ropr` field of each mined pattern.
pub fn annotate_ropr(patterns: &mut [FrequentPattern], db: &TransactionDb) -> Result<()> {
    for p in patterns.iter_mut() {
        p.ropr = ropr(db, p)?;
    }
    Ok(())
}

/// Index into the branch's items where the exclusive suffix starts: strictly
/// below the deepest node on the branch with more than one child. A branch
/// with no branching anywhere (single-branch tree) is exclusive in full.
fn exclusive_start(tree: &FPTree, branch: &FrequentPattern) -> Result<usize> {
    let mut start = 0;
    let mut current = tree.root();
    for (depth, &item) in branch.items.iter().enumerate() {
        if tree.node(current).children.len() > 1 {
            start = depth;
        }
        current = tree.child_by_item(current, item).ok_or_else(|| {
            Error::Contract("branch is not a path of this tree".into())
        })?;
    }
    if !tree.node(current).children.is_empty() {
        return Err(Error::Contract(
            "branch does not end at a leaf of this tree".into(),
        ));
    }
    Ok(start)
}

/// The items that differentiate this branch from all others.
pub fn exclusive_items(tree: &FPTree, branch: &FrequentPattern) -> Result<Vec<Item>> {
    let start = exclusive_start(tree, branch)?;
    Ok(branch.items[start..].to_vec())
}

fn exclusive_sets(
    tree: &FPTree,
    patterns: &[FrequentPattern],
    mode: ExclusiveMode,
) -> Result<Vec<Vec<Item>>> {
    match mode {
        ExclusiveMode::Structural => patterns
            .iter()
            .map(|p| exclusive_items(tree, p))
            .collect(),
        ExclusiveMode::ItemIdentity => {
            let mut occurrences: HashMap<Item, usize> = HashMap::new();
            for p in patterns {
                for &i in &p.items {
                    *occurrences.entry(i).or_insert(0) += 1;
                }
            }
            Ok(patterns
                .iter()
                .map(|p| {
                    p.items
                        .iter()
                        .copied()
                        .filter(|i| occurrences[i] == 1)
                        .collect()
                })
                .collect())
        }
    }
}

/// Accrues branch ROPRs onto item scores, transaction by transaction.
///
/// A transaction corresponds to every root-to-leaf branch extending its
/// insertion path; for each such branch, every transaction item inside the
/// branch's exclusive set receives that branch's ROPR. All frequent items
/// start at score 0. Iteration order is fixed, so results are reproducible
/// bit for bit.
pub fn score_items(tree: &FPTree, db: &TransactionDb) -> Result<ItemScores> {
    score_items_with(tree, db, ExclusiveMode::Structural)
}

pub fn score_items_with(
    tree: &FPTree,
    db: &TransactionDb,
    mode: ExclusiveMode,
) -> Result<ItemScores> {
    let patterns = branches(tree, db);
    let mut roprs = Vec::with_capacity(patterns.len());
    for p in &patterns {
        roprs.push(ropr(db, p)?);
    }
    let exclusives = exclusive_sets(tree, &patterns, mode)?;
    // leaf node -> pattern index
    let leaf_pattern: HashMap<usize, usize> = patterns
        .iter()
        .enumerate()
        .map(|(pi, p)| (*p.node_path.last().expect("non-empty branch"), pi))
        .collect();

    let mut scores = ItemScores::default();
    for entry in tree.header() {
        scores.0.insert(entry.item, 0.0);
    }

    for t in &db.transactions {
        let items = tree.filter_sort(t);
        let path = tree.insertion_path(&items)?;
        let anchor = path.last().copied().unwrap_or_else(|| tree.root());
        for pi in leaves_below(tree, anchor, &leaf_pattern) {
            let exclusive = &exclusives[pi];
            for &item in &items {
                if exclusive.contains(&item) {
                    *scores.0.get_mut(&item).expect("frequent item") += roprs[pi];
                }
            }
        }
    }
    Ok(scores)
}

/// Pattern indices of all leaves at or below `anchor`, in depth-first child
/// order.
fn leaves_below(
    tree: &FPTree,
    anchor: usize,
    leaf_pattern: &HashMap<usize, usize>,
) -> Vec<usize> {
    let mut out = Vec::new();
    let mut stack = vec![anchor];
    while let Some(idx) = stack.pop() {
        let node = tree.node(idx);
        if node.children.is_empty() {
            if let Some(&pi) = leaf_pattern.get(&idx) {
                out.push(pi);
            }
        } else {
            for &c in node.children.iter().rev() {
                stack.push(c);
            }
        }
    }
    out
}

/// Aggregates item scores into per-variable sums and a deterministic
/// ranking.
pub fn variable_importance(item_scores: &ItemScores, db: &TransactionDb) -> ImportanceTable {
    let n = db.n_variables();
    let mut variable_scores = vec![0.0f64; n];
    for (&item, &score) in &item_scores.0 {
        if item.variable_id < n {
            variable_scores[item.variable_id] += score;
        }
    }
    let mut ranking: Vec<usize> = (0..n).collect();
    ranking.sort_by(|&a, &b| {
        variable_scores[b]
            .total_cmp(&variable_scores[a])
            .then(a.cmp(&b))
    });
    ImportanceTable {
        item_scores: item_scores.0.clone(),
        variable_scores,
        ranking,
        variable_names: db.variable_names.clone(),
    }
}

/// Computes the importance table under `mode` and reports whether the
/// alternative exclusive-item resolution would rank variables differently.
pub fn importance_with_divergence(
    tree: &FPTree,
    db: &TransactionDb,
    mode: ExclusiveMode,
) -> Result<(ImportanceTable, bool)> {
    let table = variable_importance(&score_items_with(tree, db, mode)?, db);
    let alt_mode = match mode {
        ExclusiveMode::Structural => ExclusiveMode::ItemIdentity,
        ExclusiveMode::ItemIdentity => ExclusiveMode::Structural,
    };
    let alt_ranking = variable_importance(&score_items_with(tree, db, alt_mode)?, db).ranking;
    let differs = alt_ranking != table.ranking;
    Ok((table, differs))
}

/// Keeps all but the `drop_k` lowest-scored variables, returning kept ids in
/// original order. Among tied scores, higher variable ids drop first.
pub fn select_variables(table: &ImportanceTable, drop_k: usize) -> Result<Vec<usize>> {
    let n = table.variable_scores.len();
    if drop_k >= n {
        return Err(Error::Contract(format!(
            "cannot drop {drop_k} of {n} variables"
        )));
    }
    let mut kept: Vec<usize> = table.ranking[..n - drop_k].to_vec();
    kept.sort_unstable();
    Ok(kept)
}
