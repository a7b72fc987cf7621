//! FP-tree construction over discretized transactions and extraction of
//! branch frequent patterns.
//!
//! Items whose support ratio falls below the configured minimum are dropped
//! from every transaction; survivors are sorted by descending support (ties
//! by ascending item id) and inserted into a prefix tree where shared
//! prefixes merge and counts accumulate. Each root-to-leaf branch is a
//! frequent pattern; branch support is counted over the full database by
//! subset containment, so a branch's joint support may exceed its leaf count.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::dataset::{Item, Transaction, TransactionDb};
use crate::error::{Error, Result};

/// Mining parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiningConfig {
    /// Minimum support ratio sigma in (0, 1].
    pub min_support_ratio: f64,
}

impl MiningConfig {
    pub fn new(min_support_ratio: f64) -> Result<Self> {
        if !(min_support_ratio > 0.0 && min_support_ratio <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "min support ratio must be in (0, 1], got {min_support_ratio}"
            )));
        }
        Ok(Self { min_support_ratio })
    }
}

#[derive(Debug, Clone)]
pub struct FPNode {
    pub item: Option<Item>,
    pub count: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Transactions whose insertion path ends at this node.
    pub terminal_count: usize,
    /// How many of those carry a positive label.
    pub terminal_positive: usize,
}

#[derive(Debug, Clone)]
pub struct HeaderEntry {
    pub item: Item,
    pub support: usize,
    /// All nodes holding this item, in creation order.
    pub nodes: Vec<usize>,
}

/// Prefix tree with header table. Node 0 is the virtual root.
#[derive(Debug, Clone)]
pub struct FPTree {
    nodes: Vec<FPNode>,
    header: Vec<HeaderEntry>,
    rank: HashMap<Item, usize>,
}

/// A root-to-leaf branch with its database-wide statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequentPattern {
    /// Items in path order (root to leaf).
    pub items: Vec<Item>,
    /// Node indices along the path, root excluded.
    pub node_path: Vec<usize>,
    /// Count of database transactions containing every pattern item.
    pub support: usize,
    /// How many of those carry a positive label.
    pub positive_count: usize,
    /// Relative object purity ratio, filled by the importance pass.
    pub ropr: f64,
}

/// Serializable form of one mined pattern (one JSON line per pattern).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PatternRecord {
    pub items: Vec<String>,
    pub support: usize,
    pub positive_count: usize,
    pub ropr: f64,
}

impl FrequentPattern {
    pub fn to_record(&self, db: &TransactionDb) -> PatternRecord {
        PatternRecord {
            items: self.items.iter().map(|&i| db.display_label(i)).collect(),
            support: self.support,
            positive_count: self.positive_count,
            ropr: self.ropr,
        }
    }
}

/// A transaction projected onto the frequent items, in global item order.
/// Unlike [`Transaction`], item order here is frequency order, not id order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredTransaction {
    pub items: Vec<Item>,
    pub label: bool,
}

/// Counts per-item support, drops infrequent items from every transaction,
/// and sorts the survivors by the global order: descending support, ties by
/// ascending `(variable_id, bin_id)`.
///
/// Returns the frequent items with their supports plus the filtered
/// transactions (one per input transaction, possibly empty, in input order).
pub fn order_items(
    db: &TransactionDb,
    config: &MiningConfig,
) -> Result<(Vec<(Item, usize)>, Vec<FilteredTransaction>)> {
    if db.tn() == 0 {
        return Err(Error::Contract("mining requires a non-empty database".into()));
    }
    let mut counts: HashMap<Item, usize> = HashMap::new();
    for t in &db.transactions {
        for &item in t.items() {
            *counts.entry(item).or_insert(0) += 1;
        }
    }
    let tn = db.tn() as f64;
    let mut frequent: Vec<(Item, usize)> = counts
        .into_iter()
        .filter(|&(_, support)| support as f64 / tn >= config.min_support_ratio)
        .collect();
    frequent.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

    let rank: HashMap<Item, usize> = frequent
        .iter()
        .enumerate()
        .map(|(r, &(item, _))| (item, r))
        .collect();
    let filtered = db
        .transactions
        .iter()
        .map(|t| {
            let mut items: Vec<Item> = t
                .items()
                .iter()
                .copied()
                .filter(|i| rank.contains_key(i))
                .collect();
            items.sort_by_key(|i| rank[i]);
            FilteredTransaction {
                items,
                label: t.label,
            }
        })
        .collect();
    Ok((frequent, filtered))
}

/// Builds the tree from transactions already filtered and sorted by
/// [`order_items`].
pub fn build_tree(filtered: &[FilteredTransaction], order: &[(Item, usize)]) -> Result<FPTree> {
    let rank: HashMap<Item, usize> = order
        .iter()
        .enumerate()
        .map(|(r, &(item, _))| (item, r))
        .collect();
    let mut tree = FPTree {
        nodes: vec![FPNode {
            item: None,
            count: 0,
            parent: None,
            children: Vec::new(),
            terminal_count: 0,
            terminal_positive: 0,
        }],
        header: order
            .iter()
            .map(|&(item, support)| HeaderEntry {
                item,
                support,
                nodes: Vec::new(),
            })
            .collect(),
        rank,
    };
    for t in filtered {
        tree.check_ordered(&t.items)?;
        tree.insert(&t.items, t.label);
    }
    Ok(tree)
}

/// Convenience: order, filter, and build in one step.
impl FPTree {
    pub fn from_db(db: &TransactionDb, config: &MiningConfig) -> Result<FPTree> {
        let (order, filtered) = order_items(db, config)?;
        build_tree(&filtered, &order)
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn node(&self, idx: usize) -> &FPNode {
        &self.nodes[idx]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() == 1
    }

    pub fn header(&self) -> &[HeaderEntry] {
        &self.header
    }

    pub fn item_rank(&self, item: Item) -> Option<usize> {
        self.rank.get(&item).copied()
    }

    /// Projects a raw transaction onto the tree's frequent items, sorted in
    /// the tree's global order.
    pub fn filter_sort(&self, t: &Transaction) -> Vec<Item> {
        let mut items: Vec<Item> = t
            .items()
            .iter()
            .copied()
            .filter(|i| self.rank.contains_key(i))
            .collect();
        items.sort_by_key(|i| self.rank[i]);
        items
    }

    pub fn child_by_item(&self, node: usize, item: Item) -> Option<usize> {
        self.nodes[node]
            .children
            .iter()
            .copied()
            .find(|&c| self.nodes[c].item == Some(item))
    }

    fn check_ordered(&self, items: &[Item]) -> Result<()> {
        let mut prev: Option<usize> = None;
        for &item in items {
            let r = self.rank.get(&item).copied().ok_or_else(|| {
                Error::Contract(format!(
                    "item ({}, {}) is not frequent under this tree's order",
                    item.variable_id, item.bin_id
                ))
            })?;
            if let Some(p) = prev {
                if r <= p {
                    return Err(Error::Contract(
                        "transaction items are not in this tree's global order".into(),
                    ));
                }
            }
            prev = Some(r);
        }
        Ok(())
    }

    fn insert(&mut self, items: &[Item], label: bool) {
        if items.is_empty() {
            return;
        }
        let mut current = 0;
        for &item in items {
            let next = match self.child_by_item(current, item) {
                Some(c) => c,
                None => {
                    let idx = self.nodes.len();
                    self.nodes.push(FPNode {
                        item: Some(item),
                        count: 0,
                        parent: Some(current),
                        children: Vec::new(),
                        terminal_count: 0,
                        terminal_positive: 0,
                    });
                    self.nodes[current].children.push(idx);
                    let rank = self.rank[&item];
                    self.header[rank].nodes.push(idx);
                    idx
                }
            };
            self.nodes[next].count += 1;
            current = next;
        }
        self.nodes[current].terminal_count += 1;
        if label {
            self.nodes[current].terminal_positive += 1;
        }
    }

    /// The unique root-descending node sequence a filtered transaction
    /// traces. Empty if the transaction has no frequent items.
    pub fn insertion_path(&self, items: &[Item]) -> Result<Vec<usize>> {
        self.check_ordered(items)?;
        let mut path = Vec::with_capacity(items.len());
        let mut current = 0;
        for &item in items {
            current = self.child_by_item(current, item).ok_or_else(|| {
                Error::Contract(
                    "transaction does not trace a path in this tree; it was not part of the \
                     database the tree was built from"
                        .into(),
                )
            })?;
            path.push(current);
        }
        Ok(path)
    }

    /// Indented `item:count` rendering for docs and debugging.
    pub fn render(&self, db: &TransactionDb) -> String {
        let mut out = String::new();
        let mut stack: Vec<(usize, usize)> = self.nodes[0]
            .children
            .iter()
            .rev()
            .map(|&c| (c, 0))
            .collect();
        while let Some((idx, depth)) = stack.pop() {
            let node = &self.nodes[idx];
            let label = node
                .item
                .map(|i| db.display_label(i))
                .unwrap_or_else(|| "(root)".into());
            out.push_str(&"  ".repeat(depth));
            out.push_str(&format!("{label}:{}\n", node.count));
            for &c in node.children.iter().rev() {
                stack.push((c, depth + 1));
            }
        }
        out
    }
}

/// Counts how many database transactions contain every item of `pattern`,
/// and how many of those are positive. The empty pattern is contained in
/// every transaction.
pub fn pattern_support(db: &TransactionDb, pattern: &[Item]) -> (usize, usize) {
    let mut support = 0;
    let mut positive = 0;
    for t in &db.transactions {
        if t.contains_all(pattern) {
            support += 1;
            if t.label {
                positive += 1;
            }
        }
    }
    (support, positive)
}

/// Enumerates root-to-leaf branches in depth-first child order, with
/// support and positive count taken over the full database.
pub fn branches(tree: &FPTree, db: &TransactionDb) -> Vec<FrequentPattern> {
    let mut patterns = Vec::new();
    // push children reversed so the first child is explored first
    let mut stack: Vec<(usize, Vec<usize>)> = tree.nodes[0]
        .children
        .iter()
        .rev()
        .map(|&c| (c, Vec::new()))
        .collect();
    while let Some((idx, mut path)) = stack.pop() {
        path.push(idx);
        let node = &tree.nodes[idx];
        if node.children.is_empty() {
            let items: Vec<Item> = path
                .iter()
                .map(|&n| tree.nodes[n].item.expect("non-root node has an item"))
                .collect();
            let (support, positive_count) = pattern_support(db, &items);
            patterns.push(FrequentPattern {
                items,
                node_path: path,
                support,
                positive_count,
                ropr: 0.0,
            });
        } else {
            for &c in node.children.iter().rev() {
                stack.push((c, path.clone()));
            }
        }
    }
    patterns
}
