//! Frequent attribute itemsets of a cluster's learners.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{LearnerProfile, TimeBin};

/// Attribute positions, 1-based as `a1..a5`.
pub const CURRENT_SKILL: u8 = 1;
pub const TARGET_SKILL: u8 = 2;
pub const STRATEGY: u8 = 3;
pub const PRESENTATION: u8 = 4;
pub const LEARNING_TIME: u8 = 5;

/// One attribute value. Skills and nominal ids are stored as-is; learning time
/// is stored as the lower bound of its [`TimeBin`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Item {
    pub attribute: u8,
    pub value: u32,
}

impl Item {
    pub fn new(attribute: u8, value: u32) -> Self {
        Item { attribute, value }
    }

    pub fn time_bin(bin: TimeBin) -> Self {
        Item::new(LEARNING_TIME, bin.lower)
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.attribute == LEARNING_TIME {
            if let Some(bin) = TimeBin::from_lower(self.value) {
                return write!(f, "a5={bin}");
            }
        }
        write!(f, "a{}={}", self.attribute, self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transaction {
    pub learner_id: String,
    /// Sorted by attribute, one item each.
    items: [Item; 5],
}

impl Transaction {
    pub fn from_profile(profile: &LearnerProfile) -> Self {
        Transaction {
            learner_id: profile.learner_id.clone(),
            items: [
                Item::new(CURRENT_SKILL, u32::from(profile.current_skill)),
                Item::new(TARGET_SKILL, u32::from(profile.target_skill)),
                Item::new(STRATEGY, u32::from(profile.strategy)),
                Item::new(PRESENTATION, u32::from(profile.presentation)),
                Item::time_bin(profile.time_bin()),
            ],
        }
    }

    /// `items` must hold one item for each attribute 1..=5.
    pub fn new(learner_id: impl Into<String>, mut items: [Item; 5]) -> Result<Self> {
        items.sort();
        if items
            .iter()
            .zip(1..=5u8)
            .any(|(item, a)| item.attribute != a)
        {
            return Err(Error::InvalidArgument(
                "a transaction needs exactly one item per attribute".into(),
            ));
        }
        Ok(Transaction {
            learner_id: learner_id.into(),
            items,
        })
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    /// `itemset` must be sorted.
    pub fn contains_all(&self, itemset: &[Item]) -> bool {
        itemset
            .iter()
            .all(|item| self.items[usize::from(item.attribute - 1)] == *item)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequentItemset {
    /// Sorted by `(attribute, value)`.
    pub items: Vec<Item>,
    pub support: f64,
    pub count: usize,
}

/// Smallest count whose support reaches `sl` among `n` transactions.
pub fn min_support_count(n: usize, sl: f64) -> usize {
    // absorbs rounding in sl * n, e.g. 0.3 * 10
    ((sl * n as f64 - 1e-9).ceil() as usize).max(1)
}

fn count_support(
    transactions: &[Transaction],
    candidates: Vec<Vec<Item>>,
    min_count: usize,
    n: usize,
) -> Vec<FrequentItemset> {
    candidates
        .into_iter()
        .filter_map(|items| {
            let count = transactions
                .iter()
                .filter(|t| t.contains_all(&items))
                .count();
            (count >= min_count).then(|| FrequentItemset {
                items,
                support: count as f64 / n as f64,
                count,
            })
        })
        .collect()
}

/// Join step plus subset pruning over the sorted frequent `(k-1)`-itemsets.
fn generate_candidates(previous: &[FrequentItemset]) -> Vec<Vec<Item>> {
    let known: HashSet<&[Item]> = previous.iter().map(|f| f.items.as_slice()).collect();
    let mut out = Vec::new();
    for (i, a) in previous.iter().enumerate() {
        let prefix = &a.items[..a.items.len() - 1];
        for b in &previous[i + 1..] {
            if &b.items[..b.items.len() - 1] != prefix {
                // sorted input: no later itemset shares this prefix
                break;
            }
            let last_a = a.items[a.items.len() - 1];
            let last_b = b.items[b.items.len() - 1];
            if last_a.attribute == last_b.attribute {
                continue;
            }
            let mut candidate = a.items.clone();
            candidate.push(last_b);
            let all_subsets_frequent = (0..candidate.len() - 2).all(|drop| {
                let subset: Vec<Item> = candidate
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != drop)
                    .map(|(_, &item)| item)
                    .collect();
                known.contains(subset.as_slice())
            });
            if all_subsets_frequent {
                out.push(candidate);
            }
        }
    }
    out
}

/// Level-wise Apriori. Returns every itemset with support `>= sl`, ordered by
/// size and then lexicographically.
pub fn apriori(transactions: &[Transaction], sl: f64) -> Result<Vec<FrequentItemset>> {
    if transactions.is_empty() {
        return Err(Error::NoTransactions);
    }
    if !(sl > 0.0 && sl <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "support level must be in (0, 1], got {sl}"
        )));
    }
    let n = transactions.len();
    let min_count = min_support_count(n, sl);

    let mut singletons: Vec<Item> = transactions.iter().flat_map(|t| t.items).collect();
    singletons.sort();
    singletons.dedup();
    let mut level = count_support(
        transactions,
        singletons.into_iter().map(|i| vec![i]).collect(),
        min_count,
        n,
    );

    let mut all = Vec::new();
    while !level.is_empty() {
        let candidates = generate_candidates(&level);
        all.append(&mut level);
        level = count_support(transactions, candidates, min_count, n);
    }
    Ok(all)
}

fn is_proper_subset(small: &[Item], big: &[Item]) -> bool {
    small.len() < big.len() && small.iter().all(|i| big.binary_search(i).is_ok())
}

/// Itemsets with no frequent proper superset.
pub fn maximal_itemsets(frequent: &[FrequentItemset]) -> Vec<FrequentItemset> {
    frequent
        .iter()
        .filter(|f| {
            !frequent
                .iter()
                .any(|g| is_proper_subset(&f.items, &g.items))
        })
        .cloned()
        .collect()
}

/// The tag cloud: maximal itemsets of the largest size, then of the highest
/// support. Every tie survives, in lexicographic order.
pub fn select_tag(frequent: &[FrequentItemset]) -> Vec<FrequentItemset> {
    let maximal = maximal_itemsets(frequent);
    let Some(size) = maximal.iter().map(|f| f.items.len()).max() else {
        return Vec::new();
    };
    let count = maximal
        .iter()
        .filter(|f| f.items.len() == size)
        .map(|f| f.count)
        .max()
        .unwrap_or(0);
    let mut tags: Vec<FrequentItemset> = maximal
        .into_iter()
        .filter(|f| f.items.len() == size && f.count == count)
        .collect();
    tags.sort_by(|a, b| a.items.cmp(&b.items));
    tags
}
