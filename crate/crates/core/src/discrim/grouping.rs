use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::mine::DiscriminatoryItemset;
use crate::rules::{Condition, Literal};

/// All itemsets sharing one assignment of the resolving attributes (a root
/// row of the attribute matrix).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemsetCollection {
    pub resolving_key: String,
    pub resolving_condition: Condition,
    /// Sorted by `(length, canonical_key)`.
    pub itemsets: Vec<DiscriminatoryItemset>,
    /// Size of the union of all member sets.
    pub total_items: usize,
    /// `(parent, child)` index pairs: the child's literals strictly extend the
    /// parent's with no itemset in between.
    pub hierarchy: Vec<(usize, usize)>,
    /// Display order of the rows.
    pub row_order: Vec<usize>,
}

impl ItemsetCollection {
    /// Itemsets with no parent in the hierarchy.
    pub fn roots(&self) -> Vec<usize> {
        let children: BTreeSet<usize> = self.hierarchy.iter().map(|e| e.1).collect();
        (0..self.itemsets.len()).filter(|i| !children.contains(i)).collect()
    }

    pub fn member_union(&self) -> BTreeSet<usize> {
        self.itemsets.iter().flat_map(|s| s.members()).collect()
    }
}

/// Partition itemsets by their resolving literals. Collections come out by
/// descending `total_items`, ties broken by resolving key.
pub fn group_by_resolving(itemsets: Vec<DiscriminatoryItemset>) -> Vec<ItemsetCollection> {
    let mut groups: BTreeMap<String, Vec<DiscriminatoryItemset>> = BTreeMap::new();
    for s in itemsets {
        groups.entry(s.resolving_key.clone()).or_default().push(s);
    }
    let mut out: Vec<ItemsetCollection> = groups
        .into_iter()
        .map(|(resolving_key, mut itemsets)| {
            itemsets.sort_by(|a, b| {
                a.condition
                    .len()
                    .cmp(&b.condition.len())
                    .then_with(|| a.canonical_key.cmp(&b.canonical_key))
            });
            let total_items = itemsets
                .iter()
                .flat_map(|s| s.members())
                .collect::<BTreeSet<_>>()
                .len();
            let hierarchy = build_inclusion_hierarchy(&itemsets);
            let row_order = order_rows_jaccard(&itemsets);
            ItemsetCollection {
                resolving_condition: itemsets[0].resolving_condition.clone(),
                resolving_key,
                itemsets,
                total_items,
                hierarchy,
                row_order,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        b.total_items
            .cmp(&a.total_items)
            .then_with(|| a.resolving_key.cmp(&b.resolving_key))
    });
    out
}

/// Hasse diagram of strict literal inclusion: the transitive reduction of
/// the subset order on the itemsets' literal sets.
pub fn build_inclusion_hierarchy(itemsets: &[DiscriminatoryItemset]) -> Vec<(usize, usize)> {
    let conditions: Vec<&Condition> = itemsets.iter().map(|s| &s.condition).collect();
    hasse_edges(&conditions)
}

pub(crate) fn hasse_edges(conditions: &[&Condition]) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for (a, ca) in conditions.iter().enumerate() {
        let below: Vec<usize> = (0..conditions.len())
            .filter(|&b| conditions[b].is_proper_subset_of(ca))
            .collect();
        for &b in &below {
            let covered = below
                .iter()
                .any(|&c| c != b && conditions[b].is_proper_subset_of(conditions[c]));
            if !covered {
                edges.push((b, a));
            }
        }
    }
    edges.sort_unstable();
    edges
}

/// Up to this many rows the order is checked against the exact optimum.
const EXACT_LIMIT: usize = 10;
/// Above this many rows only segment reversals are tried.
const MOVE_SEARCH_LIMIT: usize = 64;

fn jaccard(a: &[Literal], b: &[Literal]) -> f64 {
    let inter = a.iter().filter(|l| b.contains(l)).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Row order keeping Jaccard-similar literal sets adjacent.
///
/// A greedy chain starts at the largest itemset (by member count) and
/// repeatedly appends the unvisited itemset most similar to the last one,
/// ties to the smaller canonical key. Local search then improves the chain
/// and may move the first row. For small collections the exact optimum
/// replaces the chain when it is strictly better.
pub fn order_rows_jaccard(itemsets: &[DiscriminatoryItemset]) -> Vec<usize> {
    let literals: Vec<&[Literal]> = itemsets.iter().map(|s| s.condition.literals()).collect();
    let keys: Vec<&str> = itemsets.iter().map(|s| s.canonical_key.as_str()).collect();
    let sizes: Vec<usize> = itemsets.iter().map(|s| s.size()).collect();
    greedy_chain(&literals, &keys, &sizes)
}

pub(crate) fn greedy_chain(literals: &[&[Literal]], keys: &[&str], sizes: &[usize]) -> Vec<usize> {
    let n = literals.len();
    if n == 0 {
        return Vec::new();
    }
    let start = (0..n)
        .min_by(|&a, &b| sizes[b].cmp(&sizes[a]).then_with(|| keys[a].cmp(keys[b])))
        .expect("nonempty");
    let mut visited = vec![false; n];
    let mut order = vec![start];
    visited[start] = true;
    while order.len() < n {
        let last = *order.last().expect("nonempty");
        let next = (0..n)
            .filter(|&i| !visited[i])
            .max_by(|&a, &b| {
                jaccard(literals[last], literals[a])
                    .total_cmp(&jaccard(literals[last], literals[b]))
                    .then_with(|| keys[b].cmp(keys[a]))
            })
            .expect("unvisited remain");
        visited[next] = true;
        order.push(next);
    }
    refine_two_opt(literals, &mut order);
    if n <= EXACT_LIMIT {
        let (best, path) = best_path(literals);
        let sum: f64 = order.windows(2).map(|w| jaccard(literals[w[0]], literals[w[1]])).sum();
        if best > sum + 1e-12 {
            return path;
        }
    }
    order
}

/// Maximum adjacent-Jaccard path over all orders (Held-Karp).
fn best_path(literals: &[&[Literal]]) -> (f64, Vec<usize>) {
    let n = literals.len();
    let full = (1usize << n) - 1;
    let mut dp = vec![vec![f64::NEG_INFINITY; n]; 1 << n];
    let mut parent = vec![vec![usize::MAX; n]; 1 << n];
    for v in 0..n {
        dp[1 << v][v] = 0.0;
    }
    for mask in 1..=full {
        for last in 0..n {
            let here = dp[mask][last];
            if here == f64::NEG_INFINITY {
                continue;
            }
            for next in (0..n).filter(|&v| mask & (1 << v) == 0) {
                let m = mask | (1 << next);
                let value = here + jaccard(literals[last], literals[next]);
                if value > dp[m][next] {
                    dp[m][next] = value;
                    parent[m][next] = last;
                }
            }
        }
    }
    let mut last = (0..n)
        .max_by(|&a, &b| dp[full][a].total_cmp(&dp[full][b]).then(b.cmp(&a)))
        .expect("nonempty");
    let best = dp[full][last];
    let mut mask = full;
    let mut path = vec![last];
    while parent[mask][last] != usize::MAX {
        let prev = parent[mask][last];
        mask &= !(1 << last);
        last = prev;
        path.push(last);
    }
    path.reverse();
    (best, path)
}

/// Local search after the greedy chain: segment reversals and single-row
/// moves, each taken only when it strictly raises the adjacent-Jaccard sum.
fn refine_two_opt(literals: &[&[Literal]], order: &mut Vec<usize>) {
    let n = order.len();
    let sim: Vec<Vec<f64>> = (0..n)
        .map(|a| (0..n).map(|b| jaccard(literals[a], literals[b])).collect())
        .collect();
    let total = |o: &[usize]| o.windows(2).map(|w| sim[w[0]][w[1]]).sum::<f64>();
    // Reversing order[i..=j] only changes the edges at its two ends.
    let ends = |o: &[usize], i: usize, j: usize, reversed: bool| {
        let (first, last) = if reversed { (o[j], o[i]) } else { (o[i], o[j]) };
        let left = if i > 0 { sim[o[i - 1]][first] } else { 0.0 };
        let right = if j + 1 < n { sim[last][o[j + 1]] } else { 0.0 };
        left + right
    };
    loop {
        let mut improved = false;
        for i in 0..n {
            for j in i + 1..n {
                if ends(order, i, j, true) > ends(order, i, j, false) + 1e-12 {
                    order[i..=j].reverse();
                    improved = true;
                }
            }
        }
        if n <= MOVE_SEARCH_LIMIT {
            for i in 0..n {
                for k in 0..n {
                    if k == i {
                        continue;
                    }
                    let mut trial = order.clone();
                    let row = trial.remove(i);
                    trial.insert(k, row);
                    if total(&trial) > total(order) + 1e-12 {
                        *order = trial;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }
}

/// Sum of Jaccard similarities of adjacent rows.
pub fn adjacent_jaccard(itemsets: &[DiscriminatoryItemset], order: &[usize]) -> f64 {
    order
        .windows(2)
        .map(|w| jaccard(itemsets[w[0]].condition.literals(), itemsets[w[1]].condition.literals()))
        .sum()
}
