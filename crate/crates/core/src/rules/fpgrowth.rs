//! FP-Growth frequent itemset mining.

use std::collections::HashMap;

use super::condition::{Condition, Literal};
use crate::data::DiscretizedDataset;
use crate::error::DataError;

const ROOT: usize = 0;

#[derive(Debug)]
struct Node {
    item: usize,
    count: usize,
    parent: usize,
    children: Vec<usize>,
}

/// Prefix tree over rank-ordered transactions. Item `r` is the `r`-th most
/// frequent item of the initial pass; lower ranks sit closer to the root.
#[derive(Debug)]
struct FpTree {
    nodes: Vec<Node>,
    /// Per rank, every node carrying that item.
    header: Vec<Vec<usize>>,
}

impl FpTree {
    fn new(ranks: usize) -> Self {
        FpTree {
            nodes: vec![Node {
                item: usize::MAX,
                count: 0,
                parent: ROOT,
                children: Vec::new(),
            }],
            header: vec![Vec::new(); ranks],
        }
    }

    /// `path` must be ascending in rank.
    fn insert(&mut self, path: &[usize], count: usize) {
        let mut cur = ROOT;
        for &item in path {
            let next = self.nodes[cur]
                .children
                .iter()
                .copied()
                .find(|&c| self.nodes[c].item == item);
            cur = match next {
                Some(c) => c,
                None => {
                    let id = self.nodes.len();
                    self.nodes.push(Node {
                        item,
                        count: 0,
                        parent: cur,
                        children: Vec::new(),
                    });
                    self.nodes[cur].children.push(id);
                    self.header[item].push(id);
                    id
                }
            };
            self.nodes[cur].count += count;
        }
    }

    fn prefix_path(&self, mut node: usize) -> Vec<usize> {
        let mut path = Vec::new();
        node = self.nodes[node].parent;
        while node != ROOT {
            path.push(self.nodes[node].item);
            node = self.nodes[node].parent;
        }
        path.reverse();
        path
    }
}

struct Miner<'a> {
    min_support: usize,
    max_length: usize,
    out: &'a mut Vec<(Vec<usize>, usize)>,
}

impl Miner<'_> {
    fn grow(&mut self, tree: &FpTree, suffix: &mut Vec<usize>) {
        for item in (0..tree.header.len()).rev() {
            let nodes = &tree.header[item];
            let support: usize = nodes.iter().map(|&n| tree.nodes[n].count).sum();
            if support < self.min_support {
                continue;
            }
            suffix.push(item);
            self.out.push((suffix.clone(), support));
            if suffix.len() < self.max_length {
                let base: Vec<(Vec<usize>, usize)> = nodes
                    .iter()
                    .map(|&n| (tree.prefix_path(n), tree.nodes[n].count))
                    .filter(|(p, _)| !p.is_empty())
                    .collect();
                let mut freq = vec![0usize; item];
                for (path, count) in &base {
                    for &i in path {
                        freq[i] += count;
                    }
                }
                if freq.iter().any(|&f| f >= self.min_support) {
                    let mut cond = FpTree::new(item);
                    for (path, count) in &base {
                        let kept: Vec<usize> = path
                            .iter()
                            .copied()
                            .filter(|&i| freq[i] >= self.min_support)
                            .collect();
                        if !kept.is_empty() {
                            cond.insert(&kept, *count);
                        }
                    }
                    self.grow(&cond, suffix);
                }
            }
            suffix.pop();
        }
    }
}

/// Mine all nonempty itemsets of length `<= max_length` occurring in at
/// least `min_support` transactions. Items within a transaction must be
/// distinct. Each returned itemset is sorted ascending.
pub fn fp_growth(
    transactions: &[Vec<u32>],
    min_support: usize,
    max_length: usize,
) -> Vec<(Vec<u32>, usize)> {
    let min_support = min_support.max(1);
    if max_length == 0 {
        return Vec::new();
    }
    let mut counts: HashMap<u32, usize> = HashMap::new();
    for t in transactions {
        for &i in t {
            *counts.entry(i).or_default() += 1;
        }
    }
    let mut frequent: Vec<(u32, usize)> = counts
        .into_iter()
        .filter(|&(_, c)| c >= min_support)
        .collect();
    frequent.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let rank: HashMap<u32, usize> = frequent.iter().enumerate().map(|(r, &(i, _))| (i, r)).collect();

    let mut tree = FpTree::new(frequent.len());
    let mut path = Vec::new();
    for t in transactions {
        path.clear();
        path.extend(t.iter().filter_map(|i| rank.get(i).copied()));
        path.sort_unstable();
        tree.insert(&path, 1);
    }

    let mut ranked = Vec::new();
    Miner {
        min_support,
        max_length,
        out: &mut ranked,
    }
    .grow(&tree, &mut Vec::new());

    ranked
        .into_iter()
        .map(|(ranks, support)| {
            let mut items: Vec<u32> = ranks.iter().map(|&r| frequent[r].0).collect();
            items.sort_unstable();
            (items, support)
        })
        .collect()
}

/// Default minimum support: `max(5, ceil(0.01 N))`.
pub fn default_min_support(n: usize) -> usize {
    5.max(n.div_ceil(100))
}

pub const DEFAULT_MAX_LENGTH: usize = 6;

/// Frequent conditions over the minable attributes (the protected, outcome
/// and prediction columns never appear as literals).
///
/// The empty condition is not part of the result. Output is sorted by
/// `(length, canonical_key)`.
pub fn mine_frequent_itemsets(
    dataset: &DiscretizedDataset,
    model_id: &str,
    min_support: usize,
    max_length: usize,
) -> Result<Vec<(Condition, usize)>, DataError> {
    dataset.predictions(model_id)?;
    Ok(mine_conditions(dataset, min_support, max_length))
}

/// Model-independent core of [`mine_frequent_itemsets`].
pub fn mine_conditions(
    dataset: &DiscretizedDataset,
    min_support: usize,
    max_length: usize,
) -> Vec<(Condition, usize)> {
    let attrs = dataset.minable_attributes();
    let mut offsets = Vec::with_capacity(attrs.len());
    let mut decode = Vec::new();
    for &a in &attrs {
        offsets.push(decode.len() as u32);
        for code in 0..dataset.attributes[a].categories.len() as u32 {
            decode.push(Literal { attr: a, code });
        }
    }
    let transactions: Vec<Vec<u32>> = (0..dataset.len())
        .map(|i| {
            attrs
                .iter()
                .zip(&offsets)
                .map(|(&a, &off)| off + dataset.code(i, a))
                .collect()
        })
        .collect();

    let mut out: Vec<(Condition, String, usize)> = fp_growth(&transactions, min_support, max_length)
        .into_iter()
        .map(|(items, support)| {
            let cond = Condition::new(items.iter().map(|&i| decode[i as usize]).collect());
            let key = cond.canonical_key(dataset);
            (cond, key, support)
        })
        .collect();
    out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.1.cmp(&b.1)));
    out.into_iter().map(|(c, _, s)| (c, s)).collect()
}
