//! Local structure search for the parents of the outcome.
//!
//! Instead of learning a full equivalence class over every variable, the
//! search scores candidate parent sets of the outcome alone with the BIC of
//! the multinomial conditional model `P(Y | parents)`:
//!
//! ```text
//! BIC(P) = sum_c sum_y N_cy ln(N_cy / N_c) - (|Y| - 1) * prod_{p in P} |p| * ln(N) / 2
//! ```
//!
//! Forward selection adds the best-improving attribute while the improvement
//! exceeds a relative tolerance, then backward elimination removes attributes while that
//! improves the score. Ties go to the lexicographically smallest name.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::data::{DiscretizedDataset, Role};
use crate::error::MiningError;

pub const MAX_PARENTS: usize = 5;
pub const MIN_ROWS: usize = 10;
/// Relative score change below which a step counts as no improvement.
const SCORE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchOp {
    Add,
    Remove,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub operation: SearchOp,
    pub attribute: String,
    pub score_delta: f64,
    pub cumulative_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParentSet {
    pub target: String,
    pub parents: BTreeSet<String>,
    /// Score of the parentless model the trace starts from.
    pub empty_score: f64,
    pub score: f64,
    pub score_trace: Vec<TraceStep>,
    /// Set when forward selection stopped at [`MAX_PARENTS`] with an improving
    /// candidate left.
    pub cap_reached: bool,
}

impl ParentSet {
    /// Re-apply the trace to the empty set.
    pub fn replay(&self) -> BTreeSet<String> {
        let mut set = BTreeSet::new();
        for step in &self.score_trace {
            match step.operation {
                SearchOp::Add => set.insert(step.attribute.clone()),
                SearchOp::Remove => set.remove(&step.attribute),
            };
        }
        set
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvingSuggestion {
    pub resolving: BTreeSet<String>,
    pub excluded_protected: String,
    /// Proxies that were among the parents.
    pub excluded_proxies: BTreeSet<String>,
}

struct Scorer<'a> {
    dataset: &'a DiscretizedDataset,
    target: usize,
    target_arity: usize,
    ln_n: f64,
}

impl Scorer<'_> {
    fn score(&self, parents: &[usize]) -> f64 {
        let ds = self.dataset;
        let mut table: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
        let mut key = Vec::with_capacity(parents.len());
        for i in 0..ds.len() {
            key.clear();
            key.extend(parents.iter().map(|&p| ds.code(i, p)));
            let row = match table.get_mut(&key) {
                Some(r) => r,
                None => table.entry(key.clone()).or_insert_with(|| vec![0; self.target_arity]),
            };
            row[ds.code(i, self.target) as usize] += 1;
        }
        let loglik: f64 = table
            .values()
            .map(|counts| {
                let nc: usize = counts.iter().sum();
                counts
                    .iter()
                    .filter(|&&c| c > 0)
                    .map(|&c| c as f64 * (c as f64 / nc as f64).ln())
                    .sum::<f64>()
            })
            .sum();
        let configs: f64 = parents
            .iter()
            .map(|&p| ds.attributes[p].categories.len() as f64)
            .product();
        let params = (self.target_arity as f64 - 1.0) * configs;
        loglik - params * self.ln_n / 2.0
    }
}

fn improves(delta: f64, score: f64) -> bool {
    delta > SCORE_EPS * score.abs().max(1.0)
}

/// Greedy forward-backward search for the parents of the outcome column.
///
/// Candidates are every attribute except the outcome and prediction columns;
/// the protected attribute is a candidate like any other.
pub fn discover_parents(dataset: &DiscretizedDataset) -> Result<ParentSet, MiningError> {
    let n = dataset.len();
    if n < MIN_ROWS {
        return Err(MiningError::TooFewRows {
            found: n,
            required: MIN_ROWS,
        });
    }
    let target = dataset.outcome_index();
    let scorer = Scorer {
        dataset,
        target,
        target_arity: dataset.attributes[target].categories.len(),
        ln_n: (n as f64).ln(),
    };

    let mut candidates: Vec<usize> = (0..dataset.attributes.len())
        .filter(|&j| j != target && dataset.attributes[j].role != Role::Prediction)
        .collect();
    candidates.sort_by(|&a, &b| dataset.attributes[a].name.cmp(&dataset.attributes[b].name));

    let empty_score = scorer.score(&[]);
    let mut parents: Vec<usize> = Vec::new();
    let mut score = empty_score;
    let mut trace = Vec::new();
    let mut cap_reached = false;

    loop {
        let mut best: Option<(usize, f64, f64)> = None;
        for &c in candidates.iter().filter(|c| !parents.contains(c)) {
            let mut trial = parents.clone();
            trial.push(c);
            let s = scorer.score(&trial);
            let delta = s - score;
            if best.is_none_or(|b| delta > b.1) {
                best = Some((c, delta, s));
            }
        }
        match best {
            Some((c, delta, s)) if improves(delta, score) => {
                if parents.len() >= MAX_PARENTS {
                    cap_reached = true;
                    break;
                }
                parents.push(c);
                score = s;
                trace.push(TraceStep {
                    operation: SearchOp::Add,
                    attribute: dataset.attributes[c].name.clone(),
                    score_delta: delta,
                    cumulative_score: score,
                });
            }
            _ => break,
        }
    }

    loop {
        let mut best: Option<(usize, f64, f64)> = None;
        let mut ordered = parents.clone();
        ordered.sort_by(|&a, &b| dataset.attributes[a].name.cmp(&dataset.attributes[b].name));
        for &c in &ordered {
            let trial: Vec<usize> = parents.iter().copied().filter(|&p| p != c).collect();
            let s = scorer.score(&trial);
            let delta = s - score;
            if best.is_none_or(|b| delta > b.1) {
                best = Some((c, delta, s));
            }
        }
        match best {
            Some((c, delta, s)) if improves(delta, score) => {
                parents.retain(|&p| p != c);
                score = s;
                trace.push(TraceStep {
                    operation: SearchOp::Remove,
                    attribute: dataset.attributes[c].name.clone(),
                    score_delta: delta,
                    cumulative_score: score,
                });
            }
            _ => break,
        }
    }

    Ok(ParentSet {
        target: dataset.attributes[target].name.clone(),
        parents: parents
            .iter()
            .map(|&p| dataset.attributes[p].name.clone())
            .collect(),
        empty_score,
        score,
        score_trace: trace,
        cap_reached,
    })
}

/// `parents \ ({protected} ∪ proxies)`.
pub fn suggest_resolving<'a>(
    parents: &ParentSet,
    protected: &str,
    proxies: impl IntoIterator<Item = &'a str>,
) -> ResolvingSuggestion {
    let proxies: BTreeSet<&str> = proxies.into_iter().collect();
    let mut resolving = BTreeSet::new();
    let mut excluded_proxies = BTreeSet::new();
    for p in &parents.parents {
        if p == protected {
            continue;
        }
        if proxies.contains(p.as_str()) {
            excluded_proxies.insert(p.clone());
        } else {
            resolving.insert(p.clone());
        }
    }
    ResolvingSuggestion {
        resolving,
        excluded_protected: protected.to_string(),
        excluded_proxies,
    }
}
