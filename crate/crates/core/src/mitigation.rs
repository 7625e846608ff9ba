//! Reject-option post-processing on user-selected itemsets.
//!
//! Predictions are hard labels, so the critical region is exactly the union
//! of the selected itemsets and each itemset receives the fewest flips that
//! bring its risk difference within the target.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::data::DiscretizedDataset;
use crate::discrim::{rates_under, AuditResult, DiscriminatoryItemset};
use crate::error::MitigationError;

/// Absorbs rounding when a flip count lands exactly on the target.
const TARGET_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flip {
    pub item_id: usize,
    pub old_label: u8,
    pub new_label: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MitigationPlan {
    pub model_id: String,
    /// Canonical keys in processing order.
    pub selected: Vec<String>,
    pub tau_target: f64,
    /// Ascending by item id; each item appears at most once.
    pub flips: Vec<Flip>,
    /// Selected itemsets that no admissible flip set could satisfy.
    #[serde(default)]
    pub unresolved: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemsetChange {
    pub canonical_key: String,
    pub selected: bool,
    pub rd_before: f64,
    pub rd_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MitigationReport {
    pub model_id: String,
    pub mitigated_model_id: String,
    pub itemsets: Vec<ItemsetChange>,
    pub accuracy_before: f64,
    pub accuracy_after: f64,
    /// Monitored itemsets whose rd changed sign and now exceeds the target.
    pub reverse_discrimination_count: usize,
    pub flip_count: usize,
}

pub fn within_target(rd: f64, tau_target: f64) -> bool {
    rd.abs() <= tau_target + TARGET_SLACK
}

/// Model id under which mitigated predictions are registered.
pub fn mitigated_model_id(model_id: &str) -> String {
    format!("{model_id}+U")
}

/// Look up `keys` in a result. Duplicate keys are collapsed.
pub fn select_itemsets(result: &AuditResult, keys: &[String]) -> Result<Vec<DiscriminatoryItemset>, MitigationError> {
    if keys.is_empty() {
        return Err(MitigationError::EmptySelection);
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for key in keys {
        if !seen.insert(key.as_str()) {
            continue;
        }
        let set = result
            .find(key)
            .ok_or_else(|| MitigationError::UnknownItemset(key.clone()))?;
        out.push(set.clone());
    }
    Ok(out)
}

/// Every itemset of the result: all of them already exceed the analysis tau.
pub fn default_selection(result: &AuditResult) -> Vec<DiscriminatoryItemset> {
    result.itemsets().cloned().collect()
}

fn risk(set: &DiscriminatoryItemset, preds: &[bool]) -> f64 {
    let (pp, pn, _, _) = rates_under(&set.members_protected, &set.members_nonprotected, preds);
    pp - pn
}

/// Items to flip so that `set` meets the target, or `None` if impossible.
///
/// The disadvantaged group is the one with the lower rate. Its non-beneficial
/// members are flipped up first; only once all of them are used do beneficial
/// members of the advantaged group get flipped down. If that order cannot
/// land inside the target (a single flip overshooting it), the smallest mixed
/// combination is used, preferring more upward flips.
fn flips_for(set: &DiscriminatoryItemset, preds: &[bool], taken: &[bool], tau: f64) -> Option<Vec<usize>> {
    let (np, nn) = (set.members_protected.len(), set.members_nonprotected.len());
    let (_, _, bp, bn) = rates_under(&set.members_protected, &set.members_nonprotected, preds);
    let rate = |b: f64, n: usize| if n == 0 { 0.0 } else { b / n as f64 };
    let rd0 = rate(bp as f64, np) - rate(bn as f64, nn);
    if within_target(rd0, tau) {
        return Some(Vec::new());
    }
    let protected_low = rd0 < 0.0;
    let (low, high) = if protected_low {
        (&set.members_protected, &set.members_nonprotected)
    } else {
        (&set.members_nonprotected, &set.members_protected)
    };
    let up: Vec<usize> = low.iter().copied().filter(|&i| !preds[i] && !taken[i]).collect();
    let down: Vec<usize> = high.iter().copied().filter(|&i| preds[i] && !taken[i]).collect();
    let rd_after = |x: usize, y: usize| {
        if protected_low {
            rate((bp + x) as f64, np) - rate((bn - y) as f64, nn)
        } else {
            rate((bp - y) as f64, np) - rate((bn + x) as f64, nn)
        }
    };

    let ordered = (1..=up.len())
        .map(|x| (x, 0))
        .chain((1..=down.len()).map(|y| (up.len(), y)));
    let chosen = ordered.into_iter().find(|&(x, y)| within_target(rd_after(x, y), tau)).or_else(|| {
        (0..=up.len())
            .flat_map(|x| (0..=down.len()).map(move |y| (x, y)))
            .filter(|&(x, y)| within_target(rd_after(x, y), tau))
            .min_by(|a, b| (a.0 + a.1).cmp(&(b.0 + b.1)).then(b.0.cmp(&a.0)))
    })?;
    let mut items: Vec<usize> = up[..chosen.0].iter().chain(&down[..chosen.1]).copied().collect();
    items.sort_unstable();
    Some(items)
}

/// Plan reject-option flips for `selected` under `model_id`.
///
/// Itemsets are processed by descending initial `|rd|` (ties by key), each
/// against the predictions as modified so far. Passes repeat until no
/// itemset needs further flips, since later flips in shared members can
/// push an earlier itemset back out of range. No item is flipped twice.
pub fn plan_reject_option(
    dataset: &DiscretizedDataset,
    model_id: &str,
    selected: &[DiscriminatoryItemset],
    tau_target: f64,
) -> Result<MitigationPlan, MitigationError> {
    if !(tau_target > 0.0 && tau_target.is_finite()) {
        return Err(MitigationError::InvalidTarget(tau_target));
    }
    let original = dataset.predictions(model_id)?;
    let mut preds = original.to_vec();
    let mut taken = vec![false; preds.len()];

    let mut seen = BTreeSet::new();
    let mut order: Vec<(&DiscriminatoryItemset, f64)> = selected
        .iter()
        .filter(|s| seen.insert(s.canonical_key.as_str()))
        .map(|s| (s, risk(s, &preds).abs()))
        .collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.canonical_key.cmp(&b.0.canonical_key)));

    loop {
        let mut changed = false;
        for (set, _) in &order {
            let Some(items) = flips_for(set, &preds, &taken, tau_target) else { continue };
            for i in items {
                preds[i] = !preds[i];
                taken[i] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let flips = (0..preds.len())
        .filter(|&i| taken[i])
        .map(|i| Flip {
            item_id: i,
            old_label: original[i] as u8,
            new_label: preds[i] as u8,
        })
        .collect();
    let unresolved = order
        .iter()
        .filter(|(s, _)| !within_target(risk(s, &preds), tau_target))
        .map(|(s, _)| s.canonical_key.clone())
        .collect();
    Ok(MitigationPlan {
        model_id: model_id.to_string(),
        selected: order.iter().map(|(s, _)| s.canonical_key.clone()).collect(),
        tau_target,
        flips,
        unresolved,
    })
}

fn accuracy(preds: &[bool], truth: &[bool]) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    preds.iter().zip(truth).filter(|(p, t)| p == t).count() as f64 / truth.len() as f64
}

/// Apply `plan` to a copy of the model's predictions.
///
/// `monitored` lists the itemsets to report on and must contain every
/// selected one. Reverse discrimination counts monitored itemsets whose rd
/// changed sign and whose new magnitude exceeds the plan's target.
pub fn apply_plan(
    dataset: &DiscretizedDataset,
    model_id: &str,
    plan: &MitigationPlan,
    monitored: &[DiscriminatoryItemset],
) -> Result<(Vec<bool>, MitigationReport), MitigationError> {
    let before = dataset.predictions(model_id)?;
    if let Some(key) = plan
        .selected
        .iter()
        .find(|k| !monitored.iter().any(|s| &s.canonical_key == *k))
    {
        return Err(MitigationError::UnknownItemset(key.clone()));
    }
    let mut after = before.to_vec();
    for f in &plan.flips {
        let found = *before
            .get(f.item_id)
            .ok_or(MitigationError::StalePlan {
                item_id: f.item_id,
                expected: f.old_label,
                found: u8::MAX,
            })? as u8;
        if found != f.old_label {
            return Err(MitigationError::StalePlan {
                item_id: f.item_id,
                expected: f.old_label,
                found,
            });
        }
        after[f.item_id] = f.new_label == 1;
    }

    let itemsets: Vec<ItemsetChange> = monitored
        .iter()
        .map(|s| ItemsetChange {
            canonical_key: s.canonical_key.clone(),
            selected: plan.selected.contains(&s.canonical_key),
            rd_before: risk(s, before),
            rd_after: risk(s, &after),
        })
        .collect();
    let reverse_discrimination_count = itemsets
        .iter()
        .filter(|c| c.rd_before * c.rd_after < 0.0 && c.rd_after.abs() > plan.tau_target + TARGET_SLACK)
        .count();
    let report = MitigationReport {
        model_id: model_id.to_string(),
        mitigated_model_id: mitigated_model_id(model_id),
        itemsets,
        accuracy_before: accuracy(before, &dataset.outcome),
        accuracy_after: accuracy(&after, &dataset.outcome),
        reverse_discrimination_count,
        flip_count: plan.flips.len(),
    };
    Ok((after, report))
}
