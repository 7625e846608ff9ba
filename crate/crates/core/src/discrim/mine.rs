use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::config::{AnalysisConfig, AnalysisContext};
use crate::data::DiscretizedDataset;
use crate::error::{Group, MiningError};
use crate::rowset::RowSet;
use crate::rules::Condition;

/// Group-conditional beneficial rates of one condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskDifference {
    /// `P(Ŷ=1 | A=1, s)`
    pub p_protected: f64,
    /// `P(Ŷ=1 | A=0, s)`
    pub p_nonprotected: f64,
    /// `p_protected - p_nonprotected`
    pub rd: f64,
    pub members_protected: Vec<usize>,
    pub members_nonprotected: Vec<usize>,
    pub beneficial_protected: usize,
    pub beneficial_nonprotected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminatoryItemset {
    pub condition: Condition,
    pub canonical_key: String,
    /// The resolving literals of `condition` and their rendering.
    pub resolving_condition: Condition,
    pub resolving_key: String,
    pub p_protected: f64,
    pub p_nonprotected: f64,
    pub rd: f64,
    pub members_protected: Vec<usize>,
    pub members_nonprotected: Vec<usize>,
    pub beneficial_protected: usize,
    pub beneficial_nonprotected: usize,
    pub context_attrs: Vec<String>,
}

impl DiscriminatoryItemset {
    pub fn size(&self) -> usize {
        self.members_protected.len() + self.members_nonprotected.len()
    }

    /// All member ids, ascending.
    pub fn members(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self
            .members_protected
            .iter()
            .chain(&self.members_nonprotected)
            .copied()
            .collect();
        all.sort_unstable();
        all
    }
}

impl<'a> AnalysisContext<'a> {
    pub(crate) fn risk_for_rows(&self, rows: &RowSet) -> Result<RiskDifference, MiningError> {
        let prot = rows.intersection(&self.protected_rows);
        let non = rows.intersection(&self.nonprotected_rows);
        let need = self.config.min_group_support;
        for (group, set) in [(Group::Protected, &prot), (Group::Nonprotected, &non)] {
            let found = set.len();
            if found < need {
                return Err(MiningError::InsufficientGroupSupport {
                    group,
                    found,
                    required: need,
                });
            }
        }
        let bp = prot.intersection_len(&self.positive_rows);
        let bn = non.intersection_len(&self.positive_rows);
        let p_protected = bp as f64 / prot.len() as f64;
        let p_nonprotected = bn as f64 / non.len() as f64;
        Ok(RiskDifference {
            p_protected,
            p_nonprotected,
            rd: p_protected - p_nonprotected,
            members_protected: prot.iter().collect(),
            members_nonprotected: non.iter().collect(),
            beneficial_protected: bp,
            beneficial_nonprotected: bn,
        })
    }

    fn itemset(&self, condition: &Condition, risk: RiskDifference) -> DiscriminatoryItemset {
        let ds = self.dataset;
        let resolving_condition = condition.restrict(|a| self.resolving.contains(&a));
        let context = condition.restrict(|a| !self.resolving.contains(&a));
        DiscriminatoryItemset {
            canonical_key: condition.canonical_key(ds),
            resolving_key: resolving_condition.canonical_key(ds),
            condition: condition.clone(),
            resolving_condition,
            p_protected: risk.p_protected,
            p_nonprotected: risk.p_nonprotected,
            rd: risk.rd,
            members_protected: risk.members_protected,
            members_nonprotected: risk.members_nonprotected,
            beneficial_protected: risk.beneficial_protected,
            beneficial_nonprotected: risk.beneficial_nonprotected,
            context_attrs: context.attribute_names(ds),
        }
    }

    fn admissible(&self, condition: &Condition) -> bool {
        self.resolving.iter().all(|&a| condition.has_attr(a))
            && !self.proxies.iter().any(|&a| condition.has_attr(a))
    }
}

/// Empirical group rates of `condition` under the config's model.
pub fn compute_risk_difference(
    condition: &Condition,
    dataset: &DiscretizedDataset,
    config: &AnalysisConfig,
) -> Result<RiskDifference, MiningError> {
    let ctx = AnalysisContext::new(dataset, config)?;
    ctx.risk_for_rows(&ctx.index.rows(condition))
}

/// Filter frequent conditions down to the discriminatory ones.
///
/// A condition is kept when it constrains every resolving attribute, no
/// proxy attribute, has at least `min_group_support` members in each group,
/// and `|rd| > tau`. The empty condition is always a candidate (support `N`).
/// With `prune_redundant`, a condition is dropped when removing one of its
/// context literals leaves the support unchanged.
pub fn mine_discriminatory_itemsets(
    frequent: &[(Condition, usize)],
    dataset: &DiscretizedDataset,
    config: &AnalysisConfig,
) -> Result<Vec<DiscriminatoryItemset>, MiningError> {
    let ctx = AnalysisContext::new(dataset, config)?;
    mine_with_context(&ctx, frequent)
}

pub(crate) fn mine_with_context(
    ctx: &AnalysisContext<'_>,
    frequent: &[(Condition, usize)],
) -> Result<Vec<DiscriminatoryItemset>, MiningError> {
    let config = ctx.config;
    if ctx.resolving.is_empty() && !config.allow_empty_resolving {
        return Err(MiningError::NoResolvingAttributes);
    }

    let empty = (Condition::empty(), ctx.dataset.len());
    let candidates = std::iter::once(&empty).chain(frequent.iter().filter(|(c, _)| !c.is_empty()));
    let support: HashMap<&Condition, usize> = std::iter::once(&empty)
        .chain(frequent)
        .map(|(c, s)| (c, *s))
        .collect();

    let mut out = Vec::new();
    for (cond, sup) in candidates {
        if !ctx.admissible(cond) || *sup < 2 * config.min_group_support {
            continue;
        }
        if config.prune_redundant {
            let redundant = cond
                .literals()
                .iter()
                .filter(|l| !ctx.resolving.contains(&l.attr))
                .any(|l| support.get(&cond.without(l.attr)) == Some(sup));
            if redundant {
                continue;
            }
        }
        let risk = match ctx.risk_for_rows(&ctx.index.rows(cond)) {
            Ok(r) => r,
            Err(MiningError::InsufficientGroupSupport { .. }) => continue,
            Err(e) => return Err(e),
        };
        if risk.rd.abs() > config.tau {
            out.push(ctx.itemset(cond, risk));
        }
    }
    out.sort_by(|a, b| {
        a.condition
            .len()
            .cmp(&b.condition.len())
            .then_with(|| a.canonical_key.cmp(&b.canonical_key))
    });
    Ok(out)
}

/// Recompute an itemset's rates against another prediction vector.
pub(crate) fn rates_under(
    members_protected: &[usize],
    members_nonprotected: &[usize],
    predictions: &[bool],
) -> (f64, f64, usize, usize) {
    let bp = members_protected.iter().filter(|&&i| predictions[i]).count();
    let bn = members_nonprotected.iter().filter(|&&i| predictions[i]).count();
    let rate = |b: usize, n: usize| if n == 0 { 0.0 } else { b as f64 / n as f64 };
    (
        rate(bp, members_protected.len()),
        rate(bn, members_nonprotected.len()),
        bp,
        bn,
    )
}
