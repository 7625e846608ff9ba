use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{mine::DiscriminatoryItemset, AuditResult};
use crate::error::MiningError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub canonical_key: String,
    pub rd: f64,
    pub size: usize,
}

/// Points of one model, tagged so several series can be overlaid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterSeries {
    pub model_id: String,
    pub points: Vec<ScatterPoint>,
}

pub fn scatter_summary<'a>(itemsets: impl IntoIterator<Item = &'a DiscriminatoryItemset>) -> Vec<ScatterPoint> {
    itemsets
        .into_iter()
        .map(|s| ScatterPoint {
            canonical_key: s.canonical_key.clone(),
            rd: s.rd,
            size: s.size(),
        })
        .collect()
}

/// One series per result, for juxtaposed or superposed display.
pub fn scatter_series(results: &[&AuditResult]) -> Vec<ScatterSeries> {
    results
        .iter()
        .map(|r| ScatterSeries {
            model_id: r.config.model_id.clone(),
            points: r.scatter(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollectionPair {
    pub resolving_key: String,
    /// Index into each result's collections.
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharedItemset {
    pub canonical_key: String,
    pub rd_left: f64,
    pub rd_right: f64,
    /// `rd_right - rd_left`
    pub rd_delta: f64,
    pub beneficial_protected_delta: i64,
    pub beneficial_nonprotected_delta: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelComparison {
    pub left_model: String,
    pub right_model: String,
    pub aligned: Vec<CollectionPair>,
    pub unaligned_left: Vec<String>,
    pub unaligned_right: Vec<String>,
    pub shared: Vec<SharedItemset>,
    pub unique_left: Vec<String>,
    pub unique_right: Vec<String>,
}

/// Align two results computed under the same config on different models.
pub fn compare_models(left: &AuditResult, right: &AuditResult) -> Result<ModelComparison, MiningError> {
    left.config.ensure_comparable(&right.config)?;

    let lc: BTreeMap<&str, usize> = left
        .collections
        .iter()
        .enumerate()
        .map(|(i, c)| (c.resolving_key.as_str(), i))
        .collect();
    let rc: BTreeMap<&str, usize> = right
        .collections
        .iter()
        .enumerate()
        .map(|(i, c)| (c.resolving_key.as_str(), i))
        .collect();
    let aligned = lc
        .iter()
        .filter_map(|(k, &l)| {
            rc.get(k).map(|&r| CollectionPair {
                resolving_key: k.to_string(),
                left: l,
                right: r,
            })
        })
        .collect();
    let only = |a: &BTreeMap<&str, usize>, b: &BTreeMap<&str, usize>| -> Vec<String> {
        a.keys().filter(|k| !b.contains_key(*k)).map(|k| k.to_string()).collect()
    };

    let li: BTreeMap<&str, &DiscriminatoryItemset> =
        left.itemsets().map(|s| (s.canonical_key.as_str(), s)).collect();
    let ri: BTreeMap<&str, &DiscriminatoryItemset> =
        right.itemsets().map(|s| (s.canonical_key.as_str(), s)).collect();
    let shared = li
        .iter()
        .filter_map(|(k, a)| {
            ri.get(k).map(|b| SharedItemset {
                canonical_key: k.to_string(),
                rd_left: a.rd,
                rd_right: b.rd,
                rd_delta: b.rd - a.rd,
                beneficial_protected_delta: b.beneficial_protected as i64 - a.beneficial_protected as i64,
                beneficial_nonprotected_delta: b.beneficial_nonprotected as i64
                    - a.beneficial_nonprotected as i64,
            })
        })
        .collect();
    let only_sets = |a: &BTreeMap<&str, &DiscriminatoryItemset>, b: &BTreeMap<&str, &DiscriminatoryItemset>| {
        a.keys().filter(|k| !b.contains_key(*k)).map(|k| k.to_string()).collect()
    };

    Ok(ModelComparison {
        left_model: left.config.model_id.clone(),
        right_model: right.config.model_id.clone(),
        aligned,
        unaligned_left: only(&lc, &rc),
        unaligned_right: only(&rc, &lc),
        shared,
        unique_left: only_sets(&li, &ri),
        unique_right: only_sets(&ri, &li),
    })
}
