//! Discriminatory itemsets: filtering by risk difference, grouping into
//! collections, row ordering and cross-model comparison.

mod compare;
mod config;
mod grouping;
mod mine;

use serde::{Deserialize, Serialize};

pub use compare::{compare_models, scatter_series, scatter_summary, CollectionPair, ModelComparison, ScatterPoint, ScatterSeries, SharedItemset};
pub use config::{AnalysisConfig, AnalysisContext, DEFAULT_MIN_GROUP_SUPPORT, DEFAULT_TAU};
pub use grouping::{adjacent_jaccard, build_inclusion_hierarchy, group_by_resolving, order_rows_jaccard, ItemsetCollection};
pub use mine::{compute_risk_difference, mine_discriminatory_itemsets, DiscriminatoryItemset, RiskDifference};

pub(crate) use mine::rates_under;

use crate::data::DiscretizedDataset;
use crate::error::MiningError;
use crate::rules::Condition;

/// The organized result of one model under one config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditResult {
    pub config: AnalysisConfig,
    pub collections: Vec<ItemsetCollection>,
}

impl AuditResult {
    pub fn itemsets(&self) -> impl Iterator<Item = &DiscriminatoryItemset> {
        self.collections.iter().flat_map(|c| c.itemsets.iter())
    }

    pub fn itemset_count(&self) -> usize {
        self.collections.iter().map(|c| c.itemsets.len()).sum()
    }

    pub fn find(&self, canonical_key: &str) -> Option<&DiscriminatoryItemset> {
        self.itemsets().find(|s| s.canonical_key == canonical_key)
    }

    pub fn scatter(&self) -> Vec<ScatterPoint> {
        scatter_summary(self.itemsets())
    }
}

/// Mine, group, order and link the discriminatory itemsets of one model.
pub fn analyze(
    dataset: &DiscretizedDataset,
    frequent: &[(Condition, usize)],
    config: &AnalysisConfig,
) -> Result<AuditResult, MiningError> {
    let itemsets = mine_discriminatory_itemsets(frequent, dataset, config)?;
    Ok(AuditResult {
        config: config.clone(),
        collections: group_by_resolving(itemsets),
    })
}
