use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::data::{DiscretizedDataset, Role};
use crate::error::MiningError;
use crate::rowset::RowSet;
use crate::rules::ItemIndex;

pub const DEFAULT_TAU: f64 = 0.25;
pub const DEFAULT_MIN_GROUP_SUPPORT: usize = 5;

/// Everything that decides which itemsets count as discriminatory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub protected: String,
    /// Value of the protected attribute that marks the protected (A=1) group.
    pub protected_group_value: String,
    pub tau: f64,
    pub resolving: BTreeSet<String>,
    pub proxies: BTreeSet<String>,
    pub min_group_support: usize,
    pub model_id: String,
    /// Permit an empty resolving set (plain demographic parity per itemset).
    #[serde(default)]
    pub allow_empty_resolving: bool,
    /// Drop itemsets whose extra context literals leave the member set unchanged.
    #[serde(default = "default_true")]
    pub prune_redundant: bool,
}

fn default_true() -> bool {
    true
}

impl AnalysisConfig {
    /// Defaults for a dataset: schema-declared resolving/proxy roles, the
    /// declared protected label, `tau = 0.25`, five items per group.
    pub fn for_dataset(dataset: &DiscretizedDataset, model_id: &str) -> Self {
        let with_role = |role: Role| -> BTreeSet<String> {
            dataset
                .attributes
                .iter()
                .filter(|a| a.role == role)
                .map(|a| a.name.clone())
                .collect()
        };
        AnalysisConfig {
            protected: dataset.protected_attribute().to_string(),
            protected_group_value: dataset.base.protected_label.clone(),
            tau: DEFAULT_TAU,
            resolving: with_role(Role::Resolving),
            proxies: with_role(Role::Proxy),
            min_group_support: DEFAULT_MIN_GROUP_SUPPORT,
            model_id: model_id.to_string(),
            allow_empty_resolving: false,
            prune_redundant: true,
        }
    }

    pub fn with_model(&self, model_id: &str) -> Self {
        AnalysisConfig {
            model_id: model_id.to_string(),
            ..self.clone()
        }
    }

    /// Checks that two configs agree on everything but the model.
    pub fn ensure_comparable(&self, other: &AnalysisConfig) -> Result<(), MiningError> {
        let a = self.with_model("");
        let b = other.with_model("");
        if a == b {
            Ok(())
        } else {
            let mut diffs = Vec::new();
            if a.protected != b.protected || a.protected_group_value != b.protected_group_value {
                diffs.push("protected group");
            }
            if a.tau != b.tau {
                diffs.push("tau");
            }
            if a.resolving != b.resolving {
                diffs.push("resolving");
            }
            if a.proxies != b.proxies {
                diffs.push("proxies");
            }
            if a.min_group_support != b.min_group_support {
                diffs.push("min_group_support");
            }
            if a.allow_empty_resolving != b.allow_empty_resolving || a.prune_redundant != b.prune_redundant {
                diffs.push("flags");
            }
            Err(MiningError::ConfigMismatch(diffs.join(", ")))
        }
    }

    /// Structural checks that do not need a dataset.
    pub fn check(&self) -> Result<(), MiningError> {
        let invalid = |m: String| Err(MiningError::InvalidConfig(m));
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return invalid(format!("tau must lie in (0, 1), got {}", self.tau));
        }
        if let Some(a) = self.resolving.intersection(&self.proxies).next() {
            return invalid(format!("`{a}` is both resolving and proxy"));
        }
        if self.resolving.contains(&self.protected) || self.proxies.contains(&self.protected) {
            return invalid("the protected attribute cannot be resolving or proxy".into());
        }
        if self.min_group_support == 0 {
            return invalid("min_group_support must be at least 1".into());
        }
        Ok(())
    }
}

/// A config resolved against a dataset: indices and row sets ready for counting.
pub struct AnalysisContext<'a> {
    pub dataset: &'a DiscretizedDataset,
    pub config: &'a AnalysisConfig,
    pub index: ItemIndex,
    pub protected_rows: RowSet,
    pub nonprotected_rows: RowSet,
    pub positive_rows: RowSet,
    pub resolving: Vec<usize>,
    pub proxies: Vec<usize>,
}

impl<'a> AnalysisContext<'a> {
    pub fn new(dataset: &'a DiscretizedDataset, config: &'a AnalysisConfig) -> Result<Self, MiningError> {
        config.check()?;
        if config.protected != dataset.protected_attribute() {
            return Err(MiningError::InvalidConfig(format!(
                "`{}` is not the protected attribute of this dataset",
                config.protected
            )));
        }
        let flags = dataset.protected_flags_for(&config.protected_group_value)?;
        let preds = dataset.predictions(&config.model_id)?;
        let resolve = |names: &BTreeSet<String>| -> Result<Vec<usize>, MiningError> {
            names
                .iter()
                .map(|n| {
                    let j = dataset
                        .attribute_index(n)
                        .ok_or_else(|| MiningError::InvalidConfig(format!("unknown attribute `{n}`")))?;
                    if dataset.attributes[j].is_minable() {
                        Ok(j)
                    } else {
                        Err(MiningError::InvalidConfig(format!(
                            "`{n}` cannot be resolving or proxy (it is the outcome or a prediction)"
                        )))
                    }
                })
                .collect()
        };
        let resolving = resolve(&config.resolving)?;
        let proxies = resolve(&config.proxies)?;
        let protected_rows = RowSet::from_flags(&flags);
        let nonprotected_rows =
            RowSet::from_flags(&flags.iter().map(|f| !f).collect::<Vec<_>>());
        Ok(AnalysisContext {
            dataset,
            config,
            index: ItemIndex::new(dataset),
            protected_rows,
            nonprotected_rows,
            positive_rows: RowSet::from_flags(preds),
            resolving,
            proxies,
        })
    }
}
