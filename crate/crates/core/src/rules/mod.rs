//! Frequent itemsets and classification rules over model predictions.

mod condition;
mod fpgrowth;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use condition::{Condition, ItemIndex, Literal};
pub use fpgrowth::{default_min_support, fp_growth, mine_conditions, mine_frequent_itemsets, DEFAULT_MAX_LENGTH};

use crate::data::DiscretizedDataset;
use crate::error::DataError;
use crate::rowset::RowSet;

/// `antecedent -> prediction == consequent_class`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRule {
    pub antecedent: Condition,
    pub consequent_class: u8,
    pub support_joint: usize,
    pub support_antecedent: usize,
    pub confidence: f64,
}

/// One rule per (condition, class) pair with nonzero joint support.
pub fn extract_classification_rules(
    itemsets: &[(Condition, usize)],
    dataset: &DiscretizedDataset,
    model_id: &str,
) -> Result<Vec<ClassificationRule>, DataError> {
    let positive = RowSet::from_flags(dataset.predictions(model_id)?);
    let index = ItemIndex::new(dataset);
    let mut rules = Vec::with_capacity(itemsets.len() * 2);
    for (cond, _) in itemsets {
        let rows = index.rows(cond);
        let support = rows.len();
        if support == 0 {
            continue;
        }
        let pos = rows.intersection_len(&positive);
        for (class, joint) in [(1u8, pos), (0u8, support - pos)] {
            if joint > 0 {
                rules.push(ClassificationRule {
                    antecedent: cond.clone(),
                    consequent_class: class,
                    support_joint: joint,
                    support_antecedent: support,
                    confidence: joint as f64 / support as f64,
                });
            }
        }
    }
    Ok(rules)
}

/// CSV dump: `canonical_key,class,support_joint,support_antecedent,confidence`.
pub fn write_rules_csv<W: Write>(
    rules: &[ClassificationRule],
    dataset: &DiscretizedDataset,
    out: W,
) -> Result<(), DataError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["canonical_key", "class", "support_joint", "support_antecedent", "confidence"])?;
    for r in rules {
        w.write_record([
            r.antecedent.canonical_key(dataset),
            r.consequent_class.to_string(),
            r.support_joint.to_string(),
            r.support_antecedent.to_string(),
            r.confidence.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
