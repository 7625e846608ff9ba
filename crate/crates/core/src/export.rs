//! File formats for results, scatter points, geometry, plans and
//! mitigated predictions.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::data::DiscretizedDataset;
use crate::discrim::{AnalysisConfig, AuditResult, ScatterPoint};
use crate::error::DataError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiteralView {
    pub attribute: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemsetView {
    pub canonical_key: String,
    pub literals: Vec<LiteralView>,
    pub rd: f64,
    pub p_protected: f64,
    pub p_nonprotected: f64,
    pub size_protected: usize,
    pub size_nonprotected: usize,
    pub beneficial_protected: usize,
    pub beneficial_nonprotected: usize,
    pub context_attrs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollectionView {
    pub resolving_key: String,
    pub total_items: usize,
    pub itemsets: Vec<ItemsetView>,
    pub hierarchy: Vec<(usize, usize)>,
    pub row_order: Vec<usize>,
}

/// Member-free rendering of an [`AuditResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultView {
    pub model_id: String,
    pub config: AnalysisConfig,
    pub collections: Vec<CollectionView>,
    pub scatter: Vec<ScatterPoint>,
}

pub fn result_view(result: &AuditResult, dataset: &DiscretizedDataset) -> ResultView {
    let collections = result
        .collections
        .iter()
        .map(|c| CollectionView {
            resolving_key: c.resolving_key.clone(),
            total_items: c.total_items,
            itemsets: c
                .itemsets
                .iter()
                .map(|s| ItemsetView {
                    canonical_key: s.canonical_key.clone(),
                    literals: s
                        .condition
                        .literals()
                        .iter()
                        .map(|l| LiteralView {
                            attribute: dataset.attributes[l.attr].name.clone(),
                            value: dataset.category_label(l.attr, l.code).to_string(),
                        })
                        .collect(),
                    rd: s.rd,
                    p_protected: s.p_protected,
                    p_nonprotected: s.p_nonprotected,
                    size_protected: s.members_protected.len(),
                    size_nonprotected: s.members_nonprotected.len(),
                    beneficial_protected: s.beneficial_protected,
                    beneficial_nonprotected: s.beneficial_nonprotected,
                    context_attrs: s.context_attrs.clone(),
                })
                .collect(),
            hierarchy: c.hierarchy.clone(),
            row_order: c.row_order.clone(),
        })
        .collect();
    ResultView {
        model_id: result.config.model_id.clone(),
        config: result.config.clone(),
        collections,
        scatter: result.scatter(),
    }
}

/// Pretty JSON with a trailing newline.
pub fn write_json<W: Write, T: Serialize>(mut out: W, value: &T) -> Result<(), DataError> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// `canonical_key,rd,size` rows.
pub fn write_scatter_csv<W: Write>(out: W, points: &[ScatterPoint]) -> Result<(), DataError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["canonical_key", "rd", "size"])?;
    for p in points {
        w.write_record([p.canonical_key.as_str(), &p.rd.to_string(), &p.size.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Single-column prediction CSV in dataset row order, using the outcome
/// column's labels so it can be read back as a model.
pub fn write_predictions_csv<W: Write>(
    out: W,
    dataset: &DiscretizedDataset,
    model_id: &str,
    predictions: &[bool],
) -> Result<(), DataError> {
    if predictions.len() != dataset.len() {
        return Err(DataError::LengthMismatch {
            expected: dataset.len(),
            found: predictions.len(),
        });
    }
    let beneficial = dataset.base.beneficial_label.as_str();
    let other = dataset.attributes[dataset.outcome_index()]
        .categories
        .iter()
        .find(|c| c.as_str() != beneficial)
        .map(String::as_str)
        .unwrap_or("0");
    let mut w = csv::Writer::from_writer(out);
    w.write_record([model_id])?;
    for &p in predictions {
        w.write_record([if p { beneficial } else { other }])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scatter_rows() {
        let mut buf = Vec::new();
        let points = [ScatterPoint {
            canonical_key: "[a:1, b:x]".into(),
            rd: -0.25,
            size: 12,
        }];
        write_scatter_csv(&mut buf, &points).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "canonical_key,rd,size\n\"[a:1, b:x]\",-0.25,12\n");
    }
}
