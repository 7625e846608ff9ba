use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::dataset::{Column, Dataset};
use super::mdl::{bin_code, discretize_mdl, interval_labels, CutPoints};
use super::schema::{AttributeSpec, Role};
use crate::error::DataError;

/// A dataset where every attribute is categorical, plus the binary vectors
/// the miners work on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizedDataset {
    pub base: Dataset,
    /// Final attribute specs; continuous attributes carry their bins here.
    pub attributes: Vec<AttributeSpec>,
    /// Column-major: `codes[attr][item]`.
    pub codes: Vec<Vec<u32>>,
    /// Ground truth, `true` for the beneficial class.
    pub outcome: Vec<bool>,
    /// `true` for members of the protected group.
    pub protected_flag: Vec<bool>,
    pub predictions: BTreeMap<String, Vec<bool>>,
}

impl DiscretizedDataset {
    pub fn len(&self) -> usize {
        self.outcome.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcome.is_empty()
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn attribute(&self, name: &str) -> Result<&AttributeSpec, DataError> {
        self.attribute_index(name)
            .map(|i| &self.attributes[i])
            .ok_or_else(|| DataError::UnknownAttribute(name.to_string()))
    }

    pub fn code(&self, item: usize, attr: usize) -> u32 {
        self.codes[attr][item]
    }

    pub fn category_label(&self, attr: usize, code: u32) -> &str {
        &self.attributes[attr].categories[code as usize]
    }

    pub fn outcome_index(&self) -> usize {
        self.base.outcome_index()
    }

    pub fn protected_index(&self) -> usize {
        self.base.protected_index()
    }

    pub fn protected_attribute(&self) -> &str {
        &self.attributes[self.protected_index()].name
    }

    /// Indices of attributes that may appear in itemsets (everything except
    /// the protected, outcome and prediction columns).
    pub fn minable_attributes(&self) -> Vec<usize> {
        (0..self.attributes.len())
            .filter(|&j| self.attributes[j].is_minable())
            .collect()
    }

    pub fn predictions(&self, model_id: &str) -> Result<&[bool], DataError> {
        self.predictions
            .get(model_id)
            .map(Vec::as_slice)
            .ok_or_else(|| DataError::UnknownModel(model_id.to_string()))
    }

    pub fn model_ids(&self) -> impl Iterator<Item = &str> {
        self.predictions.keys().map(String::as_str)
    }

    /// Group flags with `value` of the protected attribute taken as the A=1 group.
    pub fn protected_flags_for(&self, value: &str) -> Result<Vec<bool>, DataError> {
        let a = self.protected_index();
        let spec = &self.attributes[a];
        let code = spec
            .categories
            .iter()
            .position(|c| c == value)
            .ok_or_else(|| DataError::LabelNotObserved {
                column: spec.name.clone(),
                label: value.to_string(),
            })? as u32;
        Ok(self.codes[a].iter().map(|&c| c == code).collect())
    }

    /// Returns a new version with `labels` registered under `model_id`,
    /// replacing any previous vector of that id.
    pub fn attach_predictions(&self, model_id: &str, labels: Vec<bool>) -> Result<Self, DataError> {
        let mut next = self.clone();
        next.insert_predictions(model_id, labels)?;
        Ok(next)
    }

    /// In-place variant of [`attach_predictions`](Self::attach_predictions).
    pub fn insert_predictions(&mut self, model_id: &str, labels: Vec<bool>) -> Result<(), DataError> {
        if model_id.is_empty() {
            return Err(DataError::EmptyModelId);
        }
        if labels.len() != self.len() {
            return Err(DataError::LengthMismatch {
                expected: self.len(),
                found: labels.len(),
            });
        }
        self.predictions.insert(model_id.to_string(), labels);
        Ok(())
    }
}

/// MDL cut points for every continuous attribute, learned against the
/// ground-truth outcome so all models share one binning.
pub fn learn_cut_points(dataset: &Dataset) -> Vec<CutPoints> {
    let y = outcome_vector(dataset);
    dataset
        .attributes
        .iter()
        .zip(&dataset.columns)
        .filter_map(|(spec, col)| match col {
            Column::Continuous(values) => {
                let mut cp = discretize_mdl(values, &y);
                cp.attribute = spec.name.clone();
                Some(cp)
            }
            Column::Categorical(_) => None,
        })
        .collect()
}

fn outcome_vector(dataset: &Dataset) -> Vec<bool> {
    let j = dataset.outcome_index();
    let spec = &dataset.attributes[j];
    let Column::Categorical(codes) = &dataset.columns[j] else {
        unreachable!("outcome is categorical");
    };
    codes
        .iter()
        .map(|&c| spec.categories[c as usize] == dataset.beneficial_label)
        .collect()
}

/// Bin every continuous attribute with the given cut points and register
/// prediction-role columns as models named after the column.
///
/// A continuous attribute with no entry in `cut_points` gets a single bin.
pub fn apply_discretization(
    dataset: &Dataset,
    cut_points: &[CutPoints],
) -> Result<DiscretizedDataset, DataError> {
    let mut attributes = Vec::with_capacity(dataset.attributes.len());
    let mut codes = Vec::with_capacity(dataset.attributes.len());
    for (spec, col) in dataset.attributes.iter().zip(&dataset.columns) {
        let mut spec = spec.clone();
        match col {
            Column::Categorical(c) => codes.push(c.clone()),
            Column::Continuous(values) => {
                let thresholds = cut_points
                    .iter()
                    .find(|cp| cp.attribute == spec.name)
                    .map(|cp| cp.thresholds.clone())
                    .unwrap_or_default();
                codes.push(values.iter().map(|&v| bin_code(&thresholds, v)).collect());
                spec.categories = interval_labels(&thresholds);
                spec.cut_points = thresholds;
            }
        }
        attributes.push(spec);
    }

    let outcome = outcome_vector(dataset);
    let a = dataset.protected_index();
    let protected_code = attributes[a]
        .categories
        .iter()
        .position(|c| *c == dataset.protected_label)
        .expect("protected label validated at load") as u32;
    let protected_flag = codes[a].iter().map(|&c| c == protected_code).collect();

    let mut predictions = BTreeMap::new();
    for (j, spec) in attributes.iter().enumerate() {
        if spec.role != Role::Prediction {
            continue;
        }
        let labels = codes[j]
            .iter()
            .map(|&c| {
                let value = &spec.categories[c as usize];
                dataset
                    .parse_class_label(value)
                    .ok_or_else(|| DataError::NonBinaryPrediction {
                        model: spec.name.clone(),
                        value: value.clone(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        predictions.insert(spec.name.clone(), labels);
    }

    Ok(DiscretizedDataset {
        base: dataset.clone(),
        attributes,
        codes,
        outcome,
        protected_flag,
        predictions,
    })
}

/// Learn cut points and apply them in one step.
pub fn discretize_dataset(dataset: &Dataset) -> Result<(DiscretizedDataset, Vec<CutPoints>), DataError> {
    let cut_points = learn_cut_points(dataset);
    let ds = apply_discretization(dataset, &cut_points)?;
    Ok((ds, cut_points))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub category: String,
    pub count_beneficial: usize,
    pub count_non_beneficial: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeHistogram {
    pub attribute: String,
    pub bins: Vec<HistogramBin>,
}

/// Per-category counts of items predicted beneficial / non-beneficial, for
/// every attribute other than the prediction columns.
pub fn attribute_histograms(
    dataset: &DiscretizedDataset,
    model_id: &str,
) -> Result<Vec<AttributeHistogram>, DataError> {
    let preds = dataset.predictions(model_id)?;
    Ok(dataset
        .attributes
        .iter()
        .zip(&dataset.codes)
        .filter(|(spec, _)| spec.role != Role::Prediction)
        .map(|(spec, codes)| {
            let mut counts = vec![[0usize; 2]; spec.categories.len()];
            for (&c, &p) in codes.iter().zip(preds) {
                counts[c as usize][p as usize] += 1;
            }
            AttributeHistogram {
                attribute: spec.name.clone(),
                bins: spec
                    .categories
                    .iter()
                    .zip(counts)
                    .map(|(category, [neg, pos])| HistogramBin {
                        category: category.clone(),
                        count_beneficial: pos,
                        count_non_beneficial: neg,
                    })
                    .collect(),
            }
        })
        .collect())
}
