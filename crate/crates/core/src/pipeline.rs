//! The shared engine path: discretize once, search parents once, mine
//! frequent conditions once, then analyze any number of models.

use crate::causal::{discover_parents, ParentSet, MIN_ROWS};
use crate::data::{discretize_dataset, CutPoints, Dataset, DiscretizedDataset};
use crate::discrim::{analyze, AnalysisConfig, AuditResult};
use crate::error::{Error, MiningError};
use crate::rules::{default_min_support, mine_conditions, Condition, DEFAULT_MAX_LENGTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineOptions {
    /// `None` uses `max(5, ceil(0.01 N))`.
    pub min_support: Option<usize>,
    pub max_length: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            min_support: None,
            max_length: DEFAULT_MAX_LENGTH,
        }
    }
}

/// Model-independent state of an audit.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub dataset: DiscretizedDataset,
    pub cut_points: Vec<CutPoints>,
    /// `None` when the dataset is too small for the structure search.
    pub parents: Option<ParentSet>,
    pub min_support: usize,
    pub frequent: Vec<(Condition, usize)>,
}

impl Prepared {
    pub fn analyze(&self, config: &AnalysisConfig) -> Result<AuditResult, MiningError> {
        analyze(&self.dataset, &self.frequent, config)
    }

    /// Re-mine with new predictions registered under `model_id`. The
    /// frequent conditions do not depend on the model and are reused.
    pub fn with_predictions(&self, model_id: &str, labels: Vec<bool>) -> Result<Prepared, Error> {
        Ok(Prepared {
            dataset: self.dataset.attach_predictions(model_id, labels)?,
            ..self.clone()
        })
    }
}

pub fn prepare(dataset: &Dataset, options: &PipelineOptions) -> Result<Prepared, Error> {
    let (dataset, cut_points) = discretize_dataset(dataset)?;
    let parents = if dataset.len() < MIN_ROWS {
        log::warn!("{} rows: skipping the parent search", dataset.len());
        None
    } else {
        Some(discover_parents(&dataset)?)
    };
    let min_support = options
        .min_support
        .unwrap_or_else(|| default_min_support(dataset.len()));
    let frequent = mine_conditions(&dataset, min_support, options.max_length);
    Ok(Prepared {
        dataset,
        cut_points,
        parents,
        min_support,
        frequent,
    })
}
