//! Ingestion, schema validation and MDL discretization.

mod dataset;
mod discretized;
mod mdl;
mod schema;

pub use dataset::{load_dataset, read_prediction_csv, Column, Dataset};
pub use discretized::{
    apply_discretization, attribute_histograms, discretize_dataset, learn_cut_points,
    AttributeHistogram, DiscretizedDataset, HistogramBin,
};
pub use mdl::{bin_code, discretize_mdl, interval_labels, CutCandidate, CutPoints};
pub use schema::{AttributeKind, AttributeSpec, ColumnSchema, Role, Schema};
