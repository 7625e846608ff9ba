use thiserror::Error;

/// Ingestion, schema and discretization failures.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("schema names column `{0}` which is not present in the CSV header")]
    UnknownColumn(String),
    #[error("schema must declare exactly one {role} column, found {found}")]
    RoleCount { role: &'static str, found: usize },
    #[error("outcome column `{column}` must take exactly two values, found {found}")]
    NonBinaryOutcome { column: String, found: usize },
    #[error("protected column `{column}` must take exactly two values, found {found}")]
    NonBinaryProtected { column: String, found: usize },
    #[error("column `{column}` needs a declared {what} (values are not 0/1)")]
    MissingLabel { column: String, what: &'static str },
    #[error("declared label `{label}` never occurs in column `{column}`")]
    LabelNotObserved { column: String, label: String },
    #[error("column `{column}` row {row}: `{value}` is not a finite number")]
    InvalidNumber { column: String, row: usize, value: String },
    #[error("dataset has no complete rows")]
    EmptyDataset,
    #[error("prediction vector has length {found}, dataset has {expected} rows")]
    LengthMismatch { expected: usize, found: usize },
    #[error("model id must be nonempty")]
    EmptyModelId,
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("prediction `{value}` for model `{model}` is not a label of the outcome column")]
    NonBinaryPrediction { model: String, value: String },
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Failures of the mining, grouping and comparison stages.
#[derive(Debug, Error)]
pub enum MiningError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("{group} group has {found} matching items, at least {required} required")]
    InsufficientGroupSupport {
        group: Group,
        found: usize,
        required: usize,
    },
    #[error("no resolving attributes configured (pass the empty-resolving override to allow this)")]
    NoResolvingAttributes,
    #[error("invalid analysis config: {0}")]
    InvalidConfig(String),
    #[error("results were computed under different configs: {0}")]
    ConfigMismatch(String),
    #[error("too few rows for structure search: {found} < {required}")]
    TooFewRows { found: usize, required: usize },
}

/// Failures of reject-option planning and application.
#[derive(Debug, Error)]
pub enum MitigationError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("no itemsets selected for mitigation")]
    EmptySelection,
    #[error("itemset `{0}` is not part of the current result")]
    UnknownItemset(String),
    #[error("plan is stale: item {item_id} is currently labeled {found}, plan expected {expected}")]
    StalePlan {
        item_id: usize,
        expected: u8,
        found: u8,
    },
    #[error("target threshold must be positive, got {0}")]
    InvalidTarget(f64),
}

/// Which side of the protected attribute a count refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Protected,
    Nonprotected,
}

impl std::fmt::Display for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Group::Protected => f.write_str("protected"),
            Group::Nonprotected => f.write_str("non-protected"),
        }
    }
}

/// Umbrella error for callers driving the whole pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Mining(#[from] MiningError),
    #[error(transparent)]
    Mitigation(#[from] MitigationError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
