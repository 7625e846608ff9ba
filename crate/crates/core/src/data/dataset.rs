use std::collections::{BTreeSet, HashMap};
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::schema::{AttributeKind, AttributeSpec, Role, Schema};
use crate::error::DataError;

/// Raw column values after ingestion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Column {
    /// Codes into `AttributeSpec::categories`.
    Categorical(Vec<u32>),
    Continuous(Vec<f64>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Categorical(v) => v.len(),
            Column::Continuous(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A validated table. Item ids are the dense row indices `0..len()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub attributes: Vec<AttributeSpec>,
    pub columns: Vec<Column>,
    /// Position of every kept row in the source CSV (0-based, header excluded).
    pub source_rows: Vec<usize>,
    /// Rows rejected for missing cells.
    pub dropped_rows: usize,
    pub beneficial_label: String,
    pub protected_label: String,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.source_rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source_rows.is_empty()
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn role_index(&self, role: Role) -> usize {
        self.attributes
            .iter()
            .position(|a| a.role == role)
            .expect("validated dataset carries this role")
    }

    pub fn outcome_index(&self) -> usize {
        self.role_index(Role::Outcome)
    }

    pub fn protected_index(&self) -> usize {
        self.role_index(Role::Protected)
    }

    /// Map a label of the outcome column (or a literal 0/1) onto the binary class.
    pub fn parse_class_label(&self, value: &str) -> Option<bool> {
        let value = value.trim();
        if value == self.beneficial_label {
            return Some(true);
        }
        let outcome = &self.attributes[self.outcome_index()];
        if outcome.categories.iter().any(|c| c == value) {
            return Some(false);
        }
        match value {
            "1" => Some(true),
            "0" => Some(false),
            _ => None,
        }
    }
}

fn is_missing(cell: &str) -> bool {
    let cell = cell.trim();
    cell.is_empty() || cell == "?"
}

fn first_appearance_categories(values: &[&str]) -> (Vec<String>, Vec<u32>) {
    let mut index: HashMap<&str, u32> = HashMap::new();
    let mut categories = Vec::new();
    let codes = values
        .iter()
        .map(|v| {
            *index.entry(v).or_insert_with(|| {
                categories.push(v.to_string());
                (categories.len() - 1) as u32
            })
        })
        .collect();
    (categories, codes)
}

fn resolve_binary_label(
    column: &str,
    categories: &[String],
    declared: Option<&str>,
    what: &'static str,
) -> Result<String, DataError> {
    match declared {
        Some(label) => {
            if categories.iter().any(|c| c == label) {
                Ok(label.to_string())
            } else {
                Err(DataError::LabelNotObserved {
                    column: column.to_string(),
                    label: label.to_string(),
                })
            }
        }
        None => {
            let set: BTreeSet<&str> = categories.iter().map(String::as_str).collect();
            if set.iter().all(|v| *v == "0" || *v == "1") {
                Ok("1".to_string())
            } else {
                Err(DataError::MissingLabel {
                    column: column.to_string(),
                    what,
                })
            }
        }
    }
}

/// Parse a CSV stream against a schema.
///
/// Rows with an empty or `?` cell are dropped and counted. Categories of
/// categorical columns are collected in first-appearance order.
pub fn load_dataset<R: Read>(csv_source: R, schema: &Schema) -> Result<Dataset, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(csv_source);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();

    for name in schema.columns.keys() {
        if !header.iter().any(|h| h == name) {
            return Err(DataError::UnknownColumn(name.clone()));
        }
    }
    for (role, label) in [(Role::Outcome, "outcome"), (Role::Protected, "protected")] {
        let found = schema.columns_with_role(role).count();
        if found != 1 {
            return Err(DataError::RoleCount { role: label, found });
        }
    }

    let mut rows: Vec<csv::StringRecord> = Vec::new();
    let mut source_rows = Vec::new();
    let mut dropped_rows = 0;
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        if record.iter().any(is_missing) {
            dropped_rows += 1;
            continue;
        }
        rows.push(record);
        source_rows.push(i);
    }
    if dropped_rows > 0 {
        log::warn!("dropped {dropped_rows} rows with missing cells");
    }
    if rows.is_empty() {
        return Err(DataError::EmptyDataset);
    }

    let mut attributes = Vec::with_capacity(header.len());
    let mut columns = Vec::with_capacity(header.len());
    let mut beneficial_label = String::new();
    let mut protected_label = String::new();

    for (j, name) in header.iter().enumerate() {
        let decl = schema.columns.get(name).cloned().unwrap_or_default();
        let cells: Vec<&str> = rows.iter().map(|r| r.get(j).unwrap_or("")).collect();
        let forced_categorical = matches!(decl.role, Role::Outcome | Role::Protected | Role::Prediction);
        let kind = if forced_categorical {
            AttributeKind::Categorical
        } else {
            decl.kind.unwrap_or_else(|| {
                if cells.iter().all(|c| c.parse::<f64>().is_ok_and(f64::is_finite)) {
                    AttributeKind::Continuous
                } else {
                    AttributeKind::Categorical
                }
            })
        };

        match kind {
            AttributeKind::Continuous => {
                let values = cells
                    .iter()
                    .enumerate()
                    .map(|(row, c)| match c.parse::<f64>() {
                        Ok(v) if v.is_finite() => Ok(v),
                        _ => Err(DataError::InvalidNumber {
                            column: name.clone(),
                            row: source_rows[row],
                            value: c.to_string(),
                        }),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                attributes.push(AttributeSpec {
                    name: name.clone(),
                    kind,
                    role: decl.role,
                    categories: Vec::new(),
                    cut_points: Vec::new(),
                });
                columns.push(Column::Continuous(values));
            }
            AttributeKind::Categorical => {
                let (categories, codes) = first_appearance_categories(&cells);
                match decl.role {
                    Role::Outcome => {
                        if categories.len() != 2 {
                            return Err(DataError::NonBinaryOutcome {
                                column: name.clone(),
                                found: categories.len(),
                            });
                        }
                        beneficial_label = resolve_binary_label(
                            name,
                            &categories,
                            decl.beneficial_label.as_deref(),
                            "beneficial_label",
                        )?;
                    }
                    Role::Protected => {
                        if categories.len() != 2 {
                            return Err(DataError::NonBinaryProtected {
                                column: name.clone(),
                                found: categories.len(),
                            });
                        }
                        protected_label = resolve_binary_label(
                            name,
                            &categories,
                            decl.protected_label.as_deref(),
                            "protected_label",
                        )?;
                    }
                    _ => {}
                }
                attributes.push(AttributeSpec {
                    name: name.clone(),
                    kind,
                    role: decl.role,
                    categories,
                    cut_points: Vec::new(),
                });
                columns.push(Column::Categorical(codes));
            }
        }
    }

    Ok(Dataset {
        attributes,
        columns,
        source_rows,
        dropped_rows,
        beneficial_label,
        protected_label,
    })
}

/// Read a single-column prediction CSV (header row first) into binary labels.
///
/// Accepts either one label per kept dataset row, or one per source CSV row,
/// in which case the rows dropped at ingestion are skipped.
pub fn read_prediction_csv<R: Read>(
    source: R,
    dataset: &Dataset,
    model_id: &str,
) -> Result<Vec<bool>, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let mut raw = Vec::new();
    for record in reader.records() {
        let record = record?;
        let value = record.get(0).unwrap_or("");
        let label = dataset
            .parse_class_label(value)
            .ok_or_else(|| DataError::NonBinaryPrediction {
                model: model_id.to_string(),
                value: value.to_string(),
            })?;
        raw.push(label);
    }
    let source_len = dataset.len() + dataset.dropped_rows;
    if raw.len() == dataset.len() {
        Ok(raw)
    } else if raw.len() == source_len {
        Ok(dataset.source_rows.iter().map(|&i| raw[i]).collect())
    } else {
        Err(DataError::LengthMismatch {
            expected: dataset.len(),
            found: raw.len(),
        })
    }
}
