use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::DataError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributeKind {
    Categorical,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Protected,
    Resolving,
    Proxy,
    #[default]
    Context,
    Outcome,
    Prediction,
}

impl Role {
    /// Whether literals on an attribute with this role may appear in an itemset.
    pub fn is_minable(self) -> bool {
        matches!(self, Role::Resolving | Role::Proxy | Role::Context)
    }
}

/// Declaration for one column of the schema sidecar.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnSchema {
    /// Inferred from the data when absent: all-numeric columns are continuous.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<AttributeKind>,
    #[serde(default)]
    pub role: Role,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beneficial_label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protected_label: Option<String>,
}

/// The schema sidecar: a JSON object mapping column name to its declaration.
///
/// Columns absent from the schema are context attributes of inferred kind.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Schema {
    pub columns: BTreeMap<String, ColumnSchema>,
}

impl Schema {
    pub fn from_json(text: &str) -> Result<Self, DataError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, DataError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Convenience for programmatic construction.
    pub fn with(mut self, column: &str, role: Role) -> Self {
        self.columns.entry(column.to_string()).or_default().role = role;
        self
    }

    pub fn kind(mut self, column: &str, kind: AttributeKind) -> Self {
        self.columns.entry(column.to_string()).or_default().kind = Some(kind);
        self
    }

    pub fn beneficial(mut self, column: &str, label: &str) -> Self {
        self.columns
            .entry(column.to_string())
            .or_default()
            .beneficial_label = Some(label.to_string());
        self
    }

    pub fn protected_label(mut self, column: &str, label: &str) -> Self {
        self.columns
            .entry(column.to_string())
            .or_default()
            .protected_label = Some(label.to_string());
        self
    }

    pub fn columns_with_role(&self, role: Role) -> impl Iterator<Item = &str> + '_ {
        self.columns
            .iter()
            .filter(move |(_, c)| c.role == role)
            .map(|(name, _)| name.as_str())
    }
}

/// A validated attribute of a loaded dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub name: String,
    pub kind: AttributeKind,
    pub role: Role,
    /// Category labels in code order. Empty for continuous attributes until discretized.
    pub categories: Vec<String>,
    /// Ascending thresholds; only meaningful for continuous attributes.
    pub cut_points: Vec<f64>,
}

impl AttributeSpec {
    pub fn is_minable(&self) -> bool {
        self.role.is_minable()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sidecar() {
        let schema = Schema::from_json(
            r#"{
                "gender": {"role": "protected", "protected_label": "F"},
                "score": {"kind": "continuous"},
                "admit": {"role": "outcome", "beneficial_label": "yes"}
            }"#,
        )
        .unwrap();
        assert_eq!(schema.columns["gender"].role, Role::Protected);
        assert_eq!(schema.columns["score"].role, Role::Context);
        assert_eq!(schema.columns["score"].kind, Some(AttributeKind::Continuous));
        assert_eq!(schema.columns_with_role(Role::Outcome).collect::<Vec<_>>(), ["admit"]);
    }

    #[test]
    fn rejects_unknown_role() {
        assert!(Schema::from_json(r#"{"a": {"role": "boss"}}"#).is_err());
    }
}
