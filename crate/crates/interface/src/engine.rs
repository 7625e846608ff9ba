//! The engine path shared by the CLI and the session service.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use discrim_core::atoms::{compute_atoms, layout_rippleset, outline_set, LayoutOptions, RippleGeometry, DEFAULT_OUTLINE_MARGIN};
use discrim_core::causal::{suggest_resolving, ResolvingSuggestion};
use discrim_core::data::{attribute_histograms, load_dataset, read_prediction_csv, AttributeHistogram, Role, Schema};
use discrim_core::discrim::{compare_models, AnalysisConfig, AuditResult, ModelComparison};
use discrim_core::export::{result_view, ResultView};
use discrim_core::mitigation::{apply_plan, default_selection, mitigated_model_id, plan_reject_option, select_itemsets, MitigationPlan, MitigationReport};
use discrim_core::pipeline::{prepare, PipelineOptions, Prepared};
use discrim_core::{DataError, MiningError, MitigationError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Core(#[from] discrim_core::Error),
    #[error("no models: pass at least one prediction file or declare a prediction column")]
    NoModels,
    #[error("model `{0}` is given more than once")]
    DuplicateModel(String),
    #[error("collection {index} does not exist for model `{model}` ({count} collections)")]
    UnknownCollection { model: String, index: usize, count: usize },
}

impl EngineError {
    /// The core error kind, for status mapping.
    pub fn core(&self) -> Option<&discrim_core::Error> {
        match self {
            EngineError::Core(e) => Some(e),
            _ => None,
        }
    }

    pub fn is_unknown_model(&self) -> bool {
        matches!(
            self.core(),
            Some(discrim_core::Error::Data(DataError::UnknownModel(_)))
                | Some(discrim_core::Error::Mining(MiningError::Data(DataError::UnknownModel(_))))
                | Some(discrim_core::Error::Mitigation(MitigationError::Data(DataError::UnknownModel(_))))
        ) || matches!(self, EngineError::UnknownCollection { .. })
    }
}

macro_rules! from_core {
    ($($t:ty),*) => {$(
        impl From<$t> for EngineError {
            fn from(e: $t) -> Self {
                EngineError::Core(e.into())
            }
        }
    )*};
}
from_core!(DataError, MiningError, MitigationError);

/// Raw audit inputs: CSV text, schema and external prediction files.
#[derive(Debug, Clone, Default)]
pub struct Inputs {
    pub data: String,
    pub schema: Schema,
    /// `(model id, single-column CSV text)`.
    pub predictions: Vec<(String, String)>,
    pub options: PipelineOptions,
}

/// Config fields a client may change.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigPatch {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolving: Option<BTreeSet<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proxies: Option<BTreeSet<String>>,
    /// Value of the protected attribute marking the protected group.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protected_group: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_group_support: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allow_empty_resolving: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prune_redundant: Option<bool>,
}

impl ConfigPatch {
    pub fn apply(&self, config: &AnalysisConfig) -> AnalysisConfig {
        let mut next = config.clone();
        if let Some(t) = self.tau {
            next.tau = t;
        }
        if let Some(r) = &self.resolving {
            next.resolving = r.clone();
        }
        if let Some(p) = &self.proxies {
            next.proxies = p.clone();
            // Marking an attribute as a proxy takes it out of an inherited
            // resolving set; an explicit resolving list is left to validation.
            if self.resolving.is_none() {
                next.resolving.retain(|a| !p.contains(a));
            }
        }
        if let Some(g) = &self.protected_group {
            next.protected_group_value = g.clone();
        }
        if let Some(m) = self.min_group_support {
            next.min_group_support = m;
        }
        if let Some(a) = self.allow_empty_resolving {
            next.allow_empty_resolving = a;
        }
        if let Some(p) = self.prune_redundant {
            next.prune_redundant = p;
        }
        next
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub model_id: String,
    pub itemsets: usize,
    pub collections: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryView {
    pub model_id: String,
    pub collection: usize,
    pub resolving_key: String,
    /// One outline per itemset, in collection order.
    pub geometry: RippleGeometry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MitigationOutcome {
    pub plan: MitigationPlan,
    pub report: MitigationReport,
}

/// A prepared dataset plus everything derived from the inputs alone.
#[derive(Debug, Clone)]
pub struct Engine {
    pub prepared: Prepared,
    pub suggestion: Option<ResolvingSuggestion>,
}

impl Engine {
    pub fn load(inputs: &Inputs) -> Result<Engine, EngineError> {
        let raw = load_dataset(inputs.data.as_bytes(), &inputs.schema)?;
        let mut external = Vec::new();
        let mut seen: BTreeSet<String> = raw
            .attributes
            .iter()
            .filter(|a| a.role == Role::Prediction)
            .map(|a| a.name.clone())
            .collect();
        for (id, text) in &inputs.predictions {
            if !seen.insert(id.clone()) {
                return Err(EngineError::DuplicateModel(id.clone()));
            }
            external.push((id.clone(), read_prediction_csv(text.as_bytes(), &raw, id)?));
        }
        let mut prepared = prepare(&raw, &inputs.options)?;
        for (id, labels) in external {
            prepared.dataset.insert_predictions(&id, labels)?;
        }
        if prepared.dataset.predictions.is_empty() {
            return Err(EngineError::NoModels);
        }
        let proxies: Vec<&str> = inputs.schema.columns_with_role(Role::Proxy).collect();
        let suggestion = prepared
            .parents
            .as_ref()
            .map(|p| suggest_resolving(p, prepared.dataset.protected_attribute(), proxies));
        Ok(Engine { prepared, suggestion })
    }

    pub fn models(&self) -> Vec<String> {
        self.prepared.dataset.model_ids().map(str::to_string).collect()
    }

    /// Schema roles, with the suggested resolving set when the schema
    /// declares none. The model id is the first model.
    pub fn default_config(&self) -> AnalysisConfig {
        let first = self.models().into_iter().next().unwrap_or_default();
        let mut config = AnalysisConfig::for_dataset(&self.prepared.dataset, &first);
        if config.resolving.is_empty() {
            if let Some(s) = &self.suggestion {
                config.resolving = s.resolving.iter().filter(|a| !config.proxies.contains(*a)).cloned().collect();
            }
        }
        config
    }

    pub fn analyze(&self, config: &AnalysisConfig, model_id: &str) -> Result<AuditResult, EngineError> {
        self.prepared.dataset.predictions(model_id)?;
        Ok(self.prepared.analyze(&config.with_model(model_id))?)
    }

    /// Results for every model; fails on the first invalid one.
    pub fn analyze_all(&self, config: &AnalysisConfig) -> Result<BTreeMap<String, AuditResult>, EngineError> {
        self.models()
            .into_iter()
            .map(|m| self.analyze(config, &m).map(|r| (m, r)))
            .collect()
    }

    pub fn view(&self, result: &AuditResult) -> ResultView {
        result_view(result, &self.prepared.dataset)
    }

    pub fn histograms(&self, model_id: &str) -> Result<Vec<AttributeHistogram>, EngineError> {
        Ok(attribute_histograms(&self.prepared.dataset, model_id)?)
    }

    pub fn geometry(&self, result: &AuditResult, collection: usize, options: &LayoutOptions) -> Result<GeometryView, EngineError> {
        let model_id = &result.config.model_id;
        let c = result.collections.get(collection).ok_or_else(|| EngineError::UnknownCollection {
            model: model_id.clone(),
            index: collection,
            count: result.collections.len(),
        })?;
        let preds = self.prepared.dataset.predictions(model_id)?;
        let atoms = compute_atoms(c, preds);
        let mut geometry = layout_rippleset(&atoms, options);
        geometry.outlines = (0..c.itemsets.len())
            .filter_map(|s| outline_set(&geometry, s, DEFAULT_OUTLINE_MARGIN))
            .collect();
        Ok(GeometryView {
            model_id: model_id.clone(),
            collection,
            resolving_key: c.resolving_key.clone(),
            geometry,
        })
    }

    pub fn compare(&self, config: &AnalysisConfig, left: &str, right: &str) -> Result<ModelComparison, EngineError> {
        let l = self.analyze(config, left)?;
        let r = self.analyze(config, right)?;
        Ok(compare_models(&l, &r)?)
    }

    /// Plan and evaluate reject-option flips. `selected = None` takes every
    /// itemset of the result; `tau_target = None` uses the analysis tau.
    pub fn mitigate(
        &self,
        result: &AuditResult,
        selected: Option<&[String]>,
        tau_target: Option<f64>,
    ) -> Result<(MitigationOutcome, Vec<bool>), EngineError> {
        let chosen = match selected {
            Some(keys) => select_itemsets(result, keys)?,
            None => default_selection(result),
        };
        let model_id = &result.config.model_id;
        let tau = tau_target.unwrap_or(result.config.tau);
        let plan = plan_reject_option(&self.prepared.dataset, model_id, &chosen, tau)?;
        let monitored = default_selection(result);
        let (preds, report) = apply_plan(&self.prepared.dataset, model_id, &plan, &monitored)?;
        Ok((MitigationOutcome { plan, report }, preds))
    }

    /// A copy with mitigated predictions registered as a new model.
    pub fn with_mitigated(&self, model_id: &str, predictions: Vec<bool>) -> Result<(Engine, String), EngineError> {
        let id = mitigated_model_id(model_id);
        let prepared = self.prepared.with_predictions(&id, predictions)?;
        Ok((
            Engine {
                prepared,
                suggestion: self.suggestion.clone(),
            },
            id,
        ))
    }
}

pub fn summarize(results: &BTreeMap<String, AuditResult>) -> Vec<ModelSummary> {
    results
        .iter()
        .map(|(m, r)| ModelSummary {
            model_id: m.clone(),
            itemsets: r.itemset_count(),
            collections: r.collections.len(),
        })
        .collect()
}

/// Human-readable audit summary.
pub fn summary_text(engine: &Engine, config: &AnalysisConfig, results: &BTreeMap<String, AuditResult>) -> String {
    let ds = &engine.prepared.dataset;
    let mut s = String::new();
    let _ = writeln!(s, "rows: {} ({} dropped for missing values)", ds.len(), ds.base.dropped_rows);
    let _ = writeln!(s, "protected: {} = {}", config.protected, config.protected_group_value);
    let _ = writeln!(s, "tau: {}", config.tau);
    let _ = writeln!(s, "min support: {}", engine.prepared.min_support);
    let _ = writeln!(s, "min group support: {}", config.min_group_support);
    let list = |set: &BTreeSet<String>| {
        if set.is_empty() {
            "(none)".to_string()
        } else {
            set.iter().cloned().collect::<Vec<_>>().join(", ")
        }
    };
    let _ = writeln!(s, "resolving: {}", list(&config.resolving));
    let _ = writeln!(s, "proxies: {}", list(&config.proxies));
    match &engine.suggestion {
        Some(sug) => {
            let _ = writeln!(s, "suggested resolving: {}", list(&sug.resolving));
        }
        None => {
            let _ = writeln!(s, "suggested resolving: (parent search skipped)");
        }
    }
    for (model, r) in results {
        let _ = writeln!(s, "\nmodel {model}: {} itemsets in {} collections", r.itemset_count(), r.collections.len());
        for c in &r.collections {
            let _ = writeln!(s, "  collection {} ({} items)", c.resolving_key, c.total_items);
            for &i in &c.row_order {
                let set = &c.itemsets[i];
                let _ = writeln!(
                    s,
                    "    {:+.4}  {}  (protected {}/{}, non-protected {}/{})",
                    set.rd,
                    set.canonical_key,
                    set.beneficial_protected,
                    set.members_protected.len(),
                    set.beneficial_nonprotected,
                    set.members_nonprotected.len()
                );
            }
        }
    }
    s
}
