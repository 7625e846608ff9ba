//! HTTP+JSON session service.
//!
//! A session holds an immutable snapshot per revision. Config mutations
//! and mitigation commits are serialized per session and publish a new
//! snapshot; reads work against whichever snapshot was current when they
//! started. Results and geometry are computed lazily and cached inside
//! their snapshot, so a mutation drops them along with the old revision.

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use discrim_core::atoms::LayoutOptions;
use discrim_core::causal::{ParentSet, ResolvingSuggestion};
use discrim_core::data::{AttributeHistogram, Schema};
use discrim_core::discrim::{AnalysisConfig, AuditResult, ModelComparison};
use discrim_core::export::ResultView;
use discrim_core::mitigation::{MitigationPlan, MitigationReport};
use discrim_core::pipeline::PipelineOptions;
use discrim_core::rules::DEFAULT_MAX_LENGTH;
use discrim_core::MitigationError;
use parking_lot::{Mutex, RwLock};
use serde::{Deserialize, Serialize};

use crate::engine::{summarize, ConfigPatch, Engine, EngineError, GeometryView, Inputs, ModelSummary};

pub const DEFAULT_BODY_LIMIT: usize = 100 * 1024 * 1024;
pub const REVISION_HEADER: &str = "revision";
pub const IF_REVISION_HEADER: &str = "if-revision";

// --- errors -------------------------------------------------------------------

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }

    fn unknown_session(id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, format!("unknown session `{id}`"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(ErrorBody { error: &self.message })).into_response()
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        let status = if e.is_unknown_model() {
            StatusCode::NOT_FOUND
        } else if matches!(e.core(), Some(discrim_core::Error::Mitigation(MitigationError::StalePlan { .. }))) {
            StatusCode::CONFLICT
        } else {
            StatusCode::UNPROCESSABLE_ENTITY
        };
        ApiError::new(status, e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::new(r.status(), r.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        ApiError::new(r.status(), r.body_text())
    }
}

type ApiResult<T> = Result<T, ApiError>;

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> ApiResult<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
}

// --- state ----------------------------------------------------------------------

type GeometryKey = (String, usize, Option<usize>);

struct Snapshot {
    revision: u64,
    engine: Arc<Engine>,
    config: AnalysisConfig,
    results: Mutex<HashMap<String, Arc<AuditResult>>>,
    geometry: Mutex<HashMap<GeometryKey, Arc<GeometryView>>>,
}

impl Snapshot {
    fn new(revision: u64, engine: Arc<Engine>, config: AnalysisConfig) -> Self {
        Snapshot {
            revision,
            engine,
            config,
            results: Mutex::new(HashMap::new()),
            geometry: Mutex::new(HashMap::new()),
        }
    }

    fn result(&self, model: &str) -> ApiResult<Arc<AuditResult>> {
        if let Some(r) = self.results.lock().get(model) {
            return Ok(r.clone());
        }
        let r = Arc::new(self.engine.analyze(&self.config, model)?);
        Ok(self.results.lock().entry(model.to_string()).or_insert(r).clone())
    }

    fn geometry(&self, model: &str, collection: usize, dot_budget: Option<usize>) -> ApiResult<Arc<GeometryView>> {
        if dot_budget == Some(0) {
            return Err(ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "dot_budget must be at least 1"));
        }
        let key = (model.to_string(), collection, dot_budget);
        if let Some(g) = self.geometry.lock().get(&key) {
            return Ok(g.clone());
        }
        let result = self.result(model)?;
        let options = LayoutOptions {
            dot_budget,
            ..LayoutOptions::default()
        };
        let g = Arc::new(self.engine.geometry(&result, collection, &options)?);
        Ok(self.geometry.lock().entry(key).or_insert(g).clone())
    }

    /// Results for every model, filling the cache.
    fn all_results(&self) -> ApiResult<BTreeMap<String, AuditResult>> {
        self.engine
            .models()
            .into_iter()
            .map(|m| self.result(&m).map(|r| (m, (*r).clone())))
            .collect()
    }
}

struct Session {
    /// Serializes mutations.
    writer: Mutex<()>,
    current: RwLock<Arc<Snapshot>>,
}

impl Session {
    fn snapshot(&self) -> Arc<Snapshot> {
        self.current.read().clone()
    }
}

#[derive(Default)]
pub struct AppState {
    sessions: RwLock<HashMap<String, Arc<Session>>>,
}

impl AppState {
    fn session(&self, id: &str) -> ApiResult<Arc<Session>> {
        self.sessions
            .read()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::unknown_session(id))
    }
}

type Shared = State<Arc<AppState>>;

// --- wire types -----------------------------------------------------------------

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    /// Dataset CSV text.
    pub dataset: String,
    pub schema: Schema,
    /// Model id to single-column prediction CSV text.
    #[serde(default)]
    pub predictions: BTreeMap<String, String>,
    #[serde(default)]
    pub min_support: Option<usize>,
    #[serde(default)]
    pub max_length: Option<usize>,
    #[serde(default)]
    pub config: Option<ConfigPatch>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSummary {
    pub session_id: String,
    pub revision: u64,
    pub rows: usize,
    pub dropped_rows: usize,
    pub models: Vec<String>,
    pub config: AnalysisConfig,
    pub suggested_resolving: Option<ResolvingSuggestion>,
    pub parents: Option<ParentSet>,
    pub results: Vec<ModelSummary>,
    /// Why the current config yields no results, if it does not.
    pub analysis_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsResponse {
    pub revision: u64,
    pub result: ResultView,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramsResponse {
    pub revision: u64,
    pub model_id: String,
    pub histograms: Vec<AttributeHistogram>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryResponse {
    pub revision: u64,
    #[serde(flatten)]
    pub view: GeometryView,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareResponse {
    pub revision: u64,
    pub comparison: ModelComparison,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MitigateRequest {
    pub model: String,
    /// Canonical keys; absent selects every itemset of the result.
    #[serde(default)]
    pub selected: Option<Vec<String>>,
    #[serde(default)]
    pub tau_target: Option<f64>,
    pub preview: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MitigateResponse {
    /// Revision the response reflects; a commit reports the new one.
    pub revision: u64,
    pub preview: bool,
    pub plan: MitigationPlan,
    pub report: MitigationReport,
    /// Id of the registered mitigated model, on commit.
    pub mitigated_model: Option<String>,
}

#[derive(Debug, Deserialize)]
pub struct CompareQuery {
    pub m1: String,
    pub m2: String,
}

#[derive(Debug, Deserialize)]
pub struct GeometryQuery {
    #[serde(default)]
    pub dot_budget: Option<usize>,
}

// --- handlers ---------------------------------------------------------------------

fn reply<T: Serialize>(status: StatusCode, revision: u64, body: &T) -> Response {
    let mut resp = (status, Json(body)).into_response();
    resp.headers_mut().insert(REVISION_HEADER, HeaderValue::from(revision));
    resp
}

fn if_revision(headers: &HeaderMap) -> ApiResult<Option<u64>> {
    headers
        .get(IF_REVISION_HEADER)
        .map(|v| {
            v.to_str()
                .ok()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, "If-Revision must be an unsigned integer"))
        })
        .transpose()
}

fn check_revision(expected: Option<u64>, current: u64) -> ApiResult<()> {
    match expected {
        Some(e) if e != current => Err(ApiError::new(
            StatusCode::CONFLICT,
            format!("revision conflict: request is against {e}, session is at {current}"),
        )),
        _ => Ok(()),
    }
}

fn summary(id: &str, snap: &Snapshot) -> SessionSummary {
    let engine = &snap.engine;
    let (results, analysis_error) = match snap.all_results() {
        Ok(r) => (summarize(&r), None),
        Err(e) => (Vec::new(), Some(e.message)),
    };
    SessionSummary {
        session_id: id.to_string(),
        revision: snap.revision,
        rows: engine.prepared.dataset.len(),
        dropped_rows: engine.prepared.dataset.base.dropped_rows,
        models: engine.models(),
        config: snap.config.clone(),
        suggested_resolving: engine.suggestion.clone(),
        parents: engine.prepared.parents.clone(),
        results,
        analysis_error,
    }
}

async fn create_session(State(state): Shared, body: Result<Json<CreateSession>, JsonRejection>) -> ApiResult<Response> {
    let Json(req) = body?;
    blocking(move || {
        let inputs = Inputs {
            data: req.dataset,
            schema: req.schema,
            predictions: req.predictions.into_iter().collect(),
            options: PipelineOptions {
                min_support: req.min_support,
                max_length: req.max_length.unwrap_or(DEFAULT_MAX_LENGTH),
            },
        };
        let engine = Engine::load(&inputs)?;
        let mut config = engine.default_config();
        if let Some(p) = &req.config {
            config = p.apply(&config);
            config
                .check()
                .map_err(|e| ApiError::from(EngineError::from(e)))?;
        }
        let id = uuid::Uuid::new_v4().simple().to_string();
        let snap = Arc::new(Snapshot::new(0, Arc::new(engine), config));
        let body = summary(&id, &snap);
        let session = Arc::new(Session {
            writer: Mutex::new(()),
            current: RwLock::new(snap),
        });
        state.sessions.write().insert(id.clone(), session);
        log::info!("session {id} created");
        Ok(reply(StatusCode::CREATED, 0, &body))
    })
    .await
}

async fn get_session(State(state): Shared, Path(id): Path<String>) -> ApiResult<Response> {
    let session = state.session(&id)?;
    blocking(move || {
        let snap = session.snapshot();
        Ok(reply(StatusCode::OK, snap.revision, &summary(&id, &snap)))
    })
    .await
}

async fn delete_session(State(state): Shared, Path(id): Path<String>) -> ApiResult<StatusCode> {
    state
        .sessions
        .write()
        .remove(&id)
        .map(|_| StatusCode::NO_CONTENT)
        .ok_or_else(|| ApiError::unknown_session(&id))
}

async fn patch_config(
    State(state): Shared,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Result<Json<ConfigPatch>, JsonRejection>,
) -> ApiResult<Response> {
    let session = state.session(&id)?;
    let expected = if_revision(&headers)?;
    let Json(patch) = body?;
    blocking(move || {
        let _writer = session.writer.lock();
        let current = session.snapshot();
        check_revision(expected, current.revision)?;
        let config = patch.apply(&current.config);
        config.check().map_err(|e| ApiError::from(EngineError::from(e)))?;
        let next = Snapshot::new(current.revision + 1, current.engine.clone(), config);
        // Validate by analyzing every model before publishing.
        next.all_results()?;
        let next = Arc::new(next);
        *session.current.write() = next.clone();
        log::info!("session {id} at revision {}", next.revision);
        Ok(reply(StatusCode::OK, next.revision, &summary(&id, &next)))
    })
    .await
}

async fn get_results(State(state): Shared, Path((id, model)): Path<(String, String)>) -> ApiResult<Response> {
    let session = state.session(&id)?;
    blocking(move || {
        let snap = session.snapshot();
        let result = snap.result(&model)?;
        let body = ResultsResponse {
            revision: snap.revision,
            result: snap.engine.view(&result),
        };
        Ok(reply(StatusCode::OK, snap.revision, &body))
    })
    .await
}

async fn get_histograms(State(state): Shared, Path((id, model)): Path<(String, String)>) -> ApiResult<Response> {
    let session = state.session(&id)?;
    blocking(move || {
        let snap = session.snapshot();
        let body = HistogramsResponse {
            revision: snap.revision,
            histograms: snap.engine.histograms(&model)?,
            model_id: model,
        };
        Ok(reply(StatusCode::OK, snap.revision, &body))
    })
    .await
}

async fn get_geometry(
    State(state): Shared,
    Path((id, model, collection)): Path<(String, String, usize)>,
    query: Result<Query<GeometryQuery>, QueryRejection>,
) -> ApiResult<Response> {
    let session = state.session(&id)?;
    let Query(q) = query?;
    blocking(move || {
        let snap = session.snapshot();
        let view = snap.geometry(&model, collection, q.dot_budget)?;
        let body = GeometryResponse {
            revision: snap.revision,
            view: (*view).clone(),
        };
        Ok(reply(StatusCode::OK, snap.revision, &body))
    })
    .await
}

async fn get_compare(
    State(state): Shared,
    Path(id): Path<String>,
    query: Result<Query<CompareQuery>, QueryRejection>,
) -> ApiResult<Response> {
    let session = state.session(&id)?;
    let Query(q) = query?;
    blocking(move || {
        let snap = session.snapshot();
        let (l, r) = (snap.result(&q.m1)?, snap.result(&q.m2)?);
        let comparison = discrim_core::discrim::compare_models(&l, &r).map_err(|e| ApiError::from(EngineError::from(e)))?;
        let body = CompareResponse {
            revision: snap.revision,
            comparison,
        };
        Ok(reply(StatusCode::OK, snap.revision, &body))
    })
    .await
}

async fn post_mitigate(
    State(state): Shared,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Result<Json<MitigateRequest>, JsonRejection>,
) -> ApiResult<Response> {
    let session = state.session(&id)?;
    let expected = if_revision(&headers)?;
    let Json(req) = body?;
    blocking(move || {
        let plan_on = |snap: &Snapshot| -> ApiResult<_> {
            check_revision(expected, snap.revision)?;
            let result = snap.result(&req.model)?;
            Ok(snap.engine.mitigate(&result, req.selected.as_deref(), req.tau_target)?)
        };
        if req.preview {
            let snap = session.snapshot();
            let (outcome, _) = plan_on(&snap)?;
            let body = MitigateResponse {
                revision: snap.revision,
                preview: true,
                plan: outcome.plan,
                report: outcome.report,
                mitigated_model: None,
            };
            return Ok(reply(StatusCode::OK, snap.revision, &body));
        }
        let _writer = session.writer.lock();
        let current = session.snapshot();
        let (outcome, preds) = plan_on(&current)?;
        let (engine, new_id) = current.engine.with_mitigated(&req.model, preds)?;
        let next = Arc::new(Snapshot::new(current.revision + 1, Arc::new(engine), current.config.clone()));
        *session.current.write() = next.clone();
        log::info!("session {id}: registered {new_id} at revision {}", next.revision);
        let body = MitigateResponse {
            revision: next.revision,
            preview: false,
            plan: outcome.plan,
            report: outcome.report,
            mitigated_model: Some(new_id),
        };
        Ok(reply(StatusCode::OK, next.revision, &body))
    })
    .await
}

pub fn router(body_limit: usize) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session).delete(delete_session))
        .route("/sessions/{id}/config", patch(patch_config))
        .route("/sessions/{id}/results/{model}", get(get_results))
        .route("/sessions/{id}/histograms/{model}", get(get_histograms))
        .route("/sessions/{id}/geometry/{model}/{collection}", get(get_geometry))
        .route("/sessions/{id}/compare", get(get_compare))
        .route("/sessions/{id}/mitigate", post(post_mitigate))
        .layer(DefaultBodyLimit::max(body_limit))
        .with_state(Arc::new(AppState::default()))
}

pub async fn serve(addr: SocketAddr, body_limit: usize) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(body_limit))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
