use std::collections::HashMap;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use prekladac_core::backends::{BackendError, BackendPool, RouteKind};
use prekladac_core::privacy::{ConsentState, ConsentStore, RequestInfo, UsageLog};
use prekladac_core::textproc::{normalize, Segmenter};
use prekladac_core::usage::{DailyStats, DateRange};
use prekladac_core::{translit, Lang};
use serde::{Deserialize, Serialize};

use crate::batcher::{BatchMetrics, Batcher, SubmitError};
use crate::config::{ConfigError, GatewayConfig};
use crate::ratelimit::RateLimiter;

#[derive(Debug, thiserror::Error)]
pub enum GatewayError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Pool(#[from] prekladac_core::backends::PoolError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslateRequest {
    pub src: String,
    pub tgt: String,
    pub texts: Vec<String>,
    #[serde(default)]
    pub include_translit: bool,
    /// Falls back to the configured default when absent.
    #[serde(default)]
    pub logging_consent: Option<bool>,
    #[serde(default)]
    pub client_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslateResponse {
    pub translations: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translit_src: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translit_tgt: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairKind {
    Direct,
    Pivot,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguagePair {
    pub src: Lang,
    pub tgt: Lang,
    pub route: PairKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsentUpdate {
    pub client_id: String,
    pub consent: bool,
    #[serde(default)]
    pub updated_at: Option<DateTime<Utc>>,
}

/// An error response: `{"error": {"code": ..., "message": ...}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub retry_after: Option<Duration>,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into(), retry_after: None }
    }

    fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }
}

impl From<SubmitError> for ApiError {
    fn from(err: SubmitError) -> Self {
        match err {
            SubmitError::QueueFull { retry_after } => ApiError {
                retry_after: Some(retry_after),
                ..ApiError::new(StatusCode::TOO_MANY_REQUESTS, "queue_full", "translation queue is full")
            },
            SubmitError::Backend(BackendError::Unavailable { reason, retry_after, backend }) => ApiError {
                retry_after,
                ..ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "backend_unavailable", format!("{backend}: {reason}"))
            },
            SubmitError::Backend(other) => {
                ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "backend_unavailable", other.to_string())
            }
            SubmitError::Closed => ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "backend_unavailable", "batcher stopped"),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = serde_json::json!({ "error": { "code": self.code, "message": self.message } });
        let mut response = (self.status, Json(body)).into_response();
        if let Some(wait) = self.retry_after {
            let secs = wait.as_secs() + u64::from(wait.subsec_nanos() > 0);
            response.headers_mut().insert(header::RETRY_AFTER, HeaderValue::from(secs.max(1)));
        }
        response
    }
}

/// Shared service state behind every handler.
pub struct Gateway {
    config: GatewayConfig,
    pool: BackendPool,
    batchers: HashMap<(Lang, Lang), Batcher>,
    segmenter: Segmenter,
    log: Option<UsageLog>,
    consent: ConsentStore,
    limiter: Option<RateLimiter>,
}

impl Gateway {
    /// Builds backends from the configured routes. Needs a tokio runtime.
    pub fn new(config: GatewayConfig) -> Result<Self, GatewayError> {
        config.validate()?;
        let pool = BackendPool::from_registry(config.registry()?)?;
        Ok(Self::with_pool(config, pool))
    }

    /// Uses an already built pool, e.g. one with injected backends.
    pub fn with_pool(config: GatewayConfig, pool: BackendPool) -> Self {
        let mut batchers = HashMap::new();
        for (src, tgt, descriptor) in pool.registry().pairs() {
            if let Ok(backend) = pool.backend(&descriptor.id) {
                let batcher = Batcher::spawn(src.clone(), tgt.clone(), &descriptor.id, Arc::clone(backend), config.batching);
                batchers.insert((src.clone(), tgt.clone()), batcher);
            }
        }
        let log = (!config.on_premise).then(|| UsageLog::new(config.log.path.clone(), config.log.seed));
        let limiter = config.rate_limit.map(RateLimiter::new);
        Gateway { config, pool, batchers, segmenter: Segmenter::shipped(), log, consent: ConsentStore::new(), limiter }
    }

    pub fn with_rate_limiter(mut self, limiter: RateLimiter) -> Self {
        self.limiter = Some(limiter);
        self
    }

    pub fn config(&self) -> &GatewayConfig {
        &self.config
    }

    /// `None` in the on-premise profile.
    pub fn usage_log(&self) -> Option<&UsageLog> {
        self.log.as_ref()
    }

    pub fn consent_store(&self) -> &ConsentStore {
        &self.consent
    }

    pub fn batch_metrics(&self) -> Vec<BatchMetrics> {
        let mut metrics: Vec<BatchMetrics> = self.batchers.values().map(Batcher::metrics).collect();
        metrics.sort_by(|a, b| (&a.src, &a.tgt).cmp(&(&b.src, &b.tgt)));
        metrics
    }

    pub fn languages(&self) -> Vec<LanguagePair> {
        self.pool
            .registry()
            .available_routes(self.config.allow_pivot)
            .into_iter()
            .map(|r| LanguagePair {
                route: if matches!(r.kind, RouteKind::Pivot { .. }) { PairKind::Pivot } else { PairKind::Direct },
                src: r.src,
                tgt: r.tgt,
            })
            .collect()
    }

    fn consent_for(&self, request: &TranslateRequest) -> bool {
        if self.config.on_premise {
            return false;
        }
        let requested = request.logging_consent.unwrap_or(self.config.consent_default);
        // a stored withdrawal wins over whatever a client still sends
        let withdrawn = request.client_id.as_deref().and_then(|id| self.consent.get(id)).is_some_and(|s| !s.consent);
        requested && !withdrawn
    }

    pub async fn translate(self: &Arc<Self>, request: TranslateRequest) -> Result<TranslateResponse, ApiError> {
        let src = Lang::new(&request.src).map_err(|e| ApiError::bad_request("invalid_language", e.to_string()))?;
        let tgt = Lang::new(&request.tgt).map_err(|e| ApiError::bad_request("invalid_language", e.to_string()))?;
        if src == tgt {
            return Err(ApiError::bad_request("same_language", format!("source and target are both {src}")));
        }
        let max = self.config.max_text_chars;
        if let Some(i) = request.texts.iter().position(|t| t.chars().count() > max) {
            return Err(ApiError::bad_request("text_too_long", format!("text {i} exceeds {max} characters")));
        }
        let route = self
            .pool
            .resolve_route(&src, &tgt, self.config.allow_pivot)
            .map_err(|e| ApiError::bad_request("unsupported_pair", e.to_string()))?;
        if let (Some(limiter), Some(client)) = (&self.limiter, request.client_id.as_deref()) {
            limiter.check(client).map_err(|wait| ApiError {
                retry_after: Some(wait),
                ..ApiError::new(StatusCode::TOO_MANY_REQUESTS, "rate_limited", "too many requests for this client")
            })?;
        }

        let sentences: Vec<Vec<String>> = request
            .texts
            .iter()
            .map(|t| self.segmenter.segment(t, &src).into_iter().map(|s| s.text).collect())
            .collect();
        let mut flat: Vec<String> = sentences.iter().flatten().cloned().collect();
        let segment_count = flat.len() as u64;
        for (leg_src, leg_tgt, _) in route.legs() {
            let batcher = self.batchers.get(&(leg_src.clone(), leg_tgt.clone())).ok_or_else(|| {
                ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "backend_unavailable", format!("no backend for {leg_src}→{leg_tgt}"))
            })?;
            flat = batcher.submit(flat).await?;
        }
        let mut outputs = flat.into_iter();
        let translations: Vec<String> =
            sentences.iter().map(|s| outputs.by_ref().take(s.len()).collect::<Vec<_>>().join(" ")).collect();

        let (mut translit_src, mut translit_tgt) = (None, None);
        if request.include_translit && src.native_script() != tgt.native_script() {
            translit_src = request.texts.iter().map(|t| translit::for_language(&normalize(t), &src)).collect();
            translit_tgt = translations.iter().map(|t| translit::for_language(t, &tgt)).collect();
        }

        let consent = self.consent_for(&request);
        if self.log.is_some() {
            let info = RequestInfo {
                timestamp: Utc::now(),
                src,
                tgt,
                texts: request.texts,
                segments: segment_count,
                client_id: request.client_id,
            };
            let this = Arc::clone(self);
            // outcome is counted by the log itself; failures never fail the request
            let _ = tokio::task::spawn_blocking(move || {
                if let Some(log) = &this.log {
                    log.record_or_drop(&info, consent);
                }
            })
            .await;
        }
        Ok(TranslateResponse { translations, translit_src, translit_tgt })
    }
}

#[derive(Serialize)]
struct StatsBody {
    days: Vec<DailyStats>,
    corrupt: u64,
    logging_errors: u64,
    dropped: u64,
    logging_enabled: bool,
}

async fn translate_handler(
    State(gw): State<Arc<Gateway>>,
    body: Result<Json<TranslateRequest>, JsonRejection>,
) -> Result<Json<TranslateResponse>, ApiError> {
    let Json(request) = body.map_err(|e| ApiError::bad_request("invalid_request", e.body_text()))?;
    gw.translate(request).await.map(Json)
}

async fn languages_handler(State(gw): State<Arc<Gateway>>) -> Json<serde_json::Value> {
    Json(serde_json::json!({ "pairs": gw.languages() }))
}

async fn stats_handler(
    State(gw): State<Arc<Gateway>>,
    range: Result<Query<DateRange>, QueryRejection>,
) -> Result<Json<StatsBody>, ApiError> {
    let Query(range) = range.map_err(|e| ApiError::bad_request("invalid_request", e.body_text()))?;
    let this = Arc::clone(&gw);
    let report = tokio::task::spawn_blocking(move || this.log.as_ref().map(|log| log.stats(range)).transpose())
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
        .map_err(|e| ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "storage_unavailable", e.to_string()))?
        .unwrap_or_default();
    let (logging_errors, dropped) = gw.log.as_ref().map_or((0, 0), |l| (l.logging_errors(), l.dropped()));
    Ok(Json(StatsBody {
        days: report.days,
        corrupt: report.corrupt,
        logging_errors,
        dropped,
        logging_enabled: gw.log.is_some(),
    }))
}

async fn health_handler(State(gw): State<Arc<Gateway>>) -> Json<serde_json::Value> {
    Json(serde_json::json!({
        "status": "ok",
        "on_premise": gw.config.on_premise,
        "batchers": gw.batch_metrics(),
        "logging_errors": gw.log.as_ref().map_or(0, UsageLog::logging_errors),
    }))
}

async fn consent_handler(
    State(gw): State<Arc<Gateway>>,
    body: Result<Json<ConsentUpdate>, JsonRejection>,
) -> Result<Json<ConsentState>, ApiError> {
    let Json(update) = body.map_err(|e| ApiError::bad_request("invalid_request", e.body_text()))?;
    if update.client_id.is_empty() {
        return Err(ApiError::bad_request("invalid_request", "client_id must not be empty"));
    }
    Ok(Json(gw.consent.update(ConsentState {
        client_id: update.client_id,
        consent: update.consent,
        updated_at: update.updated_at.unwrap_or_else(Utc::now),
    })))
}

async fn delete_handler(
    State(gw): State<Arc<Gateway>>,
    Path(client_id): Path<String>,
) -> Result<Json<serde_json::Value>, ApiError> {
    let this = Arc::clone(&gw);
    let id = client_id.clone();
    let deleted = tokio::task::spawn_blocking(move || this.log.as_ref().map_or(Ok(0), |log| log.delete_client_data(&id)))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
        .map_err(|e| ApiError {
            retry_after: Some(Duration::from_secs(1)),
            ..ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "storage_unavailable", e.to_string())
        })?;
    Ok(Json(serde_json::json!({ "client_id": client_id, "deleted": deleted })))
}

pub fn router(gateway: Arc<Gateway>) -> Router {
    Router::new()
        .route("/api/v2/translate", post(translate_handler))
        .route("/api/v2/languages", get(languages_handler))
        .route("/api/v2/stats", get(stats_handler))
        .route("/api/v2/consent", post(consent_handler))
        .route("/api/v2/clients/{client_id}/data", delete(delete_handler))
        .route("/healthz", get(health_handler))
        .with_state(gateway)
}
