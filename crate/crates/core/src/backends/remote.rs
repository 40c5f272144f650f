//! HTTP client for a remote translation backend.
//!
//! The wire format is the gateway's own `POST /api/v2/translate`, so one
//! gateway can use another as a backend.

use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{BackendError, TranslationBackend};
use crate::lang::Lang;

fn default_timeout_ms() -> u64 {
    10_000
}
fn default_max_retries() -> u32 {
    2
}
fn default_backoff_ms() -> u64 {
    100
}
fn default_max_in_flight() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndpointConfig {
    /// Base URL of the remote service, e.g. `http://10.0.0.5:8080`.
    pub url: String,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
    #[serde(default = "default_max_retries")]
    pub max_retries: u32,
    /// First retry delay; doubles on every further attempt.
    #[serde(default = "default_backoff_ms")]
    pub backoff_ms: u64,
    #[serde(default = "default_max_in_flight")]
    pub max_in_flight: usize,
}

impl EndpointConfig {
    pub fn new(url: impl Into<String>) -> Self {
        EndpointConfig {
            url: url.into(),
            timeout_ms: default_timeout_ms(),
            max_retries: default_max_retries(),
            backoff_ms: default_backoff_ms(),
            max_in_flight: default_max_in_flight(),
        }
    }

    fn translate_url(&self) -> String {
        format!("{}/api/v2/translate", self.url.trim_end_matches('/'))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireRequest {
    pub src: Lang,
    pub tgt: Lang,
    pub texts: Vec<String>,
    #[serde(default)]
    pub include_translit: bool,
    #[serde(default)]
    pub logging_consent: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireResponse {
    pub translations: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum RemoteError {
    #[error("request timed out after {0:?}")]
    Timeout(Duration),
    #[error("HTTP status {status}")]
    Status { status: u16, retry_after: Option<Duration> },
    #[error("malformed response: {0}")]
    Malformed(String),
    #[error("transport error: {0}")]
    Transport(String),
}

impl RemoteError {
    fn retryable(&self) -> bool {
        match self {
            RemoteError::Timeout(_) | RemoteError::Transport(_) => true,
            RemoteError::Status { status, .. } => *status == 429 || *status >= 500,
            RemoteError::Malformed(_) => false,
        }
    }

    fn retry_after(&self) -> Option<Duration> {
        match self {
            RemoteError::Status { retry_after, .. } => *retry_after,
            _ => None,
        }
    }
}

fn agent(config: &EndpointConfig) -> ureq::Agent {
    ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_millis(config.timeout_ms)))
        .http_status_as_error(false)
        .build()
        .into()
}

fn attempt(agent: &ureq::Agent, config: &EndpointConfig, request: &WireRequest) -> Result<Vec<String>, RemoteError> {
    let mut response = agent.post(&config.translate_url()).send_json(request).map_err(|e| match e {
        ureq::Error::Timeout(_) => RemoteError::Timeout(Duration::from_millis(config.timeout_ms)),
        other => RemoteError::Transport(other.to_string()),
    })?;
    let status = response.status().as_u16();
    if !(200..300).contains(&status) {
        let retry_after = response
            .headers()
            .get("retry-after")
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.trim().parse::<u64>().ok())
            .map(Duration::from_secs);
        return Err(RemoteError::Status { status, retry_after });
    }
    let body: WireResponse = response.body_mut().read_json().map_err(|e| match e {
        ureq::Error::Timeout(_) => RemoteError::Timeout(Duration::from_millis(config.timeout_ms)),
        other => RemoteError::Malformed(other.to_string()),
    })?;
    if body.translations.len() != request.texts.len() {
        return Err(RemoteError::Malformed(format!(
            "{} translations for {} texts",
            body.translations.len(),
            request.texts.len()
        )));
    }
    Ok(body.translations)
}

/// One call with timeout and bounded exponential-backoff retries.
pub fn remote_translate(config: &EndpointConfig, src: &Lang, tgt: &Lang, texts: &[String]) -> Result<Vec<String>, RemoteError> {
    send_with_retries(&agent(config), config, src, tgt, texts)
}

fn send_with_retries(
    agent: &ureq::Agent,
    config: &EndpointConfig,
    src: &Lang,
    tgt: &Lang,
    texts: &[String],
) -> Result<Vec<String>, RemoteError> {
    if texts.is_empty() {
        return Ok(Vec::new());
    }
    let request = WireRequest {
        src: src.clone(),
        tgt: tgt.clone(),
        texts: texts.to_vec(),
        include_translit: false,
        logging_consent: false,
    };
    let mut tries = 0;
    loop {
        match attempt(agent, config, &request) {
            Ok(out) => return Ok(out),
            Err(err) if err.retryable() && tries < config.max_retries => {
                let backoff = Duration::from_millis(config.backoff_ms.saturating_mul(1 << tries.min(16)));
                std::thread::sleep(backoff);
                tries += 1;
            }
            Err(err) => return Err(err),
        }
    }
}

/// Counting semaphore capping concurrent requests to one endpoint.
#[derive(Debug)]
struct InFlight {
    cap: usize,
    used: Mutex<usize>,
    freed: Condvar,
}

impl InFlight {
    fn acquire(&self) -> InFlightGuard<'_> {
        let mut used = self.used.lock().unwrap_or_else(|e| e.into_inner());
        while *used >= self.cap {
            used = self.freed.wait(used).unwrap_or_else(|e| e.into_inner());
        }
        *used += 1;
        InFlightGuard(self)
    }
}

struct InFlightGuard<'a>(&'a InFlight);

impl Drop for InFlightGuard<'_> {
    fn drop(&mut self) {
        let mut used = self.0.used.lock().unwrap_or_else(|e| e.into_inner());
        *used -= 1;
        self.0.freed.notify_one();
    }
}

#[derive(Debug)]
pub struct RemoteBackend {
    id: String,
    config: EndpointConfig,
    agent: ureq::Agent,
    in_flight: InFlight,
}

impl RemoteBackend {
    pub fn new(id: &str, config: EndpointConfig) -> Self {
        RemoteBackend {
            id: id.to_string(),
            agent: agent(&config),
            in_flight: InFlight {
                cap: config.max_in_flight.max(1),
                used: Mutex::new(0),
                freed: Condvar::new(),
            },
            config,
        }
    }
}

impl TranslationBackend for RemoteBackend {
    fn translate_batch(&self, src: &Lang, tgt: &Lang, texts: &[String]) -> Result<Vec<String>, BackendError> {
        let _permit = self.in_flight.acquire();
        send_with_retries(&self.agent, &self.config, src, tgt, texts).map_err(|err| BackendError::Unavailable {
            backend: self.id.clone(),
            retry_after: err.retry_after().or(Some(Duration::from_millis(self.config.backoff_ms))),
            reason: err.to_string(),
        })
    }
}
