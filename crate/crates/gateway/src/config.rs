use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use prekladac_core::backends::{BackendDescriptor, BackendKind, BackendRegistry, RegistryError};
use prekladac_core::Lang;
use serde::{Deserialize, Serialize};

/// Environment variable that overrides the configured port.
pub const PORT_ENV: &str = "PORT";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("reading {path}: {message}")]
    Read { path: String, message: String },
    #[error("parsing config: {0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Registry(#[from] RegistryError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GatewayConfig {
    pub bind: String,
    pub port: u16,
    /// Offer pivot routes for pairs without a direct backend.
    pub allow_pivot: bool,
    pub pivot: Lang,
    /// Per-text limit, in characters.
    pub max_text_chars: usize,
    /// Disables usage logging regardless of client consent.
    pub on_premise: bool,
    /// Consent assumed when a request omits `logging_consent`.
    pub consent_default: bool,
    pub log: LogConfig,
    pub batching: BatchConfig,
    pub rate_limit: Option<RateLimitConfig>,
    #[serde(rename = "route")]
    pub routes: Vec<RouteConfig>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogConfig {
    pub path: PathBuf,
    /// Base seed for pseudonym draws.
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatchConfig {
    /// B: most sentences per backend call.
    pub max_batch: usize,
    /// W: longest a sentence waits for its batch to fill.
    pub max_wait_ms: u64,
    /// Sentences that may be queued per language pair before 429.
    pub queue_cap: usize,
    /// Backend calls running at once per language pair.
    pub max_in_flight: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateLimitConfig {
    /// Sustained requests per second per client id.
    pub per_second: f64,
    pub burst: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteConfig {
    pub src: Lang,
    pub tgt: Lang,
    #[serde(flatten)]
    pub backend: BackendDescriptor,
}

impl Default for LogConfig {
    fn default() -> Self {
        LogConfig { path: PathBuf::from("usage.jsonl"), seed: 0 }
    }
}

impl Default for BatchConfig {
    fn default() -> Self {
        BatchConfig { max_batch: 8, max_wait_ms: 20, queue_cap: 4096, max_in_flight: 4 }
    }
}

impl BatchConfig {
    pub fn max_wait(&self) -> Duration {
        Duration::from_millis(self.max_wait_ms)
    }
}

impl Default for GatewayConfig {
    fn default() -> Self {
        let toy = BackendDescriptor { id: "toy".into(), kind: BackendKind::Dictionary { lexicon: None } };
        GatewayConfig {
            bind: "127.0.0.1".into(),
            port: 8080,
            allow_pivot: true,
            pivot: Lang::en(),
            max_text_chars: 100_000,
            on_premise: false,
            consent_default: false,
            log: LogConfig::default(),
            batching: BatchConfig::default(),
            rate_limit: None,
            routes: vec![
                RouteConfig { src: Lang::cs(), tgt: Lang::uk(), backend: toy.clone() },
                RouteConfig { src: Lang::uk(), tgt: Lang::cs(), backend: toy },
            ],
        }
    }
}

impl GatewayConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: GatewayConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Read { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_toml(&text)
    }

    /// Applies `PORT` from the environment, if set.
    pub fn with_env_overrides(mut self) -> Result<Self, ConfigError> {
        if let Ok(port) = std::env::var(PORT_ENV) {
            self.port = port.trim().parse().map_err(|_| ConfigError::Invalid(format!("{PORT_ENV}={port:?} is not a port")))?;
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.batching.max_batch == 0 {
            return Err(ConfigError::Invalid("batching.max_batch must be at least 1".into()));
        }
        if self.batching.max_in_flight == 0 {
            return Err(ConfigError::Invalid("batching.max_in_flight must be at least 1".into()));
        }
        if self.batching.queue_cap == 0 {
            return Err(ConfigError::Invalid("batching.queue_cap must be at least 1".into()));
        }
        if let Some(limit) = self.rate_limit {
            if !(limit.per_second > 0.0) || limit.burst == 0 {
                return Err(ConfigError::Invalid("rate_limit needs per_second > 0 and burst ≥ 1".into()));
            }
        }
        self.registry().map(|_| ())
    }

    pub fn registry(&self) -> Result<BackendRegistry, ConfigError> {
        let mut registry = BackendRegistry::new(self.pivot.clone());
        for route in &self.routes {
            registry.register(route.src.clone(), route.tgt.clone(), route.backend.clone())?;
        }
        Ok(registry)
    }

    pub fn socket_addr(&self) -> Result<SocketAddr, ConfigError> {
        format!("{}:{}", self.bind, self.port)
            .parse()
            .map_err(|_| ConfigError::Invalid(format!("bad bind address {}:{}", self.bind, self.port)))
    }
}
