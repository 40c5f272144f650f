//! HTTP front end: `POST /api/v2/translate` with per-pair batching,
//! language listing, usage statistics, consent and deletion endpoints.

mod api;
pub mod batcher;
pub mod config;
pub mod ratelimit;

use std::sync::Arc;

pub use api::{
    router, ApiError, ConsentUpdate, Gateway, GatewayError, LanguagePair, PairKind, TranslateRequest, TranslateResponse,
};
pub use batcher::{BatchMetrics, Batcher, SubmitError};
pub use config::{BatchConfig, ConfigError, GatewayConfig, LogConfig, RateLimitConfig, RouteConfig, PORT_ENV};
pub use ratelimit::{Clock, ManualClock, RateLimiter, SystemClock, TokenBucket};

/// Serves `gateway` on an already bound listener until ctrl-c.
pub async fn serve_on(listener: tokio::net::TcpListener, gateway: Arc<Gateway>) -> std::io::Result<()> {
    axum::serve(listener, router(gateway))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

/// Binds the configured address and serves until ctrl-c.
pub async fn serve(config: GatewayConfig) -> Result<(), GatewayError> {
    let addr = config.socket_addr()?;
    let gateway = Arc::new(Gateway::new(config)?);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    serve_on(listener, gateway).await?;
    Ok(())
}
