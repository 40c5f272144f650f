//! Per-pair request batching in front of a blocking backend.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use prekladac_core::backends::{BackendError, TranslationBackend};
use prekladac_core::Lang;
use serde::Serialize;
use tokio::sync::{mpsc, oneshot, Semaphore};
use tokio::time::{timeout_at, Instant};

use crate::config::BatchConfig;

#[derive(Debug, thiserror::Error)]
pub enum SubmitError {
    #[error("batch queue is full")]
    QueueFull { retry_after: Duration },
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("batcher stopped")]
    Closed,
}

struct Item {
    text: String,
    enqueued: Instant,
    reply: oneshot::Sender<Result<String, BackendError>>,
}

#[derive(Debug, Default)]
struct Counters {
    batches: AtomicU64,
    segments: AtomicU64,
    largest_batch: AtomicUsize,
    max_wait_us: AtomicU64,
    total_wait_us: AtomicU64,
    max_hold_us: AtomicU64,
}

/// Snapshot of a batcher's counters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchMetrics {
    pub src: Lang,
    pub tgt: Lang,
    pub backend: String,
    pub batches: u64,
    pub segments: u64,
    pub largest_batch: usize,
    /// Longest time any sentence spent queued before dispatch.
    pub max_wait_ms: f64,
    pub mean_wait_ms: f64,
    /// Longest time the collector kept a sentence back while a dispatch
    /// slot was free. This is the part bounded by `max_wait_ms` in the
    /// config; the rest of the wait is backlog behind busy slots.
    pub max_hold_ms: f64,
    pub queued: usize,
}

/// Handle to the batching task for one (src, tgt) leg. Cloning is cheap.
#[derive(Clone)]
pub struct Batcher {
    src: Lang,
    tgt: Lang,
    backend_id: String,
    queue: mpsc::Sender<Item>,
    config: BatchConfig,
    counters: Arc<Counters>,
}

impl Batcher {
    /// Starts the collector task; must be called inside a tokio runtime.
    pub fn spawn(src: Lang, tgt: Lang, backend_id: &str, backend: Arc<dyn TranslationBackend>, config: BatchConfig) -> Self {
        let (queue, rx) = mpsc::channel(config.queue_cap.max(1));
        let counters = Arc::new(Counters::default());
        tokio::spawn(collect(rx, src.clone(), tgt.clone(), backend, config, Arc::clone(&counters)));
        Batcher { src, tgt, backend_id: backend_id.to_string(), queue, config, counters }
    }

    /// Queues `texts` as one unit and returns their translations in order.
    /// Either every text is queued or none is.
    pub async fn submit(&self, texts: Vec<String>) -> Result<Vec<String>, SubmitError> {
        if texts.is_empty() {
            return Ok(Vec::new());
        }
        let permits = self.queue.try_reserve_many(texts.len()).map_err(|e| match e {
            mpsc::error::TrySendError::Closed(()) => SubmitError::Closed,
            mpsc::error::TrySendError::Full(()) => SubmitError::QueueFull { retry_after: self.retry_after() },
        })?;
        let enqueued = Instant::now();
        let mut replies = Vec::with_capacity(texts.len());
        for (permit, text) in permits.zip(texts) {
            let (reply, rx) = oneshot::channel();
            permit.send(Item { text, enqueued, reply });
            replies.push(rx);
        }
        let mut out = Vec::with_capacity(replies.len());
        for rx in replies {
            out.push(rx.await.map_err(|_| SubmitError::Closed)??);
        }
        Ok(out)
    }

    fn retry_after(&self) -> Duration {
        Duration::from_secs(1).max(self.config.max_wait())
    }

    pub fn metrics(&self) -> BatchMetrics {
        let c = &self.counters;
        let segments = c.segments.load(Ordering::Relaxed);
        let total_wait = c.total_wait_us.load(Ordering::Relaxed) as f64 / 1000.0;
        BatchMetrics {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            backend: self.backend_id.clone(),
            batches: c.batches.load(Ordering::Relaxed),
            segments,
            largest_batch: c.largest_batch.load(Ordering::Relaxed),
            max_wait_ms: c.max_wait_us.load(Ordering::Relaxed) as f64 / 1000.0,
            mean_wait_ms: if segments == 0 { 0.0 } else { total_wait / segments as f64 },
            max_hold_ms: c.max_hold_us.load(Ordering::Relaxed) as f64 / 1000.0,
            queued: self.queue.max_capacity() - self.queue.capacity(),
        }
    }
}

async fn collect(
    mut rx: mpsc::Receiver<Item>,
    src: Lang,
    tgt: Lang,
    backend: Arc<dyn TranslationBackend>,
    config: BatchConfig,
    counters: Arc<Counters>,
) {
    let max_batch = config.max_batch.max(1);
    let slots = Arc::new(Semaphore::new(config.max_in_flight.max(1)));
    loop {
        // while all slots are busy, sentences stay in the bounded queue
        let Ok(slot) = Arc::clone(&slots).acquire_owned().await else { return };
        let ready = Instant::now();
        let Some(first) = rx.recv().await else { return };
        // the oldest item sets the deadline; items already queued are taken
        // even when it has passed
        let deadline = first.enqueued + config.max_wait();
        let mut batch = vec![first];
        while batch.len() < max_batch {
            match timeout_at(deadline, rx.recv()).await {
                Ok(Some(item)) => batch.push(item),
                Ok(None) | Err(_) => break,
            }
        }
        let dispatched = Instant::now();
        record(&counters, &batch, ready, dispatched);
        let backend = Arc::clone(&backend);
        let (src, tgt) = (src.clone(), tgt.clone());
        tokio::task::spawn_blocking(move || {
            let _slot = slot;
            let (texts, replies): (Vec<String>, Vec<_>) = batch.into_iter().map(|i| (i.text, i.reply)).unzip();
            let result = backend.translate_batch(&src, &tgt, &texts).and_then(|out| {
                if out.len() == texts.len() {
                    Ok(out)
                } else {
                    Err(BackendError::Unavailable {
                        backend: format!("{src}→{tgt}"),
                        reason: format!("returned {} outputs for {} inputs", out.len(), texts.len()),
                        retry_after: None,
                    })
                }
            });
            match result {
                Ok(out) => {
                    for (reply, text) in replies.into_iter().zip(out) {
                        let _ = reply.send(Ok(text));
                    }
                }
                Err(err) => {
                    for reply in replies {
                        let _ = reply.send(Err(err.clone()));
                    }
                }
            }
        });
    }
}

fn record(counters: &Counters, batch: &[Item], ready: Instant, dispatched: Instant) {
    counters.batches.fetch_add(1, Ordering::Relaxed);
    counters.segments.fetch_add(batch.len() as u64, Ordering::Relaxed);
    counters.largest_batch.fetch_max(batch.len(), Ordering::Relaxed);
    for item in batch {
        let waited = dispatched.saturating_duration_since(item.enqueued).as_micros() as u64;
        counters.max_wait_us.fetch_max(waited, Ordering::Relaxed);
        counters.total_wait_us.fetch_add(waited, Ordering::Relaxed);
        let held = dispatched.saturating_duration_since(item.enqueued.max(ready)).as_micros() as u64;
        counters.max_hold_us.fetch_max(held, Ordering::Relaxed);
    }
}
