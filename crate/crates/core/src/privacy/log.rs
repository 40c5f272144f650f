use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Mutex, RwLock};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::detect::{PiiSpan, Pseudonymizer};
use crate::lang::Lang;
use crate::usage::{aggregate_stats, DateRange, StatsReport, UsageRecord};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsentState {
    pub client_id: String,
    pub consent: bool,
    pub updated_at: DateTime<Utc>,
}

/// Per-client consent; an update older than the stored one is ignored.
#[derive(Debug, Default)]
pub struct ConsentStore {
    states: RwLock<HashMap<String, ConsentState>>,
}

impl ConsentStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Applies `state` unless a newer one is stored; returns the state in
    /// effect afterwards.
    pub fn update(&self, state: ConsentState) -> ConsentState {
        let mut states = self.states.write().unwrap_or_else(|e| e.into_inner());
        match states.get(&state.client_id) {
            Some(current) if current.updated_at > state.updated_at => current.clone(),
            _ => {
                states.insert(state.client_id.clone(), state.clone());
                state
            }
        }
    }

    pub fn get(&self, client_id: &str) -> Option<ConsentState> {
        self.states.read().unwrap_or_else(|e| e.into_inner()).get(client_id).cloned()
    }
}

/// One line of the usage log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogEntry {
    #[serde(flatten)]
    pub record: UsageRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub client_id: Option<String>,
    /// Pseudonymized input texts.
    #[serde(default)]
    pub texts: Vec<String>,
    /// Replaced spans, one list per text.
    #[serde(default)]
    pub spans: Vec<Vec<PiiSpan>>,
}

/// What the gateway knows about a served request.
#[derive(Debug, Clone)]
pub struct RequestInfo {
    pub timestamp: DateTime<Utc>,
    pub src: Lang,
    pub tgt: Lang,
    pub texts: Vec<String>,
    pub segments: u64,
    pub client_id: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogOutcome {
    /// No consent; nothing was written.
    Dropped,
    Logged,
    /// Consent was given but the write failed; counted, not propagated.
    Failed,
}

#[derive(Debug, Default)]
struct Writer {
    file: Option<File>,
    last: Option<DateTime<Utc>>,
}

/// Append-only JSON-lines usage log with a single writer.
///
/// Appends, deletions and reads all take the same lock, so a deletion issued
/// after an append has returned always sees that append.
#[derive(Debug)]
pub struct UsageLog {
    path: PathBuf,
    writer: Mutex<Writer>,
    pseudonymizer: &'static Pseudonymizer,
    seed: u64,
    sequence: AtomicU64,
    logging_errors: AtomicU64,
    dropped: AtomicU64,
}

impl UsageLog {
    /// The file is opened on first write, so a bad path shows up as logging
    /// errors rather than preventing startup.
    pub fn new(path: impl Into<PathBuf>, seed: u64) -> Self {
        UsageLog {
            path: path.into(),
            writer: Mutex::new(Writer::default()),
            pseudonymizer: Pseudonymizer::shipped(),
            seed,
            sequence: AtomicU64::new(0),
            logging_errors: AtomicU64::new(0),
            dropped: AtomicU64::new(0),
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn logging_errors(&self) -> u64 {
        self.logging_errors.load(Ordering::Relaxed)
    }

    /// Requests served without consent, kept only in memory.
    pub fn dropped(&self) -> u64 {
        self.dropped.load(Ordering::Relaxed)
    }

    pub fn record_or_drop(&self, request: &RequestInfo, consent: bool) -> LogOutcome {
        if !consent {
            self.dropped.fetch_add(1, Ordering::Relaxed);
            return LogOutcome::Dropped;
        }
        let seed = self.seed.wrapping_add(self.sequence.fetch_add(1, Ordering::Relaxed));
        let (texts, spans) = request
            .texts
            .iter()
            .map(|t| self.pseudonymizer.pseudonymize(t, &request.src, seed))
            .unzip();
        let mut record =
            UsageRecord::for_texts(request.timestamp, request.src.clone(), request.tgt.clone(), &request.texts, request.segments);
        record.consent = true;
        let entry = LogEntry { record, client_id: request.client_id.clone(), texts, spans };
        match self.append(entry) {
            Ok(()) => LogOutcome::Logged,
            Err(_) => {
                self.logging_errors.fetch_add(1, Ordering::Relaxed);
                LogOutcome::Failed
            }
        }
    }

    /// Appends one entry. Timestamps are clamped so they never go backwards
    /// within this writer.
    pub fn append(&self, mut entry: LogEntry) -> io::Result<()> {
        let mut writer = self.lock();
        if let Some(last) = writer.last {
            if entry.record.timestamp < last {
                entry.record.timestamp = last;
            }
        }
        let mut line = serde_json::to_vec(&entry).map_err(io::Error::other)?;
        line.push(b'\n');
        if writer.file.is_none() {
            writer.file = Some(self.open()?);
        }
        let file = writer.file.as_mut().expect("opened above");
        let written = file.write_all(&line).and_then(|()| file.flush());
        if written.is_err() {
            // reopen next time rather than keep a handle in an unknown state
            writer.file = None;
        } else {
            writer.last = Some(entry.record.timestamp);
        }
        written
    }

    /// Removes every entry of `client_id` and returns how many were removed.
    pub fn delete_client_data(&self, client_id: &str) -> io::Result<usize> {
        let mut writer = self.lock();
        let content = match fs::read_to_string(&self.path) {
            Ok(c) => c,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(e),
        };
        let mut kept = String::with_capacity(content.len());
        let mut purged = 0;
        for line in content.lines() {
            let owner = serde_json::from_str::<LogEntry>(line).ok().and_then(|e| e.client_id);
            if owner.as_deref() == Some(client_id) {
                purged += 1;
            } else {
                kept.push_str(line);
                kept.push('\n');
            }
        }
        if purged == 0 {
            return Ok(0);
        }
        let tmp = self.path.with_extension("tmp");
        {
            let mut out = File::create(&tmp)?;
            out.write_all(kept.as_bytes())?;
            out.sync_all()?;
        }
        fs::rename(&tmp, &self.path)?;
        writer.file = None;
        Ok(purged)
    }

    pub fn entries(&self) -> io::Result<Vec<LogEntry>> {
        let _writer = self.lock();
        let file = match File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e),
        };
        let mut entries = Vec::new();
        for line in BufReader::new(file).lines() {
            if let Ok(entry) = serde_json::from_str(&line?) {
                entries.push(entry);
            }
        }
        Ok(entries)
    }

    pub fn stats(&self, range: DateRange) -> io::Result<StatsReport> {
        let content = {
            let _writer = self.lock();
            match fs::read(&self.path) {
                Ok(c) => c,
                Err(e) if e.kind() == io::ErrorKind::NotFound => Vec::new(),
                Err(e) => return Err(e),
            }
        };
        Ok(aggregate_stats(io::Cursor::new(content), range))
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Writer> {
        self.writer.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn open(&self) -> io::Result<File> {
        if let Some(parent) = self.path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent)?;
        }
        OpenOptions::new().create(true).append(true).open(&self.path)
    }
}
