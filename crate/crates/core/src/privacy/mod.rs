//! Opt-in usage logging: PII detection and pseudonymization, per-client
//! consent, and the JSON-lines log with delete-by-client.

mod detect;
mod log;

pub use detect::{parse_list, pseudonymize, Gazetteer, NamePool, PiiKind, PiiSpan, Pseudonymizer, ResidualToken};
pub use log::{ConsentState, ConsentStore, LogEntry, LogOutcome, RequestInfo, UsageLog};
