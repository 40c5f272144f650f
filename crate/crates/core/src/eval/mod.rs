//! BLEU and chrF scoring, annotated test sets, and reports stratified by
//! domain, user type or topic.

mod manifest;
mod metrics;
mod report;
mod tokenize;

pub use manifest::{
    load_manifest, parse_hypotheses, parse_manifest, AnnotatedSegment, Domain, Topic, UserType, MANIFEST_HEADER,
};
pub use metrics::{
    bleu, chrf, BleuComponents, ChrfComponents, Components, Metric, MetricScore, BLEU_ORDER, CHRF_BETA, CHRF_ORDER,
};
pub use report::{stratified_report, GroupBy, Report, ReportRow, COMET_UNSUPPORTED};
pub use tokenize::{tokenize_13a, Tokenizer};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("{hypotheses} hypotheses for {references} references")]
    LengthMismatch { hypotheses: usize, references: usize },
    #[error("all references are empty")]
    EmptyReferences,
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error("hypothesis ids do not match the test set: {0}")]
    IdMismatch(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}
