//! Parallel corpus preparation: ingestion, rule-based filtering, block
//! scheduling of authentic and synthetic data, and back-translation.

mod backtranslate;
mod blocks;
mod filter;
mod ingest;

use serde::{Deserialize, Serialize};

pub use backtranslate::{
    backtranslate_round, backtranslation_route, iterate, pool_translator, Interrupted, IterationConfig, NoTraining,
    RoundSummary, TrainingHook,
};
pub use blocks::{plan_blocks, Block, BlockPlan, BlockSource, Ratio};
pub use filter::{
    filter_corpus, filter_pair, FilterReport, FilterVerdict, PatternAction, PatternRuleConfig, RuleSet, RulesConfig,
    COPY_DETECTION, DEFAULT_RULES, ENTITY_PATTERN, LENGTH_RATIO, NUMBER_CONSISTENCY, SCRIPT_CONSISTENCY,
};
pub use ingest::{ingest_aligned, ingest_tsv, parse_aligned, parse_tsv, write_tsv, IngestFormat, Ingested};

use crate::backends::BackendError;
use crate::textproc::normalize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelPair {
    pub src: String,
    pub tgt: String,
    /// Corpus name.
    pub origin: String,
    /// `false` for synthetic (back-translated) pairs.
    pub authentic: bool,
}

impl ParallelPair {
    /// Normalizes both sides; `None` if either is empty afterwards.
    pub fn new(src: &str, tgt: &str, origin: &str, authentic: bool) -> Option<Self> {
        let (src, tgt) = (normalize(src), normalize(tgt));
        if src.is_empty() || tgt.is_empty() {
            return None;
        }
        Some(ParallelPair { src, tgt, origin: origin.to_string(), authentic })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("line count mismatch: {src} source lines, {tgt} target lines")]
    LineCountMismatch { src: usize, tgt: usize },
    #[error("invalid block plan: {0}")]
    InvalidPlan(String),
    #[error("invalid filter rules: {0}")]
    Rules(String),
    #[error("backend failed at sentence {cursor}: {error}")]
    Backend { cursor: usize, error: BackendError },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
