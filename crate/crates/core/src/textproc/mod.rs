//! Inbound text handling: script detection, normalization and sentence
//! segmentation.
//!
//! All functions here are pure and can be called from any thread.

mod normalize;
pub(crate) mod script;
mod segment;

pub use normalize::normalize;
pub use script::{detect_script, Script};
pub use segment::{segment_sentences, AbbreviationList, Segment, Segmenter};
