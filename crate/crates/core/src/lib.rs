//! Core building blocks of the prekladac Czech–Ukrainian translation service.
//!
//! Everything that does not need an HTTP server lives here: inbound text
//! processing, script transliteration, the translation backend contract with
//! its dictionary and remote implementations, privacy-preserving usage
//! logging, corpus preparation and the BLEU/chrF scorers.

pub mod backends;
pub mod corpus;
pub mod eval;
pub mod lang;
pub mod privacy;
pub mod textproc;
pub mod translit;
pub mod usage;

pub use lang::Lang;
pub use textproc::{Script, Segment};
