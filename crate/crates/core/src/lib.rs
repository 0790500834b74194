//! Mining player strengths and weaknesses from cricket ball-by-ball text
//! commentary.
//!
//! The pipeline: ingest a JSONL commentary corpus, select a player's
//! deliveries with a filter tuple, tokenize the text and map n-grams to
//! domain features, accumulate a 19x12 confrontation matrix, decompose it
//! with correspondence analysis, and read strength/weakness rules off the
//! inner products of row and column coordinates. Companion modules embed
//! per-player rule vectors with exact t-SNE, validate rule stability with
//! Procrustes superimposition over a temporal holdout, and render biplots
//! and similarity maps as SVG.

pub mod ca;
pub mod confrontation;
pub mod corpus;
mod exec;
pub mod lexicon;
pub mod report;
pub mod rules;
pub mod similarity;
pub mod validation;

pub use exec::Execution;
