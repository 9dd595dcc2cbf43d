//! Text processing: character n-gram language models with smoothing,
//! a max-probability language identifier, and Zipf's-law corpus
//! statistics.

mod ngram;
mod tokenize;
mod zipf;

pub use ngram::{identify_language, Estimator, NGramModel, NlpError, LOG_FLOOR};
pub use tokenize::{tokenize_chars, tokenize_words, TokenizerMode, TokenizerOptions};
pub use zipf::{zipf_analyze, WordStats, ZipfAnalysis};
