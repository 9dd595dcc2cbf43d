//! Pattern-recognition pipeline for audio samples and text corpora.
//!
//! The crate is organized around a classic recognition pipeline:
//! sample loading ([`audio`]), preprocessing ([`preprocess`]), feature
//! extraction ([`features`]), and classification ([`classify`]), with
//! persistent training sets and run statistics ([`storage`]) and an
//! orchestration layer ([`pipeline`]).
//!
//! Two text-processing subsystems share the storage layer: character
//! n-gram language models with smoothing estimators and a Zipf-law
//! corpus analyzer ([`nlp`]), and a probabilistic CYK parser over
//! CNF grammars ([`parsing`]).

pub mod audio;
pub mod classify;
pub mod features;
pub mod math;
pub mod nlp;
pub mod parsing;
pub mod pipeline;
pub mod preprocess;
pub mod storage;

pub use audio::{AudioFormat, Sample};
pub use classify::{Match, ResultSet};
pub use features::{FeatureConfig, FeatureVector};
pub use pipeline::PipelineConfig;
