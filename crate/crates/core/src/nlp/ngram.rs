//! Character n-gram models with smoothing estimators and the
//! max-probability language identifier.
//!
//! The Add-Delta family covers MLE (delta = 0), ELE (0.5), and Add-One
//! (1) as special cases of `P = (C + delta) / (N + delta * V)`.
//! Witten-Bell and Good-Turing follow their standard forms; the
//! Good-Turing estimator replaces any zero factor by 1, which keeps it
//! total on degenerate count tables at the price of crude estimates.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use super::tokenize::{tokenize_chars, TokenizerOptions};
use crate::storage::{ContainerReader, ContainerWriter, StorageError};

const KIND: &[u8; 4] = b"NGRM";

/// Probability floor standing in for zero in log-space sums.
pub const LOG_FLOOR: f64 = 1e-300;

#[derive(Debug, Error)]
pub enum NlpError {
    #[error("n-gram order {0} must be 1, 2, or 3")]
    InvalidOrder(usize),
    #[error("MLE is undefined for an unseen context (N = 0)")]
    UndefinedMle,
    #[error("untrained model: empty vocabulary")]
    EmptyVocabulary,
    #[error("context {0:?} has no observations")]
    UntrainedContext(String),
    #[error("empty token stream")]
    EmptyTokenStream,
    #[error("no trained models supplied")]
    NoModels,
    #[error("models disagree on n-gram order: {0} vs {1}")]
    MixedOrders(usize, usize),
    #[error(transparent)]
    Storage(#[from] StorageError),
}

/// Smoothing estimator selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimator {
    Mle,
    AddOne,
    /// ELE when delta = 0.5.
    AddDelta(f64),
    WittenBell,
    GoodTuring,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
struct ContextCounts {
    by_char: BTreeMap<char, u64>,
    total: u64,
}

impl ContextCounts {
    /// Count-of-counts table: how many characters occur exactly c times.
    fn count_of_counts(&self) -> BTreeMap<u64, u64> {
        let mut table = BTreeMap::new();
        for &c in self.by_char.values() {
            *table.entry(c).or_insert(0) += 1;
        }
        table
    }
}

/// A trained character n-gram model for one language.
#[derive(Debug, Clone, PartialEq)]
pub struct NGramModel {
    n: usize,
    tag: String,
    contexts: BTreeMap<String, ContextCounts>,
    vocabulary: BTreeSet<char>,
}

impl NGramModel {
    pub fn new(n: usize, tag: impl Into<String>) -> Result<Self, NlpError> {
        if !(1..=3).contains(&n) {
            return Err(NlpError::InvalidOrder(n));
        }
        Ok(NGramModel {
            n,
            tag: tag.into(),
            contexts: BTreeMap::new(),
            vocabulary: BTreeSet::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tag(&self) -> &str {
        self.tag
            .as_str()
    }

    /// Distinct characters observed anywhere in the training stream.
    pub fn vocab_size(&self) -> usize {
        self.vocabulary.len()
    }

    /// Slides an n-wide window over the tokenized text, incrementing
    /// `counts[context][char]`. Text shorter than n contributes only
    /// vocabulary.
    pub fn train(&mut self, text: &str, opts: &TokenizerOptions) {
        let tokens = tokenize_chars(text, opts);
        self.vocabulary.extend(tokens.iter().copied());
        if tokens.len() < self.n {
            return;
        }
        for window in tokens.windows(self.n) {
            let context: String = window[..self.n - 1].iter().collect();
            let last = window[self.n - 1];
            let entry = self.contexts.entry(context).or_default();
            *entry.by_char.entry(last).or_insert(0) += 1;
            entry.total += 1;
        }
    }

    pub fn count(&self, context: &str, c: char) -> u64 {
        self.contexts
            .get(context)
            .and_then(|ctx| ctx.by_char.get(&c).copied())
            .unwrap_or(0)
    }

    /// Total observations in a context (the estimator's N).
    pub fn context_total(&self, context: &str) -> u64 {
        self.contexts.get(context).map_or(0, |ctx| ctx.total)
    }

    /// Distinct characters observed in a context (Witten-Bell's T).
    pub fn distinct_in_context(&self, context: &str) -> usize {
        self.contexts.get(context).map_or(0, |ctx| ctx.by_char.len())
    }

    /// `(C + delta) / (N + delta * V)`.
    pub fn prob_add_delta(&self, context: &str, c: char, delta: f64) -> Result<f64, NlpError> {
        let count = self.count(context, c) as f64;
        let total = self.context_total(context) as f64;
        let vocab = self.vocab_size() as f64;
        if delta == 0.0 && total == 0.0 {
            return Err(NlpError::UndefinedMle);
        }
        Ok((count + delta) / (total + delta * vocab))
    }

    /// Seen events get `C / (N + T)`; the unseen mass `T / (N + T)` is
    /// split over the `Z = V - T` unseen characters (Z of 0 counts
    /// as 1). When the context has seen the whole vocabulary there is
    /// nothing to reserve mass for, so seen events keep `C / N` and the
    /// per-context distribution stays a partition.
    pub fn prob_witten_bell(&self, context: &str, c: char) -> Result<f64, NlpError> {
        if self.vocabulary.is_empty() {
            return Err(NlpError::EmptyVocabulary);
        }
        let seen_kinds = self.distinct_in_context(context) as f64;
        if seen_kinds == 0.0 {
            return Err(NlpError::UntrainedContext(context.to_string()));
        }
        let total = self.context_total(context) as f64;
        let count = self.count(context, c) as f64;
        let unseen_kinds = self.vocab_size() as f64 - seen_kinds;
        if count > 0.0 {
            if unseen_kinds == 0.0 {
                Ok(count / total)
            } else {
                Ok(count / (total + seen_kinds))
            }
        } else {
            Ok(seen_kinds / (unseen_kinds.max(1.0) * (total + seen_kinds)))
        }
    }

    /// Adjusted count `c* = (c+1) * N_{c+1} / N_c`, probability
    /// `c* / N`. Every zero factor is replaced by 1, so the estimator
    /// is total: no division by zero, no NaN.
    pub fn prob_good_turing(&self, context: &str, c: char) -> f64 {
        let table = self
            .contexts
            .get(context)
            .map(ContextCounts::count_of_counts)
            .unwrap_or_default();
        let count = self.count(context, c);
        let n_c = table.get(&count).copied().unwrap_or(0).max(1) as f64;
        let n_next = table.get(&(count + 1)).copied().unwrap_or(0).max(1) as f64;
        let adjusted = (count + 1) as f64 * n_next / n_c;
        let total = self.context_total(context).max(1) as f64;
        adjusted / total
    }

    fn prob(&self, estimator: Estimator, context: &str, c: char) -> Result<f64, NlpError> {
        match estimator {
            Estimator::Mle => self.prob_add_delta(context, c, 0.0),
            Estimator::AddOne => self.prob_add_delta(context, c, 1.0),
            Estimator::AddDelta(delta) => self.prob_add_delta(context, c, delta),
            Estimator::WittenBell => self.prob_witten_bell(context, c),
            Estimator::GoodTuring => Ok(self.prob_good_turing(context, c)),
        }
    }

    /// Sum of log probabilities of every n-gram in the token stream.
    /// Zero or undefined probabilities contribute `ln(LOG_FLOOR)`.
    pub fn log_prob(&self, tokens: &[char], estimator: Estimator) -> f64 {
        let mut sum = 0.0;
        if tokens.len() < self.n {
            return sum;
        }
        for window in tokens.windows(self.n) {
            let context: String = window[..self.n - 1].iter().collect();
            let p = match self.prob(estimator, &context, window[self.n - 1]) {
                Ok(p) if p > 0.0 => p,
                _ => LOG_FLOOR,
            };
            sum += p.ln();
        }
        sum
    }

    pub fn dump(&self, path: impl AsRef<Path>) -> Result<(), NlpError> {
        let file = BufWriter::new(File::create(path).map_err(StorageError::from)?);
        let mut w = ContainerWriter::new(file, KIND)?;
        w.write_u64(self.n as u64)?;
        w.write_string(&self.tag)?;
        w.write_u64(self.vocabulary.len() as u64)?;
        for &c in &self.vocabulary {
            w.write_u32(c as u32)?;
        }
        w.write_u64(self.contexts.len() as u64)?;
        for (context, counts) in &self.contexts {
            w.write_string(context)?;
            w.write_u64(counts.by_char.len() as u64)?;
            for (&c, &count) in &counts.by_char {
                w.write_u32(c as u32)?;
                w.write_u64(count)?;
            }
        }
        w.finish()?.flush().map_err(StorageError::from)?;
        Ok(())
    }

    pub fn restore(path: impl AsRef<Path>) -> Result<Self, NlpError> {
        let file = BufReader::new(File::open(path).map_err(StorageError::from)?);
        let mut r = ContainerReader::new(file, KIND)?;
        let n = r.read_u64()? as usize;
        let tag = r.read_string()?;
        let mut model = NGramModel::new(n, tag)?;
        let vocab_len = r.read_u64()?;
        for _ in 0..vocab_len {
            model.vocabulary.insert(decode_char(r.read_u32()?)?);
        }
        let ctx_len = r.read_u64()?;
        for _ in 0..ctx_len {
            let context = r.read_string()?;
            let pairs = r.read_u64()?;
            let mut counts = ContextCounts::default();
            for _ in 0..pairs {
                let c = decode_char(r.read_u32()?)?;
                let count = r.read_u64()?;
                counts.total += count;
                counts.by_char.insert(c, count);
            }
            model.contexts.insert(context, counts);
        }
        Ok(model)
    }
}

fn decode_char(raw: u32) -> Result<char, NlpError> {
    char::from_u32(raw)
        .ok_or_else(|| NlpError::Storage(StorageError::Corrupt(format!("bad char {raw}"))))
}

/// Ranks the models by summed log probability of the tokenized text,
/// descending; ties keep the models' declaration order.
pub fn identify_language(
    models: &[NGramModel],
    text: &str,
    opts: &TokenizerOptions,
    estimator: Estimator,
) -> Result<Vec<(String, f64)>, NlpError> {
    if models.is_empty() {
        return Err(NlpError::NoModels);
    }
    let n = models[0].n;
    if let Some(m) = models.iter().find(|m| m.n != n) {
        return Err(NlpError::MixedOrders(n, m.n));
    }
    let tokens = tokenize_chars(text, opts);
    if tokens.is_empty() {
        return Err(NlpError::EmptyTokenStream);
    }
    let mut scored: Vec<(String, f64)> = models
        .iter()
        .map(|m| (m.tag.clone(), m.log_prob(&tokens, estimator)))
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1));
    Ok(scored)
}
