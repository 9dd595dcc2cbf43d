//! Classification: map a feature vector to a ranked set of subject IDs.
//!
//! Distance classifiers compare the vector against per-subject mean
//! clusters; the neural network maps it to a binary subject code; the
//! random classifier is the baseline every other method must beat.

pub mod nn;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::math::{self, MathError};

pub use nn::NeuralNet;

/// Default Minkowski factor.
pub const DEFAULT_MINKOWSKI_R: f64 = 6.0;
/// Default diff-distance error threshold.
pub const DEFAULT_DIFF_ERROR: f64 = 0.0001;
/// Default diff-distance penalty.
pub const DEFAULT_DIFF_PENALTY: f64 = 1.0;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("vector length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("cluster for subject {subject} has length {got}, expected {want}")]
    ClusterLengthMismatch {
        subject: u32,
        got: usize,
        want: usize,
    },
    #[error("no clusters to classify against")]
    EmptyClusterMap,
    #[error("no subject ids to pick from")]
    EmptySubjectList,
    #[error("Minkowski factor {0} must be >= 1")]
    InvalidMinkowskiFactor(f64),
    #[error("diff-distance error threshold {0} must be positive")]
    InvalidDiffThreshold(f64),
    #[error("cosine similarity is undefined for a zero vector")]
    ZeroVector,
    #[error("covariance matrix: {0}")]
    Covariance(#[from] MathError),
    #[error("network input size {want} does not match vector length {got}")]
    InputSizeMismatch { want: usize, got: usize },
    #[error("subject {id} does not fit in {bits} output bits")]
    UnencodableSubject { id: u32, bits: usize },
    #[error("network needs at least two layers")]
    TooFewLayers,
}

/// One classification outcome: a subject and its score (a distance, or
/// a negated similarity; smaller is better).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Match {
    pub subject_id: u32,
    pub score: f64,
}

/// Classification outcomes sorted ascending by score; ties go to the
/// smaller subject id.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultSet {
    results: Vec<Match>,
}

impl ResultSet {
    pub fn new(mut results: Vec<Match>) -> Self {
        results.sort_by(|a, b| {
            a.score
                .total_cmp(&b.score)
                .then(a.subject_id.cmp(&b.subject_id))
        });
        ResultSet { results }
    }

    /// The winning subject.
    pub fn identified(&self) -> Option<&Match> {
        self.results.first()
    }

    /// The runner-up, when at least two outcomes exist.
    pub fn second_closest(&self) -> Option<&Match> {
        self.results.get(1)
    }

    pub fn results(&self) -> &[Match] {
        &self.results
    }

    pub fn len(&self) -> usize {
        self.results.len()
    }

    pub fn is_empty(&self) -> bool {
        self.results.is_empty()
    }
}

fn check_lengths(x: &[f64], y: &[f64]) -> Result<(), ClassifyError> {
    if x.len() != y.len() {
        return Err(ClassifyError::LengthMismatch(x.len(), y.len()));
    }
    Ok(())
}

/// Sum of absolute coordinate differences. The name follows the
/// framework's CLI vocabulary; the formula is the city-block (L1)
/// distance.
pub fn chebyshev_distance(x: &[f64], y: &[f64]) -> Result<f64, ClassifyError> {
    check_lengths(x, y)?;
    Ok(x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum())
}

/// Square root of the sum of squared coordinate differences.
pub fn euclidean_distance(x: &[f64], y: &[f64]) -> Result<f64, ClassifyError> {
    check_lengths(x, y)?;
    Ok(x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

/// `(sum |x_k - y_k|^r)^(1/r)`; `r = 1` reduces to the city-block sum,
/// `r = 2` to the Euclidean distance.
pub fn minkowski_distance(x: &[f64], y: &[f64], r: f64) -> Result<f64, ClassifyError> {
    check_lengths(x, y)?;
    if r.is_nan() || r < 1.0 {
        return Err(ClassifyError::InvalidMinkowskiFactor(r));
    }
    let sum: f64 = x.iter().zip(y).map(|(a, b)| (a - b).abs().powf(r)).sum();
    Ok(sum.powf(1.0 / r))
}

/// `sqrt((x - y) C^-1 (x - y)^T)`. The framework trains with the
/// identity covariance, which reduces this to the Euclidean distance;
/// a general symmetric positive-definite `C` is accepted here.
pub fn mahalanobis_distance(
    x: &[f64],
    y: &[f64],
    covariance: &[Vec<f64>],
) -> Result<f64, ClassifyError> {
    check_lengths(x, y)?;
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let solved = math::solve_linear_system(covariance, &diff)?;
    let quad: f64 = diff.iter().zip(&solved).map(|(d, s)| d * s).sum();
    Ok(quad.max(0.0).sqrt())
}

/// Per element: `|x_i - y_i| + p` when the difference exceeds `e`,
/// otherwise a bonus of `-e`; summed. May be negative by design.
pub fn diff_distance(x: &[f64], y: &[f64], e: f64, p: f64) -> Result<f64, ClassifyError> {
    check_lengths(x, y)?;
    if e.is_nan() || e <= 0.0 {
        return Err(ClassifyError::InvalidDiffThreshold(e));
    }
    Ok(x.iter()
        .zip(y)
        .map(|(a, b)| {
            let d = (a - b).abs();
            if d > e {
                d + p
            } else {
                -e
            }
        })
        .sum())
}

/// Count of positions whose values differ exactly (strict comparison).
pub fn hamming_distance(x: &[f64], y: &[f64]) -> Result<f64, ClassifyError> {
    check_lengths(x, y)?;
    Ok(x.iter().zip(y).filter(|(a, b)| a != b).count() as f64)
}

/// `(x . y) / (|x| |y|)`; the classifier ranks by `1 - similarity`.
pub fn cosine_similarity(x: &[f64], y: &[f64]) -> Result<f64, ClassifyError> {
    check_lengths(x, y)?;
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let nx: f64 = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    let ny: f64 = y.iter().map(|a| a * a).sum::<f64>().sqrt();
    if nx == 0.0 || ny == 0.0 {
        return Err(ClassifyError::ZeroVector);
    }
    Ok(dot / (nx * ny))
}

/// The distance metric used by [`classify_distance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    Chebyshev,
    Euclidean,
    Minkowski { r: f64 },
    /// Identity covariance, as trained by this release.
    Mahalanobis,
    Diff { error: f64, penalty: f64 },
    Hamming,
    /// Ranked by `1 - cosine similarity` so that smaller stays better.
    Cosine,
}

impl Metric {
    pub fn score(&self, x: &[f64], y: &[f64]) -> Result<f64, ClassifyError> {
        match *self {
            Metric::Chebyshev => chebyshev_distance(x, y),
            Metric::Euclidean => euclidean_distance(x, y),
            Metric::Minkowski { r } => minkowski_distance(x, y, r),
            // With C = I the quadratic form collapses to the squared
            // Euclidean distance.
            Metric::Mahalanobis => euclidean_distance(x, y),
            Metric::Diff { error, penalty } => diff_distance(x, y, error, penalty),
            Metric::Hamming => hamming_distance(x, y),
            Metric::Cosine => Ok(1.0 - cosine_similarity(x, y)?),
        }
    }
}

/// Scores the vector against every cluster mean and ranks ascending.
pub fn classify_distance(
    v: &[f64],
    clusters: &BTreeMap<u32, Vec<f64>>,
    metric: Metric,
) -> Result<ResultSet, ClassifyError> {
    if clusters.is_empty() {
        return Err(ClassifyError::EmptyClusterMap);
    }
    let mut results = Vec::with_capacity(clusters.len());
    for (&subject, mean) in clusters {
        if mean.len() != v.len() {
            return Err(ClassifyError::ClusterLengthMismatch {
                subject,
                got: mean.len(),
                want: v.len(),
            });
        }
        results.push(Match {
            subject_id: subject,
            score: metric.score(v, mean)?,
        });
    }
    Ok(ResultSet::new(results))
}

/// Uniform pick from the trained ids; the second guess is a different
/// uniform pick. Deterministic for a fixed seed.
pub fn classify_random(ids: &[u32], seed: u64) -> Result<ResultSet, ClassifyError> {
    if ids.is_empty() {
        return Err(ClassifyError::EmptySubjectList);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = ids[rng.random_range(0..ids.len())];
    let mut results = vec![Match {
        subject_id: first,
        score: 0.0,
    }];
    let rest: Vec<u32> = ids.iter().copied().filter(|&id| id != first).collect();
    if !rest.is_empty() {
        results.push(Match {
            subject_id: rest[rng.random_range(0..rest.len())],
            score: 1.0,
        });
    }
    Ok(ResultSet::new(results))
}
