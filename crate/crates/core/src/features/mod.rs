//! Feature extraction: a preprocessed sample becomes a fixed-length
//! real vector.
//!
//! Five extractors are provided: averaged FFT magnitudes, averaged LPC
//! coefficients, min/max amplitudes, concatenating aggregation, and a
//! random baseline.

pub mod fft;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::audio::Sample;
use fft::FftError;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("empty sample")]
    EmptySample,
    #[error("sample has {got} points but one analysis window needs {need}")]
    SampleTooShort { need: usize, got: usize },
    #[error("zero-energy window: autocorrelation R(0) is 0")]
    ZeroEnergy,
    #[error("prediction residual reached 0 at order {0}")]
    DegenerateResidual(usize),
    #[error("lag {lag} out of range for window of {len}")]
    LagOutOfRange { lag: usize, len: usize },
    #[error("LPC order {order} must be positive and below the window length {window}")]
    InvalidOrder { order: usize, window: usize },
    #[error("min/max extraction needs at least one requested extreme")]
    NoExtremesRequested,
    #[error("aggregate list is empty")]
    EmptyAggregate,
    #[error("aggregate extractors cannot nest")]
    NestedAggregate,
    #[error(transparent)]
    Fft(#[from] FftError),
}

/// The extractor families the pipeline can select.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtractorKind {
    Fft,
    Lpc,
    MinMax,
    Aggregate,
    Random,
}

impl ExtractorKind {
    pub fn token(&self) -> &'static str {
        match self {
            ExtractorKind::Fft => "fft",
            ExtractorKind::Lpc => "lpc",
            ExtractorKind::MinMax => "minmax",
            ExtractorKind::Aggregate => "aggr",
            ExtractorKind::Random => "randfe",
        }
    }
}

/// Extractor parameters with the framework defaults.
#[derive(Debug, Clone)]
pub struct FeatureConfig {
    /// FFT analysis window; must be a power of two.
    pub fft_window: usize,
    /// LPC order `p`.
    pub lpc_order: usize,
    /// LPC analysis window.
    pub lpc_window: usize,
    pub minmax_mins: usize,
    pub minmax_maxes: usize,
    /// Sub-extractors run by the aggregator, in output order.
    pub aggregate: Vec<ExtractorKind>,
    pub random_window: usize,
    /// Seed for the random extractor's Gaussian draws.
    pub seed: u64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            fft_window: 1024,
            lpc_order: 20,
            lpc_window: 128,
            minmax_mins: 50,
            minmax_maxes: 50,
            aggregate: vec![ExtractorKind::Fft, ExtractorKind::Lpc],
            random_window: 256,
            seed: 0,
        }
    }
}

/// A fixed-length feature vector tagged with its origin.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub extractor: ExtractorKind,
    /// Opaque token identifying the (extractor, parameters) pair.
    pub params_digest: String,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Runs the selected extractor.
pub fn extract(
    kind: ExtractorKind,
    sample: &Sample,
    cfg: &FeatureConfig,
) -> Result<FeatureVector, FeatureError> {
    match kind {
        ExtractorKind::Fft => extract_fft(sample, cfg),
        ExtractorKind::Lpc => extract_lpc(sample, cfg),
        ExtractorKind::MinMax => extract_minmax(sample, cfg.minmax_mins, cfg.minmax_maxes),
        ExtractorKind::Aggregate => extract_aggregate(sample, cfg),
        ExtractorKind::Random => extract_random(sample, cfg, cfg.seed),
    }
}

/// Hamming-windowed frames with 50% overlap, per-frame magnitude of the
/// first `window/2` bins, averaged over frames.
pub fn extract_fft(sample: &Sample, cfg: &FeatureConfig) -> Result<FeatureVector, FeatureError> {
    if sample.is_empty() {
        return Err(FeatureError::EmptySample);
    }
    let window = cfg.fft_window;
    if !window.is_power_of_two() || window < 2 {
        return Err(FftError::NonPowerOfTwo(window).into());
    }
    let half = window / 2;
    let taper = fft::hamming_window(window)?;

    let mut mean = vec![0.0; half];
    let mut frames = 0usize;
    for start in frame_starts(sample.len(), window) {
        let mut re = vec![0.0; window];
        let mut im = vec![0.0; window];
        for (i, v) in re.iter_mut().enumerate() {
            let idx = start + i;
            if idx < sample.len() {
                *v = sample.amplitudes[idx] * taper[i];
            }
        }
        fft::fft(&mut re, &mut im)?;
        for k in 0..half {
            mean[k] += (re[k] * re[k] + im[k] * im[k]).sqrt();
        }
        frames += 1;
    }
    for v in &mut mean {
        *v /= frames as f64;
    }
    Ok(FeatureVector {
        values: mean,
        extractor: ExtractorKind::Fft,
        params_digest: format!("fft-{window}"),
    })
}

/// Analysis frame offsets at half-window hops. A sample shorter than
/// one window yields a single zero-padded frame; otherwise the trailing
/// partial frame is dropped so the mean is not biased toward zero.
fn frame_starts(len: usize, window: usize) -> Vec<usize> {
    if len < window {
        return vec![0];
    }
    (0..=len - window).step_by(window / 2).collect()
}

/// `R(k) = sum_{m=k}^{n-1} x(m) * x(m-k)`.
pub fn autocorrelation(x: &[f64], lag: usize) -> Result<f64, FeatureError> {
    if lag >= x.len() {
        return Err(FeatureError::LagOutOfRange { lag, len: x.len() });
    }
    Ok((lag..x.len()).map(|m| x[m] * x[m - lag]).sum())
}

/// Levinson-Durbin recursion over the autocorrelation sequence of a
/// windowed frame. Returns the order-`p` predictor coefficients and the
/// final prediction-error energy.
pub fn lpc_coefficients(x: &[f64], order: usize) -> Result<(Vec<f64>, f64), FeatureError> {
    if order == 0 || order >= x.len() {
        return Err(FeatureError::InvalidOrder {
            order,
            window: x.len(),
        });
    }
    let r: Vec<f64> = (0..=order)
        .map(|k| autocorrelation(x, k))
        .collect::<Result<_, _>>()?;
    if r[0] == 0.0 {
        return Err(FeatureError::ZeroEnergy);
    }

    let mut a = vec![0.0; order + 1];
    let mut energy = r[0];
    for m in 1..=order {
        if energy == 0.0 {
            return Err(FeatureError::DegenerateResidual(m));
        }
        let mut acc = r[m];
        for k in 1..m {
            acc -= a[k] * r[m - k];
        }
        let reflection = acc / energy;

        let prev = a.clone();
        a[m] = reflection;
        for k in 1..m {
            a[k] = prev[k] - reflection * prev[m - k];
        }
        energy *= 1.0 - reflection * reflection;
    }
    Ok((a[1..].to_vec(), energy))
}

/// Hamming-windowed frames with 50% overlap, per-frame LPC, arithmetic
/// mean over frames.
pub fn extract_lpc(sample: &Sample, cfg: &FeatureConfig) -> Result<FeatureVector, FeatureError> {
    let window = cfg.lpc_window;
    if sample.len() < window {
        return Err(FeatureError::SampleTooShort {
            need: window,
            got: sample.len(),
        });
    }
    let taper = fft::hamming_window(window)?;
    let mut mean = vec![0.0; cfg.lpc_order];
    let mut frames = 0usize;
    let mut start = 0;
    while start + window <= sample.len() {
        let frame: Vec<f64> = (0..window)
            .map(|i| sample.amplitudes[start + i] * taper[i])
            .collect();
        let (coeffs, _) = lpc_coefficients(&frame, cfg.lpc_order)?;
        for (m, c) in mean.iter_mut().zip(&coeffs) {
            *m += c;
        }
        frames += 1;
        start += window / 2;
    }
    for v in &mut mean {
        *v /= frames as f64;
    }
    Ok(FeatureVector {
        values: mean,
        extractor: ExtractorKind::Lpc,
        params_digest: format!("lpc-{}-{}", cfg.lpc_order, window),
    })
}

/// The `n_mins` smallest and `x_maxes` largest amplitudes, each group
/// ascending. A sample shorter than the request is padded with the
/// middle element of the sorted amplitudes.
pub fn extract_minmax(
    sample: &Sample,
    n_mins: usize,
    x_maxes: usize,
) -> Result<FeatureVector, FeatureError> {
    if sample.is_empty() {
        return Err(FeatureError::EmptySample);
    }
    if n_mins + x_maxes == 0 {
        return Err(FeatureError::NoExtremesRequested);
    }
    let mut sorted = sample.amplitudes.clone();
    sorted.sort_by(f64::total_cmp);
    let len = sorted.len();
    let takes_min = n_mins.min(len);
    let takes_max = x_maxes.min(len);
    let fill = n_mins + x_maxes - takes_min - takes_max;
    let middle = sorted[len / 2];

    let mut values = Vec::with_capacity(n_mins + x_maxes);
    values.extend_from_slice(&sorted[..takes_min]);
    values.extend(std::iter::repeat_n(middle, fill));
    values.extend_from_slice(&sorted[len - takes_max..]);
    Ok(FeatureVector {
        values,
        extractor: ExtractorKind::MinMax,
        params_digest: format!("minmax-{n_mins}-{x_maxes}"),
    })
}

/// Runs each listed extractor on its own copy of the sample with
/// default settings and concatenates the results in list order.
pub fn extract_aggregate(
    sample: &Sample,
    cfg: &FeatureConfig,
) -> Result<FeatureVector, FeatureError> {
    if cfg.aggregate.is_empty() {
        return Err(FeatureError::EmptyAggregate);
    }
    let sub_cfg = FeatureConfig {
        seed: cfg.seed,
        ..FeatureConfig::default()
    };
    let mut values = Vec::new();
    for &kind in &cfg.aggregate {
        if kind == ExtractorKind::Aggregate {
            return Err(FeatureError::NestedAggregate);
        }
        values.extend(extract(kind, &sample.clone(), &sub_cfg)?.values);
    }
    Ok(FeatureVector {
        values,
        extractor: ExtractorKind::Aggregate,
        params_digest: format!(
            "aggr-{}",
            cfg.aggregate
                .iter()
                .map(|k| k.token())
                .collect::<Vec<_>>()
                .join("+")
        ),
    })
}

/// Baseline extractor: every `random_window`-wide chunk is scaled by a
/// single Gaussian draw and accumulated into a window-length vector.
/// Deterministic for a fixed seed.
pub fn extract_random(
    sample: &Sample,
    cfg: &FeatureConfig,
    seed: u64,
) -> Result<FeatureVector, FeatureError> {
    let window = cfg.random_window.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = vec![0.0; window];
    for chunk in sample.amplitudes.chunks(window) {
        let gain = gaussian(&mut rng);
        for (slot, &a) in values.iter_mut().zip(chunk) {
            *slot += a * gain;
        }
    }
    Ok(FeatureVector {
        values,
        extractor: ExtractorKind::Random,
        params_digest: format!("randfe-{window}"),
    })
}

/// Box-Muller standard normal draw.
fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
