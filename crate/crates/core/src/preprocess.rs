//! Amplitude-domain and frequency-domain preprocessing.
//!
//! The frequency-domain filters share one overlap-add engine: the
//! sample is cut into half-overlapped windows, each window is tapered
//! by the square root of the Hamming window, transformed, scaled
//! bin-wise by a frequency response, inverse-transformed, tapered
//! again, and summed. The summed output is divided by the constant the
//! overlapped tapers add up to, so a unity response is near-identity
//! away from the sample edges.

use thiserror::Error;

use crate::audio::Sample;
use crate::features::fft::{self, FftError};

/// Low/high-pass cutoff frequency.
pub const CUTOFF_HZ: f64 = 2853.0;
/// Lower edge of the band-pass band.
pub const BAND_LOW_HZ: f64 = 1000.0;
/// High-frequency boost onset.
pub const BOOST_ONSET_HZ: f64 = 1000.0;
/// High-frequency boost gain, 5*pi.
pub const BOOST_FACTOR: f64 = 5.0 * std::f64::consts::PI;
/// Default filter window, in bins.
pub const DEFAULT_FILTER_WINDOW: usize = 1024;
/// Default silence threshold (1% of full scale).
pub const DEFAULT_SILENCE_THRESHOLD: f64 = 0.01;

/// Peak level below which a signal counts as silence for
/// normalization; rescaling residues this quiet would only amplify
/// rounding noise.
const NEAR_ZERO_PEAK: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("filter window {0} is not a power of two")]
    NonPowerOfTwoWindow(usize),
    #[error("frequency response has {got} gains, window {window} needs {need}")]
    ResponseLength {
        got: usize,
        window: usize,
        need: usize,
    },
    #[error("frequency-response gains must be non-negative")]
    NegativeGain,
    #[error("silence threshold {0} must lie in (0, 1)")]
    InvalidThreshold(f64),
    #[error(transparent)]
    Fft(#[from] FftError),
}

/// Per-bin gains for the first half of a filter window.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse {
    gains: Vec<f64>,
}

impl FrequencyResponse {
    pub fn new(gains: Vec<f64>) -> Result<Self, PreprocessError> {
        if gains.iter().any(|&g| g.is_nan() || g < 0.0) {
            return Err(PreprocessError::NegativeGain);
        }
        Ok(FrequencyResponse { gains })
    }

    pub fn unity(half_window: usize) -> Self {
        FrequencyResponse {
            gains: vec![1.0; half_window],
        }
    }

    pub fn zero(half_window: usize) -> Self {
        FrequencyResponse {
            gains: vec![0.0; half_window],
        }
    }

    /// Keeps bins below the cutoff.
    pub fn low_pass(window: usize, sample_rate: u32) -> Self {
        let cut = cutoff_bin(CUTOFF_HZ, window, sample_rate);
        FrequencyResponse {
            gains: (0..window / 2).map(|k| f64::from(k < cut)).collect(),
        }
    }

    /// Keeps bins at or above the cutoff.
    pub fn high_pass(window: usize, sample_rate: u32) -> Self {
        let cut = cutoff_bin(CUTOFF_HZ, window, sample_rate);
        FrequencyResponse {
            gains: (0..window / 2).map(|k| f64::from(k >= cut)).collect(),
        }
    }

    /// Keeps the [`BAND_LOW_HZ`], [`CUTOFF_HZ`]) band.
    pub fn band_pass(window: usize, sample_rate: u32) -> Self {
        let lo = cutoff_bin(BAND_LOW_HZ, window, sample_rate);
        let hi = cutoff_bin(CUTOFF_HZ, window, sample_rate);
        FrequencyResponse {
            gains: (0..window / 2)
                .map(|k| f64::from(k >= lo && k < hi))
                .collect(),
        }
    }

    /// Bin-wise complement of [`FrequencyResponse::band_pass`].
    pub fn band_stop(window: usize, sample_rate: u32) -> Self {
        let mut r = Self::band_pass(window, sample_rate);
        for g in &mut r.gains {
            *g = 1.0 - *g;
        }
        r
    }

    /// Gain [`BOOST_FACTOR`] above the boost onset, unity below.
    pub fn high_frequency_boost(window: usize, sample_rate: u32) -> Self {
        let onset = cutoff_bin(BOOST_ONSET_HZ, window, sample_rate);
        FrequencyResponse {
            gains: (0..window / 2)
                .map(|k| if k >= onset { BOOST_FACTOR } else { 1.0 })
                .collect(),
        }
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }
}

fn cutoff_bin(freq_hz: f64, window: usize, sample_rate: u32) -> usize {
    (freq_hz * window as f64 / f64::from(sample_rate)).floor() as usize
}

/// Scales the sample so its peak magnitude is 1. A (near-)silent input
/// is returned unchanged.
pub fn normalize(sample: &Sample) -> Sample {
    let peak = sample.peak();
    if peak < NEAR_ZERO_PEAK {
        return sample.clone();
    }
    Sample::new(
        sample.amplitudes.iter().map(|a| a / peak).collect(),
        sample.format,
    )
}

/// Keeps only the points with `|amplitude| >= threshold`; points below
/// the threshold are discarded, boundary values are kept.
pub fn remove_silence(sample: &Sample, threshold: f64) -> Result<Sample, PreprocessError> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(PreprocessError::InvalidThreshold(threshold));
    }
    Ok(Sample::new(
        sample
            .amplitudes
            .iter()
            .copied()
            .filter(|a| a.abs() >= threshold)
            .collect(),
        sample.format,
    ))
}

/// Reduces the sample to its end-points: strict local extrema, plus the
/// sample edges when `edges` is set, plus the members of constant-value
/// runs when `runs` is set.
pub fn endpoint(sample: &Sample, edges: bool, runs: bool) -> Sample {
    let a = &sample.amplitudes;
    let n = a.len();
    let mut keep = vec![false; n];
    for i in 1..n.saturating_sub(1) {
        let (prev, cur, next) = (a[i - 1], a[i], a[i + 1]);
        if (cur > prev && cur > next) || (cur < prev && cur < next) {
            keep[i] = true;
        }
    }
    if edges && n > 0 {
        keep[0] = true;
        keep[n - 1] = true;
    }
    if runs {
        let mut i = 0;
        while i < n {
            let mut j = i + 1;
            while j < n && a[j] == a[i] {
                j += 1;
            }
            if j - i >= 2 {
                for slot in keep.iter_mut().take(j).skip(i) {
                    *slot = true;
                }
            }
            i = j;
        }
    }
    Sample::new(
        a.iter()
            .zip(&keep)
            .filter_map(|(&v, &k)| k.then_some(v))
            .collect(),
        sample.format,
    )
}

/// Overlap-add FFT filtering with the given frequency response.
/// Output length equals input length.
pub fn fft_filter(
    sample: &Sample,
    response: &FrequencyResponse,
    window: usize,
) -> Result<Sample, PreprocessError> {
    if !window.is_power_of_two() || window < 4 {
        return Err(PreprocessError::NonPowerOfTwoWindow(window));
    }
    if response.len() != window / 2 {
        return Err(PreprocessError::ResponseLength {
            got: response.len(),
            window,
            need: window / 2,
        });
    }
    let n = sample.len();
    if n == 0 {
        return Ok(sample.clone());
    }

    let taper: Vec<f64> = fft::hamming_window(window)?
        .iter()
        .map(|h| h.sqrt())
        .collect();
    // Mirror the response onto the upper half so conjugate bins keep
    // equal gains and the output stays real.
    let full_gain: Vec<f64> = (0..window)
        .map(|k| {
            if k < window / 2 {
                response.gains[k]
            } else if k == window / 2 {
                response.gains[window / 2 - 1]
            } else {
                response.gains[window - k]
            }
        })
        .collect();

    let hop = window / 2;
    let mut out = vec![0.0; n + window];
    let mut start = 0;
    while start < n {
        let mut re = vec![0.0; window];
        let mut im = vec![0.0; window];
        for i in 0..window {
            if start + i < n {
                re[i] = sample.amplitudes[start + i] * taper[i];
            }
        }
        fft::fft(&mut re, &mut im)?;
        for k in 0..window {
            re[k] *= full_gain[k];
            im[k] *= full_gain[k];
        }
        fft::ifft(&mut re, &mut im)?;
        for i in 0..window {
            out[start + i] += re[i] * taper[i];
        }
        start += hop;
    }

    // The squared taper is the Hamming window, so overlapped frames add
    // up to (sum of the window) / hop at interior points.
    let overlap_sum: f64 =
        fft::hamming_window(window)?.iter().sum::<f64>() / hop as f64;
    out.truncate(n);
    for v in &mut out {
        *v /= overlap_sum;
    }
    Ok(Sample::new(out, sample.format))
}

/// Low-pass at [`CUTOFF_HZ`] over the default window.
pub fn low_pass(sample: &Sample) -> Result<Sample, PreprocessError> {
    let w = DEFAULT_FILTER_WINDOW;
    fft_filter(
        sample,
        &FrequencyResponse::low_pass(w, sample.format.sample_rate),
        w,
    )
}

/// High-pass at [`CUTOFF_HZ`] over the default window.
pub fn high_pass(sample: &Sample) -> Result<Sample, PreprocessError> {
    let w = DEFAULT_FILTER_WINDOW;
    fft_filter(
        sample,
        &FrequencyResponse::high_pass(w, sample.format.sample_rate),
        w,
    )
}

/// Band-pass over [[`BAND_LOW_HZ`], [`CUTOFF_HZ`]).
pub fn band_pass(sample: &Sample) -> Result<Sample, PreprocessError> {
    let w = DEFAULT_FILTER_WINDOW;
    fft_filter(
        sample,
        &FrequencyResponse::band_pass(w, sample.format.sample_rate),
        w,
    )
}

/// Complement of [`band_pass`].
pub fn band_stop(sample: &Sample) -> Result<Sample, PreprocessError> {
    let w = DEFAULT_FILTER_WINDOW;
    fft_filter(
        sample,
        &FrequencyResponse::band_stop(w, sample.format.sample_rate),
        w,
    )
}

/// Boosts bins above [`BOOST_ONSET_HZ`] by [`BOOST_FACTOR`] and
/// re-normalizes the entire signal.
pub fn high_freq_boost(sample: &Sample) -> Result<Sample, PreprocessError> {
    let w = DEFAULT_FILTER_WINDOW;
    let boosted = fft_filter(
        sample,
        &FrequencyResponse::high_frequency_boost(w, sample.format.sample_rate),
        w,
    )?;
    Ok(normalize(&boosted))
}

/// Preprocessing method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PreprocessMethod {
    /// Pass-everything-through baseline; skips normalization and
    /// silence removal as well.
    Raw,
    /// Normalization only.
    Normalize,
    LowPass,
    HighPass,
    BandPass,
    BandStop,
    Boost,
    /// High-pass chained into the boost preprocessor.
    HighPassBoost,
    Endpoint,
}

impl PreprocessMethod {
    pub fn token(&self) -> &'static str {
        match self {
            PreprocessMethod::Raw => "raw",
            PreprocessMethod::Normalize => "norm",
            PreprocessMethod::LowPass => "low",
            PreprocessMethod::HighPass => "high",
            PreprocessMethod::BandPass => "band",
            PreprocessMethod::BandStop => "bandstop",
            PreprocessMethod::Boost => "boost",
            PreprocessMethod::HighPassBoost => "highpassboost",
            PreprocessMethod::Endpoint => "endp",
        }
    }
}

/// A full preprocessing selection.
#[derive(Debug, Clone)]
pub struct PreprocessConfig {
    pub method: PreprocessMethod,
    pub remove_silence: bool,
    pub silence_threshold: f64,
    /// Accepted for compatibility; noise removal is not implemented and
    /// the flag is inert.
    pub noise: bool,
    pub endpoint_edges: bool,
    pub endpoint_runs: bool,
}

impl PreprocessConfig {
    pub fn new(method: PreprocessMethod) -> Self {
        PreprocessConfig {
            method,
            ..PreprocessConfig::default()
        }
    }
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            method: PreprocessMethod::Normalize,
            remove_silence: false,
            silence_threshold: DEFAULT_SILENCE_THRESHOLD,
            noise: false,
            endpoint_edges: true,
            endpoint_runs: true,
        }
    }
}

/// Applies a configuration: normalization (unless raw), silence removal
/// when flagged, then the configured filter. Raw passes the input
/// through untouched.
pub fn preprocess(cfg: &PreprocessConfig, sample: &Sample) -> Result<Sample, PreprocessError> {
    if cfg.method == PreprocessMethod::Raw {
        return Ok(sample.clone());
    }
    let mut s = normalize(sample);
    if cfg.remove_silence {
        s = remove_silence(&s, cfg.silence_threshold)?;
    }
    match cfg.method {
        PreprocessMethod::Raw => unreachable!(),
        PreprocessMethod::Normalize => Ok(s),
        PreprocessMethod::LowPass => low_pass(&s),
        PreprocessMethod::HighPass => high_pass(&s),
        PreprocessMethod::BandPass => band_pass(&s),
        PreprocessMethod::BandStop => band_stop(&s),
        PreprocessMethod::Boost => high_freq_boost(&s),
        PreprocessMethod::HighPassBoost => {
            let first = PreprocessConfig {
                method: PreprocessMethod::HighPass,
                ..cfg.clone()
            };
            let second = PreprocessConfig {
                method: PreprocessMethod::Boost,
                remove_silence: false,
                ..cfg.clone()
            };
            chain(&first, &second, sample)
        }
        PreprocessMethod::Endpoint => Ok(endpoint(&s, cfg.endpoint_edges, cfg.endpoint_runs)),
    }
}

/// Feeds the output of one preprocessing configuration into another:
/// `second(first(sample))`.
pub fn chain(
    first: &PreprocessConfig,
    second: &PreprocessConfig,
    sample: &Sample,
) -> Result<Sample, PreprocessError> {
    preprocess(second, &preprocess(first, sample)?)
}
