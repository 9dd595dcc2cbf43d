//! Shared fixtures for the pipeline benchmarks.

use patrec_core::audio::{AudioFormat, Sample};

/// A deterministic pseudo-random signal in [-1, 1].
pub fn noise_sample(len: usize, mut seed: u64) -> Sample {
    let amplitudes = (0..len)
        .map(|_| {
            seed = seed.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = seed;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            ((z ^ (z >> 31)) as f64 / u64::MAX as f64) * 2.0 - 1.0
        })
        .collect();
    Sample::new(amplitudes, AudioFormat::default())
}

/// One second of a two-tone mixture at the default rate.
pub fn two_tone_sample(f1: f64, f2: f64) -> Sample {
    let rate = 8000.0;
    let amplitudes = (0..8000)
        .map(|n| {
            let t = n as f64 / rate;
            let two_pi = 2.0 * std::f64::consts::PI;
            0.5 * ((two_pi * f1 * t).sin() + (two_pi * f2 * t).sin()) / 2.0
        })
        .collect();
    Sample::new(amplitudes, AudioFormat::default())
}
