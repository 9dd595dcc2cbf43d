//! Sample loading, generation, and writing.
//!
//! PCM words map to unit-range amplitudes: a signed 16-bit value `v`
//! becomes `v / 32768`, an unsigned 8-bit value `v` becomes
//! `(v - 128) / 128`. Writing applies the inverse conversion, clipping
//! out-of-range amplitudes to the unit range first.

use std::fs;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AudioError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("not a RIFF/RIFX WAVE file")]
    NotWave,
    #[error("missing fmt chunk")]
    MissingFmt,
    #[error("missing data chunk")]
    MissingData,
    #[error("truncated {kind} chunk: need {need} bytes, have {have}")]
    TruncatedChunk {
        kind: &'static str,
        need: usize,
        have: usize,
    },
    #[error("unsupported encoding {0} (only PCM is supported)")]
    UnsupportedEncoding(u16),
    #[error("unsupported channel count {0} (must be mono)")]
    UnsupportedChannels(u16),
    #[error("unsupported sample size {0} bits (must be 8 or 16)")]
    UnsupportedBits(u16),
    #[error("invalid sample rate {0}")]
    InvalidSampleRate(u32),
    #[error("frequency {freq} Hz outside the open Nyquist range (0, {nyquist}) Hz")]
    FrequencyOutOfRange { freq: f64, nyquist: f64 },
    #[error("amplitude text line {line}: {source}")]
    AmplitudeParse {
        line: usize,
        source: std::num::ParseFloatError,
    },
}

/// PCM stream parameters. The pipeline operates on mono samples only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AudioFormat {
    pub sample_rate: u32,
    pub bits_per_sample: u16,
    pub channels: u16,
}

impl AudioFormat {
    pub const DEFAULT_SAMPLE_RATE: u32 = 8000;

    pub fn validate(&self) -> Result<(), AudioError> {
        if self.channels != 1 {
            return Err(AudioError::UnsupportedChannels(self.channels));
        }
        if self.bits_per_sample != 8 && self.bits_per_sample != 16 {
            return Err(AudioError::UnsupportedBits(self.bits_per_sample));
        }
        if self.sample_rate == 0 {
            return Err(AudioError::InvalidSampleRate(0));
        }
        Ok(())
    }
}

impl Default for AudioFormat {
    /// 8000 Hz, 16-bit, mono.
    fn default() -> Self {
        AudioFormat {
            sample_rate: Self::DEFAULT_SAMPLE_RATE,
            bits_per_sample: 16,
            channels: 1,
        }
    }
}

/// A mono amplitude sequence in `[-1, 1]` with its source format.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub amplitudes: Vec<f64>,
    pub format: AudioFormat,
}

impl Sample {
    pub fn new(amplitudes: Vec<f64>, format: AudioFormat) -> Self {
        Sample { amplitudes, format }
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Root-mean-square amplitude; 0 for an empty sample.
    pub fn rms(&self) -> f64 {
        if self.amplitudes.is_empty() {
            return 0.0;
        }
        let sum: f64 = self.amplitudes.iter().map(|a| a * a).sum();
        (sum / self.amplitudes.len() as f64).sqrt()
    }

    pub fn peak(&self) -> f64 {
        self.amplitudes.iter().fold(0.0, |m, a| m.max(a.abs()))
    }
}

fn read_u32(bytes: &[u8], big_endian: bool) -> u32 {
    let arr: [u8; 4] = bytes.try_into().unwrap();
    if big_endian {
        u32::from_be_bytes(arr)
    } else {
        u32::from_le_bytes(arr)
    }
}

fn read_u16(bytes: &[u8], big_endian: bool) -> u16 {
    let arr: [u8; 2] = bytes.try_into().unwrap();
    if big_endian {
        u16::from_be_bytes(arr)
    } else {
        u16::from_le_bytes(arr)
    }
}

/// Loads a PCM WAVE file. Accepts the little-endian RIFF container and
/// its big-endian RIFX twin; unknown chunks are skipped.
pub fn load_wav(path: impl AsRef<Path>) -> Result<Sample, AudioError> {
    parse_wav(&fs::read(path)?)
}

/// Parses WAVE bytes; see [`load_wav`].
pub fn parse_wav(data: &[u8]) -> Result<Sample, AudioError> {
    if data.len() < 12 {
        return Err(AudioError::NotWave);
    }
    let big_endian = match &data[0..4] {
        b"RIFF" => false,
        b"RIFX" => true,
        _ => return Err(AudioError::NotWave),
    };
    if &data[8..12] != b"WAVE" {
        return Err(AudioError::NotWave);
    }

    let mut pos = 12;
    let mut format: Option<AudioFormat> = None;
    while pos + 8 <= data.len() {
        let chunk_id = &data[pos..pos + 4];
        let chunk_len = read_u32(&data[pos + 4..pos + 8], big_endian) as usize;
        let body = pos + 8;
        match chunk_id {
            b"fmt " => {
                if body + 16 > data.len() || chunk_len < 16 {
                    return Err(AudioError::TruncatedChunk {
                        kind: "fmt",
                        need: 16,
                        have: data.len().saturating_sub(body),
                    });
                }
                let encoding = read_u16(&data[body..body + 2], big_endian);
                if encoding != 1 {
                    return Err(AudioError::UnsupportedEncoding(encoding));
                }
                let fmt = AudioFormat {
                    channels: read_u16(&data[body + 2..body + 4], big_endian),
                    sample_rate: read_u32(&data[body + 4..body + 8], big_endian),
                    bits_per_sample: read_u16(&data[body + 14..body + 16], big_endian),
                };
                fmt.validate()?;
                format = Some(fmt);
            }
            b"data" => {
                let fmt = format.ok_or(AudioError::MissingFmt)?;
                if body + chunk_len > data.len() {
                    return Err(AudioError::TruncatedChunk {
                        kind: "data",
                        need: chunk_len,
                        have: data.len() - body,
                    });
                }
                let raw = &data[body..body + chunk_len];
                let amplitudes = decode_pcm(raw, &fmt, big_endian);
                return Ok(Sample::new(amplitudes, fmt));
            }
            _ => {}
        }
        // Chunks are word-aligned: odd sizes carry a pad byte.
        pos = body + chunk_len + (chunk_len & 1);
    }
    if format.is_none() {
        Err(AudioError::MissingFmt)
    } else {
        Err(AudioError::MissingData)
    }
}

fn decode_pcm(raw: &[u8], fmt: &AudioFormat, big_endian: bool) -> Vec<f64> {
    match fmt.bits_per_sample {
        16 => raw
            .chunks_exact(2)
            .map(|pair| {
                let word = if big_endian {
                    i16::from_be_bytes([pair[0], pair[1]])
                } else {
                    i16::from_le_bytes([pair[0], pair[1]])
                };
                f64::from(word) / 32768.0
            })
            .collect(),
        8 => raw
            .iter()
            .map(|&byte| (f64::from(byte) - 128.0) / 128.0)
            .collect(),
        _ => unreachable!("validated"),
    }
}

fn encode_pcm(sample: &Sample) -> Vec<u8> {
    match sample.format.bits_per_sample {
        16 => {
            let mut out = Vec::with_capacity(sample.len() * 2);
            for &a in &sample.amplitudes {
                let word = (a.clamp(-1.0, 1.0) * 32768.0).round() as i32;
                let word = word.clamp(i32::from(i16::MIN), i32::from(i16::MAX)) as i16;
                out.extend_from_slice(&word.to_le_bytes());
            }
            out
        }
        8 => sample
            .amplitudes
            .iter()
            .map(|&a| {
                let byte = (a.clamp(-1.0, 1.0) * 128.0).round() as i32 + 128;
                byte.clamp(0, 255) as u8
            })
            .collect(),
        _ => unreachable!("validated"),
    }
}

/// Writes a canonical little-endian RIFF/WAVE PCM file.
pub fn write_wav(sample: &Sample, path: impl AsRef<Path>) -> Result<(), AudioError> {
    sample.format.validate()?;
    fs::write(path, wav_bytes(sample))?;
    Ok(())
}

/// Serializes a sample to WAVE bytes; see [`write_wav`].
pub fn wav_bytes(sample: &Sample) -> Vec<u8> {
    let fmt = &sample.format;
    let data = encode_pcm(sample);
    let block_align = fmt.channels * fmt.bits_per_sample / 8;
    let byte_rate = fmt.sample_rate * u32::from(block_align);
    let mut out = Vec::with_capacity(44 + data.len());
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data.len() as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&fmt.channels.to_le_bytes());
    out.extend_from_slice(&fmt.sample_rate.to_le_bytes());
    out.extend_from_slice(&byte_rate.to_le_bytes());
    out.extend_from_slice(&block_align.to_le_bytes());
    out.extend_from_slice(&fmt.bits_per_sample.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data.len() as u32).to_le_bytes());
    out.extend_from_slice(&data);
    if data.len() & 1 == 1 {
        out.push(0);
    }
    out
}

/// Generates `sin(2*pi*freq*n/rate)` for `duration` seconds.
/// `freq` must lie strictly inside the Nyquist range.
pub fn generate_sine(
    freq: f64,
    duration: f64,
    format: AudioFormat,
) -> Result<Sample, AudioError> {
    format.validate()?;
    let nyquist = f64::from(format.sample_rate) / 2.0;
    if !(freq > 0.0 && freq < nyquist) {
        return Err(AudioError::FrequencyOutOfRange { freq, nyquist });
    }
    let count = (duration * f64::from(format.sample_rate)).round() as usize;
    let step = 2.0 * std::f64::consts::PI * freq / f64::from(format.sample_rate);
    let amplitudes = (0..count).map(|n| (step * n as f64).sin()).collect();
    Ok(Sample::new(amplitudes, format))
}

/// Loads a text file as a sample: byte `b` maps to `b / 128 - 1`.
pub fn load_text(path: impl AsRef<Path>) -> Result<Sample, AudioError> {
    let bytes = fs::read(path)?;
    let amplitudes = bytes
        .iter()
        .map(|&b| f64::from(b) / 128.0 - 1.0)
        .collect();
    Ok(Sample::new(amplitudes, AudioFormat::default()))
}

/// Dumps amplitudes as decimal text, one per line, LF-terminated.
/// The printed form round-trips exactly through [`load_sample_text`].
pub fn write_sample_text(sample: &Sample, path: impl AsRef<Path>) -> Result<(), AudioError> {
    let mut out = String::new();
    for a in &sample.amplitudes {
        out.push_str(&a.to_string());
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a textual amplitude dump back into a sample.
pub fn load_sample_text(path: impl AsRef<Path>) -> Result<Sample, AudioError> {
    let text = fs::read_to_string(path)?;
    let mut amplitudes = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        amplitudes.push(line.trim().parse::<f64>().map_err(|source| {
            AudioError::AmplitudeParse {
                line: idx + 1,
                source,
            }
        })?);
    }
    Ok(Sample::new(amplitudes, AudioFormat::default()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::fft;

    fn pcm16_wav(words: &[i16]) -> Vec<u8> {
        let amplitudes = words.iter().map(|&w| f64::from(w) / 32768.0).collect();
        wav_bytes(&Sample::new(amplitudes, AudioFormat::default()))
    }

    /// Builds the big-endian RIFX twin of a 16-bit mono PCM file.
    fn rifx_wav(words: &[i16], rate: u32) -> Vec<u8> {
        let mut out = Vec::new();
        let data_len = (words.len() * 2) as u32;
        out.extend_from_slice(b"RIFX");
        out.extend_from_slice(&(36 + data_len).to_be_bytes());
        out.extend_from_slice(b"WAVE");
        out.extend_from_slice(b"fmt ");
        out.extend_from_slice(&16u32.to_be_bytes());
        out.extend_from_slice(&1u16.to_be_bytes());
        out.extend_from_slice(&1u16.to_be_bytes());
        out.extend_from_slice(&rate.to_be_bytes());
        out.extend_from_slice(&(rate * 2).to_be_bytes());
        out.extend_from_slice(&2u16.to_be_bytes());
        out.extend_from_slice(&16u16.to_be_bytes());
        out.extend_from_slice(b"data");
        out.extend_from_slice(&data_len.to_be_bytes());
        for &w in words {
            out.extend_from_slice(&w.to_be_bytes());
        }
        out
    }

    #[test]
    fn pcm_words_map_to_unit_amplitudes() {
        let sample = parse_wav(&pcm16_wav(&[0, -32768, 16384])).unwrap();
        assert_eq!(sample.amplitudes, vec![0.0, -1.0, 0.5]);
    }

    #[test]
    fn eight_bit_offset_binary_mapping() {
        let fmt = AudioFormat {
            bits_per_sample: 8,
            ..AudioFormat::default()
        };
        let bytes = wav_bytes(&Sample::new(vec![-1.0, 0.0], fmt));
        let sample = parse_wav(&bytes).unwrap();
        assert_eq!(sample.amplitudes, vec![-1.0, 0.0]);
        assert_eq!(sample.format.bits_per_sample, 8);
    }

    #[test]
    fn write_is_inverse_of_load() {
        assert_eq!(
            parse_wav(&pcm16_wav(&[0])).unwrap().amplitudes,
            vec![0.0]
        );
        let bytes = wav_bytes(&Sample::new(vec![-1.0], AudioFormat::default()));
        let sample = parse_wav(&bytes).unwrap();
        assert_eq!(sample.amplitudes, vec![-1.0]);
    }

    #[test]
    fn big_endian_twin_loads_identically() {
        let words = [0i16, 12345, -32768, 255, -1];
        let le = parse_wav(&pcm16_wav(&words)).unwrap();
        let be = parse_wav(&rifx_wav(&words, 8000)).unwrap();
        assert_eq!(le.amplitudes, be.amplitudes);
    }

    #[test]
    fn unknown_chunks_are_skipped() {
        let mut bytes = pcm16_wav(&[100, -100]);
        // Splice a LIST chunk between fmt and data.
        let mut spliced = bytes[..36].to_vec();
        spliced.extend_from_slice(b"LIST");
        spliced.extend_from_slice(&4u32.to_le_bytes());
        spliced.extend_from_slice(b"info");
        spliced.extend_from_slice(&bytes[36..]);
        let riff_len = (spliced.len() - 8) as u32;
        spliced[4..8].copy_from_slice(&riff_len.to_le_bytes());
        bytes = spliced;
        let sample = parse_wav(&bytes).unwrap();
        assert_eq!(sample.len(), 2);
    }

    #[test]
    fn stereo_and_non_pcm_are_rejected() {
        let mut bytes = pcm16_wav(&[0]);
        bytes[22] = 2; // channel count
        assert!(matches!(
            parse_wav(&bytes),
            Err(AudioError::UnsupportedChannels(2))
        ));
        let mut bytes = pcm16_wav(&[0]);
        bytes[20] = 3; // IEEE float encoding
        assert!(matches!(
            parse_wav(&bytes),
            Err(AudioError::UnsupportedEncoding(3))
        ));
    }

    #[test]
    fn truncated_data_chunk_is_rejected() {
        let bytes = pcm16_wav(&[1, 2, 3]);
        assert!(matches!(
            parse_wav(&bytes[..bytes.len() - 2]),
            Err(AudioError::TruncatedChunk { kind: "data", .. })
        ));
    }

    #[test]
    fn out_of_range_amplitudes_clip() {
        let bytes = wav_bytes(&Sample::new(vec![1.5, -2.0], AudioFormat::default()));
        let sample = parse_wav(&bytes).unwrap();
        assert!((sample.amplitudes[0] - 32767.0 / 32768.0).abs() < 1e-12);
        assert_eq!(sample.amplitudes[1], -1.0);
    }

    #[test]
    fn round_trip_error_within_pcm_resolution() {
        let mut state = 1u64;
        let amplitudes: Vec<f64> = (0..8000)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
            })
            .collect();
        let original = Sample::new(amplitudes, AudioFormat::default());
        let reloaded = parse_wav(&wav_bytes(&original)).unwrap();
        for (a, b) in original.amplitudes.iter().zip(&reloaded.amplitudes) {
            assert!((a - b).abs() <= 1.0 / 32768.0);
        }
        // A second round trip is exact at PCM resolution.
        let twice = wav_bytes(&reloaded);
        assert_eq!(wav_bytes(&parse_wav(&twice).unwrap()), twice);
    }

    #[test]
    fn sine_requires_nyquist_range() {
        assert!(generate_sine(0.0, 1.0, AudioFormat::default()).is_err());
        assert!(generate_sine(4000.0, 1.0, AudioFormat::default()).is_err());
        assert!(generate_sine(3999.0, 1.0, AudioFormat::default()).is_ok());
    }

    #[test]
    fn sine_quarter_rate_peaks_at_second_point() {
        let s = generate_sine(2000.0, 0.01, AudioFormat::default()).unwrap();
        assert!((s.amplitudes[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sine_spectrum_peaks_at_expected_bin() {
        // Verified against the O(n^2) DFT via the shared fft tests; here the
        // transform locates the 1 kHz peak at bin freq * N / fs.
        let s = generate_sine(1000.0, 0.128, AudioFormat::default()).unwrap();
        let mut re = s.amplitudes.clone();
        re.resize(1024, 0.0);
        let mut im = vec![0.0; 1024];
        fft::fft(&mut re, &mut im).unwrap();
        let argmax = (0..512)
            .max_by(|&a, &b| {
                (re[a] * re[a] + im[a] * im[a]).total_cmp(&(re[b] * re[b] + im[b] * im[b]))
            })
            .unwrap();
        assert_eq!(argmax, 128); // 1000 * 1024 / 8000
    }

    #[test]
    fn text_bytes_scale_into_unit_range() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sample.txt");
        std::fs::write(&path, [0u8, 128u8]).unwrap();
        let s = load_text(&path).unwrap();
        assert_eq!(s.amplitudes, vec![-1.0, 0.0]);

        std::fs::write(&path, [] as [u8; 0]).unwrap();
        assert!(load_text(&path).unwrap().is_empty());
    }

    #[test]
    fn amplitude_text_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("amps.txt");
        let s = Sample::new(vec![0.5], AudioFormat::default());
        write_sample_text(&s, &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "0.5\n");

        let empty = Sample::new(vec![], AudioFormat::default());
        write_sample_text(&empty, &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "");

        let s = Sample::new(
            vec![0.123456789012345, -1.0, 1.0 / 3.0],
            AudioFormat::default(),
        );
        write_sample_text(&s, &path).unwrap();
        let back = load_sample_text(&path).unwrap();
        for (a, b) in s.amplitudes.iter().zip(&back.amplitudes) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
