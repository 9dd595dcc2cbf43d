//! File-emitting visualizers: spectrogram PPM images and tab-delimited
//! wave dumps for external plotting tools.

use std::io::Write;
use std::path::Path;

use thiserror::Error;

use patrec_core::audio::Sample;
use patrec_core::features::fft;

/// Spectrogram analysis window: 128 samples at half intervals.
pub const SPECTROGRAM_WINDOW: usize = 128;

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("no spectrogram frames to draw")]
    EmptyFrames,
    #[error("frame {index} has {got} bins, expected {want}")]
    RaggedFrames {
        index: usize,
        got: usize,
        want: usize,
    },
    #[error("fft: {0}")]
    Fft(#[from] fft::FftError),
}

/// Per-frame magnitude spectra of Hamming windows taken at half
/// intervals of [`SPECTROGRAM_WINDOW`] samples.
pub fn spectrogram_frames(sample: &Sample) -> Result<Vec<Vec<f64>>, EmitError> {
    let window = SPECTROGRAM_WINDOW;
    let taper = fft::hamming_window(window)?;
    let mut frames = Vec::new();
    let mut start = 0;
    while start < sample.len() {
        let mut re = vec![0.0; window];
        let mut im = vec![0.0; window];
        for (i, slot) in re.iter_mut().enumerate() {
            if start + i < sample.len() {
                *slot = sample.amplitudes[start + i] * taper[i];
            }
        }
        fft::fft(&mut re, &mut im)?;
        frames.push(
            (0..window / 2)
                .map(|k| (re[k] * re[k] + im[k] * im[k]).sqrt())
                .collect(),
        );
        start += window / 2;
    }
    Ok(frames)
}

/// Writes a binary PPM (P6) spectrogram: time on the x-axis, one column
/// per frame, low bins at the bottom, grayscale `255 * (1 - mag/max)`.
pub fn emit_spectrogram(frames: &[Vec<f64>], path: impl AsRef<Path>) -> Result<(), EmitError> {
    if frames.is_empty() {
        return Err(EmitError::EmptyFrames);
    }
    let height = frames[0].len();
    for (index, frame) in frames.iter().enumerate() {
        if frame.len() != height {
            return Err(EmitError::RaggedFrames {
                index,
                got: frame.len(),
                want: height,
            });
        }
    }
    let max = frames
        .iter()
        .flatten()
        .fold(0.0f64, |m, &v| m.max(v));

    let mut out = Vec::with_capacity(frames.len() * height * 3 + 20);
    write!(out, "P6\n{} {}\n255\n", frames.len(), height)?;
    for row in 0..height {
        let bin = height - 1 - row;
        for frame in frames {
            let gray = if max == 0.0 {
                255u8
            } else {
                (255.0 * (1.0 - frame[bin] / max)).round().clamp(0.0, 255.0) as u8
            };
            out.extend_from_slice(&[gray, gray, gray]);
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Dumps `index<TAB>amplitude` rows, LF-terminated.
pub fn emit_wave_graph(sample: &Sample, path: impl AsRef<Path>) -> Result<(), EmitError> {
    let mut out = String::new();
    for (i, a) in sample.amplitudes.iter().enumerate() {
        out.push_str(&format!("{i}\t{a}\n"));
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use patrec_core::audio::AudioFormat;

    fn sample(amplitudes: Vec<f64>) -> Sample {
        Sample::new(amplitudes, AudioFormat::default())
    }

    #[test]
    fn ppm_header_and_extremes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("spec.ppm");
        // Two frames: one silent, one with a single hot bin.
        let mut hot = vec![0.0; 64];
        hot[3] = 2.0;
        emit_spectrogram(&[vec![0.0; 64], hot], &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert!(bytes.starts_with(b"P6\n2 64\n255\n"));
        let body = &bytes[b"P6\n2 64\n255\n".len()..];
        assert_eq!(body.len(), 2 * 64 * 3);
        // Silent frame: all white. Hot bin: black pixel.
        let row = 64 - 1 - 3; // bin 3 sits near the bottom
        let hot_pixel = body[(row * 2 + 1) * 3];
        assert_eq!(hot_pixel, 0);
        let silent_pixel = body[(row * 2) * 3];
        assert_eq!(silent_pixel, 255);
    }

    #[test]
    fn all_zero_frame_is_all_white() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("zero.ppm");
        emit_spectrogram(&[vec![0.0; 4]], &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let body = &bytes[b"P6\n1 4\n255\n".len()..];
        assert!(body.iter().all(|&b| b == 255));
    }

    #[test]
    fn empty_and_ragged_frames_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            emit_spectrogram(&[], dir.path().join("x.ppm")),
            Err(EmitError::EmptyFrames)
        ));
        assert!(matches!(
            emit_spectrogram(
                &[vec![0.0; 4], vec![0.0; 5]],
                dir.path().join("y.ppm")
            ),
            Err(EmitError::RaggedFrames { index: 1, .. })
        ));
    }

    #[test]
    fn frames_cover_the_sample_at_half_intervals() {
        let s = sample(vec![0.1; 320]);
        let frames = spectrogram_frames(&s).unwrap();
        assert_eq!(frames.len(), 5); // starts at 0, 64, 128, 192, 256
        assert!(frames.iter().all(|f| f.len() == 64));
    }

    #[test]
    fn wave_graph_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("wave.tsv");
        emit_wave_graph(&sample(vec![0.5]), &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "0\t0.5\n");

        emit_wave_graph(&sample(vec![]), &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "");

        emit_wave_graph(&sample(vec![0.1, -0.25, 1.0]), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert_eq!(text.lines().nth(1).unwrap(), "1\t-0.25");
    }
}
