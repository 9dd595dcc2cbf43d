//! Radix-2 fast Fourier transform and the Hamming window.
//!
//! The transform shuffles the input by bit reversal and recombines it
//! with butterfly stages, operating in place on split real/imaginary
//! arrays. The inverse is the forward transform of the conjugate,
//! conjugated back and scaled by 1/N.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FftError {
    #[error("transform length {0} is not a power of two")]
    NonPowerOfTwo(usize),
    #[error("real/imaginary length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("window length must be at least 2, got {0}")]
    WindowTooShort(usize),
    #[error("window index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
}

/// Hamming taper at index `n` of a window of length `len`:
/// `0.54 - 0.46 * cos(2*pi*n / (len - 1))`.
pub fn hamming(n: usize, len: usize) -> Result<f64, FftError> {
    if len < 2 {
        return Err(FftError::WindowTooShort(len));
    }
    if n >= len {
        return Err(FftError::IndexOutOfRange { index: n, len });
    }
    let angle = 2.0 * std::f64::consts::PI * n as f64 / (len - 1) as f64;
    Ok(0.54 - 0.46 * angle.cos())
}

/// Full Hamming window of length `len`.
pub fn hamming_window(len: usize) -> Result<Vec<f64>, FftError> {
    (0..len).map(|n| hamming(n, len)).collect()
}

/// In-place forward transform: `X[k] = sum_n x[n] * e^(-2*pi*i*n*k/N)`.
pub fn fft(re: &mut [f64], im: &mut [f64]) -> Result<(), FftError> {
    transform(re, im, false)
}

/// In-place inverse transform, including the 1/N scale, so that
/// `ifft(fft(x)) == x` up to rounding.
pub fn ifft(re: &mut [f64], im: &mut [f64]) -> Result<(), FftError> {
    transform(re, im, true)
}

fn transform(re: &mut [f64], im: &mut [f64], inverse: bool) -> Result<(), FftError> {
    let n = re.len();
    if im.len() != n {
        return Err(FftError::LengthMismatch(n, im.len()));
    }
    if n == 0 || !n.is_power_of_two() {
        return Err(FftError::NonPowerOfTwo(n));
    }
    if n == 1 {
        return Ok(());
    }

    if inverse {
        for v in im.iter_mut() {
            *v = -*v;
        }
    }

    // Bit-reversal shuffle.
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            re.swap(i, j);
            im.swap(i, j);
        }
    }

    // Butterfly recombination, doubling the block size each stage.
    let mut len = 2;
    while len <= n {
        let angle = -2.0 * std::f64::consts::PI / len as f64;
        let (w_re, w_im) = (angle.cos(), angle.sin());
        for start in (0..n).step_by(len) {
            let (mut cur_re, mut cur_im) = (1.0, 0.0);
            for k in 0..len / 2 {
                let (a, b) = (start + k, start + k + len / 2);
                let t_re = re[b] * cur_re - im[b] * cur_im;
                let t_im = re[b] * cur_im + im[b] * cur_re;
                re[b] = re[a] - t_re;
                im[b] = im[a] - t_im;
                re[a] += t_re;
                im[a] += t_im;
                let next_re = cur_re * w_re - cur_im * w_im;
                cur_im = cur_re * w_im + cur_im * w_re;
                cur_re = next_re;
            }
        }
        len *= 2;
    }

    if inverse {
        let scale = 1.0 / n as f64;
        for v in re.iter_mut() {
            *v *= scale;
        }
        for v in im.iter_mut() {
            *v = -*v * scale;
        }
    }
    Ok(())
}
