//! Small dense linear-algebra helpers.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MathError {
    #[error("matrix is singular")]
    Singular,
    #[error("matrix dimensions do not match vector length {0}")]
    DimensionMismatch(usize),
}

/// Solves `a * x = b` by Gaussian elimination with partial pivoting.
/// `a` is row-major, `n x n`.
pub fn solve_linear_system(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>, MathError> {
    let n = b.len();
    if a.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(MathError::DimensionMismatch(n));
    }
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut x = b.to_vec();

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .ok_or(MathError::Singular)?;
        if m[pivot][col].abs() < 1e-300 {
            return Err(MathError::Singular);
        }
        m.swap(col, pivot);
        x.swap(col, pivot);
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            if factor == 0.0 {
                continue;
            }
            let (upper, lower) = m.split_at_mut(row);
            for (cell, &pivot_cell) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *cell -= factor * pivot_cell;
            }
            x[row] -= factor * x[col];
        }
    }

    for col in (0..n).rev() {
        x[col] /= m[col][col];
        for row in 0..col {
            x[row] -= m[row][col] * x[col];
        }
    }
    Ok(x)
}

/// `n x n` identity matrix.
pub fn identity(n: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}
