// Small dense helpers for the regression-with-ARIMA-errors stage.

use alloc::vec;
use alloc::vec::Vec;

/// Least squares `min ‖y - Xb‖²` via the normal equations and Gaussian
/// elimination with partial pivoting. `columns` are the columns of `X`.
/// Returns `None` for a numerically singular system.
pub fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let k = columns.len();
    let mut a = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = columns[i].iter().zip(&columns[j]).map(|(u, v)| u * v).sum();
        }
        a[i][k] = columns[i].iter().zip(y).map(|(u, v)| u * v).sum();
    }
    let scale = a.iter().enumerate().map(|(i, r)| r[i].abs()).fold(0.0, f64::max);
    for col in 0..k {
        let pivot = (col..k).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[pivot][col].abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return None;
        }
        a.swap(col, pivot);
        for r in col + 1..k {
            let factor = a[r][col] / a[col][col];
            for c in col..=k {
                a[r][c] -= factor * a[col][c];
            }
        }
    }
    let mut b = vec![0.0; k];
    for r in (0..k).rev() {
        let tail: f64 = (r + 1..k).map(|c| a[r][c] * b[c]).sum();
        b[r] = (a[r][k] - tail) / a[r][r];
    }
    b.iter().all(|v| v.is_finite()).then_some(b)
}
