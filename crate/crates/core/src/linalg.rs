//! Extreme eigenvalues of small dense symmetric matrices by Householder
//! tridiagonalization followed by Sturm-sequence bisection.

use nalgebra::linalg::SymmetricTridiagonal;
use nalgebra::DMatrix;

/// Number of eigenvalues of the tridiagonal `(diag, off)` that are `< x`
/// (zero pivots are counted as negative).
fn count_below(diag: &[f64], off: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        q = if i == 0 {
            diag[0] - x
        } else {
            diag[i] - x - off[i - 1] * off[i - 1] / q
        };
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    (lo, hi)
}

/// `index`-th smallest eigenvalue (0-based) of a symmetric tridiagonal matrix.
pub fn tridiagonal_eigenvalue(diag: &[f64], off: &[f64], index: usize) -> f64 {
    let n = diag.len();
    assert!(index < n && off.len() + 1 >= n);
    if n == 1 {
        return diag[0];
    }
    let (mut lo, mut hi) = gershgorin(diag, off);
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let pivmin = f64::MIN_POSITIVE * off.iter().fold(1.0_f64, |m, e| m.max(e * e));
    lo -= 2.0 * f64::EPSILON * scale;
    hi += 2.0 * f64::EPSILON * scale;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(diag, off, mid, pivmin) > index {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + 0.5 * f64::EPSILON * scale {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn tridiagonalize(matrix: &DMatrix<f64>) -> (Vec<f64>, Vec<f64>) {
    let (diag, off) = SymmetricTridiagonal::new(matrix.clone()).unpack_tridiagonal();
    (diag.as_slice().to_vec(), off.as_slice().to_vec())
}

/// Smallest eigenvalue of a symmetric matrix (lower triangle is read).
pub fn smallest_eigenvalue(matrix: &DMatrix<f64>) -> f64 {
    match matrix.nrows() {
        0 => f64::INFINITY,
        1 => matrix[(0, 0)],
        _ => {
            let (d, e) = tridiagonalize(matrix);
            tridiagonal_eigenvalue(&d, &e, 0)
        }
    }
}

/// Largest eigenvalue of a symmetric matrix (lower triangle is read).
pub fn largest_eigenvalue(matrix: &DMatrix<f64>) -> f64 {
    match matrix.nrows() {
        0 => f64::NEG_INFINITY,
        1 => matrix[(0, 0)],
        n => {
            let (d, e) = tridiagonalize(matrix);
            tridiagonal_eigenvalue(&d, &e, n - 1)
        }
    }
}
