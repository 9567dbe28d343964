//! Small dense complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Leading `k × k` block.
pub fn interior(m: &CMatrix, k: usize) -> CMatrix {
    let k = k.min(m.nrows()).min(m.ncols());
    m.view((0, 0), (k, k)).into_owned()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |a_ij - b_ij|` over the leading `k × k` blocks.
pub fn interior_diff(a: &CMatrix, b: &CMatrix, k: usize) -> f64 {
    max_abs(&(interior(a, k) - interior(b, k)))
}

pub fn conj(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// 2-norm condition number.
pub fn condition_number(m: &CMatrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Smallest eigenvalue of the Hermitian part `(H + Hᴴ)/2`.
pub fn min_hermitian_eigenvalue(h: &CMatrix) -> f64 {
    if h.nrows() == 0 {
        return f64::INFINITY;
    }
    let herm = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    herm.symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Solves `X·A = C` for `X` through a column-pivoted QR factorization of `Aᵀ`.
/// `A` is never inverted explicitly.
pub fn solve_right(a: &CMatrix, c: &CMatrix) -> Result<CMatrix> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch(a.nrows(), a.ncols()));
    }
    if c.ncols() != a.nrows() {
        return Err(Error::DimensionMismatch(c.ncols(), a.nrows()));
    }
    let qr = a.transpose().col_piv_qr();
    let xt = qr
        .solve(&c.transpose())
        .ok_or_else(|| Error::Singular(singular_values(a).last().copied().unwrap_or(0.0)))?;
    Ok(xt.transpose())
}
