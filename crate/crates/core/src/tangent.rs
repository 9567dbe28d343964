//! Derivative of the period map at the origin and the two Kähler metrics.
//!
//! A tangent vector to the Siegel disc at the origin is a symmetric
//! `λ: W₊ → W₋`, stored as `λ_pq` = the `e_{-p}` component of `λ(e_q)`.
//! For a field `v = u(θ)∂_θ`, `dΠ(v)(σ) = π₋(u σ′)`, which in coordinates is
//! `λ_pq = i√(pq)·u_{-(p+q)}`.
//!
//! The Weil–Petersson pairing uses the negative-mode coefficients `u_{-m}` as
//! complex coordinates, because `J` multiplies exactly those by `i`:
//!
//! `g(v, w) = Σ_{m>=2} (m³ - m)·v_{-m}·conj(w_{-m})`,
//!
//! linear in `v` and conjugate-linear in `w` for the complex structure `J`.
//! For real fields `v_{-m} = conj(v_m)`, so this is the complex conjugate of
//! `Σ v_m conj(w_m)(m³ - m)`; the two agree whenever the pairing is real.
//! With these conventions `h(dΠv, dΠw) = g(v, w)/6` exactly, from
//! `Σ_{p+q=n} pq = (n³ - n)/6`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{basis_vector, project_minus, VectorField};
use crate::linalg::{self, CMatrix};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Truncated element of `Hom(W₊, W₋)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentHom {
    lambda: CMatrix,
}

impl TangentHom {
    pub fn new(lambda: CMatrix) -> Result<Self> {
        if lambda.nrows() != lambda.ncols() {
            return Err(Error::DimensionMismatch(lambda.nrows(), lambda.ncols()));
        }
        Ok(Self { lambda })
    }

    pub fn zeros(n_modes: usize) -> Self {
        Self {
            lambda: CMatrix::zeros(n_modes, n_modes),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.lambda.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.lambda
    }

    /// `λ_pq` with one-based indices.
    pub fn entry(&self, p: usize, q: usize) -> Complex64 {
        self.lambda[(p - 1, q - 1)]
    }

    pub fn symmetry_residual(&self) -> f64 {
        linalg::max_abs(&(&self.lambda - self.lambda.transpose()))
    }

    pub fn hilbert_schmidt_norm(&self) -> f64 {
        self.lambda.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &TangentHom) -> f64 {
        linalg::max_abs(&(&self.lambda - &other.lambda))
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            lambda: &self.lambda * z,
        }
    }

    /// Schottky parameters `a_2..a_{2N}` read from the first column and the
    /// last row: `a_{p+q} = λ_pq / (i√(pq))`. Exact for homs in the image of
    /// [`schottky_tangent`]; `2N - 1` numbers determine all `N²` entries.
    pub fn schottky_parameters(&self) -> Vec<Complex64> {
        let n = self.n_modes();
        let read = |p: usize, q: usize| self.entry(p, q) / (I * ((p * q) as f64).sqrt());
        let mut out: Vec<Complex64> = (1..=n).map(|p| read(p, 1)).collect();
        out.extend((2..=n).map(|q| read(n, q)));
        out
    }
}

fn require_normalized(v: &VectorField) -> Result<()> {
    if v.is_sl2_normalized() {
        Ok(())
    } else {
        Err(Error::NotNormalized)
    }
}

/// Weil–Petersson pairing, truncated at the field cutoff.
pub fn wp_metric(v: &VectorField, w: &VectorField) -> Result<Complex64> {
    require_normalized(v)?;
    require_normalized(w)?;
    let n = v.n_modes().max(w.n_modes()) as i64;
    Ok((2..=n)
        .map(|m| {
            let weight = (m * m * m - m) as f64;
            weight * v.coeff(-m) * w.coeff(-m).conj()
        })
        .sum())
}

/// `dΠ(v)` in closed form: `λ_pq = i√(pq)·u_{-(p+q)}`.
pub fn d_pi(v: &VectorField, n_modes: usize) -> Result<TangentHom> {
    require_normalized(v)?;
    let lambda = CMatrix::from_fn(n_modes, n_modes, |p, q| {
        let (p, q) = (p + 1, q + 1);
        I * ((p * q) as f64).sqrt() * v.coeff(-((p + q) as i64))
    });
    Ok(TangentHom { lambda })
}

/// `dΠ(v)` by applying `σ ↦ π₋(u σ′)` to each basis vector `e_q` and reading
/// off the `e_{-p}` components.
pub fn d_pi_direct(v: &VectorField, n_modes: usize) -> Result<TangentHom> {
    require_normalized(v)?;
    let mut lambda = CMatrix::zeros(n_modes, n_modes);
    for q in 1..=n_modes {
        let e_q = basis_vector(q as i64, n_modes)?;
        let image = project_minus(&v.series().product(&e_q.derivative()));
        for p in 1..=n_modes {
            lambda[(p - 1, q - 1)] = image.mode(-(p as i64)) * (p as f64).sqrt();
        }
    }
    Ok(TangentHom { lambda })
}

/// `h(φ, ψ) = trace(φ∘ψ̄) = Σ_pq φ_pq·conj(ψ_pq)`.
pub fn siegel_metric(phi: &TangentHom, psi: &TangentHom) -> Result<Complex64> {
    if phi.n_modes() != psi.n_modes() {
        return Err(Error::DimensionMismatch(phi.n_modes(), psi.n_modes()));
    }
    Ok(phi
        .lambda
        .iter()
        .zip(psi.lambda.iter())
        .map(|(x, y)| x * y.conj())
        .sum())
}

/// `λ_pq = i√(pq)·a_{p+q}`, where `a[k]` holds `a_{k+2}`. Indices beyond the
/// supplied sequence are treated as zero.
pub fn schottky_tangent(a: &[Complex64], n_modes: usize) -> TangentHom {
    let lambda = CMatrix::from_fn(n_modes, n_modes, |p, q| {
        let (p, q) = (p + 1, q + 1);
        let coeff = a.get(p + q - 2).copied().unwrap_or_default();
        I * ((p * q) as f64).sqrt() * coeff
    });
    TangentHom { lambda }
}

/// Largest spread of `λ_pq/√(pq)` along an anti-diagonal `p + q = n`; zero
/// exactly on Hankel-structured homs, i.e. on the image of `dΠ`.
pub fn schottky_residual(hom: &TangentHom) -> f64 {
    let n = hom.n_modes();
    let mut worst: f64 = 0.0;
    for s in 2..=2 * n {
        let vals: Vec<Complex64> = (1..=n)
            .filter(|&p| s > p && s - p <= n)
            .map(|p| hom.entry(p, s - p) / ((p * (s - p)) as f64).sqrt())
            .collect();
        for (i, x) in vals.iter().enumerate() {
            for y in &vals[i + 1..] {
                worst = worst.max((x - y).norm());
            }
        }
    }
    worst
}

/// `‖dΠ(Jv) - i·dΠ(v)‖_max`.
pub fn holomorphy_check(v: &VectorField, n_modes: usize) -> Result<f64> {
    let lhs = d_pi(&v.apply_j()?, n_modes)?;
    let rhs = d_pi(v, n_modes)?.scale(I);
    Ok(lhs.max_abs_diff(&rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsometryRatio {
    /// Mean of `h(dΠv, dΠw)/g(v, w)` (real part).
    pub c: f64,
    /// `max |ratio - mean| / |mean|`, including any imaginary deviation.
    pub spread: f64,
    pub used: usize,
    pub skipped: usize,
}

/// Ratio `h(dΠv, dΠw)/g(v, w)` over pairs. Pairs with vanishing `g` are
/// skipped and counted.
pub fn isometry_ratio(
    pairs: &[(VectorField, VectorField)],
    n_modes: usize,
) -> Result<IsometryRatio> {
    let mut ratios = Vec::with_capacity(pairs.len());
    let mut skipped = 0;
    for (v, w) in pairs {
        let g = wp_metric(v, w)?;
        if g.norm() <= f64::MIN_POSITIVE {
            skipped += 1;
            continue;
        }
        let h = siegel_metric(&d_pi(v, n_modes)?, &d_pi(w, n_modes)?)?;
        ratios.push(h / g);
    }
    if ratios.is_empty() {
        return Err(Error::InvalidArgument(
            "isometry ratio needs at least one non-degenerate pair".into(),
        ));
    }
    let mean: Complex64 = ratios.iter().sum::<Complex64>() / ratios.len() as f64;
    let spread = ratios
        .iter()
        .map(|r| (r - mean).norm() / mean.norm())
        .fold(0.0, f64::max);
    Ok(IsometryRatio {
        c: mean.re,
        spread,
        used: ratios.len(),
        skipped,
    })
}

/// Values reported by the metric checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsReport {
    pub c_mean: f64,
    pub c_spread: f64,
    pub holomorphy_max: f64,
    pub schottky_residual: f64,
}
