//! First variation of the period matrix under a Beltrami deformation `tμ`.
//!
//! The disc moments `m_n = ∬_Δ μ(z) z^{n-2} dx dy` are computed by
//! Gauss–Legendre quadrature in `r` (with the Jacobian `r`) and an FFT over the
//! angle. The first-order period matrix is
//! `Π([tμ])_{rs} ≈ (t/π)·√(rs)·m_{r+s}`, and the matching Schottky parameters
//! are `a_n = -i·m_n/π`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{self, Analyzer};
use crate::linalg::CMatrix;
use crate::tangent::schottky_tangent;

type Evaluator = dyn Fn(f64, f64) -> Complex64 + Send + Sync;

/// A bounded function on the closed unit disc, in polar coordinates `(r, α)`.
#[derive(Clone)]
pub struct BeltramiCoefficient {
    evaluator: Arc<Evaluator>,
    sup_bound: f64,
}

impl fmt::Debug for BeltramiCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BeltramiCoefficient")
            .field("sup_bound", &self.sup_bound)
            .finish_non_exhaustive()
    }
}

impl BeltramiCoefficient {
    /// `sup_bound` must bound `|μ|` on the disc. Only smallness of `t·μ` is
    /// needed for the first-order formula, so `sup_bound` itself is not
    /// capped at 1.
    pub fn new<F>(sup_bound: f64, evaluator: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        if !(sup_bound.is_finite() && sup_bound >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "invalid sup bound {sup_bound}"
            )));
        }
        Ok(Self {
            evaluator: Arc::new(evaluator),
            sup_bound,
        })
    }

    /// `μ(z) = z̄^k`.
    pub fn zbar_pow(k: u32) -> Self {
        Self::polynomial(&[(0, k, Complex64::new(1.0, 0.0))])
    }

    pub fn constant(kappa: Complex64) -> Self {
        Self::polynomial(&[(0, 0, kappa)])
    }

    /// `μ(z) = Σ c·z^i·z̄^j`.
    pub fn polynomial(terms: &[(u32, u32, Complex64)]) -> Self {
        let terms = terms.to_vec();
        let sup_bound = terms.iter().map(|t| t.2.norm()).sum();
        let evaluator = move |r: f64, alpha: f64| {
            terms
                .iter()
                .map(|&(i, j, c)| {
                    c * r.powi((i + j) as i32)
                        * Complex64::from_polar(1.0, (i as f64 - j as f64) * alpha)
                })
                .sum()
        };
        Self {
            evaluator: Arc::new(evaluator),
            sup_bound,
        }
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn eval_polar(&self, r: f64, alpha: f64) -> Complex64 {
        (self.evaluator)(r, alpha)
    }

    /// `|t|·sup|μ| < 1`, the condition for `tμ` to be a Beltrami coefficient.
    pub fn is_admissible_at(&self, t: f64) -> bool {
        t.abs() * self.sup_bound < 1.0
    }
}

/// `m_n` for `n = 2..=n_max` plus quadrature metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    moments: Vec<Complex64>,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    pub sup_bound: f64,
}

impl MomentSequence {
    /// Wraps precomputed moments; `moments[k]` is `m_{k+2}`.
    pub fn from_values(moments: Vec<Complex64>) -> Self {
        Self {
            moments,
            radial_nodes: 0,
            angular_nodes: 0,
            sup_bound: f64::NAN,
        }
    }

    pub fn n_max(&self) -> usize {
        self.moments.len() + 1
    }

    /// `m_n`, zero outside `2..=n_max`.
    pub fn get(&self, n: usize) -> Complex64 {
        n.checked_sub(2)
            .and_then(|k| self.moments.get(k))
            .copied()
            .unwrap_or_default()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.moments
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        // Newton on P_n from the Chebyshev-like initial guess.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n == 0 { 0.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes.push(0.5 * (1.0 - x));
        weights.push(1.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

/// Disc moments `m_n = ∬ μ z^{n-2} dx dy`, `n = 2..=n_max`, from one pass over
/// an `n_r × n_a` polar grid. Requires `n_a >= 4·n_max`.
pub fn disc_moments(
    mu: &BeltramiCoefficient,
    n_max: usize,
    n_r: usize,
    n_a: usize,
) -> Result<MomentSequence> {
    if n_max < 2 {
        return Err(Error::InvalidArgument("n_max must be at least 2".into()));
    }
    if n_r == 0 {
        return Err(Error::Undersampled {
            what: "radial quadrature",
            needed: 1,
            got: 0,
        });
    }
    if n_a < 4 * n_max {
        return Err(Error::Undersampled {
            what: "angular quadrature (n_a >= 4 n_max)",
            needed: 4 * n_max,
            got: n_a,
        });
    }
    let (nodes, weights) = gauss_legendre(n_r);
    let mut analyzer = Analyzer::new(n_a);
    let mut moments = vec![Complex64::new(0.0, 0.0); n_max - 1];
    let mut ring = vec![Complex64::new(0.0, 0.0); n_a];
    for (&r, &w) in nodes.iter().zip(&weights) {
        for (k, slot) in ring.iter_mut().enumerate() {
            *slot = mu.eval_polar(r, 2.0 * PI * k as f64 / n_a as f64);
        }
        if ring.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite("Beltrami coefficient"));
        }
        analyzer.coefficients_in_place(&mut ring);
        // ∫ μ e^{i l α} dα = 2π·ĉ_{-l}
        for n in 2..=n_max {
            let l = (n - 2) as i64;
            let angular = 2.0 * PI * ring[fft::slot(-l, n_a)];
            moments[n - 2] += w * r * r.powi(l as i32) * angular;
        }
    }
    Ok(MomentSequence {
        moments,
        radial_nodes: n_r,
        angular_nodes: n_a,
        sup_bound: mu.sup_bound(),
    })
}

/// `(t/π)·√(rs)·m_{r+s}` for `r, s = 1..=N`. Needs `n_max >= 2N`.
///
/// Evaluated as `t·schottky_tangent(beltrami_to_vector(m))`, so the two agree
/// bit for bit at `t = 1`.
pub fn rauch_first_variation(moments: &MomentSequence, t: f64, n_modes: usize) -> Result<CMatrix> {
    if moments.n_max() < 2 * n_modes {
        return Err(Error::Undersampled {
            what: "moment sequence (n_max >= 2N)",
            needed: 2 * n_modes,
            got: moments.n_max(),
        });
    }
    let hom = schottky_tangent(&beltrami_to_vector(moments), n_modes);
    Ok(hom.matrix().map(|z| z * t))
}

/// Schottky parameters `a_n = -i·m_n/π`, `n = 2..=n_max` (index 0 is `a_2`).
pub fn beltrami_to_vector(moments: &MomentSequence) -> Vec<Complex64> {
    let scale = Complex64::new(0.0, -1.0 / PI);
    moments.values().iter().map(|m| m * scale).collect()
}
