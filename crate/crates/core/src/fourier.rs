//! Truncated Fourier series on the circle.
//!
//! A [`CircleSeries`] stores coefficients `c_m` for `|m| <= N` densely, with
//! `c_0` pinned to zero: elements of `V = C^∞(S¹, ℝ)/ℝ` and its
//! complexification are only defined modulo constants.
//!
//! Normalizations used throughout the crate:
//!
//! * `S(σ, τ) = ∫ σ τ′ dθ = 2πi Σ_m m σ_{-m} τ_m`.
//! * `⟨w₁, w₂⟩ = (-i/2π) S(w̄₁, w₂) = Σ_{m>0} m conj(w₁_m) w₂_m` on `W₊`,
//!   conjugate-linear in the first slot. The basis `e_k = e^{ikθ}/√k`,
//!   `k >= 1`, is orthonormal.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{self, Analyzer};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Truncated complex Fourier series `Σ_{0<|m|<=N} c_m e^{imθ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleSeries {
    n_modes: usize,
    coeffs: Vec<Complex64>,
    real: bool,
}

impl CircleSeries {
    pub fn zeros(n_modes: usize) -> Self {
        Self {
            n_modes,
            coeffs: vec![ZERO; 2 * n_modes + 1],
            real: true,
        }
    }

    /// Builds a series from `(m, c_m)` pairs. Repeated modes accumulate.
    /// `m = 0` and `|m| > n_modes` are rejected.
    pub fn from_modes<T>(n_modes: usize, modes: T) -> Result<Self>
    where
        T: IntoIterator<Item = (i64, Complex64)>,
    {
        let mut s = Self::zeros(n_modes);
        s.real = false;
        for (m, c) in modes {
            if m == 0 || m.unsigned_abs() as usize > n_modes {
                return Err(Error::BadMode { mode: m, n_modes });
            }
            let k = s.index(m);
            s.coeffs[k] += c;
        }
        Ok(s)
    }

    /// Real-valued series from its positive modes; `c_{-m} = conj(c_m)`.
    pub fn real_from_positive<T>(n_modes: usize, modes: T) -> Result<Self>
    where
        T: IntoIterator<Item = (usize, Complex64)>,
    {
        let mut s = Self::zeros(n_modes);
        for (m, c) in modes {
            if m == 0 || m > n_modes {
                return Err(Error::BadMode {
                    mode: m as i64,
                    n_modes,
                });
            }
            let (p, n) = (s.index(m as i64), s.index(-(m as i64)));
            s.coeffs[p] += c;
            s.coeffs[n] += c.conj();
        }
        Ok(s)
    }

    /// `amp · cos(mθ)`.
    pub fn cosine(n_modes: usize, m: usize, amp: f64) -> Result<Self> {
        Self::real_from_positive(n_modes, [(m, Complex64::new(amp / 2.0, 0.0))])
    }

    /// `amp · sin(mθ)`.
    pub fn sine(n_modes: usize, m: usize, amp: f64) -> Result<Self> {
        Self::real_from_positive(n_modes, [(m, Complex64::new(0.0, -amp / 2.0))])
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    fn index(&self, m: i64) -> usize {
        (m + self.n_modes as i64) as usize
    }

    /// Coefficient of `e^{imθ}`; zero outside the stored range and at `m = 0`.
    pub fn mode(&self, m: i64) -> Complex64 {
        if m.unsigned_abs() as usize > self.n_modes {
            ZERO
        } else {
            self.coeffs[self.index(m)]
        }
    }

    /// Iterates `(m, c_m)` over `-N..=N`.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n = self.n_modes as i64;
        (-n..=n).zip(self.coeffs.iter().copied())
    }

    /// Checks conjugate symmetry to `tol`, then symmetrizes exactly and flags
    /// the series as real.
    pub fn into_real(mut self, tol: f64) -> Result<Self> {
        let scale = self.max_abs().max(1.0);
        for m in 1..=self.n_modes as i64 {
            let (p, n) = (self.mode(m), self.mode(-m));
            if (p - n.conj()).norm() > tol * scale {
                return Err(Error::NotReal);
            }
            let avg = (p + n.conj()) * 0.5;
            let (ip, in_) = (self.index(m), self.index(-m));
            self.coeffs[ip] = avg;
            self.coeffs[in_] = avg.conj();
        }
        self.real = true;
        Ok(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CircleSeries) -> f64 {
        let n = self.n_modes.max(other.n_modes) as i64;
        (-n..=n)
            .map(|m| (self.mode(m) - other.mode(m)).norm())
            .fold(0.0, f64::max)
    }

    /// Same function with a different cutoff (truncating or zero-padding).
    pub fn resized(&self, n_modes: usize) -> Self {
        let n = n_modes as i64;
        Self {
            n_modes,
            coeffs: (-n..=n).map(|m| self.mode(m)).collect(),
            real: self.real,
        }
    }

    /// Pointwise complex conjugate: `(f̄)_m = conj(c_{-m})`.
    pub fn conj(&self) -> Self {
        let n = self.n_modes as i64;
        Self {
            n_modes: self.n_modes,
            coeffs: (-n..=n).map(|m| self.mode(-m).conj()).collect(),
            real: self.real,
        }
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            n_modes: self.n_modes,
            coeffs: self.coeffs.iter().map(|c| c * z).collect(),
            real: self.real && z.im == 0.0,
        }
    }

    pub fn add(&self, other: &CircleSeries) -> Self {
        let n_modes = self.n_modes.max(other.n_modes);
        let n = n_modes as i64;
        Self {
            n_modes,
            coeffs: (-n..=n).map(|m| self.mode(m) + other.mode(m)).collect(),
            real: self.real && other.real,
        }
    }

    /// `d/dθ`: `c_m ↦ i m c_m`.
    pub fn derivative(&self) -> Self {
        Self {
            n_modes: self.n_modes,
            coeffs: self.modes().map(|(m, c)| I * m as f64 * c).collect(),
            real: self.real,
        }
    }

    /// Pointwise product, exact up to mode `N₁ + N₂`. The constant term of the
    /// product is discarded, as for every element of `V_ℂ`.
    pub fn product(&self, other: &CircleSeries) -> Self {
        let n_modes = self.n_modes + other.n_modes;
        let mut out = Self::zeros(n_modes);
        for (j, a) in self.modes().filter(|(_, a)| *a != ZERO) {
            for (k, b) in other.modes().filter(|(_, b)| *b != ZERO) {
                if j + k != 0 {
                    let idx = out.index(j + k);
                    out.coeffs[idx] += a * b;
                }
            }
        }
        out.real = self.real && other.real;
        out
    }

    /// Value at an arbitrary angle.
    pub fn eval(&self, theta: f64) -> Complex64 {
        self.eval_weighted(theta, |_| Complex64::new(1.0, 0.0))
    }

    /// Value of the derivative at an arbitrary angle.
    pub fn eval_derivative(&self, theta: f64) -> Complex64 {
        self.eval_weighted(theta, |m| I * m as f64)
    }

    fn eval_weighted(&self, theta: f64, weight: impl Fn(i64) -> Complex64) -> Complex64 {
        let step = Complex64::from_polar(1.0, theta);
        let mut pos = Complex64::new(1.0, 0.0);
        let mut acc = ZERO;
        for m in 1..=self.n_modes as i64 {
            pos *= step;
            acc += weight(m) * self.mode(m) * pos + weight(-m) * self.mode(-m) * pos.conj();
        }
        acc
    }
}

/// Basis vector `e_k = e^{ikθ}/√|k|`.
pub fn basis_vector(k: i64, n_modes: usize) -> Result<CircleSeries> {
    let scale = 1.0 / (k.unsigned_abs() as f64).sqrt();
    CircleSeries::from_modes(n_modes, [(k, Complex64::new(scale, 0.0))])
}

/// Fourier analysis of `M` uniform samples at `θ_j = 2πj/M`.
///
/// `M` must be a power of two with `M >= 4·n_modes`. The constant term is
/// dropped.
pub fn analyze(samples: &[Complex64], n_modes: usize) -> Result<CircleSeries> {
    let m = samples.len();
    if !m.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(m));
    }
    if m < 4 * n_modes {
        return Err(Error::Undersampled {
            what: "analyze",
            needed: 4 * n_modes,
            got: m,
        });
    }
    let coeffs = Analyzer::new(m).coefficients(samples);
    let n = n_modes as i64;
    CircleSeries::from_modes(
        n_modes,
        (-n..=n)
            .filter(|&k| k != 0)
            .map(|k| (k, coeffs[fft::slot(k, m)])),
    )
}

/// [`analyze`] for real samples; the result is flagged real.
pub fn analyze_real(samples: &[f64], n_modes: usize) -> Result<CircleSeries> {
    let complex: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    analyze(&complex, n_modes)?.into_real(f64::INFINITY)
}

/// Samples of the series at `θ_j = 2πj/M`, `j = 0..M`.
pub fn synthesize(series: &CircleSeries, m: usize) -> Result<Vec<Complex64>> {
    if m < 2 * series.n_modes + 1 {
        return Err(Error::Undersampled {
            what: "synthesize",
            needed: 2 * series.n_modes + 1,
            got: m,
        });
    }
    let mut buf = vec![ZERO; m];
    for (k, c) in series.modes() {
        buf[fft::slot(k, m)] = c;
    }
    Ok(fft::synthesize_raw(buf))
}

/// `S(σ, τ) = ∫ σ τ′ dθ`, evaluated spectrally as `2πi Σ_m m σ_{-m} τ_m`.
pub fn symplectic_form(sigma: &CircleSeries, tau: &CircleSeries) -> Complex64 {
    // Paired ±m terms keep S(σ,τ) = -S(τ,σ) exact in floating point.
    let n = sigma.n_modes.min(tau.n_modes) as i64;
    let sum: Complex64 = (1..=n)
        .map(|m| m as f64 * (sigma.mode(-m) * tau.mode(m) - sigma.mode(m) * tau.mode(-m)))
        .sum();
    2.0 * PI * I * sum
}

/// Hermitian inner product on `W₊`, conjugate-linear in `w1`.
pub fn hermitian_pairing(w1: &CircleSeries, w2: &CircleSeries) -> Result<Complex64> {
    for w in [w1, w2] {
        if (1..=w.n_modes as i64).any(|m| w.mode(-m) != ZERO) {
            return Err(Error::NotInWPlus);
        }
    }
    Ok(-I / (2.0 * PI) * symplectic_form(&w1.conj(), w2))
}

fn project(series: &CircleSeries, keep: impl Fn(i64) -> bool) -> CircleSeries {
    let n = series.n_modes as i64;
    CircleSeries {
        n_modes: series.n_modes,
        coeffs: (-n..=n)
            .map(|m| if keep(m) { series.mode(m) } else { ZERO })
            .collect(),
        real: false,
    }
}

/// Projection onto `W₊` (positive modes).
pub fn project_plus(series: &CircleSeries) -> CircleSeries {
    project(series, |m| m > 0)
}

/// Projection onto `W₋` (negative modes).
pub fn project_minus(series: &CircleSeries) -> CircleSeries {
    project(series, |m| m < 0)
}

/// Real vector field `u(θ) ∂/∂θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    series: CircleSeries,
    sl2_normalized: bool,
}

impl VectorField {
    /// Wraps a real series. The field counts as sl2-normalized when
    /// `u_{-1} = u_1 = 0` (`u_0` is always zero).
    pub fn new(series: CircleSeries) -> Result<Self> {
        if !series.is_real() {
            return Err(Error::NotReal);
        }
        let sl2_normalized = series.mode(1) == ZERO && series.mode(-1) == ZERO;
        Ok(Self {
            series,
            sl2_normalized,
        })
    }

    /// Like [`VectorField::new`] but fails unless the field is tangent to `M`.
    pub fn normalized(series: CircleSeries) -> Result<Self> {
        let v = Self::new(series)?;
        if !v.sl2_normalized {
            return Err(Error::NotNormalized);
        }
        Ok(v)
    }

    /// Real field from positive-mode coefficients `u_m`, `m >= 1`.
    pub fn from_positive_modes<T>(n_modes: usize, modes: T) -> Result<Self>
    where
        T: IntoIterator<Item = (usize, Complex64)>,
    {
        Self::new(CircleSeries::real_from_positive(n_modes, modes)?)
    }

    pub fn series(&self) -> &CircleSeries {
        &self.series
    }

    pub fn is_sl2_normalized(&self) -> bool {
        self.sl2_normalized
    }

    pub fn n_modes(&self) -> usize {
        self.series.n_modes()
    }

    /// `u_m`.
    pub fn coeff(&self, m: i64) -> Complex64 {
        self.series.mode(m)
    }

    /// `u(θ)`.
    pub fn eval(&self, theta: f64) -> f64 {
        self.series.eval(theta).re
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            series: self.series.scale(Complex64::new(s, 0.0)),
            sl2_normalized: self.sl2_normalized,
        }
    }

    /// The complex structure: `u*_m = -i sgn(m) u_m`.
    pub fn apply_j(&self) -> Result<Self> {
        if !self.sl2_normalized {
            return Err(Error::NotNormalized);
        }
        let n = self.series.n_modes as i64;
        let coeffs = (-n..=n)
            .map(|m| -I * m.signum() as f64 * self.series.mode(m))
            .collect();
        Ok(Self {
            series: CircleSeries {
                n_modes: self.series.n_modes,
                coeffs,
                real: true,
            },
            sl2_normalized: true,
        })
    }
}
