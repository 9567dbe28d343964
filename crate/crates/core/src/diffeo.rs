//! Orientation-preserving circle diffeomorphisms `φ(θ) = θ + p(θ)`.
//!
//! The working representation is the vector of samples `φ(θ_j)` on the
//! uniform grid `θ_j = 2πj/M` together with the trigonometric interpolant of
//! the periodic part `p`. Composition and inversion evaluate that
//! interpolant at off-grid points, so every operation stays spectrally
//! accurate.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::Analyzer;
use crate::fourier::{synthesize, CircleSeries, VectorField};

/// Smallest admissible value of `φ′` on the grid.
pub const DELTA_FLOOR: f64 = 1e-6;

const NEWTON_TOL: f64 = 1e-13;
const NEWTON_MAX_ITER: usize = 100;

fn grid_angle(j: usize, m: usize) -> f64 {
    2.0 * PI * j as f64 / m as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircleDiffeo {
    samples: Vec<f64>,
    /// Mean of `p`.
    shift: f64,
    /// Interpolation coefficients `c_k`, `k = 1..=K`, of `p`; `c_{-k} = conj(c_k)`.
    coeffs: Vec<Complex64>,
    min_derivative: f64,
}

impl CircleDiffeo {
    /// Builds `θ ↦ θ + p(θ)` sampled at `m` points and validates `φ′ > δ`.
    pub fn new(p: &CircleSeries, m: usize) -> Result<Self> {
        if !p.is_real() {
            return Err(Error::NotReal);
        }
        check_grid(m)?;
        let values = synthesize(p, m)?;
        Self::from_samples(
            values
                .iter()
                .enumerate()
                .map(|(j, v)| grid_angle(j, m) + v.re)
                .collect(),
        )
    }

    pub fn identity(m: usize) -> Result<Self> {
        Self::rotation(0.0, m)
    }

    /// `θ ↦ θ + α`.
    pub fn rotation(alpha: f64, m: usize) -> Result<Self> {
        check_grid(m)?;
        Self::from_samples((0..m).map(|j| grid_angle(j, m) + alpha).collect())
    }

    /// Adopts samples `φ(θ_j)` of a degree-one circle map.
    pub fn from_samples(samples: Vec<f64>) -> Result<Self> {
        let m = samples.len();
        check_grid(m)?;
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("diffeomorphism samples"));
        }
        let periodic: Vec<Complex64> = samples
            .iter()
            .enumerate()
            .map(|(j, &x)| Complex64::new(x - grid_angle(j, m), 0.0))
            .collect();
        let raw = Analyzer::new(m).coefficients(&periodic);
        let shift = raw[0].re;
        // Drop the Nyquist mode and the negligible tail.
        let half = m / 2 - 1;
        let scale = raw.iter().map(|c| c.norm()).fold(1.0, f64::max);
        let cutoff = (1..=half)
            .rev()
            .find(|&k| raw[k].norm() > 1e-17 * scale)
            .unwrap_or(0);
        let coeffs = raw[1..=cutoff].to_vec();

        let mut deriv = vec![Complex64::new(0.0, 0.0); m];
        for (k, c) in coeffs.iter().enumerate() {
            let k = k + 1;
            let d = Complex64::new(0.0, k as f64) * c;
            deriv[k] = d;
            deriv[m - k] = d.conj();
        }
        let min_derivative = crate::fft::synthesize_raw(deriv)
            .iter()
            .map(|d| 1.0 + d.re)
            .fold(f64::INFINITY, f64::min);
        if min_derivative <= DELTA_FLOOR {
            return Err(Error::NotDiffeomorphism(min_derivative));
        }
        Ok(Self {
            samples,
            shift,
            coeffs,
            min_derivative,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.samples.len()
    }

    /// `φ(θ_j)`.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// `min_j φ′(θ_j)`.
    pub fn min_derivative(&self) -> f64 {
        self.min_derivative
    }

    /// Mean rotation `(1/2π)∫ (φ(θ) - θ) dθ`.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Spectral view of the periodic part `p` minus its mean, cut at `n_modes`.
    pub fn perturbation(&self, n_modes: usize) -> CircleSeries {
        let modes = self
            .coeffs
            .iter()
            .enumerate()
            .take(n_modes)
            .map(|(k, c)| (k + 1, *c));
        CircleSeries::real_from_positive(n_modes, modes).expect("modes within range")
    }

    fn periodic_part(&self, x: f64) -> (f64, f64) {
        let step = Complex64::from_polar(1.0, x);
        let mut pos = Complex64::new(1.0, 0.0);
        let (mut val, mut der) = (self.shift, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            pos *= step;
            let term = c * pos;
            val += 2.0 * term.re;
            der -= 2.0 * (k + 1) as f64 * term.im;
        }
        (val, der)
    }

    /// `φ(x)` at an arbitrary real `x` (degree-one lift).
    pub fn eval(&self, x: f64) -> f64 {
        x + self.periodic_part(x).0
    }

    /// `φ′(x)`.
    pub fn derivative(&self, x: f64) -> f64 {
        1.0 + self.periodic_part(x).1
    }

    /// The same map sampled on a grid of `m` points.
    pub fn resample(&self, m: usize) -> Result<Self> {
        if m == self.n_samples() {
            return Ok(self.clone());
        }
        check_grid(m)?;
        Self::from_samples((0..m).map(|j| self.eval(grid_angle(j, m))).collect())
    }

    /// `φ∘ψ` on the finer of the two grids.
    pub fn compose(&self, psi: &CircleDiffeo) -> Result<Self> {
        let m = self.n_samples().max(psi.n_samples());
        let psi = psi.resample(m)?;
        Self::from_samples(psi.samples.iter().map(|&y| self.eval(y)).collect())
    }

    /// `φ⁻¹`, solving `φ(x) = θ_j` pointwise by safeguarded Newton.
    pub fn invert(&self) -> Result<Self> {
        let m = self.n_samples();
        let bound = self.shift.abs() + 2.0 * self.coeffs.iter().map(|c| c.norm()).sum::<f64>();
        let values = (0..m)
            .map(|j| self.solve_preimage(grid_angle(j, m), bound))
            .collect::<Result<Vec<_>>>()?;
        Self::from_samples(values)
    }

    fn solve_preimage(&self, target: f64, bound: f64) -> Result<f64> {
        let (mut lo, mut hi) = (target - bound - 1e-12, target + bound + 1e-12);
        let mut x = target - self.periodic_part(target).0;
        if !(lo..=hi).contains(&x) {
            x = 0.5 * (lo + hi);
        }
        for _ in 0..NEWTON_MAX_ITER {
            let (p, dp) = self.periodic_part(x);
            let f = x + p - target;
            if f.abs() <= NEWTON_TOL {
                return Ok(x);
            }
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let newton = x - f / (1.0 + dp);
            x = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= f64::EPSILON * x.abs().max(1.0) {
                return Ok(x);
            }
        }
        Err(Error::NoConvergence {
            what: "Newton inversion",
            residual: hi - lo,
        })
    }

    /// Boundary trace of `z ↦ e^{iβ}(z - a)/(1 - āz)` as a degree-one lift.
    pub fn mobius_boundary(params: &MobiusParams, m: usize) -> Result<Self> {
        check_grid(m)?;
        let w: Vec<Complex64> = (0..m)
            .map(|j| params.apply(Complex64::from_polar(1.0, grid_angle(j, m))))
            .collect();
        Self::from_samples(unwrap_phases(&w))
    }

    /// Time-`t` flow of `dθ/dt = u(θ)` from every grid point, classical RK4.
    pub fn flow(v: &VectorField, t: f64, steps: usize, m: usize) -> Result<Self> {
        if steps < 1 {
            return Err(Error::InvalidArgument(
                "flow needs at least one step".into(),
            ));
        }
        check_grid(m)?;
        let h = t / steps as f64;
        let values = (0..m)
            .map(|j| {
                let mut x = grid_angle(j, m);
                for _ in 0..steps {
                    let k1 = v.eval(x);
                    let k2 = v.eval(x + 0.5 * h * k1);
                    let k3 = v.eval(x + 0.5 * h * k2);
                    let k4 = v.eval(x + h * k3);
                    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                }
                x
            })
            .collect();
        Self::from_samples(values)
    }

    /// Left-composes with the Möbius map that moves the conformal barycenter
    /// of `e^{iφ}` to the origin, i.e. returns `M∘φ` with
    /// `∫ e^{i(M∘φ)(θ)} dθ = 0`. Möbius boundary maps normalize to rotations.
    pub fn barycentric_representative(&self) -> Result<Self> {
        let m = self.n_samples();
        let mut w: Vec<Complex64> = self
            .samples
            .iter()
            .map(|&x| Complex64::from_polar(1.0, x))
            .collect();
        let mut residual = f64::INFINITY;
        for _ in 0..200 {
            let c = w.iter().sum::<Complex64>() / m as f64;
            residual = c.norm();
            if residual <= 1e-15 {
                break;
            }
            let step = MobiusParams::new(c, 0.0)?;
            w.iter_mut().for_each(|z| *z = step.apply(*z));
        }
        if residual > 1e-15 {
            return Err(Error::NoConvergence {
                what: "conformal barycenter iteration",
                residual,
            });
        }
        Self::from_samples(unwrap_phases(&w))
    }

    /// `max_j |φ(θ_j) - ψ(θ_j)|` on a common grid.
    pub fn max_sample_diff(&self, other: &CircleDiffeo) -> Result<f64> {
        let m = self.n_samples().max(other.n_samples());
        let (a, b) = (self.resample(m)?, other.resample(m)?);
        Ok(a.samples
            .iter()
            .zip(&b.samples)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max))
    }
}

/// Continuous argument of unit-modulus grid values, accumulated along the grid.
fn unwrap_phases(w: &[Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(w.len());
    let mut prev = 0.0;
    let mut lift = 0.0;
    for (j, z) in w.iter().enumerate() {
        let arg = z.arg();
        if j == 0 {
            lift = arg;
        } else {
            let d = arg - prev;
            lift += d - 2.0 * PI * (d / (2.0 * PI)).round();
        }
        prev = arg;
        out.push(lift);
    }
    out
}

fn check_grid(m: usize) -> Result<()> {
    if !m.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(m));
    }
    if m < 16 {
        return Err(Error::Undersampled {
            what: "diffeomorphism grid",
            needed: 16,
            got: m,
        });
    }
    Ok(())
}

/// Disc automorphism `z ↦ e^{iβ}(z - a)/(1 - āz)`, `|a| < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusParams {
    a: Complex64,
    beta: f64,
}

impl MobiusParams {
    pub fn new(a: Complex64, beta: f64) -> Result<Self> {
        if a.norm() >= 1.0 || !a.norm().is_finite() || !beta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "Möbius center must satisfy |a| < 1 (got |a| = {})",
                a.norm()
            )));
        }
        Ok(Self { a, beta })
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        Complex64::from_polar(1.0, self.beta) * (z - self.a) / (1.0 - self.a.conj() * z)
    }

    /// Recovers Möbius parameters from a boundary map through the first two
    /// Fourier coefficients of `e^{iφ}`: `c_0 = -a e^{iβ}` and
    /// `c_1 = e^{iβ}(1 - |a|²)`. Returns the fit and the max deviation of
    /// `e^{iφ(θ_j)}` from the fitted map.
    pub fn fit(phi: &CircleDiffeo) -> Result<(Self, f64)> {
        let m = phi.n_samples();
        let boundary: Vec<Complex64> = phi
            .samples()
            .iter()
            .map(|&x| Complex64::from_polar(1.0, x))
            .collect();
        let c = Analyzer::new(m).coefficients(&boundary);
        let rot = c[1] / c[1].norm();
        let params = Self::new(-c[0] / rot, rot.arg())?;
        let residual = boundary
            .iter()
            .enumerate()
            .map(|(j, w)| (w - params.apply(Complex64::from_polar(1.0, grid_angle(j, m)))).norm())
            .fold(0.0, f64::max);
        Ok((params, residual))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const M: usize = 256;

    fn sine(amp: f64, k: usize) -> CircleSeries {
        CircleSeries::sine(k.max(8), k, amp).unwrap()
    }

    #[test]
    fn zero_perturbation_is_identity() {
        let id = CircleDiffeo::new(&CircleSeries::zeros(4), M).unwrap();
        for (j, x) in id.samples().iter().enumerate() {
            assert_eq!(*x, grid_angle(j, M));
        }
        assert_eq!(id.min_derivative(), 1.0);
    }

    #[test]
    fn validity_floor() {
        let ok = CircleDiffeo::new(&sine(0.3, 1), M).unwrap();
        // oracle: grid minimum of 1 + 0.3 cos θ
        let want = (0..M)
            .map(|j| 1.0 + 0.3 * grid_angle(j, M).cos())
            .fold(f64::INFINITY, f64::min);
        assert!((ok.min_derivative() - want).abs() < 1e-13);
        assert!((want - 0.7).abs() < 1e-15);
        assert!(matches!(
            CircleDiffeo::new(&sine(1.5, 1), M),
            Err(Error::NotDiffeomorphism(_))
        ));
    }

    #[test]
    fn grid_guards() {
        assert!(matches!(
            CircleDiffeo::identity(100),
            Err(Error::NotPowerOfTwo(100))
        ));
        let complex = CircleSeries::from_modes(4, [(1, Complex64::new(0.1, 0.0))]).unwrap();
        assert!(matches!(
            CircleDiffeo::new(&complex, M),
            Err(Error::NotReal)
        ));
    }

    #[test]
    fn compose_with_identity_and_rotations() {
        let phi = CircleDiffeo::new(&sine(0.3, 2), M).unwrap();
        let id = CircleDiffeo::identity(M).unwrap();
        assert!(phi.compose(&id).unwrap().max_sample_diff(&phi).unwrap() < 1e-14);
        assert!(id.compose(&phi).unwrap().max_sample_diff(&phi).unwrap() < 1e-14);

        let (a, b) = (0.4, -1.1);
        let ra = CircleDiffeo::rotation(a, M).unwrap();
        let rb = CircleDiffeo::rotation(b, M).unwrap();
        let rab = CircleDiffeo::rotation(a + b, M).unwrap();
        assert!(ra.compose(&rb).unwrap().max_sample_diff(&rab).unwrap() < 1e-14);
    }

    #[test]
    fn inverse_of_rotation_and_identity() {
        let id = CircleDiffeo::identity(M).unwrap();
        assert!(id.invert().unwrap().max_sample_diff(&id).unwrap() < 1e-15);
        let r = CircleDiffeo::rotation(0.7, M).unwrap();
        let want = CircleDiffeo::rotation(-0.7, M).unwrap();
        assert!(r.invert().unwrap().max_sample_diff(&want).unwrap() < 1e-13);
    }

    #[test]
    fn inverse_fixes_zero_and_composes_to_identity() {
        let phi = CircleDiffeo::new(&sine(0.3, 1), 512).unwrap();
        let inv = phi.invert().unwrap();
        assert!(inv.samples()[0].abs() < 1e-13);
        // Oracle: independent bisection on θ + 0.3 sin θ = target.
        for j in [1usize, 77, 300] {
            let target = grid_angle(j, 512);
            let (mut lo, mut hi) = (target - 0.4, target + 0.4);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid + 0.3 * mid.sin() > target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            assert!((inv.samples()[j] - 0.5 * (lo + hi)).abs() < 1e-12);
        }
        let id = CircleDiffeo::identity(512).unwrap();
        assert!(phi.compose(&inv).unwrap().max_sample_diff(&id).unwrap() < 1e-9);
        assert!(inv.compose(&phi).unwrap().max_sample_diff(&id).unwrap() < 1e-9);
    }

    #[test]
    fn compose_is_associative() {
        let f = CircleDiffeo::new(&sine(0.2, 1), 512).unwrap();
        let g = CircleDiffeo::new(&CircleSeries::cosine(8, 2, 0.1).unwrap(), 512).unwrap();
        let h = CircleDiffeo::new(&sine(0.05, 3), 512).unwrap();
        let left = f.compose(&g).unwrap().compose(&h).unwrap();
        let right = f.compose(&g.compose(&h).unwrap()).unwrap();
        assert!(left.perturbation(64).max_abs_diff(&right.perturbation(64)) < 1e-9);
        assert!((left.shift() - right.shift()).abs() < 1e-9);
    }

    #[test]
    fn mobius_with_zero_center_is_rotation() {
        let p = MobiusParams::new(Complex64::new(0.0, 0.0), 0.9).unwrap();
        let mob = CircleDiffeo::mobius_boundary(&p, M).unwrap();
        let rot = CircleDiffeo::rotation(0.9, M).unwrap();
        assert!(mob.max_sample_diff(&rot).unwrap() < 1e-14);
    }

    #[test]
    fn mobius_boundary_is_valid_and_fits_back() {
        let p = MobiusParams::new(Complex64::new(0.3, 0.0), 0.0).unwrap();
        let mob = CircleDiffeo::mobius_boundary(&p, M).unwrap();
        // φ′ = (1 - |a|²)/|e^{iθ} - a|², minimum (1-a)/(1+a) at θ = π
        assert!((mob.min_derivative() - 0.7 / 1.3).abs() < 1e-12);
        let (fit, res) = MobiusParams::fit(&mob).unwrap();
        assert!(res < 1e-12);
        assert!((fit.a() - p.a()).norm() < 1e-12 && fit.beta().abs() < 1e-12);
        assert!(MobiusParams::new(Complex64::new(0.6, 0.8), 0.0).is_err());
    }

    #[test]
    fn mobius_maps_form_a_group() {
        let m1 = MobiusParams::new(Complex64::new(0.2, -0.4), 0.3).unwrap();
        let m2 = MobiusParams::new(Complex64::new(-0.5, 0.1), -1.2).unwrap();
        let f1 = CircleDiffeo::mobius_boundary(&m1, 1024).unwrap();
        let f2 = CircleDiffeo::mobius_boundary(&m2, 1024).unwrap();
        let comp = f1.compose(&f2).unwrap();
        // Oracle: the disc automorphism m1∘m2 evaluated directly.
        for (j, x) in comp.samples().iter().enumerate() {
            let z = Complex64::from_polar(1.0, grid_angle(j, 1024));
            let w = m1.apply(m2.apply(z));
            assert!((Complex64::from_polar(1.0, *x) - w).norm() < 1e-10);
        }
        let (_, residual) = MobiusParams::fit(&comp).unwrap();
        assert!(residual <= 1e-8);
    }

    #[test]
    fn barycentric_representative_of_mobius_is_rotation() {
        let p = MobiusParams::new(Complex64::new(-0.3, 0.4), 0.7).unwrap();
        let mob = CircleDiffeo::mobius_boundary(&p, 1024).unwrap();
        let rep = mob.barycentric_representative().unwrap();
        assert!(rep.perturbation(128).max_abs() < 1e-12);
        assert!(rep.min_derivative() > 1.0 - 1e-12);
    }

    #[test]
    fn barycentric_representative_differs_by_a_mobius_map() {
        let phi = CircleDiffeo::new(
            &CircleSeries::real_from_positive(
                8,
                [
                    (1, Complex64::new(0.1, 0.2)),
                    (3, Complex64::new(0.02, -0.03)),
                ],
            )
            .unwrap(),
            1024,
        )
        .unwrap();
        let rep = phi.barycentric_representative().unwrap();
        let mean: Complex64 = rep
            .samples()
            .iter()
            .map(|&x| Complex64::from_polar(1.0, x))
            .sum::<Complex64>()
            / 1024.0;
        assert!(mean.norm() < 1e-15);
        // rep∘φ⁻¹ is Möbius
        let (_, residual) =
            MobiusParams::fit(&rep.compose(&phi.invert().unwrap()).unwrap()).unwrap();
        assert!(residual < 1e-9, "{residual}");
    }

    #[test]
    fn flow_basics() {
        let v = VectorField::new(CircleSeries::sine(4, 2, 1.0).unwrap()).unwrap();
        let id = CircleDiffeo::identity(M).unwrap();
        assert_eq!(CircleDiffeo::flow(&v, 0.0, 10, M).unwrap(), id);
        assert!(CircleDiffeo::flow(&v, 0.1, 0, M).is_err());
    }

    #[test]
    fn flow_of_sin2_matches_closed_form() {
        // dθ/dt = sin 2θ integrates to tan θ(t) = tan θ₀ e^{2t}.
        let v = VectorField::new(CircleSeries::sine(4, 2, 1.0).unwrap()).unwrap();
        let phi = CircleDiffeo::flow(&v, 0.1, 100, M).unwrap();
        let exact = |t0: f64| {
            let principal = (t0.tan() * 0.2f64.exp()).atan();
            principal + ((t0 - principal) / PI).round() * PI
        };
        for (j, x) in phi.samples().iter().enumerate() {
            let t0 = grid_angle(j, M);
            assert!((x - exact(t0)).abs() < 1e-10, "j={j}: {x} vs {}", exact(t0));
        }
    }

    #[test]
    fn flow_is_a_one_parameter_group() {
        let v = VectorField::from_positive_modes(
            4,
            [
                (2, Complex64::new(0.2, 0.1)),
                (3, Complex64::new(-0.05, 0.1)),
            ],
        )
        .unwrap();
        let whole = CircleDiffeo::flow(&v, 0.5, 200, M).unwrap();
        let half = CircleDiffeo::flow(&v, 0.25, 100, M).unwrap();
        let twice = half.compose(&half).unwrap();
        assert!(whole.max_sample_diff(&twice).unwrap() < 1e-9);
    }

    #[test]
    fn flow_error_is_fourth_order() {
        let v = VectorField::from_positive_modes(4, [(2, Complex64::new(0.3, 0.2))]).unwrap();
        let reference = CircleDiffeo::flow(&v, 1.0, 1600, M).unwrap();
        let e1 = CircleDiffeo::flow(&v, 1.0, 10, M)
            .unwrap()
            .max_sample_diff(&reference)
            .unwrap();
        let e2 = CircleDiffeo::flow(&v, 1.0, 20, M)
            .unwrap()
            .max_sample_diff(&reference)
            .unwrap();
        let ratio = e1 / e2;
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }
}
