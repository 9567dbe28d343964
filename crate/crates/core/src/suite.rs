//! Seeded property suites, their reports, and resolution sweeps.
//!
//! Every criterion draws its random inputs from its own ChaCha8 stream keyed
//! by the run seed, so criteria are independent of each other and of the
//! order they run in. Reports carry no timestamps: the same configuration
//! yields byte-identical output.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::beltrami::{
    beltrami_to_vector, disc_moments, rauch_first_variation, BeltramiCoefficient,
};
use crate::diffeo::{CircleDiffeo, MobiusParams};
use crate::error::{Error, Result};
use crate::fourier::{CircleSeries, VectorField};
use crate::io::Format;
use crate::linalg::{self, interior_diff, max_abs, CMatrix};
use crate::period::{mobius_act, period_matrix_with, period_point, siegel_membership};
use crate::segal::{blocks, check_symplectic};
use crate::tangent::{
    d_pi, d_pi_direct, holomorphy_check, isometry_ratio, schottky_residual, schottky_tangent,
    MetricsReport, TangentHom,
};

/// Highest mode of the random fields and diffeomorphisms.
pub const RANDOM_TOP_MODE: usize = 8;
/// Amplitude `s` of random diffeomorphisms: `|c_m| = s·2^{-m}`.
pub const RANDOM_DIFFEO_AMPLITUDE: f64 = 0.2;
/// Random diffeomorphisms with a smaller `min φ′` are redrawn.
pub const RANDOM_DIFFEO_MIN_DERIVATIVE: f64 = 0.3;
/// Largest `|a|` of random Möbius maps.
pub const RANDOM_MOBIUS_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub n_modes: usize,
    pub samples: usize,
    pub interior: usize,
    /// Threshold of the symmetry and equivariance checks.
    pub tol: f64,
    pub seed: u64,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_modes: 32,
            samples: 2048,
            interior: 16,
            tol: 1e-6,
            seed: 42,
            format: Format::Json,
            out: None,
        }
    }
}

impl RunConfig {
    /// `N >= 2`, `M` a power of two with `M >= 8N`, `1 <= interior <= N/2`,
    /// `tol >= 0`.
    pub fn validate(&self) -> Result<()> {
        if self.n_modes < 2 {
            return Err(Error::InvalidArgument("--modes must be at least 2".into()));
        }
        if !self.samples.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(self.samples));
        }
        if self.samples < 8 * self.n_modes {
            return Err(Error::Undersampled {
                what: "samples (M >= 8N)",
                needed: 8 * self.n_modes,
                got: self.samples,
            });
        }
        if self.interior == 0 || self.interior > self.n_modes / 2 {
            return Err(Error::InvalidArgument(format!(
                "--interior must lie in 1..={}",
                self.n_modes / 2
            )));
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "--tol must be finite and non-negative, got {}",
                self.tol
            )));
        }
        Ok(())
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = ">")]
    Above,
}

impl Relation {
    fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Relation::AtMost => value <= threshold,
            Relation::AtLeast => value >= threshold,
            Relation::Above => value > threshold,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Above => ">",
        }
    }
}

/// One measured quantity against its threshold. NaN never passes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    fn new(criterion: u8, name: &str, value: f64, relation: Relation, threshold: f64) -> Self {
        Self {
            criterion,
            name: name.to_owned(),
            value,
            relation,
            threshold,
            pass: relation.holds(value, threshold),
        }
    }
}

/// Names of the ten acceptance criteria, indexed from 1.
pub const CRITERIA: [&str; 10] = [
    "mobius_kernel",
    "siegel_membership",
    "symplecticity",
    "holomorphy",
    "isometry",
    "finite_difference",
    "schottky",
    "rauch",
    "equivariance",
    "convergence",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub config: RunConfig,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub metrics: MetricsReport,
}

impl SuiteReport {
    /// Overall verdict per criterion, in order.
    pub fn criteria(&self) -> Vec<(u8, &'static str, bool)> {
        (1..=CRITERIA.len() as u8)
            .map(|id| {
                let pass = self
                    .checks
                    .iter()
                    .filter(|c| c.criterion == id)
                    .all(|c| c.pass);
                (id, CRITERIA[id as usize - 1], pass)
            })
            .collect()
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(self)? + "\n"),
            Format::Csv => {
                let mut out = String::from("criterion,name,value,relation,threshold,pass\n");
                for c in &self.checks {
                    writeln!(
                        out,
                        "{},{},{:e},{},{:e},{}",
                        c.criterion,
                        c.name,
                        c.value,
                        c.relation.symbol(),
                        c.threshold,
                        c.pass
                    )
                    .expect("write to String");
                }
                Ok(out)
            }
        }
    }
}

/// Random sl2-normalized field with `|u_m| = 2^{-m}` and uniform phases,
/// `m = 2..=8`.
pub fn random_field(rng: &mut impl Rng) -> Result<VectorField> {
    let modes: Vec<(usize, Complex64)> = (2..=RANDOM_TOP_MODE)
        .map(|m| {
            let phase = rng.random_range(-PI..PI);
            (m, Complex64::from_polar(0.5f64.powi(m as i32), phase))
        })
        .collect();
    VectorField::from_positive_modes(RANDOM_TOP_MODE, modes)
}

/// `θ + Σ_{m=2..8} 2s·2^{-m} cos(mθ + α_m)` with uniform `α_m`, redrawn
/// while `min φ′ < 0.3`.
pub fn random_diffeo(rng: &mut impl Rng, m: usize) -> Result<CircleDiffeo> {
    loop {
        let coeffs: Vec<(usize, Complex64)> = (2..=RANDOM_TOP_MODE)
            .map(|k| {
                let phase = rng.random_range(-PI..PI);
                let amp = RANDOM_DIFFEO_AMPLITUDE * 0.5f64.powi(k as i32);
                (k, Complex64::from_polar(amp, phase))
            })
            .collect();
        let series = CircleSeries::real_from_positive(RANDOM_TOP_MODE, coeffs)?;
        match CircleDiffeo::new(&series, m) {
            Ok(phi) if phi.min_derivative() >= RANDOM_DIFFEO_MIN_DERIVATIVE => return Ok(phi),
            Ok(_) | Err(Error::NotDiffeomorphism(_)) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Uniform in the disc `|a| <= 0.5`, uniform rotation.
pub fn random_mobius(rng: &mut impl Rng) -> Result<MobiusParams> {
    let r = RANDOM_MOBIUS_RADIUS * rng.random::<f64>().sqrt();
    let a = Complex64::from_polar(r, rng.random_range(-PI..PI));
    MobiusParams::new(a, rng.random_range(-PI..PI))
}

/// Symmetric matrix with entries uniform in the unit square.
pub fn random_symmetric(rng: &mut impl Rng, n: usize) -> CMatrix {
    let m = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    (&m + m.transpose()) * Complex64::new(0.5, 0.0)
}

fn period(phi: &CircleDiffeo, cfg: &RunConfig) -> Result<CMatrix> {
    Ok(period_point(phi, cfg.n_modes, cfg.samples, cfg.interior)?
        .0
        .z)
}

/// Runs one criterion (`1..=10`).
pub fn run_criterion(id: u8, cfg: &RunConfig) -> Result<Vec<Check>> {
    cfg.validate()?;
    let mut rng = cfg.rng(id as u64);
    let (n, m, k) = (cfg.n_modes, cfg.samples, cfg.interior);
    use Relation::*;
    let checks = match id {
        1 => {
            let (mut z_max, mut b_max) = (0.0f64, 0.0f64);
            for _ in 0..10 {
                let phi = CircleDiffeo::mobius_boundary(&random_mobius(&mut rng)?, m)?;
                b_max = b_max.max(max_abs(&blocks(&phi, n, m)?.b()));
                z_max = z_max.max(max_abs(&period(&phi, cfg)?));
            }
            vec![
                Check::new(1, "mobius_kernel.period_max", z_max, AtMost, 1e-8),
                Check::new(1, "mobius_kernel.b_block_max", b_max, AtMost, 1e-8),
            ]
        }
        2 | 3 => {
            // Both criteria run on the same ten diffeomorphisms.
            let mut rng = cfg.rng(2);
            let (mut sym, mut eig, mut symp) = (0.0f64, f64::INFINITY, 0.0f64);
            for _ in 0..10 {
                let phi = random_diffeo(&mut rng, m)?;
                if id == 2 {
                    let d = siegel_membership(&period(&phi, cfg)?, k, cfg.tol);
                    sym = sym.max(d.symmetry_residual);
                    eig = eig.min(d.min_eig);
                } else {
                    symp = symp.max(check_symplectic(&blocks(&phi, n, m)?, k)?);
                }
            }
            if id == 2 {
                vec![
                    Check::new(2, "siegel.symmetry_residual", sym, AtMost, cfg.tol),
                    Check::new(2, "siegel.min_eig", eig, Above, 0.0),
                ]
            } else {
                vec![Check::new(3, "symplectic.residual", symp, AtMost, 1e-8)]
            }
        }
        4 => {
            let (mut closed, mut direct) = (0.0f64, 0.0f64);
            for _ in 0..20 {
                let v = random_field(&mut rng)?;
                closed = closed.max(holomorphy_check(&v, n)?);
                let lhs = d_pi_direct(&v.apply_j()?, n)?;
                let rhs = d_pi_direct(&v, n)?.scale(Complex64::i());
                direct = direct.max(lhs.max_abs_diff(&rhs));
            }
            vec![
                Check::new(4, "holomorphy.max", closed, AtMost, 1e-12),
                Check::new(4, "holomorphy.direct_max", direct, AtMost, 1e-12),
            ]
        }
        5 => {
            let pairs = (0..20)
                .map(|_| Ok((random_field(&mut rng)?, random_field(&mut rng)?)))
                .collect::<Result<Vec<_>>>()?;
            let ratio = isometry_ratio(&pairs, n)?;
            vec![
                Check::new(5, "isometry.spread", ratio.spread, AtMost, 1e-10),
                Check::new(5, "isometry.constant", ratio.c, AtLeast, 1.0 / 6.0 - 1e-9),
                Check::new(5, "isometry.constant", ratio.c, AtMost, 1.0 / 6.0 + 1e-9),
            ]
        }
        6 => {
            let v = VectorField::new(CircleSeries::sine(2, 2, 1.0)?)?;
            let lambda = d_pi(&v, n)?;
            let mut errors = Vec::new();
            let mut z11 = Complex64::new(f64::NAN, 0.0);
            for t in [1e-2, 5e-3] {
                let z = period(&CircleDiffeo::flow(&v, t, 64, m)?, cfg)?;
                let quotient = z.map(|x| x / t);
                if t == 1e-2 {
                    z11 = quotient[(0, 0)];
                }
                errors.push(interior_diff(&quotient, lambda.matrix(), k));
            }
            let ratio = errors[0] / errors[1];
            vec![
                Check::new(6, "finite_difference.halving_ratio", ratio, AtLeast, 1.6),
                Check::new(6, "finite_difference.halving_ratio", ratio, AtMost, 2.4),
                Check::new(6, "finite_difference.z11_over_t", z11.re, AtLeast, -0.51),
                Check::new(6, "finite_difference.z11_over_t", z11.re, AtMost, -0.49),
                Check::new(
                    6,
                    "finite_difference.z11_over_t_imag",
                    z11.im.abs(),
                    AtMost,
                    0.01,
                ),
            ]
        }
        7 => {
            let mut image = 0.0f64;
            for _ in 0..20 {
                image = image.max(schottky_residual(&d_pi(&random_field(&mut rng)?, n)?));
            }
            let mut generic = f64::INFINITY;
            for _ in 0..20 {
                let hom = TangentHom::new(random_symmetric(&mut rng, n))?;
                generic = generic.min(schottky_residual(&hom));
            }
            vec![
                Check::new(7, "schottky.image_residual", image, AtMost, 1e-12),
                Check::new(
                    7,
                    "schottky.non_hankel_residual_min",
                    generic,
                    AtLeast,
                    1e-2,
                ),
            ]
        }
        8 => {
            let (n_r, n_a) = (16, 8 * n);
            let zbar = disc_moments(&BeltramiCoefficient::zbar_pow(1), 2 * n, n_r, n_a)?;
            let zbar2 = disc_moments(&BeltramiCoefficient::zbar_pow(2), 2 * n, n_r, n_a)?;
            let t = 1e-2;
            let entry = rauch_first_variation(&zbar, t, n)?[(0, 1)];
            let mut consistency = 0.0f64;
            for mu in [&zbar, &zbar2] {
                let via_vector = schottky_tangent(&beltrami_to_vector(mu), n);
                let rauch = rauch_first_variation(mu, 1.0, n)?;
                consistency = consistency.max(max_abs(&(via_vector.matrix() - rauch)));
            }
            vec![
                Check::new(
                    8,
                    "rauch.m3_error",
                    (zbar.get(3) - PI / 2.0).norm(),
                    AtMost,
                    1e-10,
                ),
                Check::new(
                    8,
                    "rauch.entry_1_2_error",
                    (entry - t * 2f64.sqrt() / 2.0).norm(),
                    AtMost,
                    1e-10,
                ),
                Check::new(
                    8,
                    "rauch.m4_error",
                    (zbar2.get(4) - PI / 3.0).norm(),
                    AtMost,
                    1e-10,
                ),
                Check::new(8, "rauch.schottky_consistency", consistency, AtMost, 0.0),
            ]
        }
        9 => {
            let mut worst = 0.0f64;
            for _ in 0..5 {
                let phi = random_diffeo(&mut rng, m)?;
                let psi = random_diffeo(&mut rng, m)?;
                let composed = period(&phi.compose(&psi)?, cfg)?;
                let acted = mobius_act(&blocks(&psi, n, m)?, &period(&phi, cfg)?)?;
                worst = worst.max(interior_diff(&composed, &acted, k));
            }
            vec![Check::new(
                9,
                "equivariance.residual",
                worst,
                AtMost,
                cfg.tol,
            )]
        }
        10 => {
            let fine = RunConfig {
                n_modes: 2 * n,
                samples: 2 * m,
                ..cfg.clone()
            };
            let mut worst = 0.0f64;
            for p in convergence_diffeos()? {
                let coarse = period(&CircleDiffeo::new(&p, m)?, cfg)?;
                let refined = period(&CircleDiffeo::new(&p, 2 * m)?, &fine)?;
                worst = worst.max(interior_diff(&coarse, &refined, k));
            }
            vec![Check::new(
                10,
                "convergence.doubling_delta",
                worst,
                AtMost,
                1e-8,
            )]
        }
        _ => {
            return Err(Error::InvalidArgument(format!(
                "criterion {id} outside 1..={}",
                CRITERIA.len()
            )))
        }
    };
    Ok(checks)
}

/// Analytic perturbations used by the convergence criterion.
pub fn convergence_diffeos() -> Result<Vec<CircleSeries>> {
    Ok(vec![
        CircleSeries::sine(2, 2, 0.1)?,
        CircleSeries::sine(3, 3, 0.2)?,
        CircleSeries::cosine(4, 1, 0.15)?.add(&CircleSeries::sine(4, 4, 0.03)?),
    ])
}

/// Metric constants gathered from the holomorphy, isometry and Schottky checks.
fn metrics(checks: &[Check]) -> MetricsReport {
    let value = |name: &str| {
        checks
            .iter()
            .filter(|c| c.name == name)
            .map(|c| c.value)
            .fold(f64::NAN, f64::max)
    };
    MetricsReport {
        c_mean: value("isometry.constant"),
        c_spread: value("isometry.spread"),
        holomorphy_max: value("holomorphy.max").max(value("holomorphy.direct_max")),
        schottky_residual: value("schottky.image_residual"),
    }
}

/// All ten criteria.
pub fn run_verify(cfg: &RunConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let mut checks = Vec::new();
    for id in 1..=CRITERIA.len() as u8 {
        checks.extend(run_criterion(id, cfg)?);
    }
    let metrics = metrics(&checks);
    Ok(SuiteReport {
        config: cfg.clone(),
        pass: checks.iter().all(|c| c.pass),
        checks,
        metrics,
    })
}

/// One resolution of a sweep. Residuals are measured on the leading
/// `min(interior, N/2)` block; `z_delta` compares with the previous row on
/// the smaller of the two blocks and is absent on the first row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n_modes: usize,
    pub samples: usize,
    pub interior: usize,
    pub symplectic_residual: f64,
    pub symmetry_residual: f64,
    pub z_delta: Option<f64>,
    pub cond_a: f64,
}

/// Period matrices of the barycentric representative of `phi` at each
/// `(N, M)`. The conditioning guard is lifted so growth of `cond(A)` shows in
/// the output rather than aborting the sweep.
pub fn sweep(
    phi: &CircleDiffeo,
    resolutions: &[(usize, usize)],
    interior: usize,
) -> Result<Vec<SweepRow>> {
    if resolutions.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::InvalidArgument(
            "sweep resolutions must have strictly increasing N".into(),
        ));
    }
    let rep = phi.barycentric_representative()?;
    let mut rows = Vec::with_capacity(resolutions.len());
    let mut prev: Option<(CMatrix, usize)> = None;
    for &(n, m) in resolutions {
        let k = interior.min(n / 2).max(1);
        let bl = blocks(&rep.resample(m)?, n, m)?;
        let symplectic_residual = check_symplectic(&bl, k.min(n / 2))?;
        let (z, cond_a, symmetry_residual) = match period_matrix_with(&bl, f64::INFINITY, k) {
            Ok(p) => (Some(p.z), p.cond_a, p.symmetry_residual),
            Err(Error::Singular(_)) => (None, linalg::condition_number(&bl.a()), f64::NAN),
            Err(e) => return Err(e),
        };
        let z_delta = match (&prev, &z) {
            (Some((zp, kp)), Some(z)) => Some(interior_diff(zp, z, (*kp).min(k))),
            (Some(_), None) => Some(f64::NAN),
            _ => None,
        };
        rows.push(SweepRow {
            n_modes: n,
            samples: m,
            interior: k,
            symplectic_residual,
            symmetry_residual,
            z_delta,
            cond_a,
        });
        prev = z.map(|z| (z, k));
    }
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "n_modes,samples,interior,symplectic_residual,symmetry_residual,z_delta,cond_a\n",
    );
    for r in rows {
        let delta = r.z_delta.map_or(String::new(), |d| format!("{d:e}"));
        writeln!(
            out,
            "{},{},{},{:e},{:e},{},{:e}",
            r.n_modes,
            r.samples,
            r.interior,
            r.symplectic_residual,
            r.symmetry_residual,
            delta,
            r.cond_a
        )
        .expect("write to String");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(RunConfig::default().validate().is_ok());
        let bad = [
            RunConfig {
                samples: 128,
                ..Default::default()
            },
            RunConfig {
                samples: 3000,
                ..Default::default()
            },
            RunConfig {
                interior: 17,
                ..Default::default()
            },
            RunConfig {
                interior: 0,
                ..Default::default()
            },
            RunConfig {
                tol: -1.0,
                ..Default::default()
            },
            RunConfig {
                tol: f64::NAN,
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
        assert!(RunConfig {
            tol: 0.0,
            ..Default::default()
        }
        .validate()
        .is_ok());
    }

    #[test]
    fn random_inputs_respect_their_contracts() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let v = random_field(&mut rng).unwrap();
            assert!(v.is_sl2_normalized());
            for m in 2..=8i64 {
                assert!((v.coeff(m).norm() - 0.5f64.powi(m as i32)).abs() < 1e-15);
            }
            assert!(random_diffeo(&mut rng, 512).unwrap().min_derivative() >= 0.3);
            assert!(random_mobius(&mut rng).unwrap().a().norm() <= 0.5);
            let s = random_symmetric(&mut rng, 5);
            assert_eq!(s, s.transpose());
        }
    }

    #[test]
    fn streams_are_deterministic_and_independent() {
        let cfg = RunConfig::default();
        let draw = |stream| random_field(&mut cfg.rng(stream)).unwrap();
        assert_eq!(draw(4), draw(4));
        assert_ne!(draw(4), draw(5));
    }

    #[test]
    fn relations() {
        assert!(Relation::AtMost.holds(1.0, 1.0));
        assert!(!Relation::Above.holds(0.0, 0.0));
        assert!(!Relation::AtMost.holds(f64::NAN, 1.0));
        assert!(!Relation::AtLeast.holds(f64::NAN, 1.0));
    }

    #[test]
    fn identity_sweep_is_clean() {
        let id = CircleDiffeo::identity(1024).unwrap();
        let rows = sweep(&id, &[(8, 256), (16, 512)], 16).unwrap();
        assert_eq!(rows[0].z_delta, None);
        for r in &rows {
            assert!(r.symplectic_residual < 1e-14 && r.symmetry_residual < 1e-14);
            assert!((r.cond_a - 1.0).abs() < 1e-12);
        }
        assert!(rows[1].z_delta.unwrap() < 1e-14);
        assert!(sweep(&id, &[(16, 512), (8, 256)], 4).is_err());
        let csv = sweep_csv(&rows);
        assert!(csv.lines().nth(1).unwrap().starts_with("8,256,4,"));
        assert!(csv.lines().nth(1).unwrap().contains(",,"));
    }

    #[test]
    fn unknown_criterion_is_rejected() {
        assert!(run_criterion(11, &RunConfig::default()).is_err());
        assert!(run_criterion(0, &RunConfig::default()).is_err());
    }
}
