//! JSON input specs and JSON/CSV output formats.
//!
//! Series literals are arrays of `{"m": int, "re": float, "im": float}`.
//! Omitted modes are zero and `m = 0` is rejected. Matrices serialize as
//! `{"n": N, "data": [[re, im], ...]}` in row-major order, or as CSV rows
//! `p,q,re,im` with 1-based indices.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::beltrami::BeltramiCoefficient;
use crate::diffeo::{CircleDiffeo, MobiusParams};
use crate::error::{Error, Result};
use crate::fourier::{CircleSeries, VectorField};
use crate::linalg::CMatrix;

/// Tolerance for the conjugate-symmetry check on literals meant to be real.
const REALITY_TOL: f64 = 1e-12;

/// RK4 steps used by flow specs that do not set `steps`.
pub const DEFAULT_FLOW_STEPS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeLiteral {
    pub m: i64,
    pub re: f64,
    pub im: f64,
}

/// Series from a literal, with cutoff `max |m|` (at least 1).
pub fn series_from_literal(modes: &[ModeLiteral]) -> Result<CircleSeries> {
    let n = modes
        .iter()
        .map(|l| l.m.unsigned_abs() as usize)
        .max()
        .unwrap_or(0)
        .max(1);
    for l in modes {
        if !(l.re.is_finite() && l.im.is_finite()) {
            return Err(Error::NonFinite("series literal"));
        }
    }
    CircleSeries::from_modes(n, modes.iter().map(|l| (l.m, Complex64::new(l.re, l.im))))
}

/// Real series from a literal; both `m` and `-m` must be listed.
pub fn real_series_from_literal(modes: &[ModeLiteral]) -> Result<CircleSeries> {
    series_from_literal(modes)?.into_real(REALITY_TOL)
}

pub fn series_to_literal(series: &CircleSeries) -> Vec<ModeLiteral> {
    series
        .modes()
        .filter(|(m, c)| *m != 0 && c.norm() != 0.0)
        .map(|(m, c)| ModeLiteral {
            m,
            re: c.re,
            im: c.im,
        })
        .collect()
}

/// Recipe for a circle diffeomorphism.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DiffeoSpec {
    /// `θ + p(θ)` with `p` given by its Fourier literal.
    Fourier { coeffs: Vec<ModeLiteral> },
    /// Boundary trace of `z ↦ e^{iβ}(z - a)/(1 - āz)`.
    Mobius { a_re: f64, a_im: f64, beta: f64 },
    /// Time-`t` flow of the real vector field `field(θ) ∂/∂θ`.
    Flow {
        field: Vec<ModeLiteral>,
        t: f64,
        #[serde(default = "default_steps")]
        steps: usize,
    },
    /// `of[0] ∘ of[1] ∘ ... ∘ of[k-1]` (the last entry is applied first).
    Compose { of: Vec<DiffeoSpec> },
}

fn default_steps() -> usize {
    DEFAULT_FLOW_STEPS
}

impl DiffeoSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Samples the diffeomorphism on an `m`-point grid.
    pub fn build(&self, m: usize) -> Result<CircleDiffeo> {
        match self {
            DiffeoSpec::Fourier { coeffs } => {
                CircleDiffeo::new(&real_series_from_literal(coeffs)?, m)
            }
            DiffeoSpec::Mobius { a_re, a_im, beta } => {
                let params = MobiusParams::new(Complex64::new(*a_re, *a_im), *beta)?;
                CircleDiffeo::mobius_boundary(&params, m)
            }
            DiffeoSpec::Flow { field, t, steps } => {
                if !t.is_finite() {
                    return Err(Error::NonFinite("flow time"));
                }
                let v = VectorField::new(real_series_from_literal(field)?)?;
                CircleDiffeo::flow(&v, *t, *steps, m)
            }
            DiffeoSpec::Compose { of } => {
                let (last, rest) = of.split_last().ok_or_else(|| {
                    Error::InvalidArgument("compose needs at least one factor".into())
                })?;
                rest.iter()
                    .rev()
                    .try_fold(last.build(m)?, |acc, f| f.build(m)?.compose(&acc))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTerm {
    pub i: u32,
    pub j: u32,
    pub re: f64,
    pub im: f64,
}

/// Recipe for a Beltrami coefficient on the disc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BeltramiSpec {
    /// `μ = z̄^k`.
    ZbarPow { k: u32 },
    /// `μ = re + i·im`.
    Const { re: f64, im: f64 },
    /// `μ = Σ c·z^i·z̄^j`.
    Poly { terms: Vec<PolyTerm> },
}

impl BeltramiSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Highest power of `z` or `z̄` appearing in `μ`.
    pub fn degree(&self) -> u32 {
        match self {
            BeltramiSpec::ZbarPow { k } => *k,
            BeltramiSpec::Const { .. } => 0,
            BeltramiSpec::Poly { terms } => terms.iter().map(|t| t.i + t.j).max().unwrap_or(0),
        }
    }

    pub fn build(&self) -> Result<BeltramiCoefficient> {
        match self {
            BeltramiSpec::ZbarPow { k } => Ok(BeltramiCoefficient::zbar_pow(*k)),
            BeltramiSpec::Const { re, im } => {
                check_finite(&[*re, *im])?;
                Ok(BeltramiCoefficient::constant(Complex64::new(*re, *im)))
            }
            BeltramiSpec::Poly { terms } => {
                let terms: Vec<_> = terms
                    .iter()
                    .map(|t| {
                        check_finite(&[t.re, t.im])?;
                        Ok((t.i, t.j, Complex64::new(t.re, t.im)))
                    })
                    .collect::<Result<_>>()?;
                Ok(BeltramiCoefficient::polynomial(&terms))
            }
        }
    }
}

fn check_finite(values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("Beltrami spec"))
    }
}

/// Output format of matrices and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::InvalidArgument(format!(
                "unknown format {other:?} (expected json or csv)"
            ))),
        }
    }
}

/// Square matrix in its JSON shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub n: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        let n = m.nrows();
        let data = (0..n)
            .flat_map(|p| (0..m.ncols()).map(move |q| (p, q)))
            .map(|(p, q)| [m[(p, q)].re, m[(p, q)].im])
            .collect();
        Self { n, data }
    }
}

impl TryFrom<MatrixJson> for CMatrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        if j.data.len() != j.n * j.n {
            return Err(Error::DimensionMismatch(j.data.len(), j.n * j.n));
        }
        Ok(CMatrix::from_row_iterator(
            j.n,
            j.n,
            j.data.iter().map(|&[re, im]| Complex64::new(re, im)),
        ))
    }
}

pub fn matrix_to_json(m: &CMatrix) -> Result<String> {
    Ok(serde_json::to_string(&MatrixJson::from(m))?)
}

pub fn matrix_from_json(text: &str) -> Result<CMatrix> {
    serde_json::from_str::<MatrixJson>(text)?.try_into()
}

/// `p,q,re,im` rows, 1-based, row-major, with a header line.
pub fn matrix_to_csv(m: &CMatrix) -> String {
    let mut out = String::from("p,q,re,im\n");
    for p in 0..m.nrows() {
        for q in 0..m.ncols() {
            let z = m[(p, q)];
            writeln!(out, "{},{},{},{}", p + 1, q + 1, z.re, z.im).expect("write to String");
        }
    }
    out
}

pub fn matrix_from_csv(text: &str) -> Result<CMatrix> {
    let mut entries = Vec::new();
    for (line_no, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let bad = || Error::InvalidArgument(format!("malformed CSV row {}: {line:?}", line_no + 1));
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [p, q, re, im] = fields[..] else {
            return Err(bad());
        };
        let p: usize = p.parse().map_err(|_| bad())?;
        let q: usize = q.parse().map_err(|_| bad())?;
        let z = Complex64::new(
            re.parse().map_err(|_| bad())?,
            im.parse().map_err(|_| bad())?,
        );
        if p == 0 || q == 0 {
            return Err(bad());
        }
        entries.push((p, q, z));
    }
    let n = entries.iter().map(|e| e.0.max(e.1)).max().unwrap_or(0);
    if entries.len() != n * n {
        return Err(Error::DimensionMismatch(entries.len(), n * n));
    }
    let mut m = CMatrix::zeros(n, n);
    for (p, q, z) in entries {
        m[(p - 1, q - 1)] = z;
    }
    Ok(m)
}

/// Matrix rendered in the requested format.
pub fn render_matrix(m: &CMatrix, format: Format) -> Result<String> {
    match format {
        Format::Json => matrix_to_json(m),
        Format::Csv => Ok(matrix_to_csv(m)),
    }
}
