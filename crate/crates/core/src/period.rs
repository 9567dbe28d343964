//! The period matrix `Z = B̄A⁻¹` and the Siegel disc.
//!
//! `Z_{rs}` is the `e_{-r}` component of the image of `e_s` under the graph
//! operator `W₊ → W₋`, so symmetry reads `Z_{rs} = Z_{sr}` (plain transpose).

use serde::Serialize;

use crate::diffeo::CircleDiffeo;
use crate::error::{Error, Result};
use crate::linalg::{self, conj, CMatrix};
use crate::segal::{blocks, SymplecticBlocks};

/// Largest accepted condition number of the truncated `A` block.
pub const COND_MAX: f64 = 1e8;

/// Siegel-disc diagnostics of a matrix on its leading block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SiegelDiagnostics {
    /// `max |Z_rs - Z_sr|`.
    pub symmetry_residual: f64,
    /// Smallest eigenvalue of the Hermitian part of `I - Z·conj(Z)`.
    pub min_eig: f64,
    pub member: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodPoint {
    pub z: CMatrix,
    pub cond_a: f64,
    pub symmetry_residual: f64,
    pub min_eig_i_minus_zzbar: f64,
    /// Block size the diagnostics were evaluated on.
    pub interior: usize,
}

impl PeriodPoint {
    pub fn n_modes(&self) -> usize {
        self.z.nrows()
    }
}

/// `Π = B̄·A⁻¹` by a column-pivoted solve, with diagnostics on the interior
/// block `N/2`. Fails when `cond(A) > COND_MAX`.
pub fn period_matrix(blocks: &SymplecticBlocks) -> Result<PeriodPoint> {
    period_matrix_with(blocks, COND_MAX, blocks.n_modes() / 2)
}

pub fn period_matrix_with(
    blocks: &SymplecticBlocks,
    cond_max: f64,
    interior: usize,
) -> Result<PeriodPoint> {
    let a = blocks.a();
    let cond_a = linalg::condition_number(&a);
    if cond_a.is_nan() || cond_a > cond_max {
        return Err(Error::IllConditioned(cond_a));
    }
    let z = linalg::solve_right(&a, &conj(&blocks.b()))?;
    let diag = siegel_membership(&z, interior, f64::INFINITY);
    Ok(PeriodPoint {
        z,
        cond_a,
        symmetry_residual: diag.symmetry_residual,
        min_eig_i_minus_zzbar: diag.min_eig,
        interior,
    })
}

/// `Π(φ)` evaluated at the barycentric representative `M∘φ` of the coset
/// `Möb∘φ` (see [`CircleDiffeo::barycentric_representative`]).
///
/// `Π` is constant on the coset, and the representative has its Möbius part
/// removed, which keeps the truncated `A` block well conditioned. Möbius maps
/// themselves land on a rotation. Returns the point and the blocks it was
/// computed from.
pub fn period_point(
    phi: &CircleDiffeo,
    n_modes: usize,
    m: usize,
    interior: usize,
) -> Result<(PeriodPoint, SymplecticBlocks)> {
    let rep = phi.resample(m)?.barycentric_representative()?;
    let bl = blocks(&rep, n_modes, m)?;
    let point = period_matrix_with(&bl, COND_MAX, interior)?;
    Ok((point, bl))
}

/// Symmetry residual and positivity of `I - Z·conj(Z)` on the leading
/// `interior × interior` block. Membership requires residual `<= tol` and a
/// positive smallest eigenvalue.
pub fn siegel_membership(z: &CMatrix, interior: usize, tol: f64) -> SiegelDiagnostics {
    let zi = linalg::interior(z, interior);
    let symmetry_residual = linalg::max_abs(&(&zi - zi.transpose()));
    let k = zi.nrows();
    let h = CMatrix::identity(k, k) - &zi * conj(&zi);
    let min_eig = linalg::min_hermitian_eigenvalue(&h);
    SiegelDiagnostics {
        symmetry_residual,
        min_eig,
        member: symmetry_residual <= tol && min_eig > 0.0,
    }
}

/// `Z ↦ (ĀZ + B̄)(BZ + A)⁻¹`.
///
/// With `T_ψ T_φ = T_{φ∘ψ}` this gives `Π(φ∘ψ) = mobius_act(blocks(ψ), Π(φ))`.
pub fn mobius_act(blocks: &SymplecticBlocks, z: &CMatrix) -> Result<CMatrix> {
    let n = blocks.n_modes();
    if z.nrows() != n || z.ncols() != n {
        return Err(Error::DimensionMismatch(z.nrows(), n));
    }
    let (a, b) = (blocks.a(), blocks.b());
    let denom = &b * z + &a;
    let sv = linalg::singular_values(&denom);
    let (hi, lo) = (sv[0], *sv.last().expect("non-empty"));
    if lo <= 1e-12 * hi.max(1.0) {
        return Err(Error::Singular(lo));
    }
    let numer = conj(&a) * z + conj(&b);
    linalg::solve_right(&denom, &numer)
}

/// `Π` as a JSON-friendly diagnostics record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodDiagnostics {
    #[serde(rename = "cond_A")]
    pub cond_a: f64,
    pub sym_residual: f64,
    pub min_eig: f64,
}

impl From<&PeriodPoint> for PeriodDiagnostics {
    fn from(p: &PeriodPoint) -> Self {
        Self {
            cond_a: p.cond_a,
            sym_residual: p.symmetry_residual,
            min_eig: p.min_eig_i_minus_zzbar,
        }
    }
}
