//! Numerical period mapping from the homogeneous space `Diff(S¹)/Möb(S¹)`
//! into the infinite-dimensional Siegel disc, realized at finite Fourier
//! truncation.
//!
//! The crate is organized bottom-up:
//!
//! * [`fourier`]: truncated Fourier series on the circle, the symplectic form
//!   `S(σ,τ) = ∫ σ τ′ dθ`, the Hermitian pairing on `W₊` and the complex
//!   structure `J` on vector fields.
//! * [`diffeo`]: circle diffeomorphisms, Möbius boundary maps and flows.
//! * [`segal`]: the block matrices `A`, `B` of the symplectic operator
//!   `h ↦ h∘φ` in the basis `e_k = e^{ikθ}/√|k|`.
//! * [`period`]: the period matrix `Z = B̄A⁻¹`, Siegel-disc membership and the
//!   symplectic Möbius action `Z ↦ (ĀZ + B̄)(BZ + A)⁻¹`.
//! * [`tangent`]: the derivative of the period map, the Weil–Petersson and
//!   Siegel pairings and the Schottky tangent structure.
//! * [`beltrami`]: disc moments of a Beltrami coefficient and the first-order
//!   period variation.
//! * [`io`] and [`suite`]: JSON/CSV formats, property suites and sweeps used
//!   by the `periodlab` command-line tool.

pub mod beltrami;
pub mod diffeo;
mod error;
mod fft;
pub mod fourier;
pub mod io;
pub mod linalg;
pub mod period;
pub mod segal;
pub mod suite;
pub mod tangent;

pub use num_complex::Complex64;

pub use crate::beltrami::{
    beltrami_to_vector, disc_moments, rauch_first_variation, BeltramiCoefficient, MomentSequence,
};
pub use crate::diffeo::{CircleDiffeo, MobiusParams, DELTA_FLOOR};
pub use crate::error::{Error, Result};
pub use crate::fourier::{
    analyze, analyze_real, basis_vector, hermitian_pairing, project_minus, project_plus,
    symplectic_form, synthesize, CircleSeries, VectorField,
};
pub use crate::linalg::CMatrix;
pub use crate::period::{
    mobius_act, period_matrix, period_matrix_with, period_point, siegel_membership,
    PeriodDiagnostics, PeriodPoint, SiegelDiagnostics, COND_MAX,
};
pub use crate::segal::{blocks, check_symplectic, compose_blocks, SymplecticBlocks};
pub use crate::tangent::{
    d_pi, d_pi_direct, holomorphy_check, isometry_ratio, schottky_residual, schottky_tangent,
    siegel_metric, wp_metric, IsometryRatio, TangentHom,
};
