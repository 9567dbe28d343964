//! Block matrices of the symplectic operator `T_φ: h ↦ h∘φ`.
//!
//! In the basis `e_k = e^{ikθ}/√|k|` of `V_ℂ = W₊ ⊕ W₋`,
//!
//! ```text
//!        ⎡ A  B ⎤        a_pq = (1/2π) √(p/q) ∫ e^{iqφ(θ)} e^{-ipθ} dθ
//! T_φ =  ⎢      ⎥ ,
//!        ⎣ B̄  Ā ⎦        b_rs = (1/2π) √(r/s) ∫ e^{-isφ(θ)} e^{-irθ} dθ
//! ```
//!
//! Each column is one FFT of the sampled integrand. Since the FFT returns every
//! output mode at once, the blocks keep the rows `p = 1..=M/4` ("extended"
//! rows) while the square `N × N` part is what the period matrix uses.
//!
//! `T_ψ T_φ = T_{φ∘ψ}`: the representation reverses the order of
//! composition, and [`compose_blocks`] is the plain matrix product
//! `T₁·T₂`.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use num_complex::Complex64;

use crate::diffeo::CircleDiffeo;
use crate::error::{Error, Result};
use crate::fft::Analyzer;
use crate::linalg::{conj, CMatrix};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticBlocks {
    a: CMatrix,
    b: CMatrix,
    n_modes: usize,
    samples_used: usize,
    source: u64,
}

impl SymplecticBlocks {
    /// Blocks of the identity operator.
    pub fn identity(n_modes: usize) -> Self {
        Self {
            a: CMatrix::identity(n_modes, n_modes),
            b: CMatrix::zeros(n_modes, n_modes),
            n_modes,
            samples_used: 0,
            source: 0,
        }
    }

    /// Assembles blocks from square `A`, `B`.
    pub fn from_square(a: CMatrix, b: CMatrix) -> Result<Self> {
        let n = a.ncols();
        for m in [&a, &b] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch(m.nrows(), n));
            }
        }
        Ok(Self {
            a,
            b,
            n_modes: n,
            samples_used: 0,
            source: 0,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Number of output modes kept per column (`>= N`).
    pub fn row_modes(&self) -> usize {
        self.a.nrows()
    }

    pub fn samples_used(&self) -> usize {
        self.samples_used
    }

    /// Hash of the sampled diffeomorphism the blocks were built from.
    pub fn source(&self) -> u64 {
        self.source
    }

    /// Square `A: W₊ → W₊`.
    pub fn a(&self) -> CMatrix {
        self.a.rows(0, self.n_modes).into_owned()
    }

    /// Square `B: W₋ → W₊`.
    pub fn b(&self) -> CMatrix {
        self.b.rows(0, self.n_modes).into_owned()
    }

    /// `A` with all extended rows.
    pub fn a_extended(&self) -> &CMatrix {
        &self.a
    }

    /// `B` with all extended rows.
    pub fn b_extended(&self) -> &CMatrix {
        &self.b
    }

    /// Full `2N × 2N` operator `[[A, B], [B̄, Ā]]`, ordered `e_1..e_N, e_{-1}..e_{-N}`.
    pub fn assemble(&self) -> CMatrix {
        let n = self.n_modes;
        let (a, b) = (self.a(), self.b());
        let mut t = CMatrix::zeros(2 * n, 2 * n);
        t.view_mut((0, 0), (n, n)).copy_from(&a);
        t.view_mut((0, n), (n, n)).copy_from(&b);
        t.view_mut((n, 0), (n, n)).copy_from(&conj(&b));
        t.view_mut((n, n), (n, n)).copy_from(&conj(&a));
        t
    }
}

/// Computes the blocks of `T_φ` with `N` modes from `M` samples (`M >= 8N`).
pub fn blocks(phi: &CircleDiffeo, n_modes: usize, m: usize) -> Result<SymplecticBlocks> {
    if n_modes == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    if m < 8 * n_modes {
        return Err(Error::Undersampled {
            what: "block quadrature (M >= 8N)",
            needed: 8 * n_modes,
            got: m,
        });
    }
    let phi = phi.resample(m)?;
    let rows = m / 4;
    let mut a = CMatrix::zeros(rows, n_modes);
    let mut b = CMatrix::zeros(rows, n_modes);
    let mut analyzer = Analyzer::new(m);
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for q in 1..=n_modes {
        for (sign, target) in [(1.0, &mut a), (-1.0, &mut b)] {
            for (slot, &x) in buf.iter_mut().zip(phi.samples()) {
                *slot = Complex64::from_polar(1.0, sign * q as f64 * x);
            }
            analyzer.coefficients_in_place(&mut buf);
            for p in 1..=rows {
                let v = buf[p] * (p as f64 / q as f64).sqrt();
                if !v.is_finite() {
                    return Err(Error::NonFinite("block integrand"));
                }
                target[(p - 1, q - 1)] = v;
            }
        }
    }
    debug_assert_eq!(analyzer.len(), m);
    let mut hasher = DefaultHasher::new();
    for x in phi.samples() {
        x.to_bits().hash(&mut hasher);
    }
    Ok(SymplecticBlocks {
        a,
        b,
        n_modes,
        samples_used: m,
        source: hasher.finish(),
    })
}

/// Max-abs entry of `Tᵀ𝕊T - 𝕊` on the basis vectors `e_{±k}`, `k <= interior`,
/// where `𝕊_{j,-j} = i·sgn(-j)` is the matrix of `S/2π`.
///
/// The images `T e_{±k}` are taken with every extended row the blocks carry,
/// so the only truncation is in the input modes.
pub fn check_symplectic(blocks: &SymplecticBlocks, interior: usize) -> Result<f64> {
    if interior > blocks.n_modes / 2 {
        return Err(Error::InvalidArgument(format!(
            "interior {interior} exceeds N/2 = {}",
            blocks.n_modes / 2
        )));
    }
    let (a, b) = (blocks.a_extended(), blocks.b_extended());
    // Image of e_{±k} split into W₊ and W₋ coordinates.
    let image = |k: i64| -> (Vec<Complex64>, Vec<Complex64>) {
        let col = k.unsigned_abs() as usize - 1;
        if k > 0 {
            (
                a.column(col).iter().copied().collect(),
                b.column(col).iter().map(|z| z.conj()).collect(),
            )
        } else {
            (
                b.column(col).iter().copied().collect(),
                a.column(col).iter().map(|z| z.conj()).collect(),
            )
        }
    };
    let form = |x: &(Vec<Complex64>, Vec<Complex64>), y: &(Vec<Complex64>, Vec<Complex64>)| {
        let plus_minus: Complex64 = x.0.iter().zip(&y.1).map(|(u, v)| u * v).sum();
        let minus_plus: Complex64 = x.1.iter().zip(&y.0).map(|(u, v)| u * v).sum();
        I * minus_plus - I * plus_minus
    };
    let modes: Vec<i64> = (1..=interior as i64).flat_map(|k| [k, -k]).collect();
    let images: Vec<_> = modes.iter().map(|&k| image(k)).collect();
    let mut residual: f64 = 0.0;
    for (x, &j) in images.iter().zip(&modes) {
        for (y, &k) in images.iter().zip(&modes) {
            let reference = if j == -k {
                I * (k.signum() as f64)
            } else {
                Complex64::new(0.0, 0.0)
            };
            residual = residual.max((form(x, y) - reference).norm());
        }
    }
    Ok(residual)
}

/// Block form of the product `T₁·T₂` (apply `b2` first). With the
/// order-reversing representation,
/// `compose_blocks(blocks(ψ), blocks(φ)) ≈ blocks(φ∘ψ)`.
pub fn compose_blocks(b1: &SymplecticBlocks, b2: &SymplecticBlocks) -> Result<SymplecticBlocks> {
    if b1.n_modes != b2.n_modes {
        return Err(Error::DimensionMismatch(b1.n_modes, b2.n_modes));
    }
    let (a1, bb1) = (b1.a(), b1.b());
    let (a2, bb2) = (b2.a(), b2.b());
    let a = &a1 * &a2 + &bb1 * conj(&bb2);
    let b = &a1 * &bb2 + &bb1 * conj(&a2);
    let mut hasher = DefaultHasher::new();
    (b1.source, b2.source).hash(&mut hasher);
    Ok(SymplecticBlocks {
        a,
        b,
        n_modes: b1.n_modes,
        samples_used: b1.samples_used.min(b2.samples_used),
        source: hasher.finish(),
    })
}
