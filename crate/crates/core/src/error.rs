use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sample count {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("insufficient resolution for {what}: need at least {needed}, got {got}")]
    Undersampled {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("not a diffeomorphism: min φ′ = {0:.3e} on the sampling grid")]
    NotDiffeomorphism(f64),

    #[error("vector field is not sl2-normalized (u_-1 = u_0 = u_1 = 0 required)")]
    NotNormalized,

    #[error("series is not real-valued (c_-m must equal conj(c_m))")]
    NotReal,

    #[error("series has negative-mode content; expected an element of W+")]
    NotInWPlus,

    #[error("mode {mode} outside the admissible range (1 <= |m| <= {n_modes})")]
    BadMode { mode: i64, n_modes: usize },

    #[error(
        "ill-conditioned truncation (cond(A) = {0:.3e}); increase N/M or reduce diffeo amplitude"
    )]
    IllConditioned(f64),

    #[error("singular matrix: smallest singular value {0:.3e}")]
    Singular(f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("{what} did not converge (last residual {residual:.3e})")]
    NoConvergence { what: &'static str, residual: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("spec parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures caused by numerical conditioning rather than bad input.
    pub fn is_conditioning(&self) -> bool {
        matches!(self, Error::IllConditioned(_) | Error::Singular(_))
    }
}
