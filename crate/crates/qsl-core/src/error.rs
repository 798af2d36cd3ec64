use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model specification: {0}")]
    InvalidSpec(String),

    #[error("basis dimension {dim} exceeds the configured maximum {max}")]
    CapacityExceeded { dim: usize, max: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("eigensolver failed to converge for matrix {fingerprint}")]
    NonConvergence { fingerprint: String },

    #[error("spectral decomposition violates {check} (residual {residual:.3e}, allowed {allowed:.3e})")]
    InvariantViolation {
        check: &'static str,
        residual: f64,
        allowed: f64,
    },

    #[error("state is stationary under the post-quench Hamiltonian (energy uncertainty is zero)")]
    StationaryState,

    #[error("Margolus-Levitin bound undefined: {0}")]
    MlUndefined(String),

    #[error("overlap {0} outside [0, 1]")]
    OverlapOutOfRange(f64),

    #[error("no sign change of the bound difference on the scan grid")]
    NoIntersection,

    #[error("multiple sign changes of the bound difference; brackets: {0:?}")]
    AmbiguousIntersection(Vec<(f64, f64)>),

    #[error("1 - cos(2*pi*alpha) vanishes; the geometric cosine sum has no closed form at alpha = {0}")]
    SingularAlpha(f64),

    #[error("missing parameter: {0}")]
    MissingParameter(&'static str),

    #[error("insufficient spectrum: {0}")]
    InsufficientSpectrum(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("cache error: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
