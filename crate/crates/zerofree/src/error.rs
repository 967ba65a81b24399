use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("root converged outside its strip: n = {n}, zeta = {re} {im:+}i")]
    StrayRoot { n: i64, re: f64, im: f64 },
    #[error("pole table error: {0}")]
    PoleTable(String),
    #[error("no root: {0}")]
    NoRoot(String),
    #[error("horizon too short: {0}")]
    Horizon(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("singular basis")]
    SingularBasis,
    #[error("enumeration exploded: {0}")]
    Explosion(String),
    #[error("first shell has {pairs} primitive pairs; sigma tilde is +inf")]
    MultipleMinima { pairs: usize },
    #[error("tail bound not met: {0}")]
    Tail(String),
    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),
    #[error("zero on the contour after {0} jitter attempts")]
    BoundaryZero(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn no_convergence<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Convergence(msg.into()))
}
