use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("singular point: {0}")]
    Singular(String),

    /// Consecutive samples of a tracked logarithm differ by too much to pick a branch.
    #[error("branch jump of {jump:.4} rad between samples {index} and {next}; refine the grid", next = .index + 1)]
    BranchJump { index: usize, jump: f64 },

    #[error("coefficient norm {0} is not below 1")]
    NotQuasiconformal(f64),

    #[error("degenerate motion: |m lambda / k| = {0} >= 1")]
    DegenerateMotion(f64),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("no convergence after {} iterations, last residual {:e}", .history.len(), .history.last().copied().unwrap_or(f64::NAN))]
    NoConvergence { history: Vec<f64> },

    #[error("point {0} lies outside the solver interior")]
    Extrapolation(Complex64),

    #[error("injectivity violation: f(x+t) = f(x) at t = {0:e}")]
    Injectivity(f64),

    #[error("lambda {0} is not in the motion cache")]
    CacheMiss(Complex64),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn finite(x: f64, what: &'static str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite(what))
    }
}

pub(crate) fn finite_c(z: Complex64, what: &'static str) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(what))
    }
}
