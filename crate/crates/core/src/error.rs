use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate frame: both drive amplitudes vanish")]
    DegenerateFrame,
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("time {t} outside [0, {t_f}]")]
    OutOfRange { t: f64, t_f: f64 },
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("no feasible path: {0}")]
    NoFeasiblePath(String),
    #[error("step size underflow at t = {t} (h = {h:e}); problem looks stiff")]
    Stiffness { t: f64, h: f64 },
    #[error("covariance embedding failed: {0}")]
    Embedding(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(label: &str, values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{label} must be finite")))
    }
}
