use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// An iterative solver ran out of budget before meeting its tolerance.
    /// `best` is the best objective value it found.
    #[error("solver `{solver}` did not converge: best value {best}, residual {residual}")]
    SolverFailure { solver: &'static str, best: f64, residual: f64 },

    #[error("point z = {re}+{im}i lies outside the closed annulus 1 <= |z| <= e")]
    OutsideAnnulus { re: f64, im: f64 },

    #[error("boundary grid of {samples} nodes aliases a degree-{degree} family (need >= {needed})")]
    Aliasing { samples: usize, degree: usize, needed: usize },

    #[error("polarization degree {degree} exceeds the guard {max}")]
    DegreeGuard { degree: usize, max: usize },

    #[error("bandwidth violated: {0}")]
    Bandwidth(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
