use thiserror::Error;

/// Errors raised by the construction and verification pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("quaternion is not purely imaginary (real part {0:e})")]
    NonImaginary(f64),

    #[error("degenerate lattice: generators are (numerically) collinear")]
    DegenerateLattice,

    #[error("frequency {0:?} is not an element of the spectral set")]
    NotInSet((i64, i64)),

    #[error("coefficient key {0:?} lies outside the spectral set")]
    KeyOutsideSpectralSet((i64, i64)),

    #[error("spectral set has {0} elements; a closed torus needs at least 6")]
    TooFewFrequencies(usize),

    #[error("degenerate picks: {0}")]
    DegeneratePicks(String),

    #[error("form is not closed (mode-wise residual {0:e})")]
    NotClosedForm(f64),

    #[error("form has a non-vanishing zero mode ({0:e}); primitive is not periodic")]
    NonPeriodic(f64),

    #[error("immersion is degenerate at z = {re} + {im}i")]
    DegeneratePoint { re: f64, im: f64 },

    #[error("immersion is degenerate at {0} grid points")]
    DegenerateSurface(usize),

    #[error("rectangular classification needs a positive tau^2")]
    NonRectangularInput,

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O failure: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
