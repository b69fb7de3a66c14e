use thiserror::Error;

use crate::geometry::SurfaceKind;

/// Errors raised by kernel evaluation, quadrature and quotient assembly.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no convergence in {context}: achieved error estimate {achieved:.3e} > requested {requested:.3e}")]
    NonConvergence {
        context: &'static str,
        achieved: f64,
        requested: f64,
    },

    #[error("surface mismatch: expected {expected}, found {found}")]
    KindMismatch {
        expected: SurfaceKind,
        found: SurfaceKind,
    },

    #[error("coincident points: distance derivatives are undefined")]
    CoincidentPoints,

    #[error("points on the cut locus: distance derivatives are undefined")]
    CutLocus,

    #[error("divergent profile: {0}")]
    DivergentProfile(String),

    #[error("missing decay hint for an integral over the {0}")]
    MissingDecayHint(SurfaceKind),

    #[error("enumeration guard: radius {radius} would visit about {estimated:.3e} group elements")]
    TooManyElements { radius: f64, estimated: f64 },

    #[error("not implemented: {0}")]
    Unsupported(String),
}

impl Error {
    /// True for failures that come from a numerical budget not being met.
    pub fn is_nonconvergence(&self) -> bool {
        matches!(self, Error::NonConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
