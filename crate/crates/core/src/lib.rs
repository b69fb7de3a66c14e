//! Heat kernels for functions, 1-forms and 2-forms on the plane, the
//! sphere and the hyperbolic plane, and image sums over covering groups.

pub mod error;
pub mod geometry;
pub mod kernels;
pub mod quotient;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{BiTensor1, OneFormValue, Point, SurfaceKind};
pub use specfun::quadrature::{Estimate, GaussianTail, ToleranceBudget};
pub use specfun::{Decay, RadialProfile, SpectralParameter};
pub use kernels::{HeatTime, Kernel0Value, Kernel1Value};
pub use quotient::{CoveringGroupSpec, GroupElement, QuotientSurface};
pub use verify::{run_suite, CheckRecord, Suite};
