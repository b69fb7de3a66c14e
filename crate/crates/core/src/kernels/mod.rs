//! Heat kernels for 0-, 1- and 2-forms on the three model surfaces.
//!
//! Everything reduces to radial functions of the geodesic distance: the
//! scalar kernel `K₀(d, t)`, and the generator `Ĝ(d, t) = ∫_t^∞ K₀ dτ`
//! (zero mode removed on the sphere) whose mixed Hessian, projected by
//! `I + ⋆ₓ⋆ᵧ`, is the 1-form kernel.

pub mod apply;
mod euclid;
pub mod hyperbolic;
pub mod residual;
mod sphere;

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{
    apply_i_plus_star, distance, distance_frames, mixed_distance_hessian, BiTensor1, Point, SurfaceKind,
};
use crate::specfun::quadrature::ToleranceBudget;

pub use apply::{apply_k0, apply_k1};
pub use hyperbolic::{k0_h2_mckean, RadialTable};
pub use residual::{heat_residual, FormSample};

/// Smallest supported time; below it series lengths and finite-difference
/// checks stop being meaningful.
pub const T_MIN: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct HeatTime(f64);

impl HeatTime {
    pub fn new(t: f64) -> Result<Self> {
        if !(t.is_finite() && t >= T_MIN) {
            return Err(Error::InvalidParameter(format!("t must be finite and >= {T_MIN}, got {t}")));
        }
        Ok(Self(t))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel0Value {
    pub value: f64,
    pub err_est: f64,
    /// Series terms used (sphere), 1 for closed forms, 0 for quadrature.
    pub terms: usize,
    /// Truncation radius in ρ (hyperbolic), 0 otherwise.
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel1Value {
    pub matrix: BiTensor1,
    pub err_est: f64,
    pub terms: usize,
    pub radius: f64,
}

/// `Ĝ` and its first two distance derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Generator {
    pub g: f64,
    pub g_d: f64,
    pub g_dd: f64,
    pub err_est: f64,
}

/// Radial quantities shared by every kernel; `lambda = Ĝ″ + Ĝ′/S(d)`.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Radial {
    pub k0: f64,
    pub dk0: f64,
    pub g: f64,
    pub g1: f64,
    pub g2: f64,
    pub lambda: f64,
    pub err: f64,
    pub terms: usize,
    pub radius: f64,
}

pub(crate) fn radial(kind: SurfaceKind, d: f64, t: f64, budget: &ToleranceBudget) -> Result<Radial> {
    match kind {
        SurfaceKind::Euclidean => Ok(euclid::radial(d, t)),
        SurfaceKind::Sphere => sphere::radial(d, t, budget),
        SurfaceKind::Hyperbolic => hyperbolic::radial(d, t, budget),
    }
}

/// `K₀` as a function of distance.
pub fn k0_radial(kind: SurfaceKind, d: f64, t: f64, budget: &ToleranceBudget) -> Result<Kernel0Value> {
    let t = HeatTime::new(t)?.get();
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::Domain(format!("distance must be finite and >= 0, got {d}")));
    }
    match kind {
        SurfaceKind::Euclidean => {
            let value = euclid::k0(d, t);
            Ok(Kernel0Value {
                value,
                err_est: 4.0 * f64::EPSILON * value,
                terms: 1,
                radius: 0.0,
            })
        }
        SurfaceKind::Sphere => {
            let r = sphere::radial(d.min(PI), t, budget)?;
            Ok(Kernel0Value {
                value: r.k0,
                err_est: r.err,
                terms: r.terms,
                radius: 0.0,
            })
        }
        SurfaceKind::Hyperbolic => {
            let (e, radius) = hyperbolic::k0(d, t, budget)?;
            Ok(Kernel0Value {
                value: e.value,
                err_est: e.err_est,
                terms: 0,
                radius,
            })
        }
    }
}

/// Scalar heat kernel `K₀(x, y, t)`.
pub fn k0(kind: SurfaceKind, x: &Point, y: &Point, t: f64, budget: &ToleranceBudget) -> Result<Kernel0Value> {
    let d = distance(kind, x, y)?;
    k0_radial(kind, d, t, budget)
}

/// `∂K₀/∂d`.
pub fn k0_distance_derivative(kind: SurfaceKind, d: f64, t: f64, budget: &ToleranceBudget) -> Result<(f64, f64)> {
    let t = HeatTime::new(t)?.get();
    let r = radial(kind, d, t, budget)?;
    Ok((r.dk0, r.err))
}

/// 2-form kernel as a density against the unit volume forms; `⋆1` is the
/// volume form, so this is `K₀`.
pub fn k2(kind: SurfaceKind, x: &Point, y: &Point, t: f64, budget: &ToleranceBudget) -> Result<Kernel0Value> {
    k0(kind, x, y, t, budget)
}

/// `Ĝ(d, t)` with `Ĝ′`, `Ĝ″`. The plane uses
/// `(1/4π)[γ − ln 4t − Ein(d²/4t)]`, whose t-derivative is `−K₀`.
pub fn g1_scalar(kind: SurfaceKind, d: f64, t: f64, budget: &ToleranceBudget) -> Result<Generator> {
    let t = HeatTime::new(t)?.get();
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::Domain(format!("generator needs d > 0, got {d}")));
    }
    if kind == SurfaceKind::Sphere && d >= PI {
        return Err(Error::Domain(format!("generator on the sphere needs d < π, got {d}")));
    }
    let r = radial(kind, d, t, budget)?;
    Ok(Generator {
        g: r.g,
        g_d: r.g1,
        g_dd: r.g2,
        err_est: r.err,
    })
}

/// Coefficient `c(t)` of the 1-form kernel at coincidence, `K₁(x, x) = c·I`.
pub fn k1_coincidence(kind: SurfaceKind, t: f64, budget: &ToleranceBudget) -> Result<(f64, f64)> {
    let t = HeatTime::new(t)?.get();
    let r = radial(kind, 0.0, t, budget)?;
    Ok((-r.lambda, r.err))
}

/// Distances where the literal `(I+⋆⋆)·Hessian` pipeline is used; closer to
/// coincidence or to the antipode the combined coefficient `λ` is
/// evaluated directly to avoid cancellation.
const PIPELINE_MARGIN: f64 = 1e-3;

/// 1-form heat kernel in the unit coframes at x (rows) and y (columns).
pub fn k1(kind: SurfaceKind, x: &Point, y: &Point, t: f64, budget: &ToleranceBudget) -> Result<Kernel1Value> {
    let t = HeatTime::new(t)?.get();
    let d = distance(kind, x, y)?;
    if d == 0.0 {
        let r = radial(kind, 0.0, t, budget)?;
        return Ok(Kernel1Value {
            matrix: BiTensor1::identity().scale(-r.lambda),
            err_est: r.err,
            terms: r.terms,
            radius: r.radius,
        });
    }
    if kind == SurfaceKind::Sphere && PI - d <= 1e-12 {
        return Err(Error::CutLocus);
    }
    let literal = d >= PIPELINE_MARGIN && (kind != SurfaceKind::Sphere || d <= PI - PIPELINE_MARGIN);
    // error amplification of the radial quantities in the assembled matrix
    let gain = if literal { 2.0 * (1.0 + 1.0 / kind.warp(d)) } else { 2.0 };
    let mut r = radial(kind, d, t, budget)?;
    if gain * r.err > budget.abs_tol && kind != SurfaceKind::Euclidean {
        // one tighter pass; keep the first result if that one cannot converge
        match radial(kind, d, t, &budget.scaled(0.5 * budget.abs_tol / (gain * r.err))) {
            Ok(tighter) => r = tighter,
            Err(e) if e.is_nonconvergence() => {}
            Err(e) => return Err(e),
        }
    }
    let (matrix, err_est) = if literal {
        let h = mixed_distance_hessian(kind, x, y, r.g1, r.g2)?;
        (apply_i_plus_star(&h), gain * r.err)
    } else {
        (combined(kind, x, y, r.lambda)?, gain * r.err)
    };
    Ok(Kernel1Value {
        matrix,
        err_est,
        terms: r.terms,
        radius: r.radius,
    })
}

/// `λ · (n_x⊗n_y + m_x⊗m_y)`, equal to `(I+⋆⋆)(Ĝ″ n⊗n + Ĝ′/S m⊗m)`.
pub(crate) fn combined(kind: SurfaceKind, x: &Point, y: &Point, lambda: f64) -> Result<BiTensor1> {
    let (nx, mx, ny, my) = distance_frames(kind, x, y)?;
    Ok(BiTensor1::outer(&nx, &ny).add(&BiTensor1::outer(&mx, &my)).scale(lambda))
}
