//! Finite-difference residual of the heat equation in polar components.
//!
//! With `ds² = dr² + f(r)² dθ²` and a 1-form `B dr + C f dθ`:
//!
//! ```text
//! A: A_t − A_rr − (f′/f) A_r − A_θθ/f²
//! B: B_t − B_rr − (f′/f) B_r + B/f² − B_θθ/f² + 2 (f′/f²) C_θ
//! C: C_t − C_rr − (f′/f) C_r + C/f² − C_θθ/f² − 2 (f′/f²) B_θ
//! ```

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{OneFormValue, Point, SurfaceKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FormSample {
    Scalar(f64),
    OneForm(OneFormValue),
}

impl FormSample {
    fn components(&self) -> ([f64; 2], usize) {
        match *self {
            FormSample::Scalar(a) => ([a, 0.0], 1),
            FormSample::OneForm(v) => ([v.a, v.b], 2),
        }
    }
}

/// Largest component of `(∂_t + Δ)ω` at `x`, from centred differences with
/// time step `h_t` and coordinate step `h_s`. `field(p, t)` samples ω; 0-
/// and 2-form densities share the scalar operator.
pub fn heat_residual(
    kind: SurfaceKind,
    field: impl Fn(&Point, f64) -> Result<FormSample>,
    x: &Point,
    t: f64,
    h_t: f64,
    h_s: f64,
) -> Result<f64> {
    if x.kind() != kind {
        return Err(Error::KindMismatch {
            expected: kind,
            found: x.kind(),
        });
    }
    if !(h_t > 0.0 && h_s > 0.0 && t - h_t > 0.0) {
        return Err(Error::InvalidParameter("steps must be positive and h_t < t".into()));
    }
    let r = x.c1();
    if r - h_s <= 2.0 * h_s || (kind == SurfaceKind::Sphere && r + h_s >= PI - 2.0 * h_s) {
        return Err(Error::Domain(format!(
            "stencil at c1 = {r} with step {h_s} touches a coordinate singularity"
        )));
    }
    let at = |dr: f64, dth: f64, dt: f64| -> Result<[f64; 2]> {
        let p = Point::new(kind, r + dr, x.c2() + dth)?;
        Ok(field(&p, t + dt)?.components().0)
    };
    let (c, ncomp) = field(x, t)?.components();
    let rp = at(h_s, 0.0, 0.0)?;
    let rm = at(-h_s, 0.0, 0.0)?;
    let tp = at(0.0, h_s, 0.0)?;
    let tm = at(0.0, -h_s, 0.0)?;
    let fp = at(0.0, 0.0, h_t)?;
    let fm = at(0.0, 0.0, -h_t)?;

    let f = kind.warp(r);
    let fd = kind.warp_derivative(r);
    let mut res = [0.0; 2];
    for i in 0..ncomp {
        let u_t = (fp[i] - fm[i]) / (2.0 * h_t);
        let u_r = (rp[i] - rm[i]) / (2.0 * h_s);
        let u_rr = (rp[i] - 2.0 * c[i] + rm[i]) / (h_s * h_s);
        let u_tt = (tp[i] - 2.0 * c[i] + tm[i]) / (h_s * h_s);
        res[i] = u_t - u_rr - fd / f * u_r - u_tt / (f * f);
    }
    if ncomp == 2 {
        let b_th = (tp[0] - tm[0]) / (2.0 * h_s);
        let c_th = (tp[1] - tm[1]) / (2.0 * h_s);
        let f2 = f * f;
        res[0] += c[0] / f2 + 2.0 * fd / f2 * c_th;
        res[1] += c[1] / f2 - 2.0 * fd / f2 * b_th;
    }
    Ok(res[0].abs().max(res[1].abs()))
}
