//! Closed forms on the plane.

use std::f64::consts::PI;

use super::Radial;
use crate::specfun::expint::{ein, EULER_GAMMA};

pub(crate) fn k0(d: f64, t: f64) -> f64 {
    (-d * d / (4.0 * t)).exp() / (4.0 * PI * t)
}

/// Generator regularised as `(1/4π)[γ − ln 4t − Ein(d²/4t)]`, which differs
/// from `∫_t^∞ K₀ dτ` by a d-independent constant only.
pub(crate) fn radial(d: f64, t: f64) -> Radial {
    let u = d * d / (4.0 * t);
    let e = (-u).exp();
    let k0 = e / (4.0 * PI * t);
    let g = (EULER_GAMMA - (4.0 * t).ln() - ein(u)) / (4.0 * PI);
    let (g1, g2) = if d > 0.0 {
        // 1 − e^{−u} without cancellation
        let one_minus = -(-u).exp_m1();
        (
            -one_minus / (2.0 * PI * d),
            one_minus / (2.0 * PI * d * d) - e / (4.0 * PI * t),
        )
    } else {
        (0.0, -1.0 / (8.0 * PI * t))
    };
    Radial {
        k0,
        dk0: -d / (2.0 * t) * k0,
        g,
        g1,
        g2,
        lambda: -k0,
        err: 8.0 * f64::EPSILON * k0.max(g.abs()).max(g2.abs()),
        terms: 1,
        radius: 0.0,
    }
}
