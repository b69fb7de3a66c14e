//! Legendre series on the unit sphere.

use std::f64::consts::PI;

use super::Radial;
use crate::error::{Error, Result};
use crate::specfun::quadrature::ToleranceBudget;
use crate::specfun::LegendreSeries;

/// Bound on the part of every series below beyond index `n`.
///
/// With `s = n(n+1)` and summands dominated by `(2n+1)(1 + n(n+1)/2)e^{−n(n+1)t}/4π`,
/// the tail is at most `2e^{−st}(1 + s/2 + 1/2t)/(4πt)` once `(2n+1)² ≥ 2/t`.
fn tail_bound(n: usize, t: f64) -> f64 {
    let s = (n * (n + 1)) as f64;
    2.0 * (-s * t).exp() * (1.0 + 0.5 * s + 0.5 / t) / (4.0 * PI * t)
}

pub(crate) fn truncation(t: f64, budget: &ToleranceBudget) -> Result<(usize, f64)> {
    let target = 0.5 * budget.abs_tol;
    let mut n = ((2.0 / t).sqrt() / 2.0).ceil() as usize;
    while tail_bound(n, t) > target {
        n += 1 + n / 8;
        if n > budget.max_series_terms {
            return Err(Error::NonConvergence {
                context: "sphere Legendre series",
                achieved: tail_bound(n, t),
                requested: budget.abs_tol,
            });
        }
    }
    Ok((n, tail_bound(n, t)))
}

pub(crate) fn radial(d: f64, t: f64, budget: &ToleranceBudget) -> Result<Radial> {
    let (nmax, tail) = truncation(t, budget)?;
    let x = d.cos();
    let s = d.sin();
    let mut out = Radial {
        terms: nmax + 1,
        ..Radial::default()
    };
    let mut magnitude: f64 = 0.0;
    for (n, p, dp) in LegendreSeries::new(x).take(nmax + 1) {
        let nf = n as f64;
        let w = (2.0 * nf + 1.0) * (-nf * (nf + 1.0) * t).exp() / (4.0 * PI);
        out.k0 += w * p;
        out.dk0 -= w * s * dp;
        magnitude += w * (1.0 + nf * nf);
        if n >= 1 {
            let ev = nf * (nf + 1.0);
            let f = w / ev;
            out.g += f * p;
            out.g1 -= f * s * dp;
            out.g2 += f * (x * dp - ev * p);
            out.lambda += f * ((x - 1.0) * dp - ev * p);
        }
    }
    out.err = tail + 4.0 * f64::EPSILON * magnitude;
    Ok(out)
}
