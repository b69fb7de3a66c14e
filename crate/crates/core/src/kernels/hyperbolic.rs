//! Spectral and McKean integrals on the hyperbolic plane.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Mutex;

use super::Radial;
use crate::error::{Error, Result};
use crate::specfun::chebyshev::ChebyshevTable;
use crate::specfun::quadrature::{
    integrate_panels, integrate_semiinfinite_vec, Estimate, GaussianTail, ToleranceBudget,
};
use crate::specfun::{conical_pair, spectral_tanh, SpectralParameter};

const INNER_FLOOR: f64 = 5e-15;

/// Budget for the conical evaluations nested inside a ρ-integral whose
/// weight has total mass about `mass`.
fn inner_budget(budget: &ToleranceBudget, mass: f64) -> ToleranceBudget {
    let tol = (0.1 * budget.abs_tol / mass).max(INNER_FLOOR);
    budget.scaled(tol / budget.abs_tol)
}

fn spectral_weight(rho: f64, t: f64) -> f64 {
    let lambda = 0.25 + rho * rho;
    rho * spectral_tanh(rho) * (-lambda * t).exp() / (2.0 * PI)
}

/// `K₀(d, t) = (1/2π)∫_0^∞ P_{−1/2+iρ}(cosh d) ρ tanh(πρ) e^{−(1/4+ρ²)t} dρ`.
pub(crate) fn k0(d: f64, t: f64, budget: &ToleranceBudget) -> Result<(Estimate, f64)> {
    let tail = GaussianTail::new(t, (-0.25 * t).exp() / (2.0 * PI), 1)?;
    let mass = (-0.25 * t).exp() / (4.0 * PI * t);
    let inner = inner_budget(budget, mass);
    let failure = Mutex::new(None);
    let f = |rho: f64| -> f64 {
        let w = spectral_weight(rho, t);
        if w == 0.0 {
            return 0.0;
        }
        match conical_pair(SpectralParameter::from_nonnegative(rho), d, &inner) {
            Ok((p, _)) => w * p[0],
            Err(e) => {
                failure.lock().unwrap().get_or_insert(e);
                0.0
            }
        }
    };
    let (value, err, radius) = integrate_semiinfinite_vec(f, &tail, &budget.scaled(0.9))?;
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let err = err + mass * inner.abs_tol;
    Ok((Estimate { value, err_est: err }, radius))
}

/// All radial quantities in one pass over ρ:
/// `[K₀, ∂_d K₀, Ĝ, Ĝ′]` from the weights `1, 1, 1/λ, 1/λ` against `P, P¹, P, P¹`.
pub(crate) fn radial(d: f64, t: f64, budget: &ToleranceBudget) -> Result<Radial> {
    // ρ ≥ 1: ρ, ρ√λ, ρ/λ, ρ/√λ are all below 1.5ρ².
    let tail = GaussianTail::new(t, 1.5 * (-0.25 * t).exp() / (2.0 * PI), 2)?;
    let mass = (-0.25 * t).exp() * (1.0 / (4.0 * PI * t) + 1.0 / (8.0 * PI.sqrt() * t.powf(1.5)));
    let inner = inner_budget(budget, mass);
    let failure = Mutex::new(None);
    let f = |rho: f64| -> [f64; 4] {
        let w = spectral_weight(rho, t);
        if w == 0.0 {
            return [0.0; 4];
        }
        let lambda = 0.25 + rho * rho;
        match conical_pair(SpectralParameter::from_nonnegative(rho), d, &inner) {
            Ok((p, _)) => [w * p[0], w * p[1], w * p[0] / lambda, w * p[1] / lambda],
            Err(e) => {
                failure.lock().unwrap().get_or_insert(e);
                [0.0; 4]
            }
        }
    };
    let (v, err, radius) = integrate_semiinfinite_vec(f, &tail, &budget.scaled(0.9))?;
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let err = err + mass * inner.abs_tol;
    let [k0, dk0, g, g1] = v;
    let (g2, g2_err) = if d > 0.0 {
        let coth = 1.0 / d.tanh();
        (-k0 - coth * g1, err * (1.0 + coth))
    } else {
        (-0.5 * k0, err)
    };
    Ok(Radial {
        k0,
        dk0,
        g,
        g1,
        g2,
        lambda: -k0 - (0.5 * d).tanh() * g1,
        err: g2_err,
        terms: 0,
        radius,
    })
}

/// `e^{−t/4} e^{−d²/4t}/(4πt)`, an upper bound for the kernel on H²
/// (from `cosh s − cosh d ≥ (s² − d²)/2` in the McKean integral).
pub fn k0_majorant(d: f64, t: f64) -> f64 {
    (-0.25 * t - d * d / (4.0 * t)).exp() / (4.0 * PI * t)
}

/// `√2 e^{−t/4} (4πt)^{−3/2} ∫_d^∞ s e^{−s²/4t} / √(cosh s − cosh d) ds`.
///
/// On `[d, d+1]` the substitution `u² = cosh s − cosh d` removes the
/// endpoint singularity; the remainder is smooth and cut off where the
/// Gaussian tail is below tolerance.
pub fn k0_h2_mckean(d: f64, t: f64, budget: &ToleranceBudget) -> Result<Estimate> {
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::Domain(format!("distance must be finite and >= 0, got {d}")));
    }
    super::HeatTime::new(t)?;
    let pre = SQRT_2 * (-0.25 * t).exp() * (4.0 * PI * t).powf(-1.5);
    let target = 0.5 * budget.abs_tol / pre;
    let hd = (0.5 * d).sinh();
    let s_of_u = |u: f64| 2.0 * (hd * hd + 0.5 * u * u).sqrt().asinh();
    let near = |u: f64| -> f64 {
        let s = s_of_u(u);
        let ratio = if s == 0.0 { 1.0 } else { s / s.sinh() };
        2.0 * ratio * (-s * s / (4.0 * t)).exp()
    };
    let umax = (2.0 * (d + 0.5).sinh() * 0.5f64.sinh()).sqrt();
    let width = (4.0 * t).sqrt();
    let panels = ((umax / width).ceil() as usize).clamp(1, 64);
    let (v1, e1) = integrate_panels(near, 0.0, umax, panels, &budget.scaled(0.5 / pre))?;

    let gap = |s: f64| (2.0 * (0.5 * (s + d)).sinh() * (0.5 * (s - d)).sinh()).sqrt();
    let start = d + 1.0;
    let tail_at = |s: f64| 2.0 * t * (-s * s / (4.0 * t)).exp() / gap(s);
    let (v2, e2);
    if tail_at(start) > 0.25 * target {
        let mut end = start + width;
        while tail_at(end) > 0.25 * target {
            end += width;
        }
        let far = |s: f64| s * (-s * s / (4.0 * t)).exp() / gap(s);
        let panels = (((end - start) / width).ceil() as usize).clamp(1, 256);
        let (v, e) = integrate_panels(far, start, end, panels, &budget.scaled(0.25 / pre))?;
        v2 = v;
        e2 = e + tail_at(end);
    } else {
        v2 = 0.0;
        e2 = tail_at(start);
    }
    Ok(Estimate {
        value: pre * (v1 + v2),
        err_est: pre * (e1 + e2),
    })
}

/// `K₀` and `λ = Ĝ″ + Ĝ′/sinh d` tabulated on `[0, d_max]` for one time,
/// for quadratures that need the kernel at many distances.
#[derive(Debug, Clone)]
pub struct RadialTable {
    t: f64,
    table: ChebyshevTable<[f64; 2]>,
    lambda_bound: f64,
}

impl RadialTable {
    pub fn build(t: f64, d_max: f64, budget: &ToleranceBudget) -> Result<Self> {
        super::HeatTime::new(t)?;
        let inner = budget.scaled(0.05);
        let panels = ((d_max / t.sqrt().min(1.0)).ceil() as usize).clamp(2, 64);
        let table = ChebyshevTable::build(
            |d| {
                let r = radial(d, t, &inner)?;
                Ok([r.k0, r.lambda])
            },
            0.0,
            d_max,
            panels,
            0.2 * budget.abs_tol,
            14,
        )?;
        let lambda_bound = (0..=400)
            .map(|i| {
                let d = d_max * i as f64 / 400.0;
                table.eval(d).map(|v| v[1].abs()).unwrap_or(0.0)
            })
            .fold(0.0, f64::max)
            * 1.25;
        Ok(Self {
            t,
            table,
            lambda_bound,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn max_distance(&self) -> f64 {
        self.table.domain().1
    }

    pub fn err_est(&self) -> f64 {
        self.table.err_est()
    }

    /// `[K₀(d), λ(d)]`; `None` beyond the tabulated range.
    pub fn eval(&self, d: f64) -> Option<[f64; 2]> {
        self.table.eval(d)
    }

    /// Generous bound on `|λ|` over the table.
    pub fn lambda_bound(&self) -> f64 {
        self.lambda_bound
    }
}
