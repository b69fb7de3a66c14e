//! Legendre and conical functions, the order-one Mehler–Fock transform
//! pair, and the quadrature engines the rest of the crate is built on.
//!
//! Sign convention: `P¹_n(cos φ) = d/dφ P_n(cos φ)` and
//! `P¹_{−1/2+iρ}(cosh r) = d/dr P_{−1/2+iρ}(cosh r)`, which is the
//! Condon–Shortley phase.

pub mod chebyshev;
pub mod expint;
pub mod quadrature;

use std::f64::consts::{FRAC_2_PI, PI};

use crate::error::{Error, Result};
use chebyshev::ChebyshevTable;
use quadrature::{integrate_panels, Estimate, GaussianTail, ToleranceBudget};

/// Spectral variable of the continuous spectrum on the hyperbolic plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParameter {
    rho: f64,
}

impl SpectralParameter {
    /// Negative values fold onto `|ρ|`; the conical functions are even in ρ.
    pub fn new(rho: f64) -> Result<Self> {
        if !rho.is_finite() {
            return Err(Error::InvalidParameter(format!("rho must be finite, got {rho}")));
        }
        Ok(Self { rho: rho.abs() })
    }

    pub(crate) fn from_nonnegative(rho: f64) -> Self {
        debug_assert!(rho >= 0.0);
        Self { rho }
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Laplace eigenvalue `1/4 + ρ²`.
    pub fn lambda(&self) -> f64 {
        0.25 + self.rho * self.rho
    }
}

const DOMAIN_SLACK: f64 = 1e-12;

fn check_unit_interval(x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0 + DOMAIN_SLACK) {
        return Err(Error::Domain(format!("Legendre argument {x} outside [-1, 1]")));
    }
    Ok(x.clamp(-1.0, 1.0))
}

/// Legendre polynomial `P_n(x)` by the three-term recurrence.
pub fn legendre_p(n: usize, x: f64) -> Result<f64> {
    let x = check_unit_interval(x)?;
    let mut p0 = 1.0;
    if n == 0 {
        return Ok(p0);
    }
    let mut p1 = x;
    for k in 1..n {
        let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    Ok(p1)
}

/// Associated Legendre function of order one, `P¹_n(x) = −√(1−x²) P_n′(x)`.
pub fn legendre_p1(n: usize, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("legendre_p1 requires n >= 1".into()));
    }
    let x = check_unit_interval(x)?;
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut p_prev = 0.0; // P¹_0
    let mut p = -s; // P¹_1
    for k in 2..=n {
        let next = ((2 * k - 1) as f64 * x * p - k as f64 * p_prev) / (k - 1) as f64;
        p_prev = p;
        p = next;
    }
    Ok(p)
}

/// Runs the Legendre recurrence once, yielding `(n, P_n(x), P_n′(x))`.
#[derive(Debug, Clone)]
pub struct LegendreSeries {
    x: f64,
    n: usize,
    p: (f64, f64),
    dp: (f64, f64),
}

impl LegendreSeries {
    pub fn new(x: f64) -> Self {
        Self {
            x,
            n: 0,
            p: (0.0, 1.0),
            dp: (0.0, 0.0),
        }
    }
}

impl Iterator for LegendreSeries {
    type Item = (usize, f64, f64);

    fn next(&mut self) -> Option<Self::Item> {
        let n = self.n;
        let out = (n, self.p.1, self.dp.1);
        // advance to n + 1
        let (pm, pn) = self.p;
        let next = if n == 0 {
            self.x
        } else {
            ((2 * n + 1) as f64 * self.x * pn - n as f64 * pm) / (n + 1) as f64
        };
        let dnext = if n == 0 { 1.0 } else { self.dp.0 + (2 * n + 1) as f64 * pn };
        self.p = (pn, next);
        self.dp = (self.dp.1, dnext);
        self.n += 1;
        Some(out)
    }
}

const MAX_CONICAL_R: f64 = 350.0;

/// `(P, dP/dr)` at `cosh r` through the hypergeometric series
/// `Σ c_k (−sinh²(r/2))^k`, `c_{k+1} = c_k (k(k+1)+λ)/(k+1)²`.
fn conical_series(lambda: f64, r: f64) -> (f64, f64) {
    let sh = (0.5 * r).sinh();
    let x = -sh * sh;
    let mut c = 1.0;
    let mut xp = 1.0; // x^k
    let mut p = 1.0;
    let mut dsum = 0.0; // Σ k c_k x^{k−1}
    for k in 0..200usize {
        let kf = k as f64;
        let c_next = c * (kf * (kf + 1.0) + lambda) / ((kf + 1.0) * (kf + 1.0));
        let term = c_next * xp * x;
        dsum += (kf + 1.0) * c_next * xp;
        p += term;
        xp *= x;
        c = c_next;
        if term.abs() < 1e-18 * p.abs().max(1e-300) && k > 2 {
            break;
        }
    }
    (p, -0.5 * r.sinh() * dsum)
}

fn series_applies(lambda: f64, r: f64) -> bool {
    let sh = (0.5 * r).sinh();
    sh * sh * lambda.max(1.0) <= 0.25
}

/// `(P_{−1/2+iρ}(cosh r), P¹_{−1/2+iρ}(cosh r))` with a shared error estimate.
///
/// Mehler–Dirichlet integral with `s = r − v²`:
/// `P = (2/π) ∫_0^{√r} cos(ρ(r−v²)) · v / √(sinh(r−v²/2) sinh(v²/2)) dv`,
/// and the r-derivative taken under the integral sign (the moving upper
/// limit contributes `1/(2 sinh(r/2))`).
pub fn conical_pair(
    rho: SpectralParameter,
    r: f64,
    budget: &ToleranceBudget,
) -> Result<([f64; 2], f64)> {
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("conical functions need r >= 0, got {r}")));
    }
    if r > MAX_CONICAL_R {
        return Err(Error::Domain(format!("r = {r} exceeds the supported range")));
    }
    if r == 0.0 {
        return Ok(([1.0, 0.0], 0.0));
    }
    let lambda = rho.lambda();
    if series_applies(lambda, r) {
        let (p, dp) = conical_series(lambda, r);
        return Ok(([p, dp], 4.0 * f64::EPSILON));
    }
    let rho = rho.rho();
    let upper = r.sqrt();
    let integrand = |v: f64| -> [f64; 2] {
        let q = 0.5 * v * v;
        let ratio = if q == 0.0 { 1.0 } else { q / q.sinh() };
        let inner = r - q;
        let g = (2.0 * ratio).sqrt() / inner.sinh().sqrt();
        let phase = rho * (r - v * v);
        let (sn, cs) = phase.sin_cos();
        let coth = 1.0 / inner.tanh();
        [cs * g, (-rho * sn - 0.5 * cs * coth) * g]
    };
    let panels = (rho * r / 3.0).ceil() as usize + 1;
    let inner = budget.scaled(1.0 / FRAC_2_PI);
    let (v, err) = integrate_panels(integrand, 0.0, upper, panels, &inner)?;
    let boundary = 0.5 / (0.5 * r).sinh();
    Ok(([FRAC_2_PI * v[0], FRAC_2_PI * (v[1] + boundary)], FRAC_2_PI * err))
}

/// Conical function `P_{−1/2+iρ}(cosh r)`.
pub fn conical_p(rho: SpectralParameter, r: f64, budget: &ToleranceBudget) -> Result<Estimate> {
    let (v, err_est) = conical_pair(rho, r, budget)?;
    Ok(Estimate {
        value: v[0],
        err_est,
    })
}

/// `P¹_{−1/2+iρ}(cosh r) = d/dr P_{−1/2+iρ}(cosh r)`, the bounded radial
/// eigenfunction of the 1-form Laplacian.
pub fn conical_p1(rho: SpectralParameter, r: f64, budget: &ToleranceBudget) -> Result<Estimate> {
    let (v, err_est) = conical_pair(rho, r, budget)?;
    Ok(Estimate {
        value: v[1],
        err_est,
    })
}

/// Decay hint attached to radial profiles and surface integrands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// `|f(r)| ≤ coeff · exp(−rate · max(r − offset, 0)²)`.
    Gaussian { coeff: f64, rate: f64, offset: f64 },
    /// `f(r) = 0` for `r > radius`, and `|f| ≤ bound`.
    Compact { radius: f64, bound: f64 },
    /// `|f| ≤ bound` with no decay; integrable only against a decaying kernel.
    Bounded { bound: f64 },
}

impl Decay {
    pub fn gaussian(coeff: f64, rate: f64, offset: f64) -> Result<Self> {
        if !(rate > 0.0 && coeff >= 0.0 && offset >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gaussian decay needs rate > 0, coeff >= 0, offset >= 0 (got {rate}, {coeff}, {offset})"
            )));
        }
        Ok(Decay::Gaussian { coeff, rate, offset })
    }

    pub fn majorant(&self, r: f64) -> f64 {
        match *self {
            Decay::Gaussian { coeff, rate, offset } => {
                let s = (r - offset).max(0.0);
                coeff * (-rate * s * s).exp()
            }
            Decay::Compact { radius, bound } => {
                if r > radius {
                    0.0
                } else {
                    bound
                }
            }
            Decay::Bounded { bound } => bound,
        }
    }

    /// Supremum of the majorant.
    pub fn sup(&self) -> f64 {
        match *self {
            Decay::Gaussian { coeff, .. } => coeff,
            Decay::Compact { bound, .. } | Decay::Bounded { bound } => bound,
        }
    }

    /// Radius beyond which `∫ majorant(r) · w(r) dr` is at most `target`,
    /// for the measure weight `w(r) ≤ e^{growth · r}` (growth 0 means
    /// `w(r) ≤ r`, i.e. planar). Returns `(radius, tail_bound)`.
    pub fn truncation(&self, target: f64, growth: f64) -> (f64, f64) {
        match *self {
            Decay::Compact { radius, .. } => (radius, 0.0),
            Decay::Bounded { .. } => (f64::INFINITY, f64::INFINITY),
            Decay::Gaussian { coeff, rate, offset } => {
                if coeff == 0.0 {
                    return (offset.max(1e-3), 0.0);
                }
                let bound = |sigma: f64| -> f64 {
                    let r = offset + sigma;
                    if growth > 0.0 {
                        // ∫_σ^∞ e^{g(o+s) − a s²} ds ≤ e^{g r − aσ²}/(2aσ − g)
                        let denom = 2.0 * rate * sigma - growth;
                        if denom <= 0.0 {
                            return f64::INFINITY;
                        }
                        coeff * (growth * r - rate * sigma * sigma).exp() / denom
                    } else {
                        // ∫_σ^∞ (o+s) e^{−a s²} ds
                        if sigma <= 0.0 {
                            return f64::INFINITY;
                        }
                        let e = (-rate * sigma * sigma).exp();
                        coeff * (e / (2.0 * rate) + offset * e / (2.0 * rate * sigma))
                    }
                };
                let mut hi = (1.0 / rate).sqrt() + growth / rate;
                while bound(hi) > target {
                    hi *= 1.3;
                    if hi > 1e6 {
                        break;
                    }
                }
                let mut lo = 0.0;
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if bound(mid) > target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                (offset + hi, bound(hi))
            }
        }
    }
}

/// A radial coefficient function with its mandatory decay hint.
#[derive(Clone, Copy)]
pub struct RadialProfile<F> {
    pub f: F,
    pub decay: Decay,
}

impl<F: Fn(f64) -> f64> RadialProfile<F> {
    pub fn new(f: F, decay: Decay) -> Self {
        Self { f, decay }
    }

    fn check_runaway(&self, radius: f64) -> Result<()> {
        for i in 0..8 {
            let r = radius * (1.0 + i as f64 / 7.0);
            let v = (self.f)(r).abs();
            let m = self.decay.majorant(r);
            if !v.is_finite() || v > 2.0 * m + 1e-300 {
                return Err(Error::DivergentProfile(format!(
                    "|f({r:.4})| = {v:.3e} exceeds the decay majorant {m:.3e}"
                )));
            }
        }
        Ok(())
    }
}

/// Forward transform `f̂(ρ) = 2π ∫_0^∞ P¹_{−1/2+iρ}(cosh r) f(r) sinh r dr`.
pub fn mehler_fock_forward<F: Fn(f64) -> f64>(
    profile: &RadialProfile<F>,
    rho: SpectralParameter,
    budget: &ToleranceBudget,
) -> Result<Estimate> {
    let sqrt_lambda = rho.lambda().sqrt();
    // |P¹| ≤ √λ and sinh r ≤ e^r / 2.
    let scale = 2.0 * PI * sqrt_lambda * 0.5;
    let (radius, tail) = profile.decay.truncation(0.25 * budget.abs_tol / scale, 1.0);
    if !radius.is_finite() {
        return Err(Error::DivergentProfile("profile has no decay; the transform needs one".into()));
    }
    profile.check_runaway(radius)?;
    let mass = majorant_mass(&profile.decay, radius);
    let inner_tol = (0.25 * budget.abs_tol / (2.0 * PI * mass.max(1e-300))).max(1e-15);
    let inner = budget.scaled(inner_tol / budget.abs_tol);
    let err_cell = std::sync::Mutex::new(Ok(()));
    let integrand = |r: f64| -> f64 {
        let fr = (profile.f)(r);
        if fr == 0.0 {
            return 0.0;
        }
        match conical_pair(rho, r, &inner) {
            Ok((v, _)) => v[1] * fr * r.sinh(),
            Err(e) => {
                *err_cell.lock().unwrap() = Err(e);
                0.0
            }
        }
    };
    let panels = ((rho.rho() + 1.0) * radius / 3.0).ceil() as usize;
    let (value, err) = integrate_panels(integrand, 0.0, radius, panels.max(1), &budget.scaled(0.5))?;
    err_cell.into_inner().unwrap()?;
    Ok(Estimate {
        value: 2.0 * PI * value,
        err_est: 2.0 * PI * err + scale * tail + 2.0 * PI * mass * inner_tol,
    })
}

fn majorant_mass(decay: &Decay, radius: f64) -> f64 {
    // ∫_0^R majorant · sinh r dr on a coarse trapezoid, scale only.
    let n = 400;
    let h = radius / n as f64;
    (0..=n)
        .map(|i| {
            let r = i as f64 * h;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            w * decay.majorant(r) * r.sinh()
        })
        .sum::<f64>()
        * h
}

/// Inverse transform
/// `f(r) = (1/2π) ∫_0^∞ f̂(ρ) ρ tanh(πρ)/(1/4+ρ²) P¹_{−1/2+iρ}(cosh r) dρ`,
/// where `|f̂(ρ)| ≤ fhat_tail.majorant(ρ)`.
pub fn mehler_fock_inverse(
    fhat: impl Fn(f64) -> f64,
    fhat_tail: &GaussianTail,
    r: f64,
    budget: &ToleranceBudget,
) -> Result<Estimate> {
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("inverse transform needs r >= 0, got {r}")));
    }
    // ρ tanh(πρ)/λ · |P¹| ≤ ρ/√λ ≤ 1
    let tail = GaussianTail::new(fhat_tail.rate, fhat_tail.coeff / (2.0 * PI), fhat_tail.degree)?;
    let radius = tail.truncation_radius(0.25 * budget.abs_tol);
    let mass = tail.coeff * (radius + 1.0).powi(fhat_tail.degree as i32 + 1);
    let inner_tol = (0.25 * budget.abs_tol / mass.max(1e-300)).max(1e-15);
    let inner = budget.scaled(inner_tol / budget.abs_tol);
    let err_cell = std::sync::Mutex::new(Ok(()));
    let integrand = |rho: f64| -> f64 {
        let h = fhat(rho);
        if h == 0.0 {
            return 0.0;
        }
        let sp = SpectralParameter { rho };
        let weight = rho * spectral_tanh(rho) / sp.lambda();
        match conical_pair(sp, r, &inner) {
            Ok((v, _)) => h * weight * v[1] / (2.0 * PI),
            Err(e) => {
                *err_cell.lock().unwrap() = Err(e);
                0.0
            }
        }
    };
    let (value, err, _) =
        quadrature::integrate_semiinfinite_vec(integrand, &tail, &budget.scaled(0.5))?;
    err_cell.into_inner().unwrap()?;
    Ok(Estimate {
        value,
        err_est: err + mass * inner_tol,
    })
}

/// `tanh(πρ)`, replaced by 1 once the difference is below 1e−32.
pub fn spectral_tanh(rho: f64) -> f64 {
    if rho > 12.0 {
        1.0
    } else {
        (PI * rho).tanh()
    }
}

/// Tabulated forward transform on `[0, rho_max]`, used where the inverse
/// needs `f̂` at many ρ.
pub fn tabulate_forward<F: Fn(f64) -> f64 + Sync>(
    profile: &RadialProfile<F>,
    rho_max: f64,
    budget: &ToleranceBudget,
) -> Result<ChebyshevTable<f64>> {
    let panels = (rho_max / 2.0).ceil() as usize;
    ChebyshevTable::build(
        |rho| Ok(mehler_fock_forward(profile, SpectralParameter::new(rho)?, budget)?.value),
        0.0,
        rho_max,
        panels.max(1),
        budget.abs_tol,
        12,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tight() -> ToleranceBudget {
        ToleranceBudget::with_tol(1e-13).unwrap()
    }

    #[test]
    fn legendre_low_orders() {
        assert_eq!(legendre_p(0, 0.3).unwrap(), 1.0);
        assert_eq!(legendre_p(1, 0.25).unwrap(), 0.25);
        assert!((legendre_p(2, 0.5).unwrap() - (3.0 * 0.25 - 1.0) / 2.0).abs() < 1e-16);
        assert!(legendre_p(3, 1.5).is_err());
        assert!(legendre_p(3, 1.0 + 1e-14).is_ok());
    }

    #[test]
    fn legendre_p1_low_orders() {
        assert_eq!(legendre_p1(1, 1.0).unwrap(), 0.0);
        assert!((legendre_p1(1, 0.0).unwrap() + 1.0).abs() < 1e-16);
        let x: f64 = 0.5;
        let expected = -3.0 * x * (1.0 - x * x).sqrt();
        assert!((legendre_p1(2, x).unwrap() - expected).abs() < 1e-15);
        assert!((legendre_p1(2, x).unwrap() + 1.299_038_105_676_658).abs() < 1e-12);
        assert!(legendre_p1(0, 0.2).is_err());
        assert!(legendre_p1(2, -1.1).is_err());
    }

    #[test]
    fn legendre_recurrence_on_grid() {
        for i in 0..=100 {
            let x = -1.0 + 2.0 * i as f64 / 100.0;
            for n in 1..50 {
                let lhs = (n + 1) as f64 * legendre_p(n + 1, x).unwrap();
                let rhs = (2 * n + 1) as f64 * x * legendre_p(n, x).unwrap()
                    - n as f64 * legendre_p(n - 1, x).unwrap();
                assert!((lhs - rhs).abs() <= 1e-12, "n={n} x={x}");
                assert!(legendre_p(n, x).unwrap().abs() <= 1.0 + 1e-14);
            }
        }
    }

    #[test]
    fn legendre_p1_is_the_angular_derivative() {
        let h = 1e-5;
        for n in 1..=10 {
            for i in 0..=20 {
                let phi = 0.1 + (PI - 0.2) * i as f64 / 20.0;
                let fd = (legendre_p(n, (phi + h).cos()).unwrap()
                    - legendre_p(n, (phi - h).cos()).unwrap())
                    / (2.0 * h);
                let p1 = legendre_p1(n, phi.cos()).unwrap();
                assert!((p1 - fd).abs() <= 1e-6, "n={n} phi={phi}: {p1} vs {fd}");
            }
        }
    }

    #[test]
    fn legendre_series_matches_pointwise() {
        let x = 0.37;
        for (n, p, dp) in LegendreSeries::new(x).take(30) {
            assert!((p - legendre_p(n, x).unwrap()).abs() < 1e-14);
            if n >= 1 {
                let p1 = -(1.0 - x * x).sqrt() * dp;
                assert!((p1 - legendre_p1(n, x).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn conical_normalisation_and_symmetry() {
        for rho in [0.0, 0.5, 1.0, 5.0] {
            let sp = SpectralParameter::new(rho).unwrap();
            assert_eq!(conical_p(sp, 0.0, &tight()).unwrap().value, 1.0);
            assert_eq!(conical_p1(sp, 0.0, &tight()).unwrap().value, 0.0);
            let neg = SpectralParameter::new(-rho).unwrap();
            assert_eq!(
                conical_p(sp, 1.3, &tight()).unwrap().value,
                conical_p(neg, 1.3, &tight()).unwrap().value
            );
        }
        assert!(conical_p(SpectralParameter::new(1.0).unwrap(), -0.1, &tight()).is_err());
        assert!(SpectralParameter::new(f64::NAN).is_err());
    }

    #[test]
    fn spectral_parameter_lambda() {
        let sp = SpectralParameter::new(-2.0).unwrap();
        assert_eq!(sp.rho(), 2.0);
        assert_eq!(sp.lambda(), 4.25);
    }

    #[test]
    fn series_and_quadrature_agree_where_both_apply() {
        // Straddle the switch: evaluate the quadrature branch directly.
        for &(rho, r) in &[(0.0, 0.9), (0.5, 0.8), (2.0, 0.3)] {
            let sp = SpectralParameter::new(rho).unwrap();
            let (s, ds) = conical_series(sp.lambda(), r);
            let (q, _) = conical_pair_quadrature_only(sp, r);
            assert!((s - q[0]).abs() < 1e-12, "P rho={rho} r={r}: {s} vs {}", q[0]);
            assert!((ds - q[1]).abs() < 1e-11, "P1 rho={rho} r={r}: {ds} vs {}", q[1]);
        }
    }

    fn conical_pair_quadrature_only(sp: SpectralParameter, r: f64) -> ([f64; 2], f64) {
        let rho = sp.rho();
        let integrand = |v: f64| -> [f64; 2] {
            let q = 0.5 * v * v;
            let ratio = if q == 0.0 { 1.0 } else { q / q.sinh() };
            let inner = r - q;
            let g = (2.0 * ratio).sqrt() / inner.sinh().sqrt();
            let (sn, cs) = (rho * (r - v * v)).sin_cos();
            [cs * g, (-rho * sn - 0.5 * cs / inner.tanh()) * g]
        };
        let (v, e) = integrate_panels(integrand, 0.0, r.sqrt(), 2, &tight()).unwrap();
        ([FRAC_2_PI * v[0], FRAC_2_PI * (v[1] + 0.5 / (0.5 * r).sinh())], e)
    }

    #[test]
    fn mehler_fock_zero_profile_and_linearity() {
        // r e^{−r²} ≤ 1.4 e^{−0.9 r²}
        let decay = Decay::gaussian(1.4, 0.9, 0.0).unwrap();
        let zero = RadialProfile::new(|_: f64| 0.0, decay);
        let b = ToleranceBudget::with_tol(1e-10).unwrap();
        let sp = SpectralParameter::new(0.7).unwrap();
        assert_eq!(mehler_fock_forward(&zero, sp, &b).unwrap().value, 0.0);
        let f = RadialProfile::new(|r: f64| r * (-r * r).exp(), decay);
        let g = RadialProfile::new(
            |r: f64| 2.0 * r * (-r * r).exp(),
            Decay::gaussian(2.8, 0.9, 0.0).unwrap(),
        );
        let a = mehler_fock_forward(&f, sp, &b).unwrap().value;
        let c = mehler_fock_forward(&g, sp, &b).unwrap().value;
        assert!((c - 2.0 * a).abs() < 1e-9);
    }

    #[test]
    fn mehler_fock_reports_runaway_profiles() {
        let lying = RadialProfile::new(|r: f64| (-0.01 * r * r).exp(), Decay::gaussian(1.0, 1.0, 0.0).unwrap());
        let b = ToleranceBudget::with_tol(1e-8).unwrap();
        let err = mehler_fock_forward(&lying, SpectralParameter::new(1.0).unwrap(), &b).unwrap_err();
        assert!(matches!(err, Error::DivergentProfile(_)));
    }

    #[test]
    fn inverse_of_zero_is_zero() {
        let tail = GaussianTail::new(1.0, 1.0, 1).unwrap();
        let b = ToleranceBudget::with_tol(1e-10).unwrap();
        let v = mehler_fock_inverse(|_| 0.0, &tail, 1.0, &b).unwrap();
        assert_eq!(v.value, 0.0);
    }

    /// Laplace integral `(1/π)∫_0^π A^{−1/2} cos(ρ ln A) dφ`, `A = cosh r + sinh r cos φ`.
    fn laplace_oracle(rho: f64, r: f64) -> f64 {
        let b = ToleranceBudget::with_tol(1e-12).unwrap();
        let v = integrate_panels(
            |phi: f64| {
                let c = (0.5 * phi).cos();
                let a = (-r).exp() + 2.0 * r.sinh() * c * c;
                (rho * a.ln()).cos() / a.sqrt()
            },
            0.0,
            PI,
            64,
            &b,
        )
        .unwrap()
        .0;
        v / PI
    }

    #[test]
    fn conical_frozen_values() {
        let sp = SpectralParameter::new(0.5).unwrap();
        let p = conical_p(sp, 1.0, &tight()).unwrap();
        assert!((p.value - 0.883_537_898_848_223_8).abs() < 1e-12, "{p:?}");
        let p1 = conical_p1(sp, 1.0, &tight()).unwrap();
        assert!((p1.value + 0.216_924_224_172_460_4).abs() < 1e-11, "{p1:?}");
    }

    #[test]
    fn conical_p1_matches_richardson_difference() {
        let b = tight();
        let sp = SpectralParameter::new(0.5).unwrap();
        let p = |r: f64| conical_p(sp, r, &b).unwrap().value;
        let h = 1e-3;
        let d = |h: f64| (p(1.0 + h) - p(1.0 - h)) / (2.0 * h);
        let rich = (4.0 * d(h / 2.0) - d(h)) / 3.0;
        assert!((conical_p1(sp, 1.0, &b).unwrap().value - rich).abs() < 1e-9);
    }

    #[test]
    fn conical_matches_laplace_integral_on_grid() {
        let b = ToleranceBudget::with_tol(1e-12).unwrap();
        for &rho in &[0.0, 0.3, 1.0, 4.0, 12.0, 30.0] {
            for &r in &[0.01, 0.2, 0.9, 2.0, 5.0, 10.0] {
                let sp = SpectralParameter::new(rho).unwrap();
                let got = conical_p(sp, r, &b).unwrap();
                let want = laplace_oracle(rho, r);
                assert!((got.value - want).abs() < 1e-10, "rho={rho} r={r}: {} vs {want}", got.value);
                assert!(got.value.abs() <= 1.0 + 1e-12);
                let d = conical_p1(sp, r, &b).unwrap().value;
                assert!(d.abs() <= sp.lambda().sqrt() * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn mehler_fock_frozen_forward() {
        let f = RadialProfile::new(|r: f64| r * (-r * r).exp(), Decay::gaussian(1.4, 0.9, 0.0).unwrap());
        let b = ToleranceBudget::with_tol(1e-11).unwrap();
        let v = mehler_fock_forward(&f, SpectralParameter::new(0.5).unwrap(), &b).unwrap();
        assert!((v.value + 0.813_018_329_361_043_8).abs() < 1e-10, "{v:?}");
        assert!(v.err_est <= 1e-11);
    }
}
