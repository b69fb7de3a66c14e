//! The heat semigroup applied to sampled fields,
//! `(e^{−tΔ}ν)(x) = ∫ K(x, y, t) ν(y) dA_y`.

use std::f64::consts::PI;
use std::sync::Mutex;

use rayon::prelude::*;

use super::{combined, euclid, hyperbolic::RadialTable, k1, HeatTime};
use crate::error::{Error, Result};
use crate::geometry::{distance, integrate_surface, OneFormValue, Point, SurfaceKind};
use crate::specfun::quadrature::{Estimate, ToleranceBudget};
use crate::specfun::Decay;

/// Records the first failure raised inside an integrand.
struct FirstError(Mutex<Option<Error>>);

impl FirstError {
    fn new() -> Self {
        Self(Mutex::new(None))
    }

    fn set(&self, e: Error) {
        self.0.lock().unwrap().get_or_insert(e);
    }

    fn check(self) -> Result<()> {
        match self.0.into_inner().unwrap() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

/// Decay of `K(x, ·) f` about the origin when `|K| ≤ kmax e^{−(d)²/4t}`.
fn kernel_decay(field: &Decay, kmax: f64, t: f64, rx: f64) -> Decay {
    match *field {
        Decay::Compact { radius, bound } => Decay::Compact {
            radius,
            bound: bound * kmax,
        },
        Decay::Gaussian { coeff: bound, .. } | Decay::Bounded { bound } => Decay::Gaussian {
            coeff: bound * kmax,
            rate: 0.25 / t,
            offset: rx,
        },
    }
}

/// Radius reached by [`integrate_surface`] on the hyperbolic plane.
fn hyperbolic_reach(decay: &Decay, budget: &ToleranceBudget) -> f64 {
    decay.truncation(0.25 * budget.abs_tol / PI, 1.0).0
}

/// `e^{−tΔ₀} f` at each target. The planes require a bound on `|f|`.
pub fn apply_k0(
    kind: SurfaceKind,
    f: impl Fn(&Point) -> f64 + Sync,
    decay: Option<&Decay>,
    targets: &[Point],
    t: f64,
    budget: &ToleranceBudget,
) -> Result<Vec<Estimate>> {
    let t = HeatTime::new(t)?.get();
    let inner = budget.scaled(0.5);
    let table = match kind {
        SurfaceKind::Hyperbolic => {
            let decay = decay.ok_or(Error::MissingDecayHint(kind))?;
            let kmax = (-0.25 * t).exp() / (4.0 * PI * t);
            let reach = targets
                .iter()
                .map(|x| x.c1() + hyperbolic_reach(&kernel_decay(decay, kmax, t, x.c1()), &inner))
                .fold(1.0, f64::max);
            Some(RadialTable::build(t, reach + 0.5, &inner)?)
        }
        _ => None,
    };
    targets
        .par_iter()
        .map(|x| {
            let errors = FirstError::new();
            let integrand = |y: &Point| -> f64 {
                let fy = f(y);
                if fy == 0.0 {
                    return 0.0;
                }
                let d = match distance(kind, x, y) {
                    Ok(d) => d,
                    Err(e) => {
                        errors.set(e);
                        return 0.0;
                    }
                };
                let k = match kind {
                    SurfaceKind::Euclidean => euclid::k0(d, t),
                    SurfaceKind::Hyperbolic => table.as_ref().and_then(|tb| tb.eval(d)).map_or(f64::NAN, |v| v[0]),
                    SurfaceKind::Sphere => match super::sphere::radial(d, t, &inner) {
                        Ok(r) => r.k0,
                        Err(e) => {
                            errors.set(e);
                            0.0
                        }
                    },
                };
                k * fy
            };
            let decay = match (kind, decay) {
                (SurfaceKind::Sphere, _) => None,
                (_, None) => return Err(Error::MissingDecayHint(kind)),
                (SurfaceKind::Euclidean, Some(dc)) => Some(kernel_decay(dc, 1.0 / (4.0 * PI * t), t, x.c1())),
                (SurfaceKind::Hyperbolic, Some(dc)) => {
                    Some(kernel_decay(dc, (-0.25 * t).exp() / (4.0 * PI * t), t, x.c1()))
                }
            };
            let (value, err) = integrate_surface(kind, integrand, decay.as_ref(), &inner)?;
            errors.check()?;
            let table_err = table.as_ref().map_or(0.0, |tb| tb.err_est()) * sup_bound_or_one(decay.as_ref());
            Ok(Estimate {
                value,
                err_est: err + table_err,
            })
        })
        .collect()
}

fn sup_bound_or_one(decay: Option<&Decay>) -> f64 {
    decay.map_or(1.0, Decay::sup)
}

/// `e^{−tΔ₁} ν` at each target, components in the unit coframe there.
///
/// On the hyperbolic plane the kernel decays only exponentially in the
/// distance, so truncation follows the decay hint of `ν` alone.
pub fn apply_k1(
    kind: SurfaceKind,
    nu: impl Fn(&Point) -> OneFormValue + Sync,
    decay: Option<&Decay>,
    targets: &[Point],
    t: f64,
    budget: &ToleranceBudget,
) -> Result<Vec<(OneFormValue, f64)>> {
    let t = HeatTime::new(t)?.get();
    let inner = budget.scaled(0.5);
    let table = match kind {
        SurfaceKind::Hyperbolic => {
            let decay = decay.ok_or(Error::MissingDecayHint(kind))?;
            let far = targets.iter().map(|x| x.c1()).fold(0.0, f64::max);
            // a first bound on |λ| fixes the reach, near which it is tiny anyway
            let probe = RadialTable::build(t, 1.0, &inner)?;
            let scaled = scale_decay(decay, 4.0 * probe.lambda_bound());
            let reach = far + hyperbolic_reach(&scaled, &inner);
            if !reach.is_finite() {
                // a bare bound on |ν| gives no reach: the kernel itself is not Gaussian here
                return Err(Error::MissingDecayHint(kind));
            }
            Some(RadialTable::build(t, reach + 0.5, &inner)?)
        }
        _ => None,
    };
    targets
        .par_iter()
        .map(|x| {
            let errors = FirstError::new();
            let integrand = |y: &Point| -> [f64; 2] {
                let v = nu(y);
                if v.a == 0.0 && v.b == 0.0 {
                    return [0.0; 2];
                }
                let m = match kind {
                    SurfaceKind::Sphere => match k1(kind, x, y, t, &inner) {
                        Ok(k) => k.matrix,
                        Err(Error::CutLocus) => return [0.0; 2],
                        Err(e) => {
                            errors.set(e);
                            return [0.0; 2];
                        }
                    },
                    _ => {
                        let d = match distance(kind, x, y) {
                            Ok(d) => d,
                            Err(e) => {
                                errors.set(e);
                                return [0.0; 2];
                            }
                        };
                        let lambda = match kind {
                            SurfaceKind::Euclidean => -euclid::k0(d, t),
                            _ => table.as_ref().and_then(|tb| tb.eval(d)).map_or(f64::NAN, |v| v[1]),
                        };
                        if d == 0.0 {
                            return [-lambda * v.a, -lambda * v.b];
                        }
                        match combined(kind, x, y, lambda) {
                            Ok(m) => m,
                            Err(e) => {
                                errors.set(e);
                                return [0.0; 2];
                            }
                        }
                    }
                };
                let w = m.apply(&v);
                [w.a, w.b]
            };
            let decay = match (kind, decay) {
                (SurfaceKind::Sphere, _) => None,
                (_, None) => return Err(Error::MissingDecayHint(kind)),
                (SurfaceKind::Euclidean, Some(dc)) => Some(kernel_decay(dc, 1.0 / (4.0 * PI * t), t, x.c1())),
                (SurfaceKind::Hyperbolic, Some(dc)) => {
                    Some(scale_decay(dc, 1.25 * table.as_ref().map_or(1.0, |tb| tb.lambda_bound())))
                }
            };
            let (v, err) = integrate_surface(kind, integrand, decay.as_ref(), &inner)?;
            errors.check()?;
            let table_err = table.as_ref().map_or(0.0, |tb| tb.err_est()) * sup_bound_or_one(decay.as_ref());
            Ok((OneFormValue::new(v[0], v[1]), err + table_err))
        })
        .collect()
}

fn scale_decay(decay: &Decay, s: f64) -> Decay {
    match *decay {
        Decay::Gaussian { coeff, rate, offset } => Decay::Gaussian {
            coeff: coeff * s,
            rate,
            offset,
        },
        Decay::Compact { radius, bound } => Decay::Compact {
            radius,
            bound: bound * s,
        },
        Decay::Bounded { bound } => Decay::Bounded { bound: bound * s },
    }
}
