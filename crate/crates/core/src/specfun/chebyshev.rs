//! Piecewise Chebyshev interpolation of expensive smooth profiles.
//!
//! Panels are bisected until the trailing Chebyshev coefficients fall
//! below the tolerance, so the table carries its own error estimate.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::specfun::quadrature::QuadValue;

const DEGREE: usize = 16;

#[derive(Debug, Clone)]
struct ChebPanel<V> {
    a: f64,
    b: f64,
    coeffs: Vec<V>,
}

/// Piecewise Chebyshev interpolant of `f: [a, b] → V`.
#[derive(Debug, Clone)]
pub struct ChebyshevTable<V> {
    panels: Vec<ChebPanel<V>>,
    err_est: f64,
    evaluations: usize,
}

impl<V: QuadValue> ChebyshevTable<V> {
    /// Fit `f` on `[a, b]`, starting from `initial_panels` equal panels.
    pub fn build(
        f: impl Fn(f64) -> Result<V> + Sync,
        a: f64,
        b: f64,
        initial_panels: usize,
        tol: f64,
        max_depth: u32,
    ) -> Result<Self> {
        if !(a < b) {
            return Err(Error::InvalidParameter(format!(
                "table range must satisfy a < b, got [{a}, {b}]"
            )));
        }
        let n = initial_panels.max(1);
        let width = (b - a) / n as f64;
        let mut pending: Vec<(f64, f64, u32)> = (0..n)
            .map(|i| {
                let hi = if i + 1 == n { b } else { a + width * (i + 1) as f64 };
                (a + width * i as f64, hi, 0)
            })
            .collect();
        let mut done = Vec::new();
        let mut err_est: f64 = 0.0;
        let mut evaluations = 0;
        while let Some((lo, hi, depth)) = pending.pop() {
            let coeffs = fit_panel(&f, lo, hi)?;
            evaluations += DEGREE + 1;
            let tail = coeffs[DEGREE - 1].max_norm() + coeffs[DEGREE].max_norm();
            if tail <= tol || depth >= max_depth {
                if tail > tol {
                    return Err(Error::NonConvergence {
                        context: "chebyshev table",
                        achieved: tail,
                        requested: tol,
                    });
                }
                err_est = err_est.max(tail);
                done.push(ChebPanel { a: lo, b: hi, coeffs });
            } else {
                let mid = 0.5 * (lo + hi);
                pending.push((mid, hi, depth + 1));
                pending.push((lo, mid, depth + 1));
            }
        }
        done.sort_by(|p, q| p.a.total_cmp(&q.a));
        Ok(Self {
            panels: done,
            err_est,
            evaluations,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.panels[0].a, self.panels[self.panels.len() - 1].b)
    }

    pub fn err_est(&self) -> f64 {
        self.err_est
    }

    pub fn panel_count(&self) -> usize {
        self.panels.len()
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    /// Interpolated value; `None` outside the fitted domain.
    pub fn eval(&self, x: f64) -> Option<V> {
        let (lo, hi) = self.domain();
        if !(x >= lo && x <= hi) {
            return None;
        }
        let idx = self.panels.partition_point(|p| p.b < x).min(self.panels.len() - 1);
        let p = &self.panels[idx];
        let s = (2.0 * x - p.a - p.b) / (p.b - p.a);
        Some(clenshaw(&p.coeffs, s))
    }
}

fn fit_panel<V: QuadValue>(f: &(impl Fn(f64) -> Result<V> + Sync), a: f64, b: f64) -> Result<Vec<V>> {
    let n = DEGREE;
    let values: Vec<V> = (0..=n)
        .into_par_iter()
        .map(|k| {
            let s = (std::f64::consts::PI * k as f64 / n as f64).cos();
            f(0.5 * (a + b) + 0.5 * (b - a) * s)
        })
        .collect::<Result<Vec<_>>>()?;
    // Discrete Chebyshev transform on the Lobatto points.
    let mut coeffs = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let mut c = V::zero();
        for (k, v) in values.iter().enumerate() {
            let w = if k == 0 || k == n { 0.5 } else { 1.0 };
            let ang = std::f64::consts::PI * (j * k) as f64 / n as f64;
            c = c.add(v.scale(w * ang.cos()));
        }
        let norm = if j == 0 || j == n { 1.0 / n as f64 } else { 2.0 / n as f64 };
        coeffs.push(c.scale(norm));
    }
    Ok(coeffs)
}

fn clenshaw<V: QuadValue>(coeffs: &[V], s: f64) -> V {
    let mut b1 = V::zero();
    let mut b2 = V::zero();
    for c in coeffs.iter().skip(1).rev() {
        let b0 = c.add(b1.scale(2.0 * s)).add(b2.scale(-1.0));
        b2 = b1;
        b1 = b0;
    }
    coeffs[0].add(b1.scale(s)).add(b2.scale(-1.0))
}
