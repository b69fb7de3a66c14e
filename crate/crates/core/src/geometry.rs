//! Model surfaces in geodesic polar coordinates: distances, their
//! derivatives in the unit coframe, the Hodge star on 1-forms and
//! surface quadrature.
//!
//! Every surface is written as `ds² = dc1² + S(c1)² dc2²` with
//! `S = id, sin, sinh`. The unit coframe at a point is `(dc1, S dc2)`.

use std::f64::consts::{PI, TAU};
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::specfun::quadrature::{gauss_legendre, integrate_panels, QuadValue, ToleranceBudget};
use crate::specfun::Decay;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SurfaceKind {
    Euclidean,
    Sphere,
    Hyperbolic,
}

impl SurfaceKind {
    pub const ALL: [SurfaceKind; 3] = [SurfaceKind::Euclidean, SurfaceKind::Sphere, SurfaceKind::Hyperbolic];

    /// Warping function `S(r)` of the metric `dr² + S(r)² dθ²`.
    pub fn warp(self, r: f64) -> f64 {
        match self {
            SurfaceKind::Euclidean => r,
            SurfaceKind::Sphere => r.sin(),
            SurfaceKind::Hyperbolic => r.sinh(),
        }
    }

    /// `S′(r)`.
    pub fn warp_derivative(self, r: f64) -> f64 {
        match self {
            SurfaceKind::Euclidean => 1.0,
            SurfaceKind::Sphere => r.cos(),
            SurfaceKind::Hyperbolic => r.cosh(),
        }
    }

    /// Gaussian curvature.
    pub fn curvature(self) -> f64 {
        match self {
            SurfaceKind::Euclidean => 0.0,
            SurfaceKind::Sphere => 1.0,
            SurfaceKind::Hyperbolic => -1.0,
        }
    }

    pub fn is_compact(self) -> bool {
        self == SurfaceKind::Sphere
    }
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SurfaceKind::Euclidean => "euclidean",
            SurfaceKind::Sphere => "sphere",
            SurfaceKind::Hyperbolic => "hyperbolic",
        })
    }
}

fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// A point in geodesic polar coordinates `(c1, c2) = (r or φ, θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    kind: SurfaceKind,
    c1: f64,
    c2: f64,
}

impl Point {
    pub fn new(kind: SurfaceKind, c1: f64, c2: f64) -> Result<Self> {
        if !(c1.is_finite() && c2.is_finite()) {
            return Err(Error::Domain(format!("coordinates must be finite, got ({c1}, {c2})")));
        }
        let ok = match kind {
            SurfaceKind::Sphere => (0.0..=PI).contains(&c1),
            _ => c1 >= 0.0,
        };
        if !ok {
            return Err(Error::Domain(format!("first coordinate {c1} invalid on the {kind}")));
        }
        Ok(Self {
            kind,
            c1,
            c2: normalize_angle(c2),
        })
    }

    pub fn origin(kind: SurfaceKind) -> Self {
        Self { kind, c1: 0.0, c2: 0.0 }
    }

    /// Euclidean point from Cartesian coordinates.
    pub fn from_cartesian(x: f64, y: f64) -> Result<Self> {
        Self::new(SurfaceKind::Euclidean, x.hypot(y), y.atan2(x))
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    /// Cartesian coordinates of a Euclidean point.
    pub fn to_cartesian(&self) -> (f64, f64) {
        let (s, c) = self.c2.sin_cos();
        (self.c1 * c, self.c1 * s)
    }
}

/// Coefficients against the unit coframe `(dc1, S(c1) dc2)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OneFormValue {
    pub a: f64,
    pub b: f64,
}

impl OneFormValue {
    pub const fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    pub fn norm(&self) -> f64 {
        self.a.hypot(self.b)
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.a * other.a + self.b * other.b
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(s * self.a, s * self.b)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.a + other.a, self.b + other.b)
    }

    /// Rotate the frame components by angle `alpha` (counter-clockwise).
    pub fn rotate(&self, alpha: f64) -> Self {
        let (s, c) = alpha.sin_cos();
        Self::new(c * self.a - s * self.b, s * self.a + c * self.b)
    }
}

/// 2×2 coupling of the unit coframe at x (rows) with the one at y (columns).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BiTensor1 {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl BiTensor1 {
    pub const fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0)
    }

    pub const fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 1.0)
    }

    pub fn outer(u: &OneFormValue, v: &OneFormValue) -> Self {
        Self::new(u.a * v.a, u.a * v.b, u.b * v.a, u.b * v.b)
    }

    /// Frame rotation `[[cos α, −sin α], [sin α, cos α]]`.
    pub fn rotation(alpha: f64) -> Self {
        let (s, c) = alpha.sin_cos();
        Self::new(c, -s, s, c)
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.m11, self.m21, self.m12, self.m22)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.m11 + o.m11, self.m12 + o.m12, self.m21 + o.m21, self.m22 + o.m22)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(s * self.m11, s * self.m12, s * self.m21, s * self.m22)
    }

    pub fn matmul(&self, o: &Self) -> Self {
        Self::new(
            self.m11 * o.m11 + self.m12 * o.m21,
            self.m11 * o.m12 + self.m12 * o.m22,
            self.m21 * o.m11 + self.m22 * o.m21,
            self.m21 * o.m12 + self.m22 * o.m22,
        )
    }

    /// Contract the y-leg with a covector at y.
    pub fn apply(&self, v: &OneFormValue) -> OneFormValue {
        OneFormValue::new(self.m11 * v.a + self.m12 * v.b, self.m21 * v.a + self.m22 * v.b)
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        self.sub(o).to_array().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.m11, self.m12, self.m21, self.m22]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

fn check_kinds(kind: SurfaceKind, x: &Point, y: &Point) -> Result<()> {
    for p in [x, y] {
        if p.kind != kind {
            return Err(Error::KindMismatch {
                expected: kind,
                found: p.kind,
            });
        }
    }
    Ok(())
}

/// Geodesic distance, from half-angle forms that stay accurate for nearby
/// and (on the sphere) nearly antipodal points.
pub fn distance(kind: SurfaceKind, x: &Point, y: &Point) -> Result<f64> {
    check_kinds(kind, x, y)?;
    Ok(distance_unchecked(kind, x.c1, x.c2, y.c1, y.c2))
}

pub(crate) fn distance_unchecked(kind: SurfaceKind, r1: f64, t1: f64, r2: f64, t2: f64) -> f64 {
    let sd = (0.5 * (t1 - t2)).sin();
    let sd2 = sd * sd;
    match kind {
        SurfaceKind::Euclidean => {
            let dr = r1 - r2;
            (dr * dr + 4.0 * r1 * r2 * sd2).sqrt()
        }
        SurfaceKind::Hyperbolic => {
            let h = (0.5 * (r1 - r2)).sinh();
            let s = h * h + r1.sinh() * r2.sinh() * sd2;
            2.0 * s.sqrt().asinh()
        }
        SurfaceKind::Sphere => {
            let h = (0.5 * (r1 - r2)).sin();
            let c = (0.5 * (r1 + r2)).cos();
            let ss = r1.sin() * r2.sin();
            let hav = (h * h + ss * sd2).max(0.0);
            let co = (c * c + ss * (1.0 - sd2)).max(0.0);
            2.0 * hav.sqrt().atan2(co.sqrt())
        }
    }
}

/// Unnormalised gradient of `d(·, y)` at `x` in the unit coframe at `x`.
fn raw_gradient(kind: SurfaceKind, x: &Point, y: &Point) -> OneFormValue {
    let delta = x.c2 - y.c2;
    let sd = (0.5 * delta).sin();
    let a = kind.warp(x.c1 - y.c1) + 2.0 * kind.warp_derivative(x.c1) * kind.warp(y.c1) * sd * sd;
    let b = kind.warp(y.c1) * delta.sin();
    OneFormValue::new(a, b)
}

const COINCIDENCE: f64 = 1e-300;

fn check_regular(kind: SurfaceKind, x: &Point, y: &Point) -> Result<f64> {
    let d = distance(kind, x, y)?;
    if d <= COINCIDENCE {
        return Err(Error::CoincidentPoints);
    }
    if kind == SurfaceKind::Sphere && PI - d <= 1e-12 {
        return Err(Error::CutLocus);
    }
    Ok(d)
}

/// `d_x d(x, y)` in the unit coframe at `x`; a unit covector.
pub fn distance_gradient(kind: SurfaceKind, x: &Point, y: &Point) -> Result<OneFormValue> {
    check_regular(kind, x, y)?;
    let g = raw_gradient(kind, x, y);
    let n = g.norm();
    if !(n > 0.0) {
        return Err(Error::CoincidentPoints);
    }
    Ok(g.scale(1.0 / n))
}

/// The two unit covectors `n = d_x d`, `m = ⋆n` at x, and likewise at y.
pub(crate) fn distance_frames(
    kind: SurfaceKind,
    x: &Point,
    y: &Point,
) -> Result<(OneFormValue, OneFormValue, OneFormValue, OneFormValue)> {
    let nx = distance_gradient(kind, x, y)?;
    let ny = distance_gradient(kind, y, x)?;
    Ok((nx, hodge_star_1(&nx), ny, hodge_star_1(&ny)))
}

/// `d_x d_y F(d(x, y))` for `F′(d) = f1`, `F″(d) = f2`:
/// `f2 · n_x⊗n_y + f1 · d_x d_y d`, with `d_x d_y d = m_x⊗m_y / S(d)`.
pub fn mixed_distance_hessian(
    kind: SurfaceKind,
    x: &Point,
    y: &Point,
    f1: f64,
    f2: f64,
) -> Result<BiTensor1> {
    let d = check_regular(kind, x, y)?;
    let (nx, mx, ny, my) = distance_frames(kind, x, y)?;
    let radial = BiTensor1::outer(&nx, &ny).scale(f2);
    let transverse = BiTensor1::outer(&mx, &my).scale(f1 / kind.warp(d));
    Ok(radial.add(&transverse))
}

/// `⋆(a dc1 + b S dc2) = −b dc1 + a S dc2`.
pub fn hodge_star_1(v: &OneFormValue) -> OneFormValue {
    OneFormValue::new(-v.b, v.a)
}

/// `(I + ⋆ₓ⋆ᵧ) M = M + J M Jᵀ` with `J` the matrix of ⋆.
pub fn apply_i_plus_star(m: &BiTensor1) -> BiTensor1 {
    let s = m.m11 + m.m22;
    let t = m.m12 - m.m21;
    BiTensor1::new(s, t, -t, s)
}

/// Integrand sampled on a Gauss–Legendre (cos φ) by uniform θ grid of the
/// sphere, `n_phi × n_theta` nodes.
pub fn integrate_sphere_grid<V: QuadValue>(
    f: impl Fn(&Point) -> V + Sync,
    n_phi: usize,
    n_theta: usize,
) -> Result<V> {
    let (nodes, weights) = gauss_legendre(n_phi);
    let h = TAU / n_theta as f64;
    let rows: Vec<V> = nodes
        .par_iter()
        .zip(weights.par_iter())
        .map(|(&u, &w)| {
            let phi = u.clamp(-1.0, 1.0).acos();
            let mut acc = V::zero();
            for j in 0..n_theta {
                let p = Point {
                    kind: SurfaceKind::Sphere,
                    c1: phi,
                    c2: h * j as f64,
                };
                acc = acc.add(f(&p));
            }
            acc.scale(w * h)
        })
        .collect();
    let total = rows.into_iter().fold(V::zero(), |a, v| a.add(v));
    if !total.is_finite() {
        return Err(Error::Domain("surface integrand is not finite".into()));
    }
    Ok(total)
}

/// `∫ f dA` over the whole surface with an error estimate.
///
/// The sphere refines a product grid until two successive levels agree.
/// The planes need `decay`, a bound on `|f|` in terms of `c1`; the radial
/// integral is adaptive and each ring is a periodic trapezoid in θ.
pub fn integrate_surface<V: QuadValue>(
    kind: SurfaceKind,
    f: impl Fn(&Point) -> V + Sync,
    decay: Option<&Decay>,
    budget: &ToleranceBudget,
) -> Result<(V, f64)> {
    match kind {
        SurfaceKind::Sphere => {
            let mut n = 32;
            let mut prev = integrate_sphere_grid(&f, n, 2 * n)?;
            loop {
                n *= 2;
                let next = integrate_sphere_grid(&f, n, 2 * n)?;
                let diff = next.zip(prev, |a, b| a - b).max_norm();
                if diff <= 0.5 * budget.abs_tol {
                    return Ok((next, diff));
                }
                if n >= 2048 {
                    return Err(Error::NonConvergence {
                        context: "sphere product grid",
                        achieved: diff,
                        requested: budget.abs_tol,
                    });
                }
                prev = next;
            }
        }
        SurfaceKind::Euclidean | SurfaceKind::Hyperbolic => {
            let decay = decay.ok_or(Error::MissingDecayHint(kind))?;
            let (growth, measure) = if kind == SurfaceKind::Euclidean {
                (0.0, TAU)
            } else {
                (1.0, PI)
            };
            // ring measure ≤ 2π r (plane) or 2π sinh r ≤ π e^r
            let (radius, tail) = decay.truncation(0.25 * budget.abs_tol / measure, growth);
            if !radius.is_finite() {
                return Err(Error::MissingDecayHint(kind));
            }
            let tail = measure * tail;
            let ring_tol = 0.25 * budget.abs_tol / (TAU * radius.max(1.0));
            let ring = |r: f64| -> V {
                let w = kind.warp(r);
                if w == 0.0 {
                    return V::zero();
                }
                ring_integral(&f, kind, r, ring_tol / w).scale(w)
            };
            let panels = (radius / 0.5).ceil() as usize;
            let (value, err) = integrate_panels(ring, 0.0, radius, panels.max(1), &budget.scaled(0.5))?;
            Ok((value, err + tail))
        }
    }
}

/// `∫_0^{2π} f(r, θ) dθ` by trapezoid doubling; spectrally accurate for
/// smooth periodic integrands.
fn ring_integral<V: QuadValue>(f: &(impl Fn(&Point) -> V + Sync), kind: SurfaceKind, r: f64, tol: f64) -> V {
    let sample = |n: usize, offset: usize, stride: usize| -> V {
        let h = TAU / n as f64;
        let vals: Vec<V> = (offset..n)
            .step_by(stride)
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&j| f(&Point { kind, c1: r, c2: h * j as f64 }))
            .collect();
        vals.into_iter().fold(V::zero(), |a, v| a.add(v))
    };
    let mut n = 32;
    let mut sum = sample(n, 0, 1);
    let mut prev = sum.scale(TAU / n as f64);
    loop {
        // new nodes are the odd ones of the doubled grid
        sum = sum.add(sample(2 * n, 1, 2));
        n *= 2;
        let cur = sum.scale(TAU / n as f64);
        if cur.zip(prev, |a, b| a - b).max_norm() <= tol || n >= 8192 {
            return cur;
        }
        prev = cur;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(kind: SurfaceKind, a: f64, b: f64) -> Point {
        Point::new(kind, a, b).unwrap()
    }

    #[test]
    fn angles_are_normalised() {
        let p = pt(SurfaceKind::Euclidean, 1.0, -0.5);
        assert!((p.c2() - (TAU - 0.5)).abs() < 1e-15);
        assert_eq!(pt(SurfaceKind::Euclidean, 1.0, -1e-18).c2(), 0.0);
        assert!(Point::new(SurfaceKind::Sphere, 3.5, 0.0).is_err());
        assert!(Point::new(SurfaceKind::Hyperbolic, -0.1, 0.0).is_err());
    }

    #[test]
    fn distance_special_cases() {
        for kind in SurfaceKind::ALL {
            let x = pt(kind, 0.4, 1.0);
            assert_eq!(distance(kind, &x, &x).unwrap(), 0.0);
        }
        let n = pt(SurfaceKind::Sphere, 0.0, 0.0);
        let s = pt(SurfaceKind::Sphere, PI, 0.0);
        assert!((distance(SurfaceKind::Sphere, &n, &s).unwrap() - PI).abs() < 1e-15);
        let a = pt(SurfaceKind::Hyperbolic, 0.5, 0.3);
        let b = pt(SurfaceKind::Hyperbolic, 2.25, 0.3);
        assert!((distance(SurfaceKind::Hyperbolic, &a, &b).unwrap() - 1.75).abs() < 1e-14);
        let e = pt(SurfaceKind::Euclidean, 1.0, 0.0);
        assert!(matches!(
            distance(SurfaceKind::Hyperbolic, &a, &e),
            Err(Error::KindMismatch { .. })
        ));
    }

    #[test]
    fn distance_matches_the_cosine_laws() {
        let (r1, t1, r2, t2): (f64, f64, f64, f64) = (0.8, 0.3, 1.7, 2.0);
        let h = (r1.cosh() * r2.cosh() - r1.sinh() * r2.sinh() * (t1 - t2).cos()).acosh();
        let s = (r1.cos() * r2.cos() + r1.sin() * r2.sin() * (t1 - t2).cos()).acos();
        let e = (r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * (t1 - t2).cos()).sqrt();
        assert!((distance_unchecked(SurfaceKind::Hyperbolic, r1, t1, r2, t2) - h).abs() < 1e-13);
        assert!((distance_unchecked(SurfaceKind::Sphere, r1, t1, r2, t2) - s).abs() < 1e-13);
        assert!((distance_unchecked(SurfaceKind::Euclidean, r1, t1, r2, t2) - e).abs() < 1e-13);
    }

    #[test]
    fn radial_gradient_from_origin() {
        let x = pt(SurfaceKind::Euclidean, 2.0, 0.7);
        let o = Point::origin(SurfaceKind::Euclidean);
        let g = distance_gradient(SurfaceKind::Euclidean, &x, &o).unwrap();
        assert!((g.a - 1.0).abs() < 1e-15 && g.b.abs() < 1e-15);
        assert!(matches!(
            distance_gradient(SurfaceKind::Euclidean, &x, &x),
            Err(Error::CoincidentPoints)
        ));
        let n = pt(SurfaceKind::Sphere, 0.0, 0.0);
        let s = pt(SurfaceKind::Sphere, PI, 0.0);
        assert!(matches!(distance_gradient(SurfaceKind::Sphere, &n, &s), Err(Error::CutLocus)));
    }

    fn fd_gradient(kind: SurfaceKind, x: &Point, y: &Point) -> OneFormValue {
        let h = 1e-5;
        let d = |a: f64, b: f64| distance_unchecked(kind, a, b, y.c1, y.c2);
        let da = (d(x.c1 + h, x.c2) - d(x.c1 - h, x.c2)) / (2.0 * h);
        let db = (d(x.c1, x.c2 + h) - d(x.c1, x.c2 - h)) / (2.0 * h) / kind.warp(x.c1);
        OneFormValue::new(da, db)
    }

    #[test]
    fn sphere_gradient_matches_finite_differences() {
        let x = pt(SurfaceKind::Sphere, 0.7, 0.0);
        let y = pt(SurfaceKind::Sphere, 1.2, 0.9);
        let g = distance_gradient(SurfaceKind::Sphere, &x, &y).unwrap();
        let fd = fd_gradient(SurfaceKind::Sphere, &x, &y);
        assert!((g.a - fd.a).abs() < 1e-9 && (g.b - fd.b).abs() < 1e-9);
        // frozen from the finite-difference oracle
        assert!((g.a - (-0.276_044_897_809_636_7)).abs() < 1e-9, "{:?}", g);
        assert!((g.b - (-0.961_144_741_645_745_7)).abs() < 1e-9, "{:?}", g);
    }

    #[test]
    fn hessian_matches_cross_differences() {
        for kind in SurfaceKind::ALL {
            let x = pt(kind, 0.9, 0.4);
            let y = pt(kind, 1.3, 1.6);
            let d = distance(kind, &x, &y).unwrap();
            // F(d) = sin(d) + d³/6
            let f = |d: f64| d.sin() + d * d * d / 6.0;
            let f1 = d.cos() + 0.5 * d * d;
            let f2 = -d.sin() + d;
            let m = mixed_distance_hessian(kind, &x, &y, f1, f2).unwrap();
            let h = 1e-4;
            let fd = |i: usize, j: usize| -> f64 {
                let mut acc = 0.0;
                for (si, sj, w) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
                    let (mut a1, mut b1, mut a2, mut b2) = (x.c1, x.c2, y.c1, y.c2);
                    if i == 0 { a1 += si * h } else { b1 += si * h }
                    if j == 0 { a2 += sj * h } else { b2 += sj * h }
                    acc += w * f(distance_unchecked(kind, a1, b1, a2, b2));
                }
                let mut v = acc / (4.0 * h * h);
                if i == 1 {
                    v /= kind.warp(x.c1);
                }
                if j == 1 {
                    v /= kind.warp(y.c1);
                }
                v
            };
            let oracle = BiTensor1::new(fd(0, 0), fd(0, 1), fd(1, 0), fd(1, 1));
            assert!(m.max_abs_diff(&oracle) < 1e-5, "{kind}: {m:?} vs {oracle:?}");
        }
    }

    #[test]
    fn star_and_projector() {
        let v = OneFormValue::new(1.0, 0.0);
        assert_eq!(hodge_star_1(&v), OneFormValue::new(0.0, 1.0));
        assert_eq!(hodge_star_1(&OneFormValue::new(0.0, 1.0)), OneFormValue::new(-1.0, 0.0));
        assert_eq!(apply_i_plus_star(&BiTensor1::identity()), BiTensor1::identity().scale(2.0));
        assert_eq!(
            apply_i_plus_star(&BiTensor1::new(0.0, 1.0, -1.0, 0.0)),
            BiTensor1::new(0.0, 2.0, -2.0, 0.0)
        );
    }

    #[test]
    fn surface_integrals() {
        let b = ToleranceBudget::with_tol(1e-10).unwrap();
        let (v, _) = integrate_surface(SurfaceKind::Sphere, |_| 1.0, None, &b).unwrap();
        assert!((v - 4.0 * PI).abs() < 1e-12);
        let decay = Decay::gaussian(1.0, 1.0, 0.0).unwrap();
        let (v, e) = integrate_surface(SurfaceKind::Euclidean, |p| (-p.c1() * p.c1()).exp(), Some(&decay), &b).unwrap();
        assert!((v - PI).abs() < 1e-10 && e <= 1e-10);
        let (v, _) = integrate_surface(SurfaceKind::Euclidean, |_| 0.0, Some(&decay), &b).unwrap();
        assert_eq!(v, 0.0);
        assert!(matches!(
            integrate_surface(SurfaceKind::Hyperbolic, |_| 1.0, None, &b),
            Err(Error::MissingDecayHint(SurfaceKind::Hyperbolic))
        ));
        // ∫ e^{−r²} sinh r dr · 2π = π √π e^{1/4} erf(1/2)
        let (v, _) = integrate_surface(SurfaceKind::Hyperbolic, |p| (-p.c1() * p.c1()).exp(), Some(&decay), &b).unwrap();
        let expected = PI * PI.sqrt() * 0.25f64.exp() * 0.520_499_877_813_046_5;
        assert!((v - expected).abs() < 1e-9, "{v} vs {expected}");
    }
}
