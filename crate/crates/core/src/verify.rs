//! Self-checks against independent oracles and structural identities.
//!
//! Each suite returns one [`CheckRecord`] per check: the measured error and
//! the tolerance it is held to. A tolerance override replaces every check's
//! threshold but not the budgets used for the computation, so an
//! unattainable threshold fails instead of running forever.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{apply_i_plus_star, distance, distance_gradient, integrate_sphere_grid, integrate_surface};
use crate::geometry::{BiTensor1, OneFormValue, Point, SurfaceKind};
use crate::kernels::{
    apply_k0, apply_k1, heat_residual, k0, k0_distance_derivative, k0_h2_mckean, k0_radial, k1, k2, FormSample,
    RadialTable,
};
use crate::quotient::{
    act, k0_quotient, k0_quotient_truncated, torus_fourier_oracle, translate_along_axis, CoveringGroupSpec,
    GroupElement, QuotientSurface,
};
use crate::specfun::chebyshev::ChebyshevTable;
use crate::specfun::quadrature::{gauss_legendre, Estimate, GaussianTail, ToleranceBudget};
use crate::specfun::{
    legendre_p, legendre_p1, mehler_fock_forward, mehler_fock_inverse, tabulate_forward, Decay, RadialProfile,
    SpectralParameter,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Normalization,
    Semigroup,
    Residual,
    DualH2,
    EuclidK1,
    Intertwine,
    Tiling,
    MehlerFock,
    All,
}

impl Suite {
    /// The individual suites, in the order `All` runs them.
    pub const EACH: [Suite; 8] = [
        Suite::Normalization,
        Suite::Semigroup,
        Suite::Residual,
        Suite::DualH2,
        Suite::EuclidK1,
        Suite::Intertwine,
        Suite::Tiling,
        Suite::MehlerFock,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Normalization => "normalization",
            Suite::Semigroup => "semigroup",
            Suite::Residual => "residual",
            Suite::DualH2 => "dual-h2",
            Suite::EuclidK1 => "euclid-k1",
            Suite::Intertwine => "intertwine",
            Suite::Tiling => "tiling",
            Suite::MehlerFock => "mehler-fock",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain(std::iter::once(&Suite::All))
            .find(|suite| suite.name() == s)
            .copied()
            .ok_or_else(|| Error::InvalidParameter(format!("unknown verify suite '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub suite: &'static str,
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckRecord {
    fn new(suite: Suite, name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self {
            suite: suite.name(),
            name: name.into(),
            measured,
            tolerance,
            // NaN never passes
            passed: measured <= tolerance,
        }
    }
}

struct Checks {
    suite: Suite,
    tol: Option<f64>,
    out: Vec<CheckRecord>,
}

impl Checks {
    fn new(suite: Suite, tol: Option<f64>) -> Self {
        Self {
            suite,
            tol,
            out: Vec::new(),
        }
    }

    fn push(&mut self, name: impl Into<String>, measured: f64, default_tol: f64) {
        let tol = self.tol.unwrap_or(default_tol);
        self.out.push(CheckRecord::new(self.suite, name, measured, tol));
    }
}

/// Runs one suite, or every suite for [`Suite::All`].
pub fn run_suite(suite: Suite, tol: Option<f64>) -> Result<Vec<CheckRecord>> {
    if let Some(t) = tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("tolerance must be positive, got {t}")));
        }
    }
    match suite {
        Suite::All => {
            let mut all = Vec::new();
            for s in Suite::EACH {
                all.extend(run_suite(s, tol)?);
            }
            Ok(all)
        }
        Suite::Normalization => normalization(tol),
        Suite::Semigroup => semigroup(tol),
        Suite::Residual => residual(tol),
        Suite::DualH2 => dual_h2(tol),
        Suite::EuclidK1 => euclid_k1(tol),
        Suite::Intertwine => intertwine(tol),
        Suite::Tiling => tiling(tol),
        Suite::MehlerFock => mehler_fock(tol),
    }
}

fn budget(tol: f64) -> ToleranceBudget {
    ToleranceBudget::with_tol(tol).expect("positive literal tolerance")
}

fn pt(kind: SurfaceKind, c1: f64, c2: f64) -> Point {
    Point::new(kind, c1, c2).expect("literal point is valid")
}

fn base_points(kind: SurfaceKind) -> [(&'static str, Point); 3] {
    match kind {
        SurfaceKind::Sphere => [
            ("pole", Point::origin(kind)),
            ("mid", pt(kind, PI / 2.0, 1.0)),
            ("generic", pt(kind, 2.2, 4.0)),
        ],
        _ => [
            ("pole", Point::origin(kind)),
            ("mid", pt(kind, 1.0, 0.5)),
            ("generic", pt(kind, 2.5, 4.0)),
        ],
    }
}

/// `∫ K₀(x, ·, t) dA = 1`.
pub fn normalization(tol: Option<f64>) -> Result<Vec<CheckRecord>> {
    let mut c = Checks::new(Suite::Normalization, tol);
    let b = budget(1e-8);
    for kind in SurfaceKind::ALL {
        for t in [0.1, 1.0] {
            let pts = base_points(kind);
            let targets: Vec<Point> = pts.iter().map(|p| p.1).collect();
            let decay = Decay::Bounded { bound: 1.0 };
            let out = apply_k0(kind, |_| 1.0, Some(&decay), &targets, t, &b)?;
            for ((label, _), e) in pts.iter().zip(out) {
                c.push(format!("{kind}/t={t}/{label}"), (e.value - 1.0).abs(), 1e-6);
            }
        }
    }
    Ok(c.out)
}

fn first_error<T>(slot: &Mutex<Option<Error>>, r: Result<T>, fallback: T) -> T {
    match r {
        Ok(v) => v,
        Err(e) => {
            slot.lock().unwrap().get_or_insert(e);
            fallback
        }
    }
}

fn take_error(slot: Mutex<Option<Error>>) -> Result<()> {
    match slot.into_inner().unwrap() {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// `∫ K₀(x, z, s) K₀(z, y, t) dA_z = K₀(x, y, s + t)`.
pub fn semigroup(tol: Option<f64>) -> Result<Vec<CheckRecord>> {
    let mut c = Checks::new(Suite::Semigroup, tol);
    let (s, t) = (0.2, 0.3);
    let b = budget(1e-10);

    let kind = SurfaceKind::Sphere;
    let pairs = [
        ((0.3, 0.0), (1.0, 0.7)),
        ((1.2, 2.0), (2.5, 5.0)),
        ((0.0, 0.0), (PI, 0.0)),
    ];
    for (i, (xa, ya)) in pairs.iter().enumerate() {
        let x = pt(kind, xa.0, xa.1);
        let y = pt(kind, ya.0, ya.1);
        let failure = Mutex::new(None);
        let composed = integrate_sphere_grid(
            |z: &Point| {
                let a = first_error(&failure, k0(kind, &x, z, s, &b).map(|v| v.value), 0.0);
                let bb = first_error(&failure, k0(kind, z, &y, t, &b).map(|v| v.value), 0.0);
                a * bb
            },
            64,
            128,
        )?;
        take_error(failure)?;
        let direct = k0(kind, &x, &y, s + t, &b)?.value;
        c.push(format!("sphere/pair{i}"), (composed - direct).abs(), 1e-4);
    }

    // truncated planes, with the composition integrated to the kernel's reach
    for kind in [SurfaceKind::Euclidean, SurfaceKind::Hyperbolic] {
        let x = pt(kind, 0.4, 0.0);
        let y = pt(kind, 0.9, 1.2);
        let kmax = |tt: f64| 1.0 / (4.0 * PI * tt);
        let decay = Decay::gaussian(kmax(s) * kmax(t), 0.25 / s, x.c1())?;
        let tables = match kind {
            SurfaceKind::Hyperbolic => {
                let reach = 12.0;
                Some((RadialTable::build(s, reach, &b)?, RadialTable::build(t, reach, &b)?))
            }
            _ => None,
        };
        let failure = Mutex::new(None);
        let kern = |tt: f64, p: &Point, q: &Point, table: Option<&RadialTable>| -> Result<f64> {
            match table {
                Some(tb) => {
                    let d = distance(kind, p, q)?;
                    tb.eval(d).map(|v| v[0]).ok_or(Error::Domain(format!("distance {d} beyond table")))
                }
                None => Ok(k0(kind, p, q, tt, &b)?.value),
            }
        };
        let (composed, _) = integrate_surface(
            kind,
            |z: &Point| {
                let (ts, tt) = match &tables {
                    Some((a, bb)) => (Some(a), Some(bb)),
                    None => (None, None),
                };
                let a = first_error(&failure, kern(s, &x, z, ts), 0.0);
                let bb = first_error(&failure, kern(t, z, &y, tt), 0.0);
                a * bb
            },
            Some(&decay),
            &budget(1e-7),
        )?;
        take_error(failure)?;
        let direct = k0(kind, &x, &y, s + t, &b)?.value;
        c.push(format!("{kind}/truncated"), (composed - direct).abs(), 1e-3);
    }
    Ok(c.out)
}

/// Finite-difference residual of the heat equation for `K₀`, both columns
/// of `K₁` and `K₂`, as functions of the first point.
pub fn residual(tol: Option<f64>) -> Result<Vec<CheckRecord>> {
    let mut c = Checks::new(Suite::Residual, tol);
    let (h_t, h_s) = (1e-3, 1e-2);
    let b = budget(1e-11);
    let t = 0.5;
    for kind in SurfaceKind::ALL {
        let y = pt(kind, 0.6, 2.5);
        let xs = [pt(kind, 1.0, 0.3), pt(kind, 1.7, 1.9)];
        for (i, x) in xs.iter().enumerate() {
            let scalar = |p: &Point, tt: f64| -> Result<FormSample> { Ok(FormSample::Scalar(k0(kind, p, &y, tt, &b)?.value)) };
            let r0 = heat_residual(kind, scalar, x, t, h_t, h_s)?;
            c.push(format!("{kind}/x{i}/k0"), r0, 1e-3);
            for col in 0..2 {
                let form = |p: &Point, tt: f64| -> Result<FormSample> {
                    let m = k1(kind, p, &y, tt, &b)?.matrix.to_array();
                    Ok(FormSample::OneForm(OneFormValue::new(m[col], m[2 + col])))
                };
                let r1 = heat_residual(kind, form, x, t, h_t, h_s)?;
                c.push(format!("{kind}/x{i}/k1-col{}", col + 1), r1, 1e-3);
            }
            let density = |p: &Point, tt: f64| -> Result<FormSample> { Ok(FormSample::Scalar(k2(kind, p, &y, tt, &b)?.value)) };
            let r2 = heat_residual(kind, density, x, t, h_t, h_s)?;
            c.push(format!("{kind}/x{i}/k2"), r2, 1e-3);
        }
    }
    Ok(c.out)
}

/// Spectral and McKean forms of the hyperbolic kernel on a 10×10 grid.
pub fn dual_h2(tol: Option<f64>) -> Result<Vec<CheckRecord>> {
    let mut c = Checks::new(Suite::DualH2, tol);
    let b = budget(1e-9);
    let b_mk = budget(1e-10);
    let grid: Vec<(f64, f64)> = (0..10)
        .flat_map(|i| (0..10).map(move |j| (0.1 + 2.9 * i as f64 / 9.0, 0.1 + 1.9 * j as f64 / 9.0)))
        .collect();
    let diffs: Vec<f64> = grid
        .par_iter()
        .map(|&(r, t)| {
            let spectral = k0_radial(SurfaceKind::Hyperbolic, r, t, &b)?.value;
            let mckean = k0_h2_mckean(r, t, &b_mk)?.value;
            Ok((spectral - mckean).abs())
        })
        .collect::<Result<_>>()?;
    for ((r, t), d) in grid.iter().zip(diffs) {
        c.push(format!("r={r:.4}/t={t:.4}"), d, 1e-6);
    }
    Ok(c.out)
}

fn random_point(rng: &mut ChaCha8Rng, kind: SurfaceKind) -> Point {
    let rmax = if kind == SurfaceKind::Sphere { PI } else { 3.0 };
    pt(kind, rng.gen_range(0.0..rmax), rng.gen_range(0.0..2.0 * PI))
}

/// The polar closed form of the planar 1-form kernel,
/// `K₀ · [[cos Δ, sin Δ], [−sin Δ, cos Δ]]` with `Δ = θ₁ − θ₂`.
pub fn euclidean_k1_closed_form(x: &Point, y: &Point, t: f64) -> Result<BiTensor1> {
    let k = k0(SurfaceKind::Euclidean, x, y, t, &ToleranceBudget::default())?.value;
    let (s, c) = (x.c2() - y.c2()).sin_cos();
    Ok(BiTensor1::new(c, s, -s, c).scale(k))
}

/// Planar `K₁` pipeline against the closed form, the projector identity
/// `(I+⋆⋆)K₁ = 2K₁`, and `K₂ = K₀` on every surface.
pub fn euclid_k1(tol: Option<f64>) -> Result<Vec<CheckRecord>> {
    let mut c = Checks::new(Suite::EuclidK1, tol);
    let b = budget(1e-10);
    let mut rng = ChaCha8Rng::seed_from_u64(0x4b31);
    let kind = SurfaceKind::Euclidean;
    let mut worst = 0.0f64;
    let mut worst_proj = 0.0f64;
    for _ in 0..100 {
        let x = random_point(&mut rng, kind);
        let y = random_point(&mut rng, kind);
        let t = rng.gen_range(0.1..2.0);
        let m = k1(kind, &x, &y, t, &b)?.matrix;
        worst = worst.max(m.max_abs_diff(&euclidean_k1_closed_form(&x, &y, t)?));
        worst_proj = worst_proj.max(apply_i_plus_star(&m).max_abs_diff(&m.scale(2.0)));
    }
    c.push("closed-form/100-pairs", worst, 1e-8);
    c.push("projector/100-pairs", worst_proj, 1e-12);

    for kind in SurfaceKind::ALL {
        let mut worst_proj = 0.0f64;
        let mut worst_k2 = 0.0f64;
        for _ in 0..20 {
            let x = random_point(&mut rng, kind);
            let y = random_point(&mut rng, kind);
            let t = rng.gen_range(0.1..2.0);
            let a = k0(kind, &x, &y, t, &b)?.value;
            let d = k2(kind, &x, &y, t, &b)?.value;
            worst_k2 = worst_k2.max((a - d).abs());
            match k1(kind, &x, &y, t, &b) {
                Ok(m) => {
                    let m = m.matrix;
                    worst_proj = worst_proj.max(apply_i_plus_star(&m).max_abs_diff(&m.scale(2.0)));
                }
                Err(Error::CutLocus) => {}
                Err(e) => return Err(e),
            }
        }
        c.push(format!("{kind}/k2-equals-k0"), worst_k2, 1e-12);
        c.push(format!("{kind}/projector"), worst_proj, 1e-12);
    }
    Ok(c.out)
}

/// `d ∘ e^{−tΔ₀} = e^{−tΔ₁} ∘ d` on the sphere for `P₁(cos φ)` and
/// `P₂(cos φ)`, each side also against `e^{−n(n+1)t} dP_n`.
pub fn intertwine(tol: Option<f64>) -> Result<Vec<CheckRecord>> {
    let mut c = Checks::new(Suite::Intertwine, tol);
    let kind = SurfaceKind::Sphere;
    let t = 0.5;
    let b = budget(1e-9);
    let targets = [pt(kind, 0.7, 0.3), pt(kind, 1.9, 2.0)];
    for n in [1usize, 2] {
        let f = |p: &Point| legendre_p(n, p.c1().cos()).unwrap_or(f64::NAN);
        let df = |p: &Point| OneFormValue::new(legendre_p1(n, p.c1().cos()).unwrap_or(f64::NAN), 0.0);
        let rhs = apply_k1(kind, df, None, &targets, t, &b)?;
        let ev = (-((n * (n + 1)) as f64) * t).exp();
        for (i, x) in targets.iter().enumerate() {
            let failure = Mutex::new(None);
            // d_x ∫ K₀(d(x, y)) f(y) dA = ∫ ∂_d K₀ · d_x d(x, y) f(y) dA
            let (lhs, _) = integrate_surface(
                kind,
                |y: &Point| -> [f64; 2] {
                    let grad = match distance_gradient(kind, x, y) {
                        Ok(g) => g,
                        Err(Error::CoincidentPoints) | Err(Error::CutLocus) => return [0.0; 2],
                        Err(e) => {
                            failure.lock().unwrap().get_or_insert(e);
                            return [0.0; 2];
                        }
                    };
                    let d = distance(kind, x, y).unwrap_or(0.0);
                    let dk = first_error(&failure, k0_distance_derivative(kind, d, t, &b).map(|v| v.0), 0.0);
                    let s = dk * f(y);
                    [s * grad.a, s * grad.b]
                },
                None,
                &budget(1e-7),
            )?;
            take_error(failure)?;
            let lhs = OneFormValue::new(lhs[0], lhs[1]);
            let exact = df(x).scale(ev);
            let r = rhs[i].0;
            let err = |a: &OneFormValue, e: &OneFormValue| (a.a - e.a).abs().max((a.b - e.b).abs());
            c.push(format!("P{n}/x{i}/d-heat0-vs-heat1-d"), err(&lhs, &r), 1e-4);
            c.push(format!("P{n}/x{i}/heat1-d-vs-exact"), err(&r, &exact), 1e-4);
        }
    }
    Ok(c.out)
}

fn cart(x: f64, y: f64) -> Point {
    Point::from_cartesian(x, y).expect("finite literal")
}

/// Image sums on the unit torus against the Fourier oracle, periodicity,
/// normalisation over a cell, truncation monotonicity and the axis-shift
/// symmetry of a hyperbolic cylinder.
pub fn tiling(tol: Option<f64>) -> Result<Vec<CheckRecord>> {
    let mut c = Checks::new(Suite::Tiling, tol);
    let b = budget(1e-12);
    let v1 = [1.0, 0.0];
    let v2 = [0.0, 1.0];
    let torus = QuotientSurface::new(CoveringGroupSpec::EuclideanLattice { v1, v2 })?;
    let o = Point::origin(SurfaceKind::Euclidean);

    for t in [0.1, 0.25, 1.0] {
        let mut worst = 0.0f64;
        for i in 0..5 {
            for j in 0..5 {
                let x = cart(i as f64 / 5.0, j as f64 / 5.0);
                let img = k0_quotient(&torus, &x, &o, t, &b)?.value;
                let fou = torus_fourier_oracle(v1, v2, &x, &o, t, &b)?.value;
                worst = worst.max((img - fou).abs());
            }
        }
        c.push(format!("theta-identity/t={t}"), worst, 1e-10);
    }

    let long = k0_quotient(&torus, &o, &o, 20.0, &b)?.value;
    c.push("long-time/t=20", (long - 1.0).abs(), 1e-10);

    let mut rng = ChaCha8Rng::seed_from_u64(0x7015);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let x = torus.reduce(&cart(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)))?;
        let y = torus.reduce(&cart(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)))?;
        let g = GroupElement::new(rng.gen_range(-3..=3), rng.gen_range(-3..=3));
        let moved = torus.reduce(&act(torus.group(), &g, &y)?)?;
        let t = rng.gen_range(0.1..1.0);
        let a = k0_quotient(&torus, &x, &y, t, &b)?.value;
        let bb = k0_quotient(&torus, &x, &moved, t, &b)?.value;
        worst = worst.max((a - bb).abs());
    }
    c.push("periodicity/10-samples", worst, 1e-12);

    // the cell integrand is smooth and periodic: the trapezoid rule is spectral
    let t = 0.1;
    let n = 16;
    let x = cart(0.3, 0.7);
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let vals: Vec<f64> = cells
        .par_iter()
        .map(|&(i, j)| Ok(k0_quotient(&torus, &x, &cart(i as f64 / n as f64, j as f64 / n as f64), t, &b)?.value))
        .collect::<Result<_>>()?;
    let total: f64 = vals.iter().sum::<f64>() / (n * n) as f64;
    c.push("cell-normalization/t=0.1", (total - 1.0).abs(), 1e-8);

    let y = cart(0.35, 0.6);
    let full = k0_quotient(&torus, &o, &y, 0.5, &b)?;
    let mut worst = 0.0f64;
    for radius in [0.8, 1.5, 2.5] {
        let part = k0_quotient_truncated(&torus, &o, &y, 0.5, radius, &b)?;
        // excess over the tail bound; ≤ 0 when monotone truncation holds
        worst = worst.max((part.value - full.value).abs() - (part.err_est + full.err_est));
    }
    c.push("truncation-within-tail-bound", worst.max(0.0), 1e-15);

    let cyl = QuotientSurface::new(CoveringGroupSpec::HyperbolicCyclic { ell: 1.5 })?;
    let kind = SurfaceKind::Hyperbolic;
    let pairs = [(pt(kind, 0.4, 0.9), pt(kind, 0.8, 2.6)), (pt(kind, 1.1, 4.0), pt(kind, 0.2, 0.3))];
    // spectral terms: split 2e−11 over the images rather than 1e−12
    let bh = budget(2e-11);
    let mut worst = 0.0f64;
    for (x, y) in pairs {
        let a = k0_quotient(&cyl, &x, &y, 0.5, &bh)?.value;
        let xs = translate_along_axis(&x, 0.37)?;
        let ys = translate_along_axis(&y, 0.37)?;
        let bb = k0_quotient(&cyl, &xs, &ys, 0.5, &bh)?.value;
        worst = worst.max((a - bb).abs());
    }
    c.push("hyperbolic-cylinder/axis-shift", worst, 1e-10);
    Ok(c.out)
}

/// A smooth radial profile used to exercise the Mehler–Fock pair, with the
/// majorant its transform is integrated against and the range on which the
/// reconstruction error is measured.
pub struct TestProfile {
    pub name: &'static str,
    pub profile: RadialProfile<Box<dyn Fn(f64) -> f64 + Send + Sync>>,
    pub fhat_tail: GaussianTail,
    pub r_max: f64,
    /// Closed-form transform where one is known.
    pub exact_transform: Option<fn(f64) -> f64>,
}

const HEAT_PROFILE_TIME: f64 = 0.5;

fn heat_profile_transform(rho: f64) -> f64 {
    let lambda = 0.25 + rho * rho;
    lambda * (-lambda * HEAT_PROFILE_TIME).exp()
}

impl TestProfile {
    pub const NAMES: [&'static str; 2] = ["gaussian", "heat"];

    /// `gaussian`: `r e^{−r²}`. `heat`: `∂_r K₀(r, 1/2)` on H², whose
    /// transform is `λ e^{−λ/2}`.
    pub fn named(name: &str) -> Result<Self> {
        match name {
            "gaussian" => Ok(Self {
                name: "gaussian",
                profile: RadialProfile::new(Box::new(|r: f64| r * (-r * r).exp()), Decay::gaussian(1.4, 0.9, 0.0)?),
                fhat_tail: GaussianTail::new(0.2, 2.5, 2)?,
                r_max: 4.0,
                exact_transform: None,
            }),
            "heat" => {
                let s = HEAT_PROFILE_TIME;
                let inner = budget(1e-12);
                let table = ChebyshevTable::build(
                    |r| Ok(k0_distance_derivative(SurfaceKind::Hyperbolic, r, s, &inner)?.0),
                    0.0,
                    9.0,
                    16,
                    1e-11,
                    12,
                )?;
                Ok(Self {
                    name: "heat",
                    profile: RadialProfile::new(
                        Box::new(move |r: f64| table.eval(r).unwrap_or(0.0)),
                        Decay::gaussian(0.5, 0.4, 0.0)?,
                    ),
                    fhat_tail: GaussianTail::new(s, 1.25 * (-0.25 * s).exp(), 2)?,
                    r_max: 6.0,
                    exact_transform: Some(heat_profile_transform),
                })
            }
            other => Err(Error::InvalidParameter(format!(
                "unknown profile '{other}' (expected one of {:?})",
                Self::NAMES
            ))),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.profile.f)(r)
    }

    /// Forward transform tabulated far enough for the inverse.
    pub fn forward_table(&self, budget: &ToleranceBudget) -> Result<ChebyshevTable<f64>> {
        let inverse_tail = GaussianTail::new(self.fhat_tail.rate, self.fhat_tail.coeff / (2.0 * PI), self.fhat_tail.degree)?;
        let rho_max = inverse_tail.truncation_radius(0.25 * budget.abs_tol) + 1.0;
        tabulate_forward(&self.profile, rho_max, budget)
    }

    /// `inverse(forward(f))` at each radius.
    pub fn reconstruct(&self, rs: &[f64], budget: &ToleranceBudget) -> Result<Vec<Estimate>> {
        let table = self.forward_table(budget)?;
        rs.par_iter()
            .map(|&r| {
                let fhat = |rho: f64| table.eval(rho).unwrap_or(0.0);
                mehler_fock_inverse(fhat, &self.fhat_tail, r, budget)
            })
            .collect()
    }

    /// Relative L² error of the reconstruction on `[0, r_max]`, weight `sinh r`.
    pub fn round_trip_error(&self, budget: &ToleranceBudget) -> Result<f64> {
        let (nodes, weights) = gauss_legendre(40);
        let h = 0.5 * self.r_max;
        let rs: Vec<f64> = nodes.iter().map(|&u| h * (u + 1.0)).collect();
        let back = self.reconstruct(&rs, budget)?;
        let (mut num, mut den) = (0.0, 0.0);
        for ((&r, &w), g) in rs.iter().zip(&weights).zip(back) {
            let f = self.eval(r);
            num += h * w * r.sinh() * (g.value - f).powi(2);
            den += h * w * r.sinh() * f * f;
        }
        Ok((num / den).sqrt())
    }
}

/// Forward then inverse transform of the two test profiles, and the heat
/// profile's forward transform against its closed form.
pub fn mehler_fock(tol: Option<f64>) -> Result<Vec<CheckRecord>> {
    let mut c = Checks::new(Suite::MehlerFock, tol);
    let b = budget(1e-9);
    for name in TestProfile::NAMES {
        let p = TestProfile::named(name)?;
        if let Some(exact) = p.exact_transform {
            let mut worst = 0.0f64;
            for rho in [0.0, 0.7, 2.0, 4.5] {
                let v = mehler_fock_forward(&p.profile, SpectralParameter::new(rho)?, &b)?.value;
                worst = worst.max((v - exact(rho)).abs());
            }
            c.push(format!("{name}-profile/forward-exact"), worst, 1e-6);
        }
        c.push(format!("{name}-profile/round-trip-l2"), p.round_trip_error(&b)?, 1e-4);
    }
    Ok(c.out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert_eq!("all".parse::<Suite>().unwrap(), Suite::All);
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn override_makes_checks_fail() {
        let out = run_suite(Suite::Normalization, Some(1e-20)).unwrap();
        assert!(!out.is_empty());
        assert!(out.iter().any(|r| !r.passed));
        assert!(out.iter().all(|r| r.tolerance == 1e-20));
    }

    #[test]
    fn nan_never_passes() {
        assert!(!CheckRecord::new(Suite::Tiling, "x", f64::NAN, 1.0).passed);
    }
}
