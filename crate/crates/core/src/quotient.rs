//! Heat kernels on quotients `M = U/G` by abelian covering groups, as image
//! sums `K_M(x, y, t) = Σ_g K_U(x, g·y, t)` with a certified truncation.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{distance, BiTensor1, Point, SurfaceKind};
use crate::kernels::{hyperbolic::k0_majorant, k0_radial, k1, HeatTime, Kernel0Value, Kernel1Value};
use crate::specfun::quadrature::ToleranceBudget;

/// Hard cap on the number of group elements one image sum may visit.
pub const MAX_ELEMENTS: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoveringGroupSpec {
    Trivial(SurfaceKind),
    /// Translations by `k1 v1 + k2 v2` of the plane.
    EuclideanLattice { v1: [f64; 2], v2: [f64; 2] },
    /// Translations by `k v` of the plane.
    EuclideanCyclic { v: [f64; 2] },
    /// Translations by `k ell` along the geodesic `θ ∈ {0, π}` of H².
    HyperbolicCyclic { ell: f64 },
}

impl CoveringGroupSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|c| c.is_finite());
        match *self {
            CoveringGroupSpec::Trivial(_) => Ok(()),
            CoveringGroupSpec::EuclideanLattice { v1, v2 } => {
                let det = v1[0] * v2[1] - v1[1] * v2[0];
                if !(finite(&v1) && finite(&v2)) || det.abs() <= 1e-12 * (norm(v1) * norm(v2)).max(f64::MIN_POSITIVE) {
                    return Err(Error::InvalidParameter(format!(
                        "lattice generators {v1:?}, {v2:?} are not linearly independent"
                    )));
                }
                Ok(())
            }
            CoveringGroupSpec::EuclideanCyclic { v } => {
                if !(finite(&v) && norm(v) > 0.0) {
                    return Err(Error::InvalidParameter(format!("cyclic generator {v:?} must be nonzero")));
                }
                Ok(())
            }
            CoveringGroupSpec::HyperbolicCyclic { ell } => {
                if !(ell > 0.0 && ell.is_finite()) {
                    return Err(Error::InvalidParameter(format!("translation length must be positive, got {ell}")));
                }
                Ok(())
            }
        }
    }

    pub fn base(&self) -> SurfaceKind {
        match *self {
            CoveringGroupSpec::Trivial(kind) => kind,
            CoveringGroupSpec::EuclideanLattice { .. } | CoveringGroupSpec::EuclideanCyclic { .. } => {
                SurfaceKind::Euclidean
            }
            CoveringGroupSpec::HyperbolicCyclic { .. } => SurfaceKind::Hyperbolic,
        }
    }

    /// Group for a named quotient model. Models whose covering group contains
    /// orientation-reversing isometries are refused: the periodicity of the
    /// form kernels only holds for orientation-preserving groups.
    pub fn named(model: &str, lattice: Option<[f64; 4]>, ell: Option<f64>) -> Result<Self> {
        let spec = match model {
            "torus" => {
                let l = lattice.unwrap_or([1.0, 0.0, 0.0, 1.0]);
                CoveringGroupSpec::EuclideanLattice {
                    v1: [l[0], l[1]],
                    v2: [l[2], l[3]],
                }
            }
            "cylinder" => {
                let l = lattice.unwrap_or([1.0, 0.0, 0.0, 0.0]);
                CoveringGroupSpec::EuclideanCyclic { v: [l[0], l[1]] }
            }
            "hyperbolic-cylinder" => CoveringGroupSpec::HyperbolicCyclic { ell: ell.unwrap_or(1.0) },
            "plane" => CoveringGroupSpec::Trivial(SurfaceKind::Euclidean),
            "hyperbolic" => CoveringGroupSpec::Trivial(SurfaceKind::Hyperbolic),
            "sphere" => CoveringGroupSpec::Trivial(SurfaceKind::Sphere),
            "klein" | "klein-bottle" | "mobius" | "projective-plane" => {
                return Err(Error::Unsupported(format!(
                    "{model}: covering group contains orientation-reversing isometries; \
                     only orientation-preserving quotients are supported"
                )))
            }
            other => return Err(Error::InvalidParameter(format!("unknown quotient model '{other}'"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// Integer coordinates of a group element; cyclic groups use `k[1] = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub k: [i64; 2],
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { k: [0, 0] };

    pub fn new(k1: i64, k2: i64) -> Self {
        Self { k: [k1, k2] }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self::new(self.k[0] + other.k[0], self.k[1] + other.k[1])
    }

    pub fn inverse(&self) -> Self {
        Self::new(-self.k[0], -self.k[1])
    }
}

/// Fermi coordinates `(u, w)` about the axis: `u` along it, `w` the signed
/// distance from it.
pub fn fermi_coordinates(p: &Point) -> (f64, f64) {
    let (s, c) = p.c2().sin_cos();
    let sh = p.c1().sinh();
    let w = (sh * s).asinh();
    let u = (sh * c / w.cosh()).asinh();
    (u, w)
}

/// Point of H² with Fermi coordinates `(u, w)`.
pub fn from_fermi(u: f64, w: f64) -> Result<Point> {
    let hw = (0.5 * w).sinh();
    let hu = (0.5 * u).sinh();
    let r = 2.0 * (hw * hw * u.cosh() + hu * hu).sqrt().asinh();
    let theta = w.sinh().atan2(w.cosh() * u.sinh());
    Point::new(SurfaceKind::Hyperbolic, r, theta)
}

/// Hyperbolic translation by `s` along the axis `θ ∈ {0, π}`.
pub fn translate_along_axis(p: &Point, s: f64) -> Result<Point> {
    if p.kind() != SurfaceKind::Hyperbolic {
        return Err(Error::KindMismatch {
            expected: SurfaceKind::Hyperbolic,
            found: p.kind(),
        });
    }
    let (u, w) = fermi_coordinates(p);
    from_fermi(u + s, w)
}

/// `g · p`.
pub fn act(group: &CoveringGroupSpec, g: &GroupElement, p: &Point) -> Result<Point> {
    if p.kind() != group.base() {
        return Err(Error::KindMismatch {
            expected: group.base(),
            found: p.kind(),
        });
    }
    match *group {
        CoveringGroupSpec::Trivial(_) => {
            if *g != GroupElement::IDENTITY {
                return Err(Error::InvalidParameter("trivial group has only the identity".into()));
            }
            Ok(*p)
        }
        CoveringGroupSpec::EuclideanLattice { v1, v2 } => {
            let (x, y) = p.to_cartesian();
            let (a, b) = (g.k[0] as f64, g.k[1] as f64);
            Point::from_cartesian(x + a * v1[0] + b * v2[0], y + a * v1[1] + b * v2[1])
        }
        CoveringGroupSpec::EuclideanCyclic { v } => {
            let (x, y) = p.to_cartesian();
            let a = g.k[0] as f64;
            Point::from_cartesian(x + a * v[0], y + a * v[1])
        }
        CoveringGroupSpec::HyperbolicCyclic { ell } => translate_along_axis(p, g.k[0] as f64 * ell),
    }
}

/// Σ over lattice points farther than `radius` from a fixed point of
/// `e^{−|z|²/s}`, for a lattice of cell area `area` and cell diameter
/// `delta`: counting `N(ρ) ≤ π(ρ+δ)²/A` and integrating by parts gives
/// `(π/A) e^{−U} (2s(U+1) + 2δ²)` with `U = radius²/s`.
fn lattice_gaussian_tail(radius: f64, s: f64, area: f64, delta: f64) -> f64 {
    let u = radius * radius / s;
    PI / area * (-u).exp() * (2.0 * s * (u + 1.0) + 2.0 * delta * delta)
}

/// Same for a cyclic group of step `ell` whose images satisfy
/// `d_k ≥ |a − k ell|`: the at most `2R/ell + 1` excluded images with
/// `|a − k ell| ≤ R` contribute `e^{−R²/s}` each, the rest a geometric tail.
fn cyclic_gaussian_tail(radius: f64, s: f64, ell: f64) -> f64 {
    let e = (-radius * radius / s).exp();
    let ratio = (-2.0 * radius * ell / s).exp();
    e * (2.0 * radius / ell + 1.0) + 2.0 * e / (1.0 - ratio)
}

fn lattice_inverse(v1: [f64; 2], v2: [f64; 2]) -> [[f64; 2]; 2] {
    let det = v1[0] * v2[1] - v1[1] * v2[0];
    // columns of V are v1, v2; rows of V^{-1}
    [[v2[1] / det, -v2[0] / det], [-v1[1] / det, v1[0] / det]]
}

/// Every `g` with `distance(x, g·y) ≤ radius`, in lexicographic order.
pub fn enumerate_elements(group: &CoveringGroupSpec, x: &Point, y: &Point, radius: f64) -> Result<Vec<GroupElement>> {
    group.validate()?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
    }
    let kind = group.base();
    let guard = |estimated: f64| -> Result<()> {
        if estimated > MAX_ELEMENTS {
            return Err(Error::TooManyElements { radius, estimated });
        }
        Ok(())
    };
    let candidates: Vec<GroupElement> = match *group {
        CoveringGroupSpec::Trivial(_) => vec![GroupElement::IDENTITY],
        CoveringGroupSpec::EuclideanLattice { v1, v2 } => {
            let (x1, x2) = x.to_cartesian();
            let (y1, y2) = y.to_cartesian();
            let inv = lattice_inverse(v1, v2);
            // g·y − x = V k + (y − x), so k ∈ V^{-1}(ball − (y − x))
            let (dx, dy) = (x1 - y1, x2 - y2);
            let centre = [inv[0][0] * dx + inv[0][1] * dy, inv[1][0] * dx + inv[1][1] * dy];
            let half = [radius * norm(inv[0]), radius * norm(inv[1])];
            let lo = [(centre[0] - half[0]).floor(), (centre[1] - half[1]).floor()];
            let hi = [(centre[0] + half[0]).ceil(), (centre[1] + half[1]).ceil()];
            guard((hi[0] - lo[0] + 1.0) * (hi[1] - lo[1] + 1.0))?;
            let mut v = Vec::new();
            for a in lo[0] as i64..=hi[0] as i64 {
                for b in lo[1] as i64..=hi[1] as i64 {
                    v.push(GroupElement::new(a, b));
                }
            }
            v
        }
        CoveringGroupSpec::EuclideanCyclic { v } => {
            let (x1, x2) = x.to_cartesian();
            let (y1, y2) = y.to_cartesian();
            let l = norm(v);
            let along = ((x1 - y1) * v[0] + (x2 - y2) * v[1]) / (l * l);
            let half = radius / l;
            let lo = (along - half).floor();
            let hi = (along + half).ceil();
            guard(hi - lo + 1.0)?;
            (lo as i64..=hi as i64).map(|a| GroupElement::new(a, 0)).collect()
        }
        CoveringGroupSpec::HyperbolicCyclic { ell } => {
            let (ux, _) = fermi_coordinates(x);
            let (uy, _) = fermi_coordinates(y);
            let along = (ux - uy) / ell;
            let half = radius / ell;
            let lo = (along - half).floor();
            let hi = (along + half).ceil();
            guard(hi - lo + 1.0)?;
            (lo as i64..=hi as i64).map(|a| GroupElement::new(a, 0)).collect()
        }
    };
    let mut out = Vec::new();
    for g in candidates {
        let gy = act(group, &g, y)?;
        if distance(kind, x, &gy)? <= radius {
            out.push(g);
        }
    }
    Ok(out)
}

/// A quotient surface: base model plus covering group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuotientSurface {
    group: CoveringGroupSpec,
}

impl QuotientSurface {
    pub fn new(group: CoveringGroupSpec) -> Result<Self> {
        group.validate()?;
        Ok(Self { group })
    }

    pub fn group(&self) -> &CoveringGroupSpec {
        &self.group
    }

    pub fn base(&self) -> SurfaceKind {
        self.group.base()
    }

    /// Area of a fundamental domain where finite.
    pub fn area(&self) -> Option<f64> {
        match self.group {
            CoveringGroupSpec::EuclideanLattice { v1, v2 } => Some((v1[0] * v2[1] - v1[1] * v2[0]).abs()),
            CoveringGroupSpec::Trivial(SurfaceKind::Sphere) => Some(4.0 * PI),
            _ => None,
        }
    }

    /// Canonical representative of the orbit of `p`.
    pub fn reduce(&self, p: &Point) -> Result<Point> {
        let frac = |c: f64| {
            let f = c - c.floor();
            if f >= 1.0 {
                0.0
            } else {
                f
            }
        };
        match self.group {
            CoveringGroupSpec::Trivial(_) => Ok(*p),
            CoveringGroupSpec::EuclideanLattice { v1, v2 } => {
                let (x, y) = p.to_cartesian();
                let inv = lattice_inverse(v1, v2);
                let a = frac(inv[0][0] * x + inv[0][1] * y);
                let b = frac(inv[1][0] * x + inv[1][1] * y);
                Point::from_cartesian(a * v1[0] + b * v2[0], a * v1[1] + b * v2[1])
            }
            CoveringGroupSpec::EuclideanCyclic { v } => {
                let (x, y) = p.to_cartesian();
                let l2 = v[0] * v[0] + v[1] * v[1];
                let a = (x * v[0] + y * v[1]) / l2;
                let shift = a - frac(a);
                Point::from_cartesian(x - shift * v[0], y - shift * v[1])
            }
            CoveringGroupSpec::HyperbolicCyclic { ell } => {
                let (u, w) = fermi_coordinates(p);
                from_fermi(ell * frac(u / ell), w)
            }
        }
    }

    /// Bound on the sum of `K_U(x, g·y)` over images farther than `radius`.
    fn tail_bound(&self, x: &Point, y: &Point, t: f64, radius: f64) -> f64 {
        let s = 4.0 * t;
        match self.group {
            CoveringGroupSpec::Trivial(SurfaceKind::Sphere) => 0.0,
            CoveringGroupSpec::Trivial(kind) => {
                let d = distance(kind, x, y).unwrap_or(0.0);
                if d > radius {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            CoveringGroupSpec::EuclideanLattice { v1, v2 } => {
                let area = (v1[0] * v2[1] - v1[1] * v2[0]).abs();
                let delta = norm([v1[0] + v2[0], v1[1] + v2[1]]).max(norm([v1[0] - v2[0], v1[1] - v2[1]]));
                lattice_gaussian_tail(radius, s, area, delta) / (4.0 * PI * t)
            }
            CoveringGroupSpec::EuclideanCyclic { v } => cyclic_gaussian_tail(radius, s, norm(v)) / (4.0 * PI * t),
            CoveringGroupSpec::HyperbolicCyclic { ell } => {
                cyclic_gaussian_tail(radius, s, ell) * k0_majorant(0.0, t)
            }
        }
    }

    fn truncation_radius(&self, x: &Point, y: &Point, t: f64, target: f64) -> f64 {
        if let CoveringGroupSpec::Trivial(kind) = self.group {
            return distance(kind, x, y).unwrap_or(0.0) + 1.0;
        }
        let mut r = (4.0 * t).sqrt().max(1.0);
        while self.tail_bound(x, y, t, r) > target {
            r *= 1.2;
        }
        r
    }
}

fn check_points(q: &QuotientSurface, x: &Point, y: &Point) -> Result<()> {
    for p in [x, y] {
        if p.kind() != q.base() {
            return Err(Error::KindMismatch {
                expected: q.base(),
                found: p.kind(),
            });
        }
    }
    Ok(())
}

/// Scalar heat kernel of the quotient. `terms` counts the images summed and
/// `radius` is the truncation distance.
pub fn k0_quotient(q: &QuotientSurface, x: &Point, y: &Point, t: f64, budget: &ToleranceBudget) -> Result<Kernel0Value> {
    let t = HeatTime::new(t)?.get();
    check_points(q, x, y)?;
    let radius = q.truncation_radius(x, y, t, 0.5 * budget.abs_tol);
    k0_quotient_truncated(q, x, y, t, radius, budget)
}

/// Image sum over the elements within `radius`; the reported error includes
/// the tail bound for that radius.
pub fn k0_quotient_truncated(
    q: &QuotientSurface,
    x: &Point,
    y: &Point,
    t: f64,
    radius: f64,
    budget: &ToleranceBudget,
) -> Result<Kernel0Value> {
    let t = HeatTime::new(t)?.get();
    check_points(q, x, y)?;
    let kind = q.base();
    let tail = q.tail_bound(x, y, t, radius);
    let elements = enumerate_elements(q.group(), x, y, radius)?;
    let per_term = budget.scaled(0.5 / elements.len().max(1) as f64);
    let terms: Vec<Kernel0Value> = elements
        .par_iter()
        .map(|g| {
            let gy = act(q.group(), g, y)?;
            k0_radial(kind, distance(kind, x, &gy)?, t, &per_term)
        })
        .collect::<Result<_>>()?;
    let (value, err) = terms
        .iter()
        .fold((0.0, tail), |(v, e), k| (v + k.value, e + k.err_est));
    Ok(Kernel0Value {
        value,
        err_est: err,
        terms: elements.len(),
        radius,
    })
}

/// 1-form kernel of a flat quotient. Translations carry Cartesian coframes to
/// themselves, so each image term is rotated from the polar frame at `g·y`
/// back to the polar frame at `y`.
pub fn k1_quotient_flat(q: &QuotientSurface, x: &Point, y: &Point, t: f64, budget: &ToleranceBudget) -> Result<Kernel1Value> {
    match q.group {
        CoveringGroupSpec::HyperbolicCyclic { .. } | CoveringGroupSpec::Trivial(SurfaceKind::Hyperbolic) => {
            return Err(Error::Unsupported(
                "1-form image sums on hyperbolic quotients need the frame transport of the deck group".into(),
            ))
        }
        CoveringGroupSpec::Trivial(SurfaceKind::Sphere) => {
            return Err(Error::Unsupported("the sphere has no flat quotient".into()))
        }
        _ => {}
    }
    let t = HeatTime::new(t)?.get();
    check_points(q, x, y)?;
    let kind = SurfaceKind::Euclidean;
    let radius = q.truncation_radius(x, y, t, 0.25 * budget.abs_tol);
    // |K₁| ≤ √2 K₀ entrywise-summed; double the scalar tail
    let tail = 2.0 * q.tail_bound(x, y, t, radius);
    let elements = enumerate_elements(q.group(), x, y, radius)?;
    let per_term = budget.scaled(0.5 / elements.len().max(1) as f64);
    let terms: Vec<(BiTensor1, f64)> = elements
        .par_iter()
        .map(|g| {
            let gy = act(q.group(), g, y)?;
            let k = k1(kind, x, &gy, t, &per_term)?;
            let alpha = gy.c2() - y.c2();
            let (s, c) = alpha.sin_cos();
            let frame = BiTensor1::new(c, s, -s, c);
            Ok((k.matrix.matmul(&frame), k.err_est))
        })
        .collect::<Result<_>>()?;
    let (matrix, err) = terms
        .iter()
        .fold((BiTensor1::zero(), tail), |(m, e), (k, ke)| (m.add(k), e + ke));
    Ok(Kernel1Value {
        matrix,
        err_est: err,
        terms: elements.len(),
        radius,
    })
}

/// Eigenfunction expansion of the flat torus kernel,
/// `(1/A) Σ_{k ∈ L*} e^{−4π²|k|²t} cos(2π k·(x − y))`.
pub fn torus_fourier_oracle(
    v1: [f64; 2],
    v2: [f64; 2],
    x: &Point,
    y: &Point,
    t: f64,
    budget: &ToleranceBudget,
) -> Result<Kernel0Value> {
    let t = HeatTime::new(t)?.get();
    CoveringGroupSpec::EuclideanLattice { v1, v2 }.validate()?;
    let area = (v1[0] * v2[1] - v1[1] * v2[0]).abs();
    let inv = lattice_inverse(v1, v2);
    // dual basis: rows of V^{-1}
    let (w1, w2) = (inv[0], inv[1]);
    let dual_area = 1.0 / area;
    let delta = norm([w1[0] + w2[0], w1[1] + w2[1]]).max(norm([w1[0] - w2[0], w1[1] - w2[1]]));
    let s = 1.0 / (4.0 * PI * PI * t);
    let target = 0.5 * budget.abs_tol * area;
    let mut radius = 1.0;
    while lattice_gaussian_tail(radius, s, dual_area, delta) > target {
        radius *= 1.2;
    }
    let tail = lattice_gaussian_tail(radius, s, dual_area, delta) / area;
    let half = [radius * norm(v1), radius * norm(v2)];
    // |a w1 + b w2| ≤ R implies |a| ≤ R |v1|, |b| ≤ R |v2|
    let (amax, bmax) = (half[0].ceil() as i64, half[1].ceil() as i64);
    if ((2 * amax + 1) as f64) * ((2 * bmax + 1) as f64) > MAX_ELEMENTS {
        return Err(Error::NonConvergence {
            context: "torus Fourier series",
            achieved: tail,
            requested: budget.abs_tol,
        });
    }
    let (x1, x2) = x.to_cartesian();
    let (y1, y2) = y.to_cartesian();
    let (dx, dy) = (x1 - y1, x2 - y2);
    let mut sum = 0.0;
    let mut count = 0;
    for a in -amax..=amax {
        for b in -bmax..=bmax {
            let k = [a as f64 * w1[0] + b as f64 * w2[0], a as f64 * w1[1] + b as f64 * w2[1]];
            let k2 = k[0] * k[0] + k[1] * k[1];
            if k2.sqrt() > radius {
                continue;
            }
            count += 1;
            sum += (-4.0 * PI * PI * k2 * t).exp() * (2.0 * PI * (k[0] * dx + k[1] * dy)).cos();
        }
    }
    Ok(Kernel0Value {
        value: sum / area,
        err_est: tail + 4.0 * f64::EPSILON * count as f64 / area,
        terms: count,
        radius,
    })
}
