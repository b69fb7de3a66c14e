use std::f64::consts::PI;

use heatkernel::geometry::{apply_i_plus_star, distance, distance_gradient, hodge_star_1};
use heatkernel::kernels::{k0, k0_radial, k1, k2};
use heatkernel::quotient::{act, enumerate_elements, k0_quotient};
use heatkernel::specfun::{conical_p, legendre_p};
use heatkernel::{
    CoveringGroupSpec, Error, GroupElement, OneFormValue, Point, QuotientSurface, SpectralParameter, SurfaceKind,
    ToleranceBudget,
};
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = SurfaceKind> {
    prop_oneof![
        Just(SurfaceKind::Euclidean),
        Just(SurfaceKind::Sphere),
        Just(SurfaceKind::Hyperbolic)
    ]
}

fn point(kind: SurfaceKind) -> impl Strategy<Value = Point> {
    let rmax = if kind == SurfaceKind::Sphere { PI } else { 4.0 };
    (0.0..rmax, 0.0..2.0 * PI).prop_map(move |(a, b)| Point::new(kind, a, b).unwrap())
}

fn kind_and_points(n: usize) -> impl Strategy<Value = (SurfaceKind, Vec<Point>)> {
    kind().prop_flat_map(move |k| (Just(k), prop::collection::vec(point(k), n)))
}

fn b(tol: f64) -> ToleranceBudget {
    ToleranceBudget::with_tol(tol).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distance_is_symmetric((k, p) in kind_and_points(2)) {
        let a = distance(k, &p[0], &p[1]).unwrap();
        let c = distance(k, &p[1], &p[0]).unwrap();
        prop_assert!((a - c).abs() <= 1e-14 * (1.0 + a));
    }

    #[test]
    fn triangle_inequality((k, p) in kind_and_points(3)) {
        let ab = distance(k, &p[0], &p[1]).unwrap();
        let bc = distance(k, &p[1], &p[2]).unwrap();
        let ac = distance(k, &p[0], &p[2]).unwrap();
        prop_assert!(ac <= ab + bc + 1e-12);
    }

    #[test]
    fn distance_gradient_is_unit((k, p) in kind_and_points(2)) {
        match distance_gradient(k, &p[0], &p[1]) {
            Ok(g) => prop_assert!((g.norm() - 1.0).abs() <= 1e-10),
            Err(Error::CoincidentPoints) | Err(Error::CutLocus) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn hodge_star_preserves_norm(a in -1e3..1e3f64, c in -1e3..1e3f64) {
        let v = OneFormValue::new(a, c);
        let s = hodge_star_1(&v);
        prop_assert_eq!(s.a * s.a + s.b * s.b, a * a + c * c);
        let ss = hodge_star_1(&s);
        prop_assert_eq!((ss.a, ss.b), (-a, -c));
    }

    #[test]
    fn legendre_recurrence(n in 1usize..50, x in -1.0..=1.0f64) {
        let lhs = (n + 1) as f64 * legendre_p(n + 1, x).unwrap();
        let rhs = (2 * n + 1) as f64 * x * legendre_p(n, x).unwrap() - n as f64 * legendre_p(n - 1, x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (n as f64 + 1.0));
    }

    #[test]
    fn kernel_one_form_is_in_projector_image((k, p) in kind_and_points(2), t in 0.05..2.0f64) {
        match k1(k, &p[0], &p[1], t, &b(1e-8)) {
            Ok(m) => {
                let m = m.matrix;
                prop_assert!(apply_i_plus_star(&m).max_abs_diff(&m.scale(2.0)) <= 1e-12);
            }
            Err(Error::CutLocus) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn two_form_kernel_matches_scalar((k, p) in kind_and_points(2), t in 0.05..2.0f64) {
        let a = k0(k, &p[0], &p[1], t, &b(1e-8)).unwrap().value;
        let c = k2(k, &p[0], &p[1], t, &b(1e-8)).unwrap().value;
        prop_assert!((a - c).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Rotating both points about the pole keeps the distance and the kernel.
    #[test]
    fn scalar_kernel_is_radial((k, p) in kind_and_points(2), shift in 0.0..2.0 * PI, t in 0.1..2.0f64) {
        let rot = |q: &Point| Point::new(k, q.c1(), q.c2() + shift).unwrap();
        let a = k0(k, &p[0], &p[1], t, &b(1e-12)).unwrap().value;
        let c = k0(k, &rot(&p[0]), &rot(&p[1]), t, &b(1e-12)).unwrap().value;
        prop_assert!((a - c).abs() <= 1e-10);
    }

    /// A re-run at half the tolerance stays within twice the first estimate.
    #[test]
    fn error_estimates_are_consistent(k in kind(), d in 0.0..3.0f64, t in 0.1..2.0f64) {
        let d = if k == SurfaceKind::Sphere { d.min(PI) } else { d };
        let a = k0_radial(k, d, t, &b(1e-8)).unwrap();
        let c = k0_radial(k, d, t, &b(5e-9)).unwrap();
        prop_assert!((a.value - c.value).abs() <= 2.0 * a.err_est + 1e-15);
    }

    #[test]
    fn conical_normalisation(rho in 0.0..30.0f64) {
        let v = conical_p(SpectralParameter::new(rho).unwrap(), 0.0, &b(1e-10)).unwrap();
        prop_assert_eq!(v.value, 1.0);
    }
}

fn lattice_group() -> impl Strategy<Value = CoveringGroupSpec> {
    (0.6..1.5f64, -0.4..0.4f64, 0.6..1.5f64).prop_map(|(a, s, c)| CoveringGroupSpec::EuclideanLattice {
        v1: [a, 0.0],
        v2: [s, c],
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_action_is_an_isometry(
        ell in 0.5..3.0f64,
        k in -4i64..=4,
        p in point(SurfaceKind::Hyperbolic),
        q in point(SurfaceKind::Hyperbolic),
    ) {
        let g = CoveringGroupSpec::HyperbolicCyclic { ell };
        let e = GroupElement::new(k, 0);
        let d0 = distance(SurfaceKind::Hyperbolic, &p, &q).unwrap();
        let (gp, gq) = (act(&g, &e, &p).unwrap(), act(&g, &e, &q).unwrap());
        let d1 = distance(SurfaceKind::Hyperbolic, &gp, &gq).unwrap();
        // a polar chart resolves positions only to about eps * sinh r
        let far = gp.c1().max(gq.c1()).max(p.c1()).max(q.c1());
        let tol = 1e-12 * (1.0 + d0) + 64.0 * f64::EPSILON * far.sinh();
        prop_assert!((d0 - d1).abs() <= tol, "{} vs {}", d0, d1);
    }

    #[test]
    fn enumeration_matches_brute_force(
        g in lattice_group(),
        x in point(SurfaceKind::Euclidean),
        y in point(SurfaceKind::Euclidean),
        radius in 0.5..4.0f64,
    ) {
        let found = enumerate_elements(&g, &x, &y, radius).unwrap();
        let mut brute = Vec::new();
        for a in -20i64..=20 {
            for c in -20i64..=20 {
                let e = GroupElement::new(a, c);
                let gy = act(&g, &e, &y).unwrap();
                if distance(SurfaceKind::Euclidean, &x, &gy).unwrap() <= radius {
                    brute.push(e);
                }
            }
        }
        prop_assert_eq!(found, brute);
    }

    #[test]
    fn reduction_is_idempotent(g in lattice_group(), p in point(SurfaceKind::Euclidean)) {
        let q = QuotientSurface::new(g).unwrap();
        let once = q.reduce(&p).unwrap();
        let twice = q.reduce(&once).unwrap();
        prop_assert!(distance(SurfaceKind::Euclidean, &once, &twice).unwrap() <= 1e-12);
        // and the representative lies in the orbit of p
        prop_assert!(k0_quotient(&q, &once, &p, 0.5, &b(1e-10)).is_ok());
    }

    #[test]
    fn quotient_kernel_is_periodic(
        g in lattice_group(),
        x in point(SurfaceKind::Euclidean),
        y in point(SurfaceKind::Euclidean),
        k1v in -3i64..=3,
        k2v in -3i64..=3,
        t in 0.1..1.0f64,
    ) {
        let q = QuotientSurface::new(g).unwrap();
        let x = q.reduce(&x).unwrap();
        let y = q.reduce(&y).unwrap();
        let moved = q.reduce(&act(&g, &GroupElement::new(k1v, k2v), &y).unwrap()).unwrap();
        let a = k0_quotient(&q, &x, &y, t, &b(1e-12)).unwrap().value;
        let c = k0_quotient(&q, &x, &moved, t, &b(1e-12)).unwrap().value;
        prop_assert!((a - c).abs() <= 1e-12, "{} vs {}", a, c);
    }
}
