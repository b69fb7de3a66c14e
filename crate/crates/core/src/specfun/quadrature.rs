//! Adaptive Gauss–Kronrod quadrature, Gaussian-tail truncation for
//! semi-infinite ranges, and Gauss–Legendre rules for product grids.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Accuracy contract handed to every numerical routine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceBudget {
    pub abs_tol: f64,
    pub max_quad_depth: u32,
    pub max_series_terms: usize,
}

impl ToleranceBudget {
    pub fn new(abs_tol: f64, max_quad_depth: u32, max_series_terms: usize) -> Result<Self> {
        if !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "abs_tol must be positive and finite, got {abs_tol}"
            )));
        }
        if max_quad_depth == 0 || max_series_terms == 0 {
            return Err(Error::InvalidParameter(
                "max_quad_depth and max_series_terms must be positive".into(),
            ));
        }
        Ok(Self {
            abs_tol,
            max_quad_depth,
            max_series_terms,
        })
    }

    /// Default limits with the given absolute tolerance.
    pub fn with_tol(abs_tol: f64) -> Result<Self> {
        Self::new(abs_tol, 48, 200_000)
    }

    /// Same limits, tolerance multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            ..*self
        }
    }
}

impl Default for ToleranceBudget {
    fn default() -> Self {
        Self {
            abs_tol: 1e-8,
            max_quad_depth: 48,
            max_series_terms: 200_000,
        }
    }
}

/// A value together with a bound on its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub err_est: f64,
}

/// Values that can be integrated: `f64` and fixed-size arrays of `f64`.
pub trait QuadValue: Copy + Send + Sync {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn scale(self, s: f64) -> Self;
    /// Componentwise absolute value.
    fn abs(self) -> Self;
    /// Largest component magnitude.
    fn max_norm(self) -> f64;
    fn is_finite(self) -> bool;
    /// Apply `g` to every component.
    fn map(self, g: impl Fn(f64) -> f64) -> Self;
    fn zip(self, other: Self, g: impl Fn(f64, f64) -> f64) -> Self;
    fn components(&self) -> &[f64];
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn max_norm(self) -> f64 {
        f64::abs(self)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn map(self, g: impl Fn(f64) -> f64) -> Self {
        g(self)
    }
    fn zip(self, other: Self, g: impl Fn(f64, f64) -> f64) -> Self {
        g(self, other)
    }
    fn components(&self) -> &[f64] {
        std::slice::from_ref(self)
    }
}

impl<const N: usize> QuadValue for [f64; N] {
    fn zero() -> Self {
        [0.0; N]
    }
    fn add(self, other: Self) -> Self {
        std::array::from_fn(|i| self[i] + other[i])
    }
    fn scale(self, s: f64) -> Self {
        self.map(|v| v * s)
    }
    fn abs(self) -> Self {
        self.map(f64::abs)
    }
    fn max_norm(self) -> f64 {
        self.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
    fn is_finite(self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
    fn map(self, g: impl Fn(f64) -> f64) -> Self {
        std::array::from_fn(|i| g(self[i]))
    }
    fn zip(self, other: Self, g: impl Fn(f64, f64) -> f64) -> Self {
        std::array::from_fn(|i| g(self[i], other[i]))
    }
    fn components(&self) -> &[f64] {
        self.as_slice()
    }
}

// Kronrod abscissae; odd indices are the 10-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// One 21-point Gauss–Kronrod panel: (value, error estimate).
fn gk21<V: QuadValue>(f: &impl Fn(f64) -> V, a: f64, b: f64) -> (V, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kron = fc.scale(WGK[10]);
    let mut gauss = V::zero();
    let mut resabs = fc.abs().scale(WGK[10]);
    let mut samples = [(V::zero(), V::zero()); 10];
    for (j, sample) in samples.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        let sum = f1.add(f2);
        kron = kron.add(sum.scale(WGK[j]));
        resabs = resabs.add(f1.abs().add(f2.abs()).scale(WGK[j]));
        if j % 2 == 1 {
            gauss = gauss.add(sum.scale(WG[j / 2]));
        }
        *sample = (f1, f2);
    }
    let mean = kron.scale(0.5);
    let mut resasc = fc.zip(mean, |v, m| (v - m).abs()).scale(WGK[10]);
    for (j, (f1, f2)) in samples.iter().enumerate() {
        let dev = f1
            .zip(mean, |v, m| (v - m).abs())
            .add(f2.zip(mean, |v, m| (v - m).abs()));
        resasc = resasc.add(dev.scale(WGK[j]));
    }
    let scale = half.abs();
    let diff = kron.zip(gauss, |k, g| (k - g).abs()).scale(scale);
    let resabs = resabs.scale(scale);
    let resasc = resasc.scale(scale);

    // QUADPACK error rescaling, applied per component.
    let mut err = 0.0_f64;
    for ((&e, &ra), &rs) in diff
        .components()
        .iter()
        .zip(resabs.components())
        .zip(resasc.components())
    {
        let mut e = e;
        if rs != 0.0 && e != 0.0 {
            e = rs * (200.0 * e / rs).powf(1.5).min(1.0);
        }
        if ra > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            e = e.max(50.0 * f64::EPSILON * ra);
        }
        err = err.max(e);
    }
    (kron.scale(half), err)
}

struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    err: f64,
    depth: u32,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl<V> Eq for Panel<V> {}
impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Panel<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

const MAX_PANELS: usize = 20_000;

/// Globally adaptive bisection over `[a, b]` split into `initial_panels`
/// equal pieces. Returns the value and its error estimate.
pub fn integrate_panels<V: QuadValue>(
    f: impl Fn(f64) -> V,
    a: f64,
    b: f64,
    initial_panels: usize,
    budget: &ToleranceBudget,
) -> Result<(V, f64)> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "integration limits must be finite, got [{a}, {b}]"
        )));
    }
    if a > b {
        return Err(Error::InvalidParameter(format!(
            "integration limits out of order: [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok((V::zero(), 0.0));
    }
    let n = initial_panels.max(1);
    let width = (b - a) / n as f64;
    let mut heap = BinaryHeap::with_capacity(2 * n);
    for i in 0..n {
        let lo = a + width * i as f64;
        let hi = if i + 1 == n { b } else { a + width * (i + 1) as f64 };
        let (value, err) = gk21(&f, lo, hi);
        if !value.is_finite() {
            return Err(Error::Domain(format!(
                "integrand not finite on [{lo}, {hi}]"
            )));
        }
        heap.push(Panel {
            a: lo,
            b: hi,
            value,
            err,
            depth: 0,
        });
    }
    let total_err = |heap: &BinaryHeap<Panel<V>>| heap.iter().map(|p| p.err).sum::<f64>();
    let mut err = total_err(&heap);
    while err > budget.abs_tol {
        if heap.len() >= MAX_PANELS {
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        if worst.depth >= budget.max_quad_depth {
            heap.push(worst);
            break;
        }
        err -= worst.err;
        let mid = 0.5 * (worst.a + worst.b);
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, e) = gk21(&f, lo, hi);
            if !value.is_finite() {
                return Err(Error::Domain(format!(
                    "integrand not finite on [{lo}, {hi}]"
                )));
            }
            heap.push(Panel {
                a: lo,
                b: hi,
                value,
                err: e,
                depth: worst.depth + 1,
            });
            err += e;
        }
        if heap.len() % 256 == 0 {
            err = total_err(&heap);
        }
    }
    err = total_err(&heap);
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().fold(V::zero(), |acc, p| acc.add(p.value));
    if err > budget.abs_tol {
        return Err(Error::NonConvergence {
            context: "adaptive quadrature",
            achieved: err,
            requested: budget.abs_tol,
        });
    }
    Ok((value, err))
}

/// Adaptive integral of a scalar function over `[a, b]`.
pub fn integrate_adaptive(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    budget: &ToleranceBudget,
) -> Result<Estimate> {
    let (value, err_est) = integrate_panels(f, a, b, 1, budget)?;
    Ok(Estimate { value, err_est })
}

/// Declared majorant `|f(ρ)| ≤ coeff · ρ^degree · exp(−rate ρ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTail {
    pub rate: f64,
    pub coeff: f64,
    pub degree: u32,
}

impl GaussianTail {
    pub fn new(rate: f64, coeff: f64, degree: u32) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gaussian rate must be positive, got {rate}"
            )));
        }
        if !(coeff >= 0.0 && coeff.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tail coefficient must be nonnegative, got {coeff}"
            )));
        }
        Ok(Self {
            rate,
            coeff,
            degree,
        })
    }

    pub fn majorant(&self, rho: f64) -> f64 {
        self.coeff * rho.powi(self.degree as i32) * (-self.rate * rho * rho).exp()
    }

    /// Closed-form bound on `∫_R^∞ coeff ρ^k e^{−aρ²} dρ`.
    pub fn tail_bound(&self, radius: f64) -> f64 {
        let a = self.rate;
        let k = self.degree as i32;
        let r = radius;
        if k == 0 {
            if r <= 0.0 {
                return f64::INFINITY;
            }
            return self.coeff * (-a * r * r).exp() / (2.0 * a * r);
        }
        // ρ^{k−1} e^{−aρ²/2} is decreasing once ρ² ≥ (k−1)/a.
        if r * r < (k - 1) as f64 / a {
            return f64::INFINITY;
        }
        self.coeff * r.powi(k - 1) * (-a * r * r).exp() / a
    }

    /// Smallest radius on a doubling-then-bisection search with
    /// `tail_bound(R) ≤ target`.
    pub fn truncation_radius(&self, target: f64) -> f64 {
        if self.coeff == 0.0 {
            return 0.0;
        }
        let mut hi = (1.0 / self.rate).sqrt().max(1.0);
        while self.tail_bound(hi) > target {
            hi *= 1.5;
            if hi > 1e8 {
                return hi;
            }
        }
        let mut lo = 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.tail_bound(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// Integral over `[0, ∞)` of a vector-valued integrand whose components
/// obey `tail`. The range is cut where the analytic tail bound drops to
/// half the tolerance and the rest is integrated adaptively.
pub fn integrate_semiinfinite_vec<V: QuadValue>(
    f: impl Fn(f64) -> V,
    tail: &GaussianTail,
    budget: &ToleranceBudget,
) -> Result<(V, f64, f64)> {
    let half = 0.5 * budget.abs_tol;
    let radius = tail.truncation_radius(half);
    if tail.coeff == 0.0 {
        return Ok((V::zero(), 0.0, 0.0));
    }
    // Spot-check the declared majorant beyond the cut.
    for s in [1.0, 1.25, 1.5] {
        let rho = radius * s;
        let val = f(rho).max_norm();
        let bound = tail.majorant(rho);
        if val > 2.0 * bound + 1e3 * f64::MIN_POSITIVE {
            return Err(Error::DivergentProfile(format!(
                "|f({rho:.4})| = {val:.3e} exceeds the declared gaussian majorant {bound:.3e}"
            )));
        }
    }
    let panels = (radius * tail.rate.sqrt()).ceil().max(1.0) as usize;
    let inner = budget.scaled(0.5);
    let (value, err) = integrate_panels(f, 0.0, radius, panels, &inner)?;
    let tail_err = tail.tail_bound(radius);
    Ok((value, err + tail_err, radius))
}

/// Scalar version of [`integrate_semiinfinite_vec`] for `e^{−rate ρ²}`-type
/// integrands with unit coefficient and the given polynomial degree.
pub fn integrate_semiinfinite(
    f: impl Fn(f64) -> f64,
    tail: &GaussianTail,
    budget: &ToleranceBudget,
) -> Result<Estimate> {
    let (value, err_est, _) = integrate_semiinfinite_vec(f, tail, budget)?;
    Ok(Estimate { value, err_est })
}

/// Gauss–Legendre nodes and weights on `[−1, 1]` (Newton on the
/// three-term recurrence).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget(tol: f64) -> ToleranceBudget {
        ToleranceBudget::with_tol(tol).unwrap()
    }

    #[test]
    fn zero_and_constant_integrands() {
        let z = integrate_adaptive(|_| 0.0, 0.0, 1.0, &budget(1e-12)).unwrap();
        assert_eq!(z.value, 0.0);
        assert_eq!(z.err_est, 0.0);
        let c = integrate_adaptive(|_| 1.0, 0.0, 2.0, &budget(1e-12)).unwrap();
        assert!((c.value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_on_finite_range_matches_erf_series() {
        // erf(3)·√π/2 from the Maclaurin series of erf.
        let x: f64 = 3.0;
        let mut term = x;
        let mut sum = x;
        for n in 1..200 {
            term *= -x * x / n as f64;
            sum += term / (2 * n + 1) as f64;
        }
        let reference = sum; // = ∫_0^3 e^{-s²} ds
        let est = integrate_adaptive(|s| (-s * s).exp(), 0.0, 3.0, &budget(1e-13)).unwrap();
        assert!((est.value - reference).abs() <= 1e-12, "{} vs {}", est.value, reference);
        assert!((est.value - 0.886_207_348_259_521).abs() < 1e-9);
        assert!(est.err_est <= 1e-13);
    }

    #[test]
    fn error_estimate_covers_halved_tolerance_rerun() {
        let f = |x: f64| (10.0 * x).sin() / (1.0 + x * x);
        let a = integrate_adaptive(f, 0.0, 5.0, &budget(1e-8)).unwrap();
        let b = integrate_adaptive(f, 0.0, 5.0, &budget(5e-9)).unwrap();
        assert!((a.value - b.value).abs() <= 2.0 * a.err_est.max(1e-16));
    }

    #[test]
    fn unattainable_tolerance_is_reported() {
        let err = integrate_adaptive(|x| x.sqrt(), 0.0, 1.0, &budget(1e-300)).unwrap_err();
        assert!(err.is_nonconvergence());
    }

    #[test]
    fn reversed_limits_are_rejected() {
        assert!(integrate_adaptive(|x| x, 1.0, 0.0, &budget(1e-8)).is_err());
    }

    #[test]
    fn semiinfinite_gaussians() {
        let b = budget(1e-12);
        let g0 = GaussianTail::new(1.0, 1.0, 0).unwrap();
        let e = integrate_semiinfinite(|r| (-r * r).exp(), &g0, &b).unwrap();
        assert!((e.value - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-12);
        let g1 = GaussianTail::new(1.0, 1.0, 1).unwrap();
        let e = integrate_semiinfinite(|r| r * (-r * r).exp(), &g1, &b).unwrap();
        assert!((e.value - 0.5).abs() < 1e-12);
        let z = integrate_semiinfinite(|_| 0.0, &g1, &b).unwrap();
        assert_eq!(z.value, 0.0);
    }

    #[test]
    fn semiinfinite_rejects_bad_rate_and_violated_majorant() {
        assert!(GaussianTail::new(0.0, 1.0, 0).is_err());
        let g = GaussianTail::new(1.0, 1.0, 0).unwrap();
        let err = integrate_semiinfinite(|r| (-0.1 * r * r).exp(), &g, &budget(1e-6)).unwrap_err();
        assert!(matches!(err, Error::DivergentProfile(_)));
    }

    #[test]
    fn tail_bound_dominates_numerical_tail() {
        for degree in 0..4u32 {
            let g = GaussianTail::new(0.7, 2.0, degree).unwrap();
            let r = 3.0;
            let actual = integrate_adaptive(|s| g.majorant(s), r, 30.0, &budget(1e-15)).unwrap();
            assert!(g.tail_bound(r) >= actual.value, "degree {degree}");
        }
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(12);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let m = x.iter().zip(&w).map(|(x, w)| w * x.powi(22)).sum::<f64>();
        assert!((m - 2.0 / 23.0).abs() < 1e-14);
        let (x, w) = gauss_legendre(7);
        let m = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum::<f64>();
        assert!((m - 0.4).abs() < 1e-14);
    }

    #[test]
    fn vector_integrands_share_panels() {
        let (v, err) =
            integrate_panels(|x| [x, x * x, x.cos()], 0.0, 1.0, 2, &budget(1e-13)).unwrap();
        assert!((v[0] - 0.5).abs() < 1e-14);
        assert!((v[1] - 1.0 / 3.0).abs() < 1e-14);
        assert!((v[2] - 1f64.sin()).abs() < 1e-14);
        assert!(err <= 1e-13);
    }
}
