//! Exponential integrals.

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

/// `E₁(u) = ∫_u^∞ e^{−w}/w dw` for `u > 0`: power series below 1,
/// continued fraction (modified Lentz) from 1 upward.
pub fn e1(u: f64) -> f64 {
    assert!(u > 0.0, "E1 requires a positive argument");
    if u < 1.0 {
        -EULER_GAMMA - u.ln() + ein_series(u)
    } else {
        e1_continued_fraction(u)
    }
}

/// Entire function `Ein(u) = ∫_0^u (1 − e^{−w})/w dw = E₁(u) + γ + ln u`.
pub fn ein(u: f64) -> f64 {
    if u < 1.0 {
        ein_series(u)
    } else {
        e1_continued_fraction(u) + EULER_GAMMA + u.ln()
    }
}

fn ein_series(u: f64) -> f64 {
    // Σ_{k≥1} (−1)^{k+1} u^k / (k·k!)
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..60 {
        term *= -u / k as f64;
        let add = -term / k as f64;
        sum += add;
        if add.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn e1_continued_fraction(u: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = u + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let a = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-u).exp()
}
