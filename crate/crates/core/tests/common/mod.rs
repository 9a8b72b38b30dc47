//! Independent numerical oracles shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

/// `J_m(x)` by its power series, summed until the terms underflow.
/// Loses roughly `e^x` ulps to cancellation, so keep `x <= 12`.
pub fn power_series_j(m: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = half.powi(m as i32);
    for k in 1..=m {
        term /= k as f64;
    }
    let mut sum = term;
    let q = -half * half;
    for k in 1..200 {
        term *= q / (k as f64 * (k + m) as f64);
        sum += term;
        if term.abs() < 1e-300 || term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Bessel's integral `J_m(x) = (1/π) ∫_0^π cos(mτ - x sin τ) dτ`; the
/// integrand is periodic and analytic, so the trapezoid rule with `n` points
/// converges exponentially once `n` exceeds `x + m` by a margin.
pub fn bessel_integral_j(m: u32, x: f64, n: usize) -> f64 {
    // Integrate over a full period [0, 2π): the integrand is even about π.
    let mut acc = 0.0;
    for k in 0..n {
        let tau = 2.0 * PI * k as f64 / n as f64;
        acc += (m as f64 * tau - x * tau.sin()).cos();
    }
    acc / n as f64
}

/// Tanh-sinh quadrature of `f` over `[a, b]` with step `h` in the transformed
/// variable; tolerant of integrable endpoint singularities.
pub fn tanh_sinh(f: impl Fn(f64) -> f64, a: f64, b: f64, h: f64) -> f64 {
    let c = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let n = (4.5 / h).ceil() as i64;
    let mut acc = 0.0;
    for k in -n..=n {
        let t = k as f64 * h;
        let u = 0.5 * PI * t.sinh();
        let x = u.tanh();
        let w = 0.5 * PI * t.cosh() / (u.cosh() * u.cosh());
        // Distance to the nearer endpoint, computed without cancellation.
        let gap = 1.0 / (u.abs().exp() * u.cosh());
        if gap * c < 1e-300 || w < 1e-300 {
            continue;
        }
        let xs = if x < 0.0 { a + c * gap } else if x > 0.0 { b - c * gap } else { mid };
        acc += w * f(xs);
    }
    acc * c * h
}

/// `Y_0(x) = (1/π) ∫_0^π sin(x sin θ) dθ - (2/π) ∫_0^∞ e^{-x sinh t} dt`.
pub fn y0_integral(x: f64) -> f64 {
    let first = tanh_sinh(|th| (x * th.sin()).sin(), 0.0, PI, 1.0 / 256.0) / PI;
    let top = (60.0 / x).asinh();
    let second = tanh_sinh(|t| (-x * t.sinh()).exp(), 0.0, top, 1.0 / 256.0);
    first - 2.0 * second / PI
}

/// Root of `f` in `[a, b]` by bisection to machine resolution.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    assert!(fa * f(b) <= 0.0, "no sign change in [{a}, {b}]");
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// `(Σ (a-b)²)^{1/2} / (Σ b²)^{1/2}`.
pub fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}
