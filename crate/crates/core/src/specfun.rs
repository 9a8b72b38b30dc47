//! Bessel functions of integer order and their zeros.
//!
//! `J_m` is evaluated by Miller's backward recurrence normalized with
//! `J_0 + 2 Σ J_2k = 1`; for `m <= 1` and `x >= 25` the Hankel asymptotic
//! expansion takes over. `Y_0` uses the Neumann series in the even-order `J`s
//! below the same seam and the Hankel expansion above it.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Switch point between recurrence/series evaluation and the asymptotic expansion.
pub const ASYMPTOTIC_SEAM: f64 = 25.0;

/// Positive zeros of `J_m`, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselZeroTable {
    pub order: u32,
    pub zeros: Vec<f64>,
}

/// Hankel expansion; returns `(J_ν(x), Y_ν(x))`. Accurate for `x >> ν²`.
fn hankel(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if next.abs() > term.abs() || next == 0.0 {
            break;
        }
        term = next;
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    let (s, c) = chi.sin_cos();
    let amp = (2.0 / (PI * x)).sqrt();
    (amp * (p * c - q * s), amp * (p * s + q * c))
}

fn miller_start(top: f64) -> usize {
    let n = (top + 20.0 + (160.0 * top.max(1.0)).sqrt()).ceil() as usize;
    n + n % 2
}

/// `J_0(x) ..= J_max(x)` for `x > 0` by backward recurrence.
pub fn bessel_j_table(max_order: usize, x: f64) -> Vec<f64> {
    assert!(x > 0.0, "bessel_j_table requires x > 0");
    let start = miller_start((max_order as f64).max(x)).max(max_order + 2);
    let mut out = vec![0.0; max_order + 1];
    let mut above = 0.0; // J_{k+1}
    let mut cur = 1e-300; // J_k, k = start
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let below = (2.0 * k as f64 / x) * cur - above;
        above = cur;
        cur = below;
        let order = k - 1;
        if order <= max_order {
            out[order] = cur;
        }
        if order == 0 {
            norm += cur;
        } else if order % 2 == 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            let s = 1e-250;
            cur *= s;
            above *= s;
            norm *= s;
            out.iter_mut().for_each(|v| *v *= s);
        }
    }
    out.iter_mut().for_each(|v| *v /= norm);
    out
}

/// Bessel function of the first kind `J_m(x)`.
pub fn bessel_j(m: u32, x: f64) -> f64 {
    if x < 0.0 {
        let v = bessel_j(m, -x);
        return if m % 2 == 1 { -v } else { v };
    }
    if x == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    if m <= 1 && x >= ASYMPTOTIC_SEAM {
        return hankel(m as f64, x).0;
    }
    bessel_j_table(m as usize, x)[m as usize]
}

/// Derivative `J_m'(x)`.
pub fn bessel_jp(m: u32, x: f64) -> f64 {
    if m == 0 {
        -bessel_j(1, x)
    } else {
        0.5 * (bessel_j(m - 1, x) - bessel_j(m + 1, x))
    }
}

/// Neumann function `Y_0(x)`; logarithmically singular at the origin.
pub fn bessel_y0(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("Y0 requires x > 0, got {x}")));
    }
    Ok(y0_positive(x))
}

/// `Y_0` without the domain check; callers guarantee `x > 0`.
pub(crate) fn y0_positive(x: f64) -> f64 {
    if x >= ASYMPTOTIC_SEAM {
        return hankel(0.0, x).1;
    }
    let top = (x + 30.0).ceil() as usize;
    let j = bessel_j_table(2 * top, x);
    let mut series = 0.0;
    for k in (1..=top).rev() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        series += sign * j[2 * k] / k as f64;
    }
    (2.0 / PI) * ((0.5 * x).ln() + EULER_GAMMA) * j[0] - (4.0 / PI) * series
}

/// McMahon's asymptotic estimate of the k-th (1-based) zero of `J_m`.
fn mcmahon(m: u32, k: usize) -> f64 {
    let mu = 4.0 * (m as f64).powi(2);
    let beta = (k as f64 + 0.5 * m as f64 - 0.25) * PI;
    let b8 = 8.0 * beta;
    beta - (mu - 1.0) / b8 - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8.powi(3))
}

fn refine_zero(m: u32, mut lo: f64, mut hi: f64, guess: f64) -> f64 {
    let f_lo = bessel_j(m, lo);
    let mut x = if guess > lo && guess < hi {
        guess
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..200 {
        let f = bessel_j(m, x);
        if f == 0.0 {
            return x;
        }
        if (f > 0.0) == (f_lo > 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        let fp = bessel_jp(m, x);
        let mut next = x - f / fp;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x.max(1.0) {
            return next;
        }
        x = next;
    }
    x
}

/// First `count` positive zeros of `J_m`.
pub fn bessel_zeros(m: u32, count: usize) -> Result<BesselZeroTable> {
    if count == 0 {
        return Err(crate::error::invalid("count", "need at least one zero"));
    }
    let step = 0.25;
    let mut a = if m == 0 { 0.5 } else { m as f64 };
    let mut fa = bessel_j(m, a);
    let mut zeros = Vec::with_capacity(count);
    while zeros.len() < count {
        let b = a + step;
        let fb = bessel_j(m, b);
        if fa == 0.0 {
            zeros.push(a);
        } else if (fa > 0.0) != (fb > 0.0) {
            let guess = mcmahon(m, zeros.len() + 1);
            zeros.push(refine_zero(m, a, b, guess));
        }
        a = b;
        fa = fb;
    }
    Ok(BesselZeroTable { order: m, zeros })
}
