//! Range checks for circular-mean data on the unit disk.
//!
//! * moments: `∫ t^{2k+1} g(θ,t) dt` is a trigonometric polynomial of degree `2k` in `θ`;
//! * orthogonality: data is orthogonal to `∂_ν ψ(θ) J_0(λt) t` for every
//!   Dirichlet eigenfunction `ψ = J_m(λr) e^{imθ}` of the disk;
//! * Bessel zeros: the `m`-th angular harmonic of the `J_0`-Hankel transform
//!   of `g` vanishes at the zeros of `J_m`.
//!
//! All residuals are normalized, hence invariant under `g -> c g`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::interp::trapezoid;
use crate::model::{Dim, Geometry, Kind, ProjectionData};
use crate::specfun::{bessel_j, bessel_jp, bessel_zeros};

/// Pass thresholds, calibrated on clean analytic data at default resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeThresholds {
    pub moments: f64,
    pub orthogonality: f64,
    pub bessel_zeros: f64,
}

impl Default for RangeThresholds {
    fn default() -> Self {
        Self {
            moments: 1e-3,
            orthogonality: 1e-3,
            bessel_zeros: 1e-2,
        }
    }
}

/// Disk eigenpair `(m, λ)` with `J_m(λ) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskMode {
    pub order: u32,
    pub lambda: f64,
}

/// The first `per_order` zeros of each of `J_0 ..= J_{max_order}`.
pub fn disk_modes(max_order: u32, per_order: usize) -> Result<Vec<DiskMode>> {
    let mut out = Vec::new();
    for m in 0..=max_order {
        for lambda in bessel_zeros(m, per_order)?.zeros {
            out.push(DiskMode { order: m, lambda });
        }
    }
    Ok(out)
}

fn prepare(g: &ProjectionData, operation: &'static str) -> Result<ProjectionData> {
    g.require_dim("data", Dim::Two)?;
    g.require_kind("data", Kind::Mean)?;
    if !matches!(g.detectors.geometry(), Geometry::Circle { .. }) {
        return Err(Error::Geometry {
            operation,
            geometry: g.detectors.geometry().name().to_string(),
        });
    }
    Ok(g.normalized()?.0)
}

/// Per-detector `∫ g(θ_i, t) φ(t) dt` for a weight function `φ`.
fn radial(g: &ProjectionData, phi: &[f64]) -> Vec<f64> {
    let dt = g.times.dt();
    g.rows()
        .map(|row| {
            let v: Vec<f64> = row.iter().zip(phi).map(|(a, b)| a * b).collect();
            trapezoid(&v, dt)
        })
        .collect()
}

/// `(Σ w_i v_i cos(mθ_i), -Σ w_i v_i sin(mθ_i)) / 2π`.
fn harmonic(g: &ProjectionData, values: &[f64], m: i64) -> (f64, f64) {
    let det = &g.detectors;
    let mut re = 0.0;
    let mut im = 0.0;
    for (i, (v, w)) in values.iter().zip(det.weights()).enumerate() {
        let (s, c) = (m as f64 * det.angle(i)).sin_cos();
        re += w * v * c;
        im -= w * v * s;
    }
    (re / (2.0 * PI), im / (2.0 * PI))
}

/// Energy fraction of the angular harmonics `|m| > 2k` of the `k`-th moment,
/// for `k = 0 ..= k_max`.
pub fn check_moments(g: &ProjectionData, k_max: usize) -> Result<Vec<f64>> {
    let data = prepare(g, "moment check")?;
    let nd = data.detectors.len();
    if nd < 2 * (2 * k_max) + 1 {
        return Err(invalid(
            "detectors",
            format!("need at least {} detectors for k_max = {k_max}", 4 * k_max + 1),
        ));
    }
    let ts = data.times.ts();
    let top = ((nd - 1) / 2) as i64;
    (0..=k_max)
        .map(|k| {
            let phi: Vec<f64> = ts.iter().map(|t| t.powi(2 * k as i32 + 1)).collect();
            let moment = radial(&data, &phi);
            let mut total = 0.0;
            let mut high = 0.0;
            for m in -top..=top {
                let (re, im) = harmonic(&data, &moment, m);
                let e = re * re + im * im;
                total += e;
                if m.unsigned_abs() as usize > 2 * k {
                    high += e;
                }
            }
            Ok(if total == 0.0 { 0.0 } else { high / total })
        })
        .collect()
}

/// Normalized inner products of `g` with `λ J_m'(λ) e^{imθ} J_0(λt) t`.
pub fn check_orthogonality(g: &ProjectionData, modes: &[DiskMode]) -> Result<Vec<f64>> {
    let data = prepare(g, "orthogonality check")?;
    if data.times.t_max < 2.0 - 1e-12 {
        return Err(invalid("t_max", "orthogonality check needs t_max >= 2R"));
    }
    let ts = data.times.ts();
    let dt = data.times.dt();
    let weights = data.detectors.weights();
    let g_norm = {
        let sq: f64 = data
            .rows()
            .zip(weights)
            .map(|(row, w)| {
                let v: Vec<f64> = row.iter().map(|x| x * x).collect();
                w * trapezoid(&v, dt)
            })
            .sum();
        sq.sqrt()
    };
    let total_weight: f64 = weights.iter().sum();
    Ok(modes
        .par_iter()
        .map(|mode| {
            if g_norm == 0.0 {
                return 0.0;
            }
            let lam = mode.lambda;
            let flux = lam * bessel_jp(mode.order, lam);
            let phi: Vec<f64> = ts.iter().map(|t| bessel_j(0, lam * t) * t).collect();
            let proj = radial(&data, &phi);
            let (re, im) = harmonic(&data, &proj, mode.order as i64);
            let inner = 2.0 * PI * flux.abs() * (re * re + im * im).sqrt();
            let k_sq: Vec<f64> = phi.iter().map(|p| p * p).collect();
            let k_norm = flux.abs() * (total_weight * trapezoid(&k_sq, dt)).sqrt();
            if k_norm == 0.0 {
                0.0
            } else {
                inner / (g_norm * k_norm)
            }
        })
        .collect())
}

/// `|ĝ_m(λ_{m,j})| / max_λ |ĝ_m(λ)|` for `m = 0 ..= max_order` and the first
/// `per_order` zeros of `J_m`; row-major `(max_order+1) × per_order`.
pub fn check_bessel_zeros(g: &ProjectionData, max_order: u32, per_order: usize) -> Result<Vec<Vec<f64>>> {
    let data = prepare(g, "Bessel-zero check")?;
    let ts = data.times.ts();
    let tables: Vec<Vec<f64>> = (0..=max_order)
        .map(|m| bessel_zeros(m, per_order).map(|t| t.zeros))
        .collect::<Result<_>>()?;
    let lam_top = tables.iter().flat_map(|z| z.last().copied()).fold(0.0, f64::max) + 1.0;
    let step = PI / 40.0;
    let scan: Vec<f64> = (1..=((lam_top / step).ceil() as usize)).map(|j| j as f64 * step).collect();
    let transform = |m: u32, lam: f64| -> f64 {
        let phi: Vec<f64> = ts.iter().map(|t| bessel_j(0, lam * t) * t).collect();
        let proj = radial(&data, &phi);
        let (re, im) = harmonic(&data, &proj, m as i64);
        (re * re + im * im).sqrt()
    };
    Ok((0..=max_order)
        .into_par_iter()
        .map(|m| {
            let peak = scan.iter().map(|&l| transform(m, l)).fold(0.0, f64::max);
            tables[m as usize]
                .iter()
                .map(|&l| if peak == 0.0 { 0.0 } else { transform(m, l) / peak })
                .collect()
        })
        .collect())
}

/// Residual families and their verdicts.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeReport {
    pub moments: Vec<f64>,
    pub orthogonality: Vec<f64>,
    pub bessel_zeros: Vec<Vec<f64>>,
    pub moments_pass: bool,
    pub orthogonality_pass: bool,
    pub bessel_zeros_pass: bool,
}

impl RangeReport {
    pub fn passes(&self) -> bool {
        self.moments_pass && self.orthogonality_pass && self.bessel_zeros_pass
    }
}

/// Default resolution of a full validation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeConfig {
    pub k_max: usize,
    pub max_order: u32,
    pub per_order: usize,
    pub thresholds: RangeThresholds,
}

impl Default for RangeConfig {
    fn default() -> Self {
        Self {
            k_max: 5,
            max_order: 4,
            per_order: 3,
            thresholds: RangeThresholds::default(),
        }
    }
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

pub fn validate(g: &ProjectionData, config: &RangeConfig) -> Result<RangeReport> {
    let moments = check_moments(g, config.k_max)?;
    let modes = disk_modes(config.max_order, config.per_order)?;
    let orthogonality = check_orthogonality(g, &modes)?;
    let bessel = check_bessel_zeros(g, config.max_order, config.per_order)?;
    let t = config.thresholds;
    Ok(RangeReport {
        moments_pass: max_of(moments.iter().copied()) < t.moments,
        orthogonality_pass: max_of(orthogonality.iter().copied()) < t.orthogonality,
        bessel_zeros_pass: max_of(bessel.iter().flatten().copied()) < t.bessel_zeros,
        moments,
        orthogonality,
        bessel_zeros: bessel,
    })
}
