//! Exact inversions for circular apertures.
//!
//! Two log-kernel forms (outer Laplacian, or an inner differential filter)
//! and the Hilbert-kernel form whose inner integral is a principal value.
//! Input is INTEGRAL-kind data on a circle of radius `R`, normalized
//! internally to the unit circle. Only `t <= 2R` enters the filters.

use std::f64::consts::PI;

use crate::backproject::{
    divergence_of_backprojection, laplacian_inner, prepare, scaled_points, sum_scalar, Table,
};
use crate::interp::derivative;
use crate::model::{dist, Dim, GridSpec, ImageGrid, Kind, ProjectionData};
use crate::Result;

pub use crate::backproject::Interpolation;

pub const PAD: usize = 2;

/// Squared-distance samples per time sample in the log-kernel tables.
pub const S_OVERSAMPLING: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method2d {
    /// Laplacian of the log-kernel backprojection of `g`.
    FinchLog,
    /// Log-kernel backprojection of `∂_t(t ∂_t(g/t))`.
    FinchLogFiltered,
    /// Divergence of the principal-value (Hilbert-type) filtered backprojection.
    Kunyansky,
}

pub fn recon_finch_log(g: &ProjectionData, spec: &GridSpec) -> Result<ImageGrid> {
    reconstruct_2d(Method2d::FinchLog, g, spec, Interpolation::Linear)
}

pub fn recon_finch_log_filtered(g: &ProjectionData, spec: &GridSpec) -> Result<ImageGrid> {
    reconstruct_2d(Method2d::FinchLogFiltered, g, spec, Interpolation::Linear)
}

pub fn recon_kun2d(g: &ProjectionData, spec: &GridSpec) -> Result<ImageGrid> {
    reconstruct_2d(Method2d::Kunyansky, g, spec, Interpolation::Linear)
}

/// `u log|u|` with the removable singularity filled in.
#[inline]
fn xlogx(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u * u.abs().ln()
    }
}

/// Returns `(∫_a^b log|t-c| dt, ∫_a^b t log|t-c| dt)` in closed form.
fn log_moments(a: f64, b: f64, c: f64) -> (f64, f64) {
    let p0 = |t: f64| xlogx(t - c) - t;
    let p1 = |t: f64| {
        let u = t - c;
        0.5 * u * xlogx(u) - 0.25 * u * u + c * (xlogx(u) - u)
    };
    (p0(b) - p0(a), p1(b) - p1(a))
}

/// Time samples entering the filters: those with `t <= t_end`.
fn used_samples(data: &ProjectionData, t_end: f64) -> usize {
    let dt = data.times.dt();
    let last = ((t_end / dt) * (1.0 + 1e-12)).floor() as usize;
    (last + 1).min(data.times.samples)
}

/// Product-integration weights: `Σ_j w[k][j] g_j = ∫_0^T g(t) log|t² - s_k| dt`
/// exactly for piecewise-linear `g`, with `T = min(t_max, 2)`.
fn log_weights(dt: f64, nt: usize, t_end: f64, s_grid: &[f64]) -> Vec<f64> {
    let mut w = vec![0.0; s_grid.len() * nt];
    for (k, &s) in s_grid.iter().enumerate() {
        let c = s.sqrt();
        let row = &mut w[k * nt..(k + 1) * nt];
        for j in 0..nt.saturating_sub(1) {
            let tl = j as f64 * dt;
            let tr = tl + dt;
            let b = tr.min(t_end);
            if b <= tl {
                break;
            }
            let (m0a, m1a) = log_moments(tl, b, c);
            let (m0b, m1b) = log_moments(tl, b, -c);
            let (m0, m1) = (m0a + m0b, m1a + m1b);
            row[j] += (tr * m0 - m1) / dt;
            row[j + 1] += (m1 - tl * m0) / dt;
        }
    }
    w
}

/// `F(z_i, s) = ∫ q(z_i,t) log|t² - s| dt` tabulated on a uniform `s` grid.
fn log_table(rows: &[f64], n_rows: usize, stride: usize, dt: f64, nt: usize, t_end: f64) -> Table {
    let ns = S_OVERSAMPLING * nt;
    let s_max = 4.0;
    let ds = s_max / (ns - 1) as f64;
    let s_grid: Vec<f64> = (0..ns).map(|k| k as f64 * ds).collect();
    let w = log_weights(dt, nt, t_end, &s_grid);
    let mut out = vec![0.0; n_rows * ns];
    for i in 0..n_rows {
        let q = &rows[i * stride..i * stride + nt];
        for k in 0..ns {
            let wk = &w[k * nt..(k + 1) * nt];
            out[i * ns + k] = wk.iter().zip(q).map(|(a, b)| a * b).sum();
        }
    }
    Table {
        rows: out,
        n: ns,
        x0: 0.0,
        dx: ds,
        clamp_low: false,
    }
}

/// `∂_t(t ∂_t(g/t))` with `g/t` extrapolated linearly to `t = 0`.
fn finch_filter(row: &[f64], dt: f64) -> Vec<f64> {
    let n = row.len();
    let mut ratio: Vec<f64> = row
        .iter()
        .enumerate()
        .map(|(j, v)| if j == 0 { 0.0 } else { v / (j as f64 * dt) })
        .collect();
    if n > 2 {
        ratio[0] = 2.0 * ratio[1] - ratio[2];
    }
    let mut inner = derivative(&ratio, dt);
    for (j, v) in inner.iter_mut().enumerate() {
        *v *= j as f64 * dt;
    }
    derivative(&inner, dt)
}

/// Principal value `∫_0^T g(t') / (t'² - t²) dt'` at the half-step points
/// `t = (k + 1/2) dt`, by the trapezoid rule on the data grid.
fn hilbert_table(data: &ProjectionData, nt: usize) -> Table {
    let dt = data.times.dt();
    let n = data.times.samples;
    let weights: Vec<f64> = (0..nt)
        .map(|j| if j == 0 || j + 1 == nt { 0.5 * dt } else { dt })
        .collect();
    let mut rows = Vec::with_capacity(data.detectors.len() * n);
    for row in data.rows() {
        for k in 0..n {
            let t = (k as f64 + 0.5) * dt;
            let t2 = t * t;
            let mut acc = 0.0;
            for j in 0..nt {
                let tp = j as f64 * dt;
                acc += weights[j] * row[j] / (tp * tp - t2);
            }
            rows.push(acc);
        }
    }
    Table {
        rows,
        n,
        x0: 0.5 * dt,
        dx: dt,
        clamp_low: true,
    }
}

pub fn reconstruct_2d(
    method: Method2d,
    g: &ProjectionData,
    spec: &GridSpec,
    interp: Interpolation,
) -> Result<ImageGrid> {
    g.require_kind("data", Kind::Integral)?;
    let (data, r) = prepare(g, spec, Dim::Two, PAD, "2D filtered backprojection")?;
    let det = &data.detectors;
    let dt = data.times.dt();
    let t_end = data.times.t_max.min(2.0);
    let nt = used_samples(&data, t_end);
    let n = data.times.samples;
    let h = spec.spacing / r;
    let values = match method {
        Method2d::FinchLog => {
            let table = log_table(&data.values, det.len(), n, dt, nt, t_end);
            let padded = spec.padded(PAD);
            let pts = scaled_points(&padded, r);
            let u = sum_scalar(&pts, det, |i, z, y| {
                let d = dist(z, y);
                table.eval(i, d * d, interp)
            });
            let scale = 1.0 / (4.0 * PI * PI);
            laplacian_inner(&padded, &u, PAD, h)
                .into_iter()
                .map(|v| scale * v)
                .collect()
        }
        Method2d::FinchLogFiltered => {
            let mut filtered = Vec::with_capacity(data.values.len());
            for row in data.rows() {
                filtered.extend(finch_filter(row, dt));
            }
            let table = log_table(&filtered, det.len(), n, dt, nt, t_end);
            let pts = scaled_points(spec, r);
            let scale = 1.0 / (4.0 * PI * PI);
            sum_scalar(&pts, det, |i, z, y| {
                let d = dist(z, y);
                table.eval(i, d * d, interp)
            })
            .into_iter()
            .map(|v| scale * v)
            .collect()
        }
        Method2d::Kunyansky => {
            let table = hilbert_table(&data, nt);
            let div = divergence_of_backprojection(spec, r, det, |i, z, y| table.eval(i, dist(z, y), interp));
            let scale = 1.0 / (2.0 * PI * PI);
            div
                .into_iter()
                .map(|v| scale * v)
                .collect()
        }
    };
    ImageGrid::from_values(spec.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DetectorSet, TimeGrid};

    fn quad_log(g: impl Fn(f64) -> f64, a: f64, b: f64, s: f64) -> f64 {
        let c = s.sqrt();
        let mut pts = vec![a, b];
        if c > a && c < b {
            pts.insert(1, c);
        }
        let mut acc = 0.0;
        for w in pts.windows(2) {
            // tanh-sinh on each piece; the log singularity sits at an endpoint.
            let (lo, hi) = (w[0], w[1]);
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            let hstep = 1.0 / 64.0;
            for k in -400..=400 {
                let x = k as f64 * hstep;
                let u = (0.5 * PI * x.sinh()).tanh();
                let wt = 0.5 * PI * x.cosh() / (0.5 * PI * x.sinh()).cosh().powi(2);
                let t = mid + half * u;
                if t <= lo || t >= hi {
                    continue;
                }
                acc += hstep * half * wt * g(t) * (t * t - s).abs().ln();
            }
        }
        acc
    }

    #[test]
    fn log_weights_integrate_linear_functions_exactly() {
        let dt = 0.1;
        let nt = 21;
        let s = [0.0, 0.37, 1.0, 2.25, 3.9];
        let w = log_weights(dt, nt, 2.0, &s);
        let g: Vec<f64> = (0..nt).map(|j| 1.0 + 0.5 * j as f64 * dt).collect();
        for (k, &sk) in s.iter().enumerate() {
            let approx: f64 = (0..nt).map(|j| w[k * nt + j] * g[j]).sum();
            let exact = quad_log(|t| 1.0 + 0.5 * t, 0.0, 2.0, sk);
            assert!((approx - exact).abs() < 1e-9, "s={sk}: {approx} vs {exact}");
        }
    }

    #[test]
    fn hilbert_split_matches_kernel() {
        for (t, tp) in [(0.3f64, 0.7f64), (1.1, 0.2), (0.05, 1.9)] {
            let direct = 2.0 / (tp * tp - t * t);
            let split = (1.0 / tp) / (t + tp) - (1.0 / tp) / (t - tp);
            assert!((direct - split).abs() < 1e-12 * direct.abs());
        }
    }

    #[test]
    fn principal_value_of_constant_window() {
        // PV ∫_0^2 1/(t'² - t²) dt' = (1/2t) ln|(2-t)/(2+t)|.
        let nt = 401;
        let det = DetectorSet::circle(1.0, 4).unwrap();
        let times = TimeGrid::new(2.0, nt).unwrap();
        let data =
            ProjectionData::new(det, times, Kind::Integral, vec![1.0; 4 * nt]).unwrap();
        let table = hilbert_table(&data, nt);
        for k in [40usize, 150, 300] {
            let t = (k as f64 + 0.5) * times.dt();
            let exact = ((2.0 - t) / (2.0 + t)).abs().ln() / (2.0 * t);
            assert!((table.rows[k] - exact).abs() < 2e-3, "t={t}");
        }
    }

    #[test]
    fn zero_data_gives_zero_image() {
        let det = DetectorSet::circle(1.0, 32).unwrap();
        let g = ProjectionData::zeros(det, TimeGrid::new(2.0, 33).unwrap(), Kind::Integral);
        let spec = GridSpec::centered(Dim::Two, 0.5, 16).unwrap();
        for m in [Method2d::FinchLog, Method2d::FinchLogFiltered, Method2d::Kunyansky] {
            let img = reconstruct_2d(m, &g, &spec, Interpolation::Linear).unwrap();
            assert!(img.values.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn rectangles_are_rejected() {
        let det = DetectorSet::rectangle([-1.0, -1.0], [1.0, 1.0], [8, 8]).unwrap();
        let g = ProjectionData::zeros(det, TimeGrid::new(2.0, 33).unwrap(), Kind::Integral);
        let spec = GridSpec::centered(Dim::Two, 0.5, 8).unwrap();
        assert!(recon_kun2d(&g, &spec).is_err());
    }
}
