//! Forward data: closed-form ball projections, quadrature over images, and
//! the finite-difference wave solver.

mod noise;
mod wave;

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    dist, integral_factor, DetectorSet, Dim, ImageGrid, Kind, Phantom,
    ProjectionData, TimeGrid,
};

pub use noise::add_noise;
pub use wave::{
    means_from_pressure, pressure_from_means, wave_forward, SpeedField, WaveOptions,
    WaveRecording, WaveSolver,
};

/// Fraction of the sphere (circle) of radius `r` centered at distance `d`
/// from a ball center that lies inside the ball of radius `rho`.
pub fn mean_ball(d: f64, r: f64, rho: f64, dim: Dim) -> f64 {
    if r <= 0.0 {
        return if d <= rho { 1.0 } else { 0.0 };
    }
    if d + r <= rho {
        return 1.0;
    }
    if d >= r + rho || r >= d + rho {
        return 0.0;
    }
    let c = ((d * d + r * r - rho * rho) / (2.0 * d * r)).clamp(-1.0, 1.0);
    match dim {
        Dim::Two => c.acos() / PI,
        Dim::Three => 0.5 * (1.0 - c),
    }
}

fn check_dims(phantom_dim: Dim, detectors: &DetectorSet) -> Result<()> {
    if detectors.dim() != phantom_dim {
        return Err(Error::DimensionMismatch {
            field: "detectors",
            expected: phantom_dim.n(),
            found: detectors.dim().n(),
        });
    }
    Ok(())
}

/// Exact spherical means (or integrals) of a ball phantom.
pub fn forward_analytic(
    phantom: &Phantom,
    detectors: &DetectorSet,
    times: TimeGrid,
    kind: Kind,
) -> Result<ProjectionData> {
    let dim = phantom.dim();
    check_dims(dim, detectors)?;
    let n = times.samples;
    let mut values = vec![0.0; detectors.len() * n];
    values
        .par_chunks_mut(n)
        .zip(detectors.positions().par_iter())
        .for_each(|(row, z)| {
            for ball in phantom.balls() {
                let d = dist(z, &ball.center);
                for (j, v) in row.iter_mut().enumerate() {
                    let t = times.t(j);
                    let frac = mean_ball(d, t, ball.radius, dim);
                    if frac != 0.0 {
                        *v += ball.value * frac;
                    }
                }
            }
            if kind == Kind::Integral {
                for (j, v) in row.iter_mut().enumerate() {
                    *v *= integral_factor(dim, times.t(j));
                }
            }
        });
    ProjectionData::new(detectors.clone(), times, kind, values)
}

/// Mean of the image over the circle/sphere of radius `t` around `z`.
fn image_mean(image: &ImageGrid, z: &[f64; 3], t: f64) -> f64 {
    if t == 0.0 {
        return image.sample(z);
    }
    let h = image.spec.spacing;
    match image.spec.dim {
        Dim::Two => {
            let n = ((8.0 * PI * t / h).ceil() as usize).max(64);
            let mut acc = 0.0;
            for k in 0..n {
                let phi = 2.0 * PI * k as f64 / n as f64;
                let (s, c) = phi.sin_cos();
                acc += image.sample(&[z[0] + t * c, z[1] + t * s, 0.0]);
            }
            acc / n as f64
        }
        Dim::Three => {
            let mut n_az = ((4.0 * PI * t / h).ceil() as usize).max(64);
            n_az += n_az % 2;
            let n_pol = n_az / 2;
            let dphi = 2.0 * PI / n_az as f64;
            let mut acc = 0.0;
            for i in 0..n_pol {
                let th0 = PI * i as f64 / n_pol as f64;
                let th1 = PI * (i + 1) as f64 / n_pol as f64;
                let th = 0.5 * (th0 + th1);
                let w = (th0.cos() - th1.cos()) * dphi;
                let (st, ct) = th.sin_cos();
                let mut ring = 0.0;
                for k in 0..n_az {
                    let (sp, cp) = (dphi * k as f64).sin_cos();
                    ring += image.sample(&[
                        z[0] + t * st * cp,
                        z[1] + t * st * sp,
                        z[2] + t * ct,
                    ]);
                }
                acc += w * ring;
            }
            acc / (4.0 * PI)
        }
    }
}

/// Spherical means of a sampled image by angular trapezoid quadrature with
/// multilinear interpolation (zero outside the image box).
pub fn forward_quadrature(
    image: &ImageGrid,
    detectors: &DetectorSet,
    times: TimeGrid,
    kind: Kind,
) -> Result<ProjectionData> {
    let dim = image.spec.dim;
    check_dims(dim, detectors)?;
    let n = times.samples;
    let mut values = vec![0.0; detectors.len() * n];
    values
        .par_chunks_mut(n)
        .zip(detectors.positions().par_iter())
        .for_each(|(row, z)| {
            for (j, v) in row.iter_mut().enumerate() {
                let t = times.t(j);
                let mean = image_mean(image, z, t);
                *v = match kind {
                    Kind::Mean => mean,
                    Kind::Integral => mean * integral_factor(dim, t),
                };
            }
        });
    ProjectionData::new(detectors.clone(), times, kind, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GridSpec;

    #[test]
    fn mean_ball_limits() {
        assert_eq!(mean_ball(0.0, 0.5, 1.0, Dim::Two), 1.0);
        assert_eq!(mean_ball(3.0, 1.0, 1.0, Dim::Three), 0.0);
        assert_eq!(mean_ball(0.1, 2.0, 1.0, Dim::Three), 0.0);
        assert!((mean_ball(1.0, 1.0, 1.0, Dim::Two) - 1.0 / 3.0).abs() < 1e-15);
        assert!((mean_ball(1.0, 1.0, 1.0, Dim::Three) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn empty_phantom_gives_zero_data() {
        let det = DetectorSet::circle(1.0, 16).unwrap();
        let times = TimeGrid::new(2.0, 11).unwrap();
        let p = forward_analytic(&Phantom::new(Dim::Two), &det, times, Kind::Integral).unwrap();
        assert!(p.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let det = DetectorSet::sphere(1.0, 4, 8).unwrap();
        let times = TimeGrid::new(2.0, 11).unwrap();
        let err = forward_analytic(&Phantom::new(Dim::Two), &det, times, Kind::Mean);
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn constant_image_has_unit_means() {
        let spec = GridSpec::centered(Dim::Two, 3.5, 70).unwrap();
        let img = ImageGrid::from_fn(spec, |_| 1.0);
        let det = DetectorSet::circle(1.0, 8).unwrap();
        let times = TimeGrid::new(2.0, 9).unwrap();
        let p = forward_quadrature(&img, &det, times, Kind::Mean).unwrap();
        for v in &p.values {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }
}
