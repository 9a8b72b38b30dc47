//! Exact filtered backprojection for spherical apertures.
//!
//! All three operators consume INTEGRAL-kind data on a sphere of radius `R`
//! (normalized internally to the unit sphere) and return an image on the
//! requested grid. They agree on data in the range of the spherical mean
//! transform and differ off it: uniform data `4πt²` produced by a source
//! enclosing the aperture yields `-4` for both Laplacian forms and `+2` for
//! the divergence form.

use std::f64::consts::PI;

use crate::backproject::{
    divergence_of_backprojection, laplacian_inner, prepare, scaled_points, sum_scalar, Table,
};
use crate::interp::second_derivative;
use crate::model::{dist, Dim, GridSpec, ImageGrid, Kind, ProjectionData};
use crate::Result;

pub use crate::backproject::Interpolation;

/// Padding (in cells) of the evaluation grid for the outer derivatives.
pub const PAD: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method3d {
    /// Laplacian of the backprojected `g/t`.
    FprLaplacian,
    /// Backprojection of `g''/t`.
    FprFiltered,
    /// Divergence of the normal-weighted backprojection of `(1/t) d/dt (g/t)`.
    Kunyansky,
}

pub fn recon_fpr_laplacian(g: &ProjectionData, spec: &GridSpec) -> Result<ImageGrid> {
    reconstruct_3d(Method3d::FprLaplacian, g, spec, Interpolation::Linear)
}

pub fn recon_fpr_filtered(g: &ProjectionData, spec: &GridSpec) -> Result<ImageGrid> {
    reconstruct_3d(Method3d::FprFiltered, g, spec, Interpolation::Linear)
}

pub fn recon_kun3d(g: &ProjectionData, spec: &GridSpec) -> Result<ImageGrid> {
    reconstruct_3d(Method3d::Kunyansky, g, spec, Interpolation::Linear)
}

fn filter_rows(data: &ProjectionData, f: impl Fn(&[f64], f64) -> Vec<f64>) -> Table {
    let n = data.times.samples;
    let dt = data.times.dt();
    let mut rows = Vec::with_capacity(data.values.len());
    for row in data.rows() {
        rows.extend(f(row, dt));
    }
    Table {
        rows,
        n,
        x0: 0.0,
        dx: dt,
        clamp_low: false,
    }
}

/// `(1/t) d/dt (g/t)` at the half steps `(j+1/2) dt` by compact differences.
fn staggered_kun_table(data: &ProjectionData) -> Table {
    let n = data.times.samples;
    let dt = data.times.dt();
    let mut rows = Vec::with_capacity(data.detectors.len() * (n - 1));
    for row in data.rows() {
        let ratio: Vec<f64> = row
            .iter()
            .enumerate()
            .map(|(j, v)| if j == 0 { 0.0 } else { v / (j as f64 * dt) })
            .collect();
        for j in 0..n - 1 {
            let t = (j as f64 + 0.5) * dt;
            // The first half step would difference against the undefined g(0)/0.
            let d = if j == 0 { 0.0 } else { (ratio[j + 1] - ratio[j]) / dt };
            rows.push(d / t);
        }
    }
    Table {
        rows,
        n: n - 1,
        x0: 0.5 * dt,
        dx: dt,
        clamp_low: false,
    }
}

pub fn reconstruct_3d(
    method: Method3d,
    g: &ProjectionData,
    spec: &GridSpec,
    interp: Interpolation,
) -> Result<ImageGrid> {
    g.require_kind("data", Kind::Integral)?;
    let (data, r) = prepare(g, spec, Dim::Three, PAD, "3D filtered backprojection")?;
    let det = &data.detectors;
    let scale = 1.0 / (8.0 * PI * PI);
    let h = spec.spacing / r;
    let values = match method {
        Method3d::FprLaplacian => {
            let table = filter_rows(&data, |row, _| row.to_vec());
            let padded = spec.padded(PAD);
            let pts = scaled_points(&padded, r);
            let u = sum_scalar(&pts, det, |i, z, y| {
                let t = dist(z, y);
                table.eval(i, t, interp) / t
            });
            laplacian_inner(&padded, &u, PAD, h)
                .into_iter()
                .map(|v| -scale * v)
                .collect()
        }
        Method3d::FprFiltered => {
            let table = filter_rows(&data, |row, dt| {
                let mut q = second_derivative(row, dt);
                q[0] = 0.0;
                for (j, v) in q.iter_mut().enumerate().skip(1) {
                    *v /= j as f64 * dt;
                }
                q
            });
            let pts = scaled_points(spec, r);
            sum_scalar(&pts, det, |i, z, y| table.eval(i, dist(z, y), interp))
                .into_iter()
                .map(|v| -scale * v)
                .collect()
        }
        Method3d::Kunyansky => {
            let table = staggered_kun_table(&data);
            let div = divergence_of_backprojection(spec, r, det, |i, z, y| table.eval(i, dist(z, y), interp));
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
    use crate::Error;

    #[test]
    fn zero_data_gives_zero_image() {
        let det = DetectorSet::sphere(1.0, 8, 16).unwrap();
        let g = ProjectionData::zeros(det, TimeGrid::new(2.0, 17).unwrap(), Kind::Integral);
        let spec = GridSpec::centered(Dim::Three, 0.3, 6).unwrap();
        for m in [Method3d::FprLaplacian, Method3d::FprFiltered, Method3d::Kunyansky] {
            let img = reconstruct_3d(m, &g, &spec, Interpolation::Linear).unwrap();
            assert!(img.values.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn grid_outside_aperture_is_rejected() {
        let det = DetectorSet::sphere(1.0, 8, 16).unwrap();
        let g = ProjectionData::zeros(det, TimeGrid::new(2.0, 17).unwrap(), Kind::Integral);
        let spec = GridSpec::centered(Dim::Three, 0.7, 6).unwrap();
        assert!(matches!(
            recon_kun3d(&g, &spec),
            Err(Error::OutsideAperture { .. })
        ));
    }

    #[test]
    fn mean_data_is_rejected() {
        let det = DetectorSet::sphere(1.0, 8, 16).unwrap();
        let g = ProjectionData::zeros(det, TimeGrid::new(2.0, 17).unwrap(), Kind::Mean);
        let spec = GridSpec::centered(Dim::Three, 0.3, 6).unwrap();
        assert!(matches!(
            recon_fpr_filtered(&g, &spec),
            Err(Error::KindMismatch { .. })
        ));
    }

    #[test]
    fn two_dimensional_data_is_rejected() {
        let det = DetectorSet::circle(1.0, 16).unwrap();
        let g = ProjectionData::zeros(det, TimeGrid::new(2.0, 17).unwrap(), Kind::Integral);
        let spec = GridSpec::centered(Dim::Three, 0.3, 6).unwrap();
        assert!(matches!(
            recon_fpr_laplacian(&g, &spec),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
