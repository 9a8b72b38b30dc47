//! Shared pieces of the filtered-backprojection methods: aperture checks,
//! per-detector filtered tables, detector summation, grid stencils.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interp::{cubic, lerp};
use crate::model::{DetectorSet, Dim, GridSpec, Point, ProjectionData};

/// Interpolation of filtered projections in their radial argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    #[default]
    Linear,
    Cubic,
}

/// Rows of a filtered quantity sampled at `x0 + j*dx`, one row per detector.
pub(crate) struct Table {
    pub rows: Vec<f64>,
    pub n: usize,
    pub x0: f64,
    pub dx: f64,
    /// Value used below `x0` (instead of zero).
    pub clamp_low: bool,
}

impl Table {
    #[inline]
    pub fn eval(&self, row: usize, x: f64, interp: Interpolation) -> f64 {
        let r = &self.rows[row * self.n..(row + 1) * self.n];
        let x = if self.clamp_low && x < self.x0 { self.x0 } else { x };
        match interp {
            Interpolation::Linear => lerp(r, self.x0, self.dx, x),
            Interpolation::Cubic => cubic(r, self.x0, self.dx, x),
        }
    }
}

/// Normalize circular/spherical data to the unit surface and check that the
/// grid padded by `rings` lies strictly inside it. Arcs are accepted in 2D and
/// yield the limited-view reconstruction.
pub(crate) fn prepare(
    g: &ProjectionData,
    spec: &GridSpec,
    dim: Dim,
    rings: usize,
    operation: &'static str,
) -> Result<(ProjectionData, f64)> {
    g.require_dim("data", dim)?;
    if spec.dim != dim {
        return Err(Error::DimensionMismatch {
            field: "grid",
            expected: dim.n(),
            found: spec.dim.n(),
        });
    }
    let full = match dim {
        Dim::Two => matches!(
            g.detectors.geometry(),
            crate::Geometry::Circle { .. } | crate::Geometry::Arc { .. }
        ),
        Dim::Three => matches!(g.detectors.geometry(), crate::Geometry::Sphere { .. }),
    };
    if !full {
        return Err(Error::Geometry {
            operation,
            geometry: g.detectors.geometry().name().to_string(),
        });
    }
    let (data, r) = g.normalized()?;
    let padded = spec.padded(rings);
    if padded.max_radius() >= r {
        let n = dim.n();
        let mut corner = [0.0; 3];
        for a in 0..n {
            let lo = padded.origin[a];
            let hi = lo + (padded.shape[a] - 1) as f64 * padded.spacing;
            corner[a] = if hi.abs() > lo.abs() { hi } else { lo };
        }
        return Err(Error::OutsideAperture {
            point: corner,
            radius: r,
        });
    }
    Ok((data, r))
}

/// Grid points divided by `r`.
pub(crate) fn scaled_points(spec: &GridSpec, r: f64) -> Vec<Point> {
    (0..spec.len())
        .map(|flat| {
            let p = spec.point_at(flat);
            [p[0] / r, p[1] / r, p[2] / r]
        })
        .collect()
}

const CHUNK: usize = 1024;

/// `Σ_i w_i kernel(i, z_i, y)` at every point; detector order is fixed so the
/// result does not depend on the thread count.
pub(crate) fn sum_scalar<K>(points: &[Point], det: &DetectorSet, kernel: K) -> Vec<f64>
where
    K: Fn(usize, &Point, &Point) -> f64 + Sync,
{
    let mut out = vec![0.0; points.len()];
    out.par_chunks_mut(CHUNK)
        .zip(points.par_chunks(CHUNK))
        .for_each(|(acc, pts)| {
            for (i, (z, w)) in det.positions().iter().zip(det.weights()).enumerate() {
                for (a, y) in acc.iter_mut().zip(pts) {
                    *a += w * kernel(i, z, y);
                }
            }
        });
    out
}

/// Axis strides of a grid.
fn strides(spec: &GridSpec) -> [usize; 3] {
    [spec.shape[1] * spec.shape[2], spec.shape[2], 1]
}

/// Standard (2·dim+1)-point Laplacian of `values` on `padded`, evaluated at
/// the grid `rings` layers inside it.
pub(crate) fn laplacian_inner(padded: &GridSpec, values: &[f64], rings: usize, h: f64) -> Vec<f64> {
    let n = padded.dim.n();
    let st = strides(padded);
    inner_indices(padded, rings)
        .map(|flat| {
            let mut acc = -2.0 * n as f64 * values[flat];
            for a in 0..n {
                acc += values[flat - st[a]] + values[flat + st[a]];
            }
            acc / (h * h)
        })
        .collect()
}

/// Face centers of `spec` normal to `axis`: shifted by `-h/2` along it, one more node.
pub(crate) fn face_grid(spec: &GridSpec, axis: usize) -> GridSpec {
    let mut origin = spec.origin;
    let mut shape = spec.shape;
    origin[axis] -= 0.5 * spec.spacing;
    shape[axis] += 1;
    GridSpec::new(spec.dim, origin, spec.spacing, shape).expect("face grid of a valid grid")
}

/// `Σ_i w_i n(z_i) kernel(i, z_i, y)` with each component sampled on the faces
/// normal to it, followed by the compact central-difference divergence at the
/// cell centers of `spec`.
pub(crate) fn divergence_of_backprojection<K>(spec: &GridSpec, r: f64, det: &DetectorSet, kernel: K) -> Vec<f64>
where
    K: Fn(usize, &Point, &Point) -> f64 + Sync,
{
    let n = spec.dim.n();
    let h = spec.spacing / r;
    let mut out = vec![0.0; spec.len()];
    for a in 0..n {
        let faces = face_grid(spec, a);
        let pts = scaled_points(&faces, r);
        let normals = det.normals();
        let flux = sum_scalar(&pts, det, |i, z, y| normals[i][a] * kernel(i, z, y));
        let mut step = [0; 3];
        step[a] = 1;
        for (flat, o) in out.iter_mut().enumerate() {
            let [i, j, k] = spec.unravel(flat);
            let hi = flux[faces.index(i + step[0], j + step[1], k + step[2])];
            let lo = flux[faces.index(i, j, k)];
            *o += (hi - lo) / h;
        }
    }
    out
}

/// Flat indices of the sub-grid obtained by removing `rings` layers, in the
/// sub-grid's own row-major order.
fn inner_indices(padded: &GridSpec, rings: usize) -> impl Iterator<Item = usize> + '_ {
    let n = padded.dim.n();
    let mut shape = padded.shape;
    for s in shape.iter_mut().take(n) {
        *s -= 2 * rings;
    }
    let off = move |a: usize| if a < n { rings } else { 0 };
    (0..shape[0]).flat_map(move |i| {
        (0..shape[1]).flat_map(move |j| {
            (0..shape[2]).map(move |k| padded.index(i + off(0), j + off(1), k + off(2)))
        })
    })
}
