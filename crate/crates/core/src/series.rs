//! Dirichlet-eigenfunction series for rectangular and box apertures.
//!
//! The coefficient of `f` against an eigenfunction `u_k` (with `Δu_k +
//! λ_k² u_k = 0`, `u_k = 0` on the boundary) is recovered from spherical
//! integrals on the boundary through the representation
//! `u_k(x) = ∫_S Φ_λ(|x-z|) ∂u_k/∂n(z) dA(z)`, where `Φ_λ` is the real
//! singular part of the Helmholtz fundamental solution. Sources outside the
//! box contribute nothing, because the same integral vanishes for exterior `x`.

use std::f64::consts::PI;

use faer::Mat;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::model::{Dim, Geometry, GridSpec, ImageGrid, Kind, Point, ProjectionData};
use crate::specfun::y0_positive;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    /// Sine multiplicities per axis (1-based); unused axes hold 0.
    pub index: [usize; 3],
    pub lambda: f64,
}

/// Closed-form Dirichlet eigenbasis of `[lo, hi]` (axis-aligned), sorted by λ.
#[derive(Debug, Clone, PartialEq)]
pub struct RectEigenBasis {
    pub dim: Dim,
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    pub modes: Vec<Mode>,
}

impl RectEigenBasis {
    fn side(&self, a: usize) -> f64 {
        self.hi[a] - self.lo[a]
    }

    /// `sqrt(2/L)` per axis, multiplied.
    pub fn normalization(&self) -> f64 {
        (0..self.dim.n()).map(|a| (2.0 / self.side(a)).sqrt()).product()
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn value(&self, k: usize, x: &Point) -> f64 {
        let m = &self.modes[k];
        let mut v = self.normalization();
        for a in 0..self.dim.n() {
            v *= (m.index[a] as f64 * PI * (x[a] - self.lo[a]) / self.side(a)).sin();
        }
        v
    }

    pub fn gradient(&self, k: usize, x: &Point) -> [f64; 3] {
        let m = &self.modes[k];
        let n = self.dim.n();
        let c = self.normalization();
        let mut s = [1.0; 3];
        let mut ds = [0.0; 3];
        for a in 0..n {
            let w = m.index[a] as f64 * PI / self.side(a);
            let (sn, cs) = (w * (x[a] - self.lo[a])).sin_cos();
            s[a] = sn;
            ds[a] = w * cs;
        }
        let mut g = [0.0; 3];
        for a in 0..n {
            let mut v = c * ds[a];
            for b in 0..n {
                if b != a {
                    v *= s[b];
                }
            }
            g[a] = v;
        }
        g
    }

    pub fn normal_derivative(&self, k: usize, z: &Point, normal: &Point) -> f64 {
        let g = self.gradient(k, z);
        g[0] * normal[0] + g[1] * normal[1] + g[2] * normal[2]
    }
}

/// Number of modes with `λ <= λ_max`.
pub fn count_below(dim: Dim, lo: [f64; 3], hi: [f64; 3], lambda_max: f64) -> usize {
    enumerate_modes(dim, lo, hi, lambda_max).len()
}

/// Mode count at the grid Nyquist limit `λ <= π/h`.
pub fn nyquist_count(dim: Dim, lo: [f64; 3], hi: [f64; 3], h: f64) -> usize {
    count_below(dim, lo, hi, PI / h)
}

fn enumerate_modes(dim: Dim, lo: [f64; 3], hi: [f64; 3], lambda_max: f64) -> Vec<Mode> {
    let n = dim.n();
    let mut top = [1usize; 3];
    for a in 0..n {
        top[a] = (lambda_max * (hi[a] - lo[a]) / PI).floor() as usize;
    }
    let mut modes = Vec::new();
    let range = |a: usize| if a < n { 1..=top[a] } else { 0..=0 };
    for i in range(0) {
        for j in range(1) {
            for k in range(2) {
                let idx = [i, j, k];
                let mut l2 = 0.0;
                for a in 0..n {
                    let w = idx[a] as f64 * PI / (hi[a] - lo[a]);
                    l2 += w * w;
                }
                let lambda = l2.sqrt();
                if lambda <= lambda_max {
                    modes.push(Mode { index: idx, lambda });
                }
            }
        }
    }
    modes.sort_by(|a, b| a.lambda.total_cmp(&b.lambda).then(a.index.cmp(&b.index)));
    modes
}

/// First `count` eigenpairs of the box `[lo, hi]`.
pub fn rect_eigenbasis(dim: Dim, lo: [f64; 3], hi: [f64; 3], count: usize) -> Result<RectEigenBasis> {
    if count == 0 {
        return Err(invalid("count", "need at least one mode"));
    }
    let n = dim.n();
    for a in 0..n {
        if !(hi[a] > lo[a]) {
            return Err(invalid("box", "hi must exceed lo on every axis"));
        }
    }
    let mut lo = lo;
    let mut hi = hi;
    for a in n..3 {
        lo[a] = 0.0;
        hi[a] = 0.0;
    }
    let mut lambda_max: f64 = (0..n).map(|a| (PI / (hi[a] - lo[a])).powi(2)).sum::<f64>().sqrt();
    let mut modes = enumerate_modes(dim, lo, hi, lambda_max);
    while modes.len() < count {
        lambda_max *= 1.5;
        modes = enumerate_modes(dim, lo, hi, lambda_max);
    }
    modes.truncate(count);
    Ok(RectEigenBasis { dim, lo, hi, modes })
}

/// Real singular part of the Helmholtz fundamental solution
/// (`(Δ + λ²)Φ = -δ`).
#[inline]
pub fn green_kernel(dim: Dim, lambda: f64, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    match dim {
        Dim::Two => -0.25 * y0_positive(lambda * r),
        Dim::Three => (lambda * r).cos() / (4.0 * PI * r),
    }
}

fn check_coverage(g: &ProjectionData, basis: &RectEigenBasis) -> Result<()> {
    let n = basis.dim.n();
    match (g.detectors.geometry(), basis.dim) {
        (Geometry::Rectangle { .. }, Dim::Two) | (Geometry::Cuboid { .. }, Dim::Three) => {}
        (other, _) => {
            return Err(Error::Geometry {
                operation: "series coefficients",
                geometry: other.name().to_string(),
            })
        }
    }
    let scale: f64 = (0..n).map(|a| basis.side(a)).fold(0.0, f64::max);
    let tol = 1e-9 * scale;
    for a in 0..n {
        for (face, bound) in [("lower", basis.lo[a]), ("upper", basis.hi[a])] {
            let covered: f64 = g
                .detectors
                .positions()
                .iter()
                .zip(g.detectors.weights())
                .filter(|(p, _)| (p[a] - bound).abs() <= tol)
                .map(|(_, w)| w)
                .sum();
            if !(covered > 0.0) {
                return Err(invalid(
                    "detectors",
                    format!("no coverage of the {face} face along axis {a}"),
                ));
            }
        }
    }
    for p in g.detectors.positions() {
        let on_boundary = (0..n).any(|a| {
            (p[a] - basis.lo[a]).abs() <= tol || (p[a] - basis.hi[a]).abs() <= tol
        });
        if !on_boundary {
            return Err(invalid("detectors", "detector off the box boundary"));
        }
    }
    Ok(())
}

/// `α_k = Σ_i w_i ∂u_k/∂n(z_i) ∫ g(z_i, r) Φ_{λ_k}(r) dr` (trapezoid in `r`).
pub fn series_coefficients(g: &ProjectionData, basis: &RectEigenBasis) -> Result<Vec<f64>> {
    g.require_kind("data", Kind::Integral)?;
    g.require_dim("data", basis.dim)?;
    check_coverage(g, basis)?;
    let nt = g.times.samples;
    let dt = g.times.dt();
    let det = &g.detectors;
    let kernel: Vec<Vec<f64>> = basis
        .modes
        .par_iter()
        .map(|mode| {
            (0..nt)
                .map(|j| {
                    let w = if j == 0 || j + 1 == nt { 0.5 * dt } else { dt };
                    w * green_kernel(basis.dim, mode.lambda, j as f64 * dt)
                })
                .collect()
        })
        .collect();
    let data = Mat::<f64>::from_fn(det.len(), nt, |i, j| g.row(i)[j]);
    let kernel = Mat::<f64>::from_fn(nt, basis.len(), |j, k| kernel[k][j]);
    // Entry (i, k): ∫ g(z_i, r) Φ_{λ_k}(r) dr.
    let radial = &data * &kernel;
    let coeffs = (0..basis.len())
        .into_par_iter()
        .map(|k| {
            let mut acc = 0.0;
            for i in 0..det.len() {
                let flux = basis.normal_derivative(k, &det.positions()[i], &det.normals()[i]);
                acc += det.weights()[i] * flux * radial[(i, k)];
            }
            acc
        })
        .collect();
    Ok(coeffs)
}

/// Truncated sum `Σ α_k u_k` on the grid.
pub fn series_sum(coeffs: &[f64], basis: &RectEigenBasis, spec: &GridSpec) -> Result<ImageGrid> {
    if coeffs.len() > basis.len() {
        return Err(Error::DimensionMismatch {
            field: "coefficients",
            expected: basis.len(),
            found: coeffs.len(),
        });
    }
    if spec.dim != basis.dim {
        return Err(Error::DimensionMismatch {
            field: "grid",
            expected: basis.dim.n(),
            found: spec.dim.n(),
        });
    }
    let n = basis.dim.n();
    let c = basis.normalization();
    // Per-axis sine tables indexed by multiplicity.
    let tables: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|a| {
            let top = basis.modes.iter().map(|m| m.index[a]).max().unwrap_or(0);
            (0..=top)
                .map(|mult| {
                    (0..spec.shape[a])
                        .map(|i| {
                            let x = spec.origin[a] + i as f64 * spec.spacing;
                            let inside = x >= basis.lo[a] && x <= basis.hi[a];
                            if inside {
                                (mult as f64 * PI * (x - basis.lo[a]) / basis.side(a)).sin()
                            } else {
                                0.0
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let active: Vec<(usize, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, a)| **a != 0.0)
        .map(|(k, a)| (k, *a))
        .collect();
    let values: Vec<f64> = (0..spec.len())
        .into_par_iter()
        .map(|flat| {
            let idx = spec.unravel(flat);
            let mut acc = 0.0;
            for &(k, alpha) in &active {
                let m = &basis.modes[k];
                let mut v = alpha;
                for a in 0..n {
                    v *= tables[a][m.index[a]][idx[a]];
                }
                acc += v;
            }
            c * acc
        })
        .collect();
    ImageGrid::from_values(spec.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DetectorSet, TimeGrid};

    #[test]
    fn square_of_side_pi() {
        let b = rect_eigenbasis(Dim::Two, [0.0; 3], [PI, PI, 0.0], 3).unwrap();
        assert!((b.modes[0].lambda.powi(2) - 2.0).abs() < 1e-12);
        assert_eq!(b.modes[1].lambda, b.modes[2].lambda);
        let pair = [b.modes[1].index, b.modes[2].index];
        assert!(pair.contains(&[1, 2, 0]) && pair.contains(&[2, 1, 0]));
    }

    #[test]
    fn normalization_constant() {
        let b = rect_eigenbasis(Dim::Two, [0.0; 3], [3.0, 3.0, 0.0], 1).unwrap();
        assert!((b.normalization() - 2.0 / 3.0).abs() < 1e-15);
        let b = rect_eigenbasis(Dim::Three, [0.0; 3], [2.0; 3], 1).unwrap();
        assert!((b.normalization() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn modes_vanish_on_boundary() {
        let b = rect_eigenbasis(Dim::Two, [-1.0, -1.0, 0.0], [1.0, 1.0, 0.0], 20).unwrap();
        for k in 0..b.len() {
            assert!(b.value(k, &[-1.0, 0.3, 0.0]).abs() < 1e-14);
            assert!(b.value(k, &[0.2, 1.0, 0.0]).abs() < 1e-14);
        }
    }

    #[test]
    fn lambdas_ascend_and_count_matches() {
        let b = rect_eigenbasis(Dim::Three, [0.0; 3], [1.0, 2.0, 1.5], 50).unwrap();
        assert_eq!(b.len(), 50);
        assert!(b.modes.windows(2).all(|w| w[0].lambda <= w[1].lambda));
    }

    #[test]
    fn zero_data_gives_zero_coefficients() {
        let det = DetectorSet::rectangle([-1.0, -1.0], [1.0, 1.0], [16, 16]).unwrap();
        let g = ProjectionData::zeros(det, TimeGrid::new(3.0, 31).unwrap(), Kind::Integral);
        let b = rect_eigenbasis(Dim::Two, [-1.0, -1.0, 0.0], [1.0, 1.0, 0.0], 10).unwrap();
        assert!(series_coefficients(&g, &b).unwrap().iter().all(|&a| a == 0.0));
    }

    #[test]
    fn circle_detectors_are_rejected() {
        let det = DetectorSet::circle(1.0, 16).unwrap();
        let g = ProjectionData::zeros(det, TimeGrid::new(3.0, 31).unwrap(), Kind::Integral);
        let b = rect_eigenbasis(Dim::Two, [-1.0, -1.0, 0.0], [1.0, 1.0, 0.0], 10).unwrap();
        assert!(series_coefficients(&g, &b).is_err());
    }

    #[test]
    fn missing_face_is_rejected() {
        let full = DetectorSet::rectangle([-1.0, -1.0], [1.0, 1.0], [8, 8]).unwrap();
        let keep: Vec<usize> = (0..full.len()).filter(|&i| full.positions()[i][0] > -1.0 + 1e-9).collect();
        let det = DetectorSet::from_parts(
            full.geometry().clone(),
            keep.iter().map(|&i| full.positions()[i]).collect(),
            keep.iter().map(|&i| full.normals()[i]).collect(),
            keep.iter().map(|&i| full.weights()[i]).collect(),
        )
        .unwrap();
        let g = ProjectionData::zeros(det, TimeGrid::new(3.0, 31).unwrap(), Kind::Integral);
        let b = rect_eigenbasis(Dim::Two, [-1.0, -1.0, 0.0], [1.0, 1.0, 0.0], 10).unwrap();
        assert!(series_coefficients(&g, &b).is_err());
    }

    #[test]
    fn unit_coefficient_renders_mode() {
        let b = rect_eigenbasis(Dim::Two, [-1.0, -1.0, 0.0], [1.0, 1.0, 0.0], 5).unwrap();
        let spec = GridSpec::centered(Dim::Two, 1.0, 16).unwrap();
        let img = series_sum(&[0.0, 0.0, 1.0], &b, &spec).unwrap();
        for flat in 0..spec.len() {
            let p = spec.point_at(flat);
            assert!((img.values[flat] - b.value(2, &p)).abs() < 1e-13);
        }
    }
}
