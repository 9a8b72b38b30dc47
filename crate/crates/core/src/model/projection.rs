use std::f64::consts::PI;

use super::{Dim, DetectorSet};
use crate::error::{invalid, Error, Result};

/// Spherical integrals g = |S^{n-1}| t^{n-1} · mean, or the plain means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Integral,
    Mean,
}

/// Uniform radius grid `t_j = j * t_max / (samples - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_max: f64,
    pub samples: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, samples: usize) -> Result<Self> {
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(invalid("t_max", format!("{t_max} is not positive")));
        }
        if samples < 3 {
            return Err(invalid("samples", format!("{samples} < 3")));
        }
        Ok(Self { t_max, samples })
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        self.t_max / (self.samples - 1) as f64
    }

    #[inline]
    pub fn t(&self, j: usize) -> f64 {
        j as f64 * self.dt()
    }

    pub fn ts(&self) -> Vec<f64> {
        (0..self.samples).map(|j| self.t(j)).collect()
    }
}

/// Factor turning a mean into a spherical integral at radius t.
pub fn integral_factor(dim: Dim, t: f64) -> f64 {
    match dim {
        Dim::Two => 2.0 * PI * t,
        Dim::Three => 4.0 * PI * t * t,
    }
}

/// Sampled data g(z_i, t_j), stored detector-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionData {
    pub detectors: DetectorSet,
    pub times: TimeGrid,
    pub kind: Kind,
    pub values: Vec<f64>,
}

impl ProjectionData {
    pub fn new(
        detectors: DetectorSet,
        times: TimeGrid,
        kind: Kind,
        values: Vec<f64>,
    ) -> Result<Self> {
        if values.len() != detectors.len() * times.samples {
            return Err(invalid(
                "values",
                format!(
                    "{} samples for {} detectors x {} radii",
                    values.len(),
                    detectors.len(),
                    times.samples
                ),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("values", "non-finite sample"));
        }
        Ok(Self {
            detectors,
            times,
            kind,
            values,
        })
    }

    pub fn zeros(detectors: DetectorSet, times: TimeGrid, kind: Kind) -> Self {
        let n = detectors.len() * times.samples;
        Self {
            detectors,
            times,
            kind,
            values: vec![0.0; n],
        }
    }

    pub fn dim(&self) -> Dim {
        self.detectors.dim()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.times.samples;
        &self.values[i * n..(i + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.times.samples)
    }

    pub fn require_kind(&self, field: &'static str, kind: Kind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::KindMismatch {
                field,
                expected: kind,
                found: self.kind,
            });
        }
        Ok(())
    }

    pub fn require_dim(&self, field: &'static str, dim: Dim) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                field,
                expected: dim.n(),
                found: self.dim().n(),
            });
        }
        Ok(())
    }

    /// Multiply/divide by 2πt (2D) or 4πt² (3D). MEAN values at t = 0 are
    /// taken from the nearest positive sample.
    pub fn convert_kind(&self, target: Kind) -> ProjectionData {
        if target == self.kind {
            return self.clone();
        }
        let dim = self.dim();
        let n = self.times.samples;
        let mut out = self.clone();
        out.kind = target;
        for row in out.values.chunks_mut(n) {
            match target {
                Kind::Mean => {
                    for (j, v) in row.iter_mut().enumerate().skip(1) {
                        *v /= integral_factor(dim, self.times.t(j));
                    }
                    row[0] = row[1];
                }
                Kind::Integral => {
                    for (j, v) in row.iter_mut().enumerate() {
                        *v *= integral_factor(dim, self.times.t(j));
                    }
                }
            }
        }
        out
    }

    /// Rescale coordinates so circular/spherical detectors sit on the unit
    /// surface: z -> z/R, t -> t/R, and INTEGRAL amplitudes by R^{-(n-1)}.
    /// Returns the data and R.
    pub fn normalized(&self) -> Result<(ProjectionData, f64)> {
        let r = self.detectors.radius().ok_or_else(|| Error::Geometry {
            operation: "normalization",
            geometry: self.detectors.geometry().name().to_string(),
        })?;
        if r == 1.0 {
            return Ok((self.clone(), 1.0));
        }
        let amp = match self.kind {
            Kind::Mean => 1.0,
            Kind::Integral => r.powi(-(self.dim().n() as i32 - 1)),
        };
        Ok((
            ProjectionData {
                detectors: self.detectors.dilated(1.0 / r),
                times: TimeGrid {
                    t_max: self.times.t_max / r,
                    samples: self.times.samples,
                },
                kind: self.kind,
                values: self.values.iter().map(|v| v * amp).collect(),
            },
            r,
        ))
    }

    /// Element-wise sum of two data sets on identical sampling.
    pub fn add(&self, other: &ProjectionData) -> Result<ProjectionData> {
        if self.values.len() != other.values.len()
            || self.kind != other.kind
            || self.times != other.times
        {
            return Err(invalid("projection", "sampling or kind differs"));
        }
        let mut out = self.clone();
        for (a, b) in out.values.iter_mut().zip(&other.values) {
            *a += b;
        }
        Ok(out)
    }

    pub fn scaled(&self, c: f64) -> ProjectionData {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out
    }

    pub fn rms(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        (self.values.iter().map(|v| v * v).sum::<f64>() / self.values.len() as f64).sqrt()
    }
}
