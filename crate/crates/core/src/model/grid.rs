use super::{Dim, Point};
use crate::error::{invalid, Result};

/// Regular isotropic lattice. `origin` is the position of sample `(0, 0, 0)`;
/// 2D grids have `shape[2] == 1` and `origin[2] == 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub dim: Dim,
    pub origin: Point,
    pub spacing: f64,
    pub shape: [usize; 3],
}

impl GridSpec {
    pub fn new(dim: Dim, origin: Point, spacing: f64, shape: [usize; 3]) -> Result<Self> {
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(invalid("spacing", format!("{spacing} is not positive")));
        }
        let n = dim.n();
        for (axis, &s) in shape.iter().enumerate() {
            if axis < n && s < 2 {
                return Err(invalid("shape", format!("axis {axis} has {s} < 2 samples")));
            }
            if axis >= n && s != 1 {
                return Err(invalid("shape", "unused axes must have extent 1"));
            }
        }
        if dim == Dim::Two && origin[2] != 0.0 {
            return Err(invalid("origin", "2D grids require z = 0"));
        }
        Ok(Self {
            dim,
            origin,
            spacing,
            shape,
        })
    }

    /// `m` cells per axis covering `[-half_width, half_width]^dim`, samples at cell centers.
    pub fn centered(dim: Dim, half_width: f64, m: usize) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(invalid("half_width", "must be positive"));
        }
        let h = 2.0 * half_width / m as f64;
        let o = -half_width + 0.5 * h;
        let (origin, shape) = match dim {
            Dim::Two => ([o, o, 0.0], [m, m, 1]),
            Dim::Three => ([o, o, o], [m, m, m]),
        };
        Self::new(dim, origin, h, shape)
    }

    /// Node-aligned grid on `[lo, hi]^dim` with `m` intervals per axis (m+1 nodes).
    pub fn nodes(dim: Dim, lo: f64, hi: f64, m: usize) -> Result<Self> {
        if !(hi > lo) {
            return Err(invalid("box", "hi must exceed lo"));
        }
        let h = (hi - lo) / m as f64;
        let (origin, shape) = match dim {
            Dim::Two => ([lo, lo, 0.0], [m + 1, m + 1, 1]),
            Dim::Three => ([lo, lo, lo], [m + 1, m + 1, m + 1]),
        };
        Self::new(dim, origin, h, shape)
    }

    pub fn len(&self) -> usize {
        self.shape[0] * self.shape[1] * self.shape[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.shape[1] + j) * self.shape[2] + k
    }

    #[inline]
    pub fn unravel(&self, flat: usize) -> [usize; 3] {
        let k = flat % self.shape[2];
        let rest = flat / self.shape[2];
        [rest / self.shape[1], rest % self.shape[1], k]
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize, k: usize) -> Point {
        let h = self.spacing;
        [
            self.origin[0] + i as f64 * h,
            self.origin[1] + j as f64 * h,
            self.origin[2] + k as f64 * h,
        ]
    }

    #[inline]
    pub fn point_at(&self, flat: usize) -> Point {
        let [i, j, k] = self.unravel(flat);
        self.point(i, j, k)
    }

    /// Same lattice extended by `rings` samples on every active side.
    pub fn padded(&self, rings: usize) -> GridSpec {
        let n = self.dim.n();
        let mut shape = self.shape;
        let mut origin = self.origin;
        for axis in 0..n {
            shape[axis] += 2 * rings;
            origin[axis] -= rings as f64 * self.spacing;
        }
        GridSpec {
            shape,
            origin,
            ..self.clone()
        }
    }

    /// Mask that is `false` on the outer `rings` layers of the grid.
    pub fn interior_mask(&self, rings: usize) -> Vec<bool> {
        let n = self.dim.n();
        (0..self.len())
            .map(|flat| {
                let idx = self.unravel(flat);
                (0..n).all(|a| idx[a] >= rings && idx[a] + rings < self.shape[a])
            })
            .collect()
    }

    /// Largest distance from the coordinate origin to any sample.
    pub fn max_radius(&self) -> f64 {
        let n = self.dim.n();
        let mut acc = 0.0;
        for axis in 0..n {
            let a = self.origin[axis];
            let b = a + (self.shape[axis] - 1) as f64 * self.spacing;
            let m = a.abs().max(b.abs());
            acc += m * m;
        }
        acc.sqrt()
    }
}

/// Scalar field sampled on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

impl ImageGrid {
    pub fn zeros(spec: GridSpec) -> Self {
        let n = spec.len();
        Self {
            spec,
            values: vec![0.0; n],
        }
    }

    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(invalid(
                "values",
                format!("{} samples for a grid of {}", values.len(), spec.len()),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("values", "non-finite sample"));
        }
        Ok(Self { spec, values })
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn(&Point) -> f64) -> Self {
        let values = (0..spec.len()).map(|i| f(&spec.point_at(i))).collect();
        Self { spec, values }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.spec.index(i, j, k)]
    }

    /// Multilinear interpolation; zero outside the sampled box.
    pub fn sample(&self, x: &Point) -> f64 {
        let s = &self.spec;
        let h = s.spacing;
        let n = s.dim.n();
        let mut base = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for a in 0..n {
            let u = (x[a] - s.origin[a]) / h;
            if !(u >= 0.0) || u > (s.shape[a] - 1) as f64 {
                return 0.0;
            }
            let i = (u.floor() as usize).min(s.shape[a] - 2);
            base[a] = i;
            frac[a] = u - i as f64;
        }
        let corners = 1usize << n;
        let mut acc = 0.0;
        for c in 0..corners {
            let mut w = 1.0;
            let mut idx = base;
            for a in 0..n {
                if c >> a & 1 == 1 {
                    idx[a] += 1;
                    w *= frac[a];
                } else {
                    w *= 1.0 - frac[a];
                }
            }
            if w != 0.0 {
                acc += w * self.values[s.index(idx[0], idx[1], idx[2])];
            }
        }
        acc
    }

    pub fn scale(&mut self, c: f64) {
        self.values.iter_mut().for_each(|v| *v *= c);
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Values on the sub-grid obtained by dropping `rings` layers on every side.
    pub fn cropped(&self, rings: usize) -> ImageGrid {
        let s = &self.spec;
        let n = s.dim.n();
        let mut shape = s.shape;
        let mut origin = s.origin;
        for a in 0..n {
            shape[a] -= 2 * rings;
            origin[a] += rings as f64 * s.spacing;
        }
        let spec = GridSpec {
            shape,
            origin,
            ..s.clone()
        };
        let off = if n == 3 { rings } else { 0 };
        let mut values = Vec::with_capacity(spec.len());
        for i in 0..shape[0] {
            for j in 0..shape[1] {
                for k in 0..shape[2] {
                    values.push(self.get(i + rings, j + rings, k + off));
                }
            }
        }
        ImageGrid { spec, values }
    }
}
