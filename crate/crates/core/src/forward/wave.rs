//! Second-order leapfrog solver for `p_tt = v² Δp`, `p(0) = f`, `p_t(0) = 0`.
//!
//! The computational box is padded so that reflections from its Dirichlet
//! boundary cannot return to the detectors before the end of the recording.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::interp::derivative;
use crate::model::{DetectorSet, Dim, GridSpec, ImageGrid, Kind, Point, ProjectionData, TimeGrid};

/// Sound speed sampled on a grid; equal to 1 outside it.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedField {
    grid: ImageGrid,
}

impl SpeedField {
    pub fn new(grid: ImageGrid) -> Result<Self> {
        if grid.values.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(invalid("speed", "must be finite and strictly positive"));
        }
        let ring = grid.spec.interior_mask(1);
        for (v, inner) in grid.values.iter().zip(ring) {
            if !inner && (v - 1.0).abs() > 1e-12 {
                return Err(invalid("speed", "must equal 1 on the grid boundary ring"));
            }
        }
        Ok(Self { grid })
    }

    pub fn uniform(spec: GridSpec) -> Self {
        let n = spec.len();
        Self {
            grid: ImageGrid {
                spec,
                values: vec![1.0; n],
            },
        }
    }

    /// `1 + amplitude * exp(1 - 1/(1 - (r/radius)²))` inside the ball, 1 outside.
    pub fn bump(spec: GridSpec, center: Point, radius: f64, amplitude: f64) -> Result<Self> {
        let grid = ImageGrid::from_fn(spec, |x| {
            let r2 = crate::model::dot(&crate::model::sub(x, &center), &crate::model::sub(x, &center))
                / (radius * radius);
            if r2 < 1.0 {
                1.0 + amplitude * (1.0 - 1.0 / (1.0 - r2)).exp()
            } else {
                1.0
            }
        });
        Self::new(grid)
    }

    pub fn grid(&self) -> &ImageGrid {
        &self.grid
    }

    pub fn at(&self, x: &Point) -> f64 {
        let s = &self.grid.spec;
        let n = s.dim.n();
        let inside = (0..n).all(|a| {
            let u = (x[a] - s.origin[a]) / s.spacing;
            u >= 0.0 && u <= (s.shape[a] - 1) as f64
        });
        if inside {
            self.grid.sample(x)
        } else {
            1.0
        }
    }

    pub fn max(&self) -> f64 {
        self.grid.values.iter().fold(1.0, |m, &v| m.max(v))
    }

    pub fn min(&self) -> f64 {
        self.grid.values.iter().fold(1.0, |m, &v| m.min(v))
    }

    pub fn is_constant_unit(&self) -> bool {
        self.grid.values.iter().all(|&v| v == 1.0)
    }
}

/// Pressure traces `p(z_i, j*dt)`, detector-major.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveRecording {
    pub detectors: DetectorSet,
    pub dt: f64,
    pub samples: usize,
    pub values: Vec<f64>,
    /// Whether the medium had v ≡ 1.
    pub unit_speed: bool,
}

impl WaveRecording {
    pub fn times(&self) -> TimeGrid {
        TimeGrid {
            t_max: self.dt * (self.samples - 1) as f64,
            samples: self.samples,
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.samples..(i + 1) * self.samples]
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            values: vec![0.0; self.values.len()],
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveOptions {
    /// Recording length T.
    pub t_end: f64,
    /// Time step; defaults to `0.5 h / (v_max sqrt(dim))`.
    pub dt: Option<f64>,
    /// Extra padding beyond `v_max T / 2`.
    pub margin: f64,
}

impl WaveOptions {
    pub fn new(t_end: f64) -> Self {
        Self {
            t_end,
            dt: None,
            margin: 0.1,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }
}

/// Time-stepping state on a padded node lattice.
pub struct WaveSolver {
    spec: GridSpec,
    /// v² dt² / h² per node.
    courant2: Vec<f64>,
    inv_v2: Vec<f64>,
    prev: Vec<f64>,
    cur: Vec<f64>,
    next: Vec<f64>,
    dt: f64,
    step: usize,
    strides: [usize; 3],
}

impl WaveSolver {
    /// `domain` must share the lattice of `initial` (same spacing, origins
    /// differing by whole cells).
    pub fn new(initial: &ImageGrid, speed: &SpeedField, domain: GridSpec, dt: f64) -> Result<Self> {
        let dim = domain.dim;
        let h = domain.spacing;
        let vmax = speed.max();
        let bound = h / (dim.n() as f64).sqrt();
        if vmax * dt > bound * (1.0 + 1e-12) {
            return Err(Error::Cfl {
                lhs: vmax * dt,
                rhs: bound,
            });
        }
        let n = domain.len();
        let mut courant2 = vec![0.0; n];
        let mut inv_v2 = vec![0.0; n];
        let mut cur = vec![0.0; n];
        for flat in 0..n {
            let x = domain.point_at(flat);
            let v = speed.at(&x);
            courant2[flat] = v * v * dt * dt / (h * h);
            inv_v2[flat] = 1.0 / (v * v);
            cur[flat] = initial.sample(&x);
        }
        let strides = [domain.shape[1] * domain.shape[2], domain.shape[2], 1];
        let mut solver = Self {
            spec: domain,
            courant2,
            inv_v2,
            prev: cur.clone(),
            cur,
            next: vec![0.0; n],
            dt,
            step: 0,
            strides,
        };
        solver.zero_boundary();
        solver.prev = solver.cur.clone();
        Ok(solver)
    }

    fn zero_boundary(&mut self) {
        let mask = self.spec.interior_mask(1);
        for (v, inner) in self.cur.iter_mut().zip(mask) {
            if !inner {
                *v = 0.0;
            }
        }
    }

    fn is_interior(&self, flat: usize) -> bool {
        let idx = self.spec.unravel(flat);
        (0..self.spec.dim.n()).all(|a| idx[a] >= 1 && idx[a] + 1 < self.spec.shape[a])
    }

    /// Sum of neighbours minus 2·dim·center (unscaled 5/7-point Laplacian).
    #[inline]
    fn laplacian(&self, field: &[f64], flat: usize) -> f64 {
        let n = self.spec.dim.n();
        let mut acc = -2.0 * n as f64 * field[flat];
        for a in 0..n {
            let s = self.strides[a];
            acc += field[flat - s] + field[flat + s];
        }
        acc
    }

    pub fn step(&mut self) {
        let first = self.step == 0;
        let mut next = std::mem::take(&mut self.next);
        {
            let this = &*self;
            next.par_iter_mut().enumerate().for_each(|(flat, out)| {
                if !this.is_interior(flat) {
                    *out = 0.0;
                    return;
                }
                let lap = this.courant2[flat] * this.laplacian(&this.cur, flat);
                *out = if first {
                    this.cur[flat] + 0.5 * lap
                } else {
                    2.0 * this.cur[flat] - this.prev[flat] + lap
                };
            });
        }
        self.prev = std::mem::replace(&mut self.cur, next);
        self.next = vec![0.0; self.prev.len()];
        self.step += 1;
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.dt
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn domain(&self) -> &GridSpec {
        &self.spec
    }

    pub fn field(&self) -> ImageGrid {
        ImageGrid {
            spec: self.spec.clone(),
            values: self.cur.clone(),
        }
    }

    pub fn sample(&self, x: &Point) -> f64 {
        sample_lattice(&self.spec, &self.cur, x)
    }

    /// Discrete energy `Σ ((p^n - p^{n-1})/dt)²/v² + ⟨∇p^n, ∇p^{n-1}⟩`, times h^dim.
    /// Leapfrog conserves it exactly after the first step.
    pub fn energy(&self) -> f64 {
        let n = self.spec.dim.n();
        let h = self.spec.spacing;
        let mut kinetic = 0.0;
        let mut potential = 0.0;
        for flat in 0..self.cur.len() {
            let d = (self.cur[flat] - self.prev[flat]) / self.dt;
            kinetic += d * d * self.inv_v2[flat];
            let idx = self.spec.unravel(flat);
            for a in 0..n {
                if idx[a] + 1 < self.spec.shape[a] {
                    let s = self.strides[a];
                    let gc = (self.cur[flat + s] - self.cur[flat]) / h;
                    let gp = (self.prev[flat + s] - self.prev[flat]) / h;
                    potential += gc * gp;
                }
            }
        }
        (kinetic + potential) * h.powi(n as i32)
    }
}

fn sample_lattice(spec: &GridSpec, values: &[f64], x: &Point) -> f64 {
    // Reuse ImageGrid's interpolation without copying the field.
    let grid = ImageGridRef { spec, values };
    grid.sample(x)
}

struct ImageGridRef<'a> {
    spec: &'a GridSpec,
    values: &'a [f64],
}

impl ImageGridRef<'_> {
    fn sample(&self, x: &Point) -> f64 {
        let s = self.spec;
        let n = s.dim.n();
        let mut base = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for a in 0..n {
            let u = (x[a] - s.origin[a]) / s.spacing;
            if !(u >= 0.0) || u > (s.shape[a] - 1) as f64 {
                return 0.0;
            }
            let i = (u.floor() as usize).min(s.shape[a] - 2);
            base[a] = i;
            frac[a] = u - i as f64;
        }
        let mut acc = 0.0;
        for c in 0..(1usize << n) {
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
}

/// Lattice of `initial` extended to cover the detectors plus `pad` on each side.
fn padded_domain(initial: &GridSpec, detectors: &DetectorSet, pad: f64) -> GridSpec {
    let n = initial.dim.n();
    let h = initial.spacing;
    let mut origin = initial.origin;
    let mut shape = initial.shape;
    for a in 0..n {
        let lo_img = initial.origin[a];
        let hi_img = lo_img + (initial.shape[a] - 1) as f64 * h;
        let (mut lo, mut hi) = (lo_img, hi_img);
        for p in detectors.positions() {
            lo = lo.min(p[a]);
            hi = hi.max(p[a]);
        }
        let below = ((lo_img - (lo - pad)) / h).ceil().max(0.0) as usize;
        let above = (((hi + pad) - hi_img) / h).ceil().max(0.0) as usize;
        origin[a] = lo_img - below as f64 * h;
        shape[a] = initial.shape[a] + below + above;
    }
    GridSpec {
        origin,
        shape,
        ..initial.clone()
    }
}

/// Simulate the wave field from `initial` and record it at the detectors.
pub fn wave_forward(
    initial: &ImageGrid,
    speed: &SpeedField,
    detectors: &DetectorSet,
    options: WaveOptions,
) -> Result<WaveRecording> {
    let dim = initial.spec.dim;
    if detectors.dim() != dim || speed.grid().spec.dim != dim {
        return Err(Error::DimensionMismatch {
            field: "detectors",
            expected: dim.n(),
            found: detectors.dim().n(),
        });
    }
    if !(options.t_end > 0.0) {
        return Err(invalid("t_end", "must be positive"));
    }
    let h = initial.spec.spacing;
    let vmax = speed.max();
    let dt = options
        .dt
        .unwrap_or(0.5 * h / (vmax * (dim.n() as f64).sqrt()));
    let pad = 0.5 * vmax * options.t_end + options.margin + 2.0 * h;
    let domain = padded_domain(&initial.spec, detectors, pad);
    for p in detectors.positions() {
        let inside = (0..dim.n()).all(|a| {
            let u = (p[a] - domain.origin[a]) / h;
            u >= 1.0 && u <= (domain.shape[a] - 2) as f64
        });
        if !inside {
            return Err(invalid("detectors", "detector outside the padded domain"));
        }
    }
    let mut solver = WaveSolver::new(initial, speed, domain, dt)?;
    let steps = (options.t_end / dt).ceil() as usize;
    let samples = steps + 1;
    let nd = detectors.len();
    let mut values = vec![0.0; nd * samples];
    let record = |solver: &WaveSolver, j: usize, values: &mut [f64]| {
        for (i, p) in detectors.positions().iter().enumerate() {
            values[i * samples + j] = solver.sample(p);
        }
    };
    record(&solver, 0, &mut values);
    for j in 1..samples {
        solver.step();
        record(&solver, j, &mut values);
    }
    Ok(WaveRecording {
        detectors: detectors.clone(),
        dt,
        samples,
        values,
        unit_speed: speed.is_constant_unit(),
    })
}

/// Spherical means from pressure in 3D with v ≡ 1:
/// `t·Rf(z,t) = ∫_0^t p(z,τ) dτ`.
pub fn means_from_pressure(rec: &WaveRecording) -> Result<ProjectionData> {
    if rec.detectors.dim() != Dim::Three {
        return Err(Error::DimensionMismatch {
            field: "recording",
            expected: 3,
            found: rec.detectors.dim().n(),
        });
    }
    if !rec.unit_speed {
        return Err(invalid("recording", "means require a constant unit sound speed"));
    }
    let n = rec.samples;
    let mut values = vec![0.0; rec.values.len()];
    for (i, out) in values.chunks_mut(n).enumerate() {
        let p = rec.row(i);
        let mut integral = 0.0;
        out[0] = p[0];
        for j in 1..n {
            integral += 0.5 * rec.dt * (p[j - 1] + p[j]);
            out[j] = integral / (j as f64 * rec.dt);
        }
    }
    ProjectionData::new(rec.detectors.clone(), rec.times(), Kind::Mean, values)
}

/// Pressure from 3D spherical means: `p = ∂_t(t·Rf)` by central differences.
pub fn pressure_from_means(data: &ProjectionData) -> Result<WaveRecording> {
    data.require_dim("data", Dim::Three)?;
    data.require_kind("data", Kind::Mean)?;
    let n = data.times.samples;
    let dt = data.times.dt();
    let mut values = Vec::with_capacity(data.values.len());
    for row in data.rows() {
        let trf: Vec<f64> = row
            .iter()
            .enumerate()
            .map(|(j, v)| j as f64 * dt * v)
            .collect();
        let mut p = derivative(&trf, dt);
        p[0] = row[0];
        values.extend_from_slice(&p[..n]);
    }
    Ok(WaveRecording {
        detectors: data.detectors.clone(),
        dt,
        samples: n,
        values,
        unit_speed: true,
    })
}
