//! Reconstruction with a variable sound speed on a square aperture.
//!
//! The operator `A = -v²Δ` with Dirichlet conditions is discretized by the
//! 5-point Laplacian on the node lattice of the square, which is the same
//! lattice the wave solver uses, and diagonalized through the symmetric
//! generalized problem `-L ψ = λ² diag(v⁻²) ψ`. Eigenvectors are normalized
//! in the weighted norm `h² Σ ψ² v⁻² = 1`.
//!
//! With pressure traces `g` on the boundary nodes and modal traces
//! `g_k(t) = Σ_z w_z g(z,t) ∂ψ_k/∂n(z)`, each coefficient satisfies
//! `f_k'' + λ_k² f_k = -g_k`, which yields the three coefficient formulas.

use std::f64::consts::PI;

use faer::{Mat, Side};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::forward::{SpeedField, WaveRecording};
use crate::interp::{derivative, second_derivative, trapezoid};
use crate::model::{DetectorSet, Dim, GridSpec, ImageGrid};

/// Relative tail level above which data is flagged as insufficiently decayed.
pub const DECAY_TOLERANCE: f64 = 0.01;

/// Discretization of `∂ψ/∂n` at boundary nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FluxStencil {
    /// `-ψ(a)/h` with `a` the adjacent interior node. Makes the modal identity
    /// exact for the semi-discrete wave equation on the same lattice.
    #[default]
    Consistent,
    /// Second-order one-sided difference `-(4ψ(a₁) - ψ(a₂))/(2h)`.
    OneSided,
}

/// Discretized `A` on the square `[lo, hi]²` with `m` intervals per side.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub nodes: GridSpec,
    /// Flat node index of every interior unknown.
    pub interior: Vec<usize>,
    /// Speed at the interior nodes.
    pub speed: Vec<f64>,
    /// `λ_k²`, ascending.
    pub lambda2: Vec<f64>,
    /// `ψ_k` at the interior nodes, mode-major.
    pub modes: Vec<f64>,
    /// Boundary-node detectors (corners excluded, weight h).
    pub detectors: DetectorSet,
    /// For every detector, the interior neighbour and the next one inward.
    neighbours: Vec<(usize, usize)>,
    /// `∂ψ_k/∂n` at the detectors, mode-major.
    pub flux: Vec<f64>,
    pub stencil: FluxStencil,
}

impl DiscreteOperator {
    pub fn len(&self) -> usize {
        self.lambda2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda2.is_empty()
    }

    pub fn n_interior(&self) -> usize {
        self.interior.len()
    }

    pub fn lambda(&self, k: usize) -> f64 {
        self.lambda2[k].sqrt()
    }

    pub fn mode(&self, k: usize) -> &[f64] {
        let n = self.n_interior();
        &self.modes[k * n..(k + 1) * n]
    }

    pub fn spacing(&self) -> f64 {
        self.nodes.spacing
    }

    fn intervals(&self) -> usize {
        self.nodes.shape[0] - 1
    }

    /// Interior unknown index of node `(i, j)`, both in `1..m`.
    fn unknown(&self, i: usize, j: usize) -> usize {
        (i - 1) * (self.intervals() - 1) + (j - 1)
    }

    /// Weighted Gram matrix `h² Ψᵀ diag(v⁻²) Ψ`, row-major `K×K`.
    pub fn gram(&self) -> Vec<f64> {
        let k = self.len();
        let h2 = self.spacing().powi(2);
        let inv_v2: Vec<f64> = self.speed.iter().map(|v| 1.0 / (v * v)).collect();
        let mut out = vec![0.0; k * k];
        for a in 0..k {
            for b in a..k {
                let s: f64 = self
                    .mode(a)
                    .iter()
                    .zip(self.mode(b))
                    .zip(&inv_v2)
                    .map(|((x, y), w)| x * y * w)
                    .sum();
                out[a * k + b] = s * h2;
                out[b * k + a] = s * h2;
            }
        }
        out
    }

    /// Node field `Σ c_k ψ_k` (zero on the boundary).
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        let n = self.n_interior();
        let mut interior = vec![0.0; n];
        for (k, &c) in coeffs.iter().enumerate().take(self.len()) {
            if c != 0.0 {
                for (acc, v) in interior.iter_mut().zip(self.mode(k)) {
                    *acc += c * v;
                }
            }
        }
        let mut field = vec![0.0; self.nodes.len()];
        for (u, &flat) in self.interior.iter().enumerate() {
            field[flat] = interior[u];
        }
        field
    }
}

/// Default recording length `4 diam(Ω) / v_min`.
pub fn default_duration(lo: f64, hi: f64, speed: &SpeedField) -> f64 {
    4.0 * (hi - lo) * 2f64.sqrt() / speed.min()
}

/// Builds `A` on `[lo, hi]²` and keeps the `count` lowest eigenpairs
/// (all of them when `count` is `None`).
pub fn build_operator(
    lo: f64,
    hi: f64,
    m: usize,
    speed: &SpeedField,
    count: Option<usize>,
    stencil: FluxStencil,
) -> Result<DiscreteOperator> {
    if m < 3 {
        return Err(invalid("m", "need at least 3 intervals"));
    }
    if speed.grid().spec.dim != Dim::Two {
        return Err(Error::DimensionMismatch {
            field: "speed",
            expected: 2,
            found: speed.grid().spec.dim.n(),
        });
    }
    let nodes = GridSpec::nodes(Dim::Two, lo, hi, m)?;
    let h = nodes.spacing;
    let side = m - 1;
    let n = side * side;
    let k = count.unwrap_or(n);
    if k == 0 || k > n {
        return Err(invalid(
            "count",
            format!("requested {k} modes, interior dimension is {n}"),
        ));
    }
    let mut interior = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for i in 1..m {
        for j in 1..m {
            let flat = nodes.index(i, j, 0);
            interior.push(flat);
            v.push(speed.at(&nodes.point_at(flat)));
        }
    }
    // diag(v) (-L) diag(v)
    let inv_h2 = 1.0 / (h * h);
    let sym = Mat::<f64>::from_fn(n, n, |r, c| {
        if r == c {
            return 4.0 * inv_h2 * v[r] * v[r];
        }
        let (ri, rj) = (r / side, r % side);
        let (ci, cj) = (c / side, c % side);
        let adjacent = (ri == ci && rj.abs_diff(cj) == 1) || (rj == cj && ri.abs_diff(ci) == 1);
        if adjacent {
            -inv_h2 * v[r] * v[c]
        } else {
            0.0
        }
    });
    let eig = sym
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = eig.S().column_vector();
    let u = eig.U();
    let mut lambda2 = Vec::with_capacity(k);
    let mut modes = Vec::with_capacity(k * n);
    for col in 0..k {
        let l2 = s[col];
        if !(l2 > 0.0) {
            return Err(Error::Eigen(format!("non-positive eigenvalue {l2}")));
        }
        lambda2.push(l2);
        // Fix the sign so the largest-magnitude entry is positive.
        let mut big = 0.0f64;
        for r in 0..n {
            if u[(r, col)].abs() > big.abs() {
                big = u[(r, col)];
            }
        }
        let sign = if big < 0.0 { -1.0 } else { 1.0 };
        for r in 0..n {
            modes.push(sign * v[r] * u[(r, col)] / h);
        }
    }
    let detectors = DetectorSet::square_nodes(lo, hi, m)?;
    let mut op = DiscreteOperator {
        nodes,
        interior,
        speed: v,
        lambda2,
        modes,
        detectors,
        neighbours: Vec::new(),
        flux: Vec::new(),
        stencil,
    };
    op.neighbours = boundary_neighbours(&op)?;
    op.flux = compute_flux(&op);
    Ok(op)
}

fn boundary_neighbours(op: &DiscreteOperator) -> Result<Vec<(usize, usize)>> {
    let h = op.spacing();
    let m = op.intervals();
    let lo = op.nodes.origin[0];
    op.detectors
        .positions()
        .iter()
        .zip(op.detectors.normals())
        .map(|(p, nrm)| {
            let i = ((p[0] - lo) / h).round() as isize;
            let j = ((p[1] - lo) / h).round() as isize;
            let (di, dj) = (-(nrm[0].round() as isize), -(nrm[1].round() as isize));
            let a1 = (i + di, j + dj);
            let a2 = (i + 2 * di, j + 2 * dj);
            let ok = |(a, b): (isize, isize)| a >= 1 && b >= 1 && a < m as isize && b < m as isize;
            if !ok(a1) || !ok(a2) {
                return Err(invalid("detectors", "boundary node without interior neighbours"));
            }
            Ok((
                op.unknown(a1.0 as usize, a1.1 as usize),
                op.unknown(a2.0 as usize, a2.1 as usize),
            ))
        })
        .collect()
}

fn compute_flux(op: &DiscreteOperator) -> Vec<f64> {
    let h = op.spacing();
    let nb = op.detectors.len();
    let mut flux = vec![0.0; op.len() * nb];
    for k in 0..op.len() {
        let psi = op.mode(k);
        for (i, &(a1, a2)) in op.neighbours.iter().enumerate() {
            flux[k * nb + i] = match op.stencil {
                FluxStencil::Consistent => -psi[a1] / h,
                FluxStencil::OneSided => -(4.0 * psi[a1] - psi[a2]) / (2.0 * h),
            };
        }
    }
    flux
}

/// Modal traces `g_k(t_j)`, mode-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalTraces {
    pub dt: f64,
    pub samples: usize,
    pub values: Vec<f64>,
}

impl ModalTraces {
    pub fn modes(&self) -> usize {
        self.values.len() / self.samples
    }

    pub fn trace(&self, k: usize) -> &[f64] {
        &self.values[k * self.samples..(k + 1) * self.samples]
    }
}

/// Map recording rows onto the operator's detectors.
fn match_detectors(rec: &WaveRecording, op: &DiscreteOperator) -> Result<Vec<usize>> {
    let ref_pos = op.detectors.positions();
    if rec.detectors.len() != ref_pos.len() {
        return Err(Error::DimensionMismatch {
            field: "detectors",
            expected: ref_pos.len(),
            found: rec.detectors.len(),
        });
    }
    let tol = 1e-9 * op.spacing();
    let h = op.spacing();
    let m = op.intervals();
    let lo = op.nodes.origin[0];
    let key = |p: &[f64; 3]| {
        let i = ((p[0] - lo) / h).round() as usize;
        let j = ((p[1] - lo) / h).round() as usize;
        i * (m + 1) + j
    };
    let mut lookup = vec![usize::MAX; (m + 1) * (m + 1)];
    for (i, p) in ref_pos.iter().enumerate() {
        lookup[key(p)] = i;
    }
    rec.detectors
        .positions()
        .iter()
        .map(|p| {
            let idx = lookup.get(key(p)).copied().unwrap_or(usize::MAX);
            if idx == usize::MAX || (ref_pos[idx][0] - p[0]).abs() > tol || (ref_pos[idx][1] - p[1]).abs() > tol {
                Err(invalid("detectors", "recording detectors are not the boundary nodes"))
            } else {
                Ok(idx)
            }
        })
        .collect()
}

/// Recording rows reordered to the operator's detector order, as a matrix
/// (detectors × samples).
fn recording_matrix(rec: &WaveRecording, op: &DiscreteOperator) -> Result<Mat<f64>> {
    let order = match_detectors(rec, op)?;
    let mut g = Mat::<f64>::zeros(op.detectors.len(), rec.samples);
    for (row, &target) in order.iter().enumerate() {
        for (j, v) in rec.row(row).iter().enumerate() {
            g[(target, j)] = *v;
        }
    }
    Ok(g)
}

/// `g_k(t) = Σ_z w_z g(z,t) ∂ψ_k/∂n(z)` for every mode of `op`.
pub fn boundary_moments(rec: &WaveRecording, op: &DiscreteOperator) -> Result<ModalTraces> {
    let g = recording_matrix(rec, op)?;
    let nb = op.detectors.len();
    let w = op.detectors.weights();
    let weighted = Mat::<f64>::from_fn(op.len(), nb, |k, i| w[i] * op.flux[k * nb + i]);
    let prod = &weighted * &g;
    let mut values = Vec::with_capacity(op.len() * rec.samples);
    for k in 0..op.len() {
        for j in 0..rec.samples {
            values.push(prod[(k, j)]);
        }
    }
    Ok(ModalTraces {
        dt: rec.dt,
        samples: rec.samples,
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// `-λ⁻² g_k(0) + λ⁻³ ∫ sin(λt) g_k'' dt`
    A,
    /// `-λ⁻² g_k(0) - λ⁻² ∫ cos(λt) g_k' dt`
    B,
    /// `-λ⁻¹ ∫ sin(λt) g_k dt`
    C,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    pub values: Vec<f64>,
    /// Set when the traces had not decayed below [`DECAY_TOLERANCE`] of their
    /// peak at the end of the window.
    pub decay_warning: bool,
}

/// Largest `|x|` over the final 5% of each trace relative to the overall peak.
pub fn tail_ratio(traces: &ModalTraces) -> f64 {
    let n = traces.samples;
    let start = n - (n / 20).max(1);
    let mut peak = 0.0f64;
    let mut tail = 0.0f64;
    for k in 0..traces.modes() {
        for (j, v) in traces.trace(k).iter().enumerate() {
            peak = peak.max(v.abs());
            if j >= start {
                tail = tail.max(v.abs());
            }
        }
    }
    if peak == 0.0 {
        0.0
    } else {
        tail / peak
    }
}

/// One coefficient from one trace.
pub fn coefficient(trace: &[f64], dt: f64, lambda: f64, variant: Variant) -> f64 {
    let ts = (0..trace.len()).map(|j| j as f64 * dt);
    match variant {
        Variant::A => {
            let dd = second_derivative(trace, dt);
            let integrand: Vec<f64> = ts.zip(&dd).map(|(t, v)| (lambda * t).sin() * v).collect();
            -trace[0] / (lambda * lambda) + trapezoid(&integrand, dt) / lambda.powi(3)
        }
        Variant::B => {
            let d = derivative(trace, dt);
            let integrand: Vec<f64> = ts.zip(&d).map(|(t, v)| (lambda * t).cos() * v).collect();
            -(trace[0] + trapezoid(&integrand, dt)) / (lambda * lambda)
        }
        Variant::C => {
            let integrand: Vec<f64> = ts.zip(trace).map(|(t, v)| (lambda * t).sin() * v).collect();
            -trapezoid(&integrand, dt) / lambda
        }
    }
}

pub fn coefficients_varspeed(traces: &ModalTraces, lambda: &[f64], variant: Variant) -> Result<Coefficients> {
    if lambda.len() != traces.modes() {
        return Err(Error::DimensionMismatch {
            field: "lambda",
            expected: traces.modes(),
            found: lambda.len(),
        });
    }
    let values = (0..traces.modes())
        .into_par_iter()
        .map(|k| coefficient(traces.trace(k), traces.dt, lambda[k], variant))
        .collect();
    Ok(Coefficients {
        values,
        decay_warning: tail_ratio(traces) > DECAY_TOLERANCE,
    })
}

/// Samples a node field of `op` on an arbitrary grid (zero outside the square).
fn render(op: &DiscreteOperator, field: Vec<f64>, spec: &GridSpec) -> Result<ImageGrid> {
    if spec.dim != Dim::Two {
        return Err(Error::DimensionMismatch {
            field: "grid",
            expected: 2,
            found: spec.dim.n(),
        });
    }
    let node_img = ImageGrid::from_values(op.nodes.clone(), field)?;
    if *spec == op.nodes {
        return Ok(node_img);
    }
    Ok(ImageGrid::from_fn(spec.clone(), |p| node_img.sample(p)))
}

/// `Σ_k f_k ψ_k` sampled on `spec`.
pub fn recon_varspeed_series(coeffs: &[f64], op: &DiscreteOperator, spec: &GridSpec) -> Result<ImageGrid> {
    if coeffs.len() > op.len() {
        return Err(Error::DimensionMismatch {
            field: "coefficients",
            expected: op.len(),
            found: coeffs.len(),
        });
    }
    render(op, op.synthesize(coeffs), spec)
}

/// The bounded spectral multiplier `sin(τλ)/λ`.
#[inline]
pub fn spectral_multiplier(tau: f64, lambda: f64) -> f64 {
    (tau * lambda).sin() / lambda
}

/// Fast solver for `-L u = rhs` on the interior of the square (discrete sine
/// transform diagonalizes the 5-point Laplacian).
struct SinePoisson {
    n: usize,
    basis: Vec<f64>,
    eig: Vec<f64>,
}

impl SinePoisson {
    fn new(m: usize, h: f64) -> Self {
        let n = m - 1;
        let norm = (2.0 / m as f64).sqrt();
        let mut basis = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                basis[i * n + j] = norm * (PI * ((i + 1) * (j + 1)) as f64 / m as f64).sin();
            }
        }
        let eig = (0..n)
            .map(|j| 4.0 / (h * h) * (PI * (j + 1) as f64 / (2.0 * m as f64)).sin().powi(2))
            .collect();
        Self { n, basis, eig }
    }

    /// `S X S` with the symmetric orthogonal sine matrix `S`.
    fn transform(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let s = &self.basis;
        let mut tmp = vec![0.0; n * n];
        for i in 0..n {
            for l in 0..n {
                let a = s[i * n + l];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    tmp[i * n + j] += a * x[l * n + j];
                }
            }
        }
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for l in 0..n {
                let a = tmp[i * n + l];
                for j in 0..n {
                    out[i * n + j] += a * s[l * n + j];
                }
            }
        }
        out
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut hat = self.transform(rhs);
        for i in 0..n {
            for j in 0..n {
                hat[i * n + j] /= self.eig[i] + self.eig[j];
            }
        }
        self.transform(&hat)
    }
}

/// Harmonic extension of boundary values (given in detector order) as a
/// vector of interior values.
fn harmonic_extension(op: &DiscreteOperator, solver: &SinePoisson, boundary: &[f64]) -> Vec<f64> {
    let h2 = op.spacing().powi(2);
    let mut rhs = vec![0.0; op.n_interior()];
    for (&(a1, _), &b) in op.neighbours.iter().zip(boundary) {
        rhs[a1] += b / h2;
    }
    solver.solve(&rhs)
}

/// Operator form: `f = E g(0) - ∫ A^{-1/2} sin(τ A^{1/2}) E g_tt(τ) dτ`,
/// with `A^{-1/2} sin(τ A^{1/2})` applied through the eigenpairs of `op`.
/// Returns the image and the decay flag.
pub fn recon_operator_form(
    rec: &WaveRecording,
    op: &DiscreteOperator,
    spec: &GridSpec,
) -> Result<(ImageGrid, bool)> {
    let g = recording_matrix(rec, op)?;
    let nb = op.detectors.len();
    let nt = rec.samples;
    let n = op.n_interior();
    let m = op.intervals();
    let solver = SinePoisson::new(m, op.spacing());

    let g0: Vec<f64> = (0..nb).map(|i| g[(i, 0)]).collect();
    let e_g0 = harmonic_extension(op, &solver, &g0);

    // Columns of E for each detector, then Q = h² Ψᵀ diag(v⁻²) E.
    let columns: Vec<Vec<f64>> = (0..nb)
        .into_par_iter()
        .map(|i| {
            let mut unit = vec![0.0; nb];
            unit[i] = 1.0;
            harmonic_extension(op, &solver, &unit)
        })
        .collect();
    let h2 = op.spacing().powi(2);
    let ext = Mat::<f64>::from_fn(n, nb, |r, c| columns[c][r] / (op.speed[r] * op.speed[r]));
    let psi_t = Mat::<f64>::from_fn(op.len(), n, |k, r| h2 * op.mode(k)[r]);
    let q = &psi_t * &ext;

    let mut gtt = Mat::<f64>::zeros(nb, nt);
    for i in 0..nb {
        let row: Vec<f64> = (0..nt).map(|j| g[(i, j)]).collect();
        for (j, v) in second_derivative(&row, rec.dt).into_iter().enumerate() {
            gtt[(i, j)] = v;
        }
    }
    let modal = &q * &gtt;
    let traces = ModalTraces {
        dt: rec.dt,
        samples: nt,
        values: (0..op.len())
            .flat_map(|k| (0..nt).map(move |j| (k, j)))
            .map(|(k, j)| modal[(k, j)])
            .collect(),
    };
    let coeffs: Vec<f64> = (0..op.len())
        .into_par_iter()
        .map(|k| {
            let lambda = op.lambda(k);
            let integrand: Vec<f64> = traces
                .trace(k)
                .iter()
                .enumerate()
                .map(|(j, v)| spectral_multiplier(j as f64 * rec.dt, lambda) * v)
                .collect();
            -trapezoid(&integrand, rec.dt)
        })
        .collect();
    let mut field = op.synthesize(&coeffs);
    for (u, &flat) in op.interior.iter().enumerate() {
        field[flat] += e_g0[u];
    }
    for (i, p) in op.detectors.positions().iter().enumerate() {
        let flat = op.nodes.index(
            ((p[0] - op.nodes.origin[0]) / op.spacing()).round() as usize,
            ((p[1] - op.nodes.origin[1]) / op.spacing()).round() as usize,
            0,
        );
        field[flat] = g0[i];
    }
    let moments = boundary_moments(rec, op)?;
    let warn = tail_ratio(&moments) > DECAY_TOLERANCE;
    Ok((render(op, field, spec)?, warn))
}
