//! The artifact commands: phantom, forward, recon, validate, compare.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tat_core::fbp2d::{reconstruct_2d, Method2d};
use tat_core::fbp3d::{reconstruct_3d, Interpolation, Method3d};
use tat_core::forward::{
    add_noise, forward_analytic, forward_quadrature, means_from_pressure, wave_forward, SpeedField,
    WaveOptions, WaveRecording,
};
use tat_core::metrics::compare;
use tat_core::range::{validate, RangeConfig, RangeThresholds};
use tat_core::series::{nyquist_count, rect_eigenbasis, series_coefficients, series_sum};
use tat_core::varspeed::{
    boundary_moments, build_operator, coefficients_varspeed, default_duration, recon_operator_form,
    recon_varspeed_series, FluxStencil, Variant,
};
use tat_core::{DetectorSet, Dim, Geometry, GridSpec, ImageGrid, Kind, Phantom, ProjectionData, TimeGrid};

use crate::error::{invalid, Result};
use crate::io::{self, Measurements, NoiseJson, ProjectionFile, SpeedJson};
use crate::Outcome;

fn required<T>(value: Option<T>, field: &str) -> Result<T> {
    value.ok_or_else(|| invalid(field, "is required"))
}

fn numbers(text: &str, field: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| invalid(field, format!("`{s}` in `{text}` is not a number")))
        })
        .collect()
}

fn dim_of(n: usize) -> Result<Dim> {
    Dim::from_n(n).ok_or_else(|| invalid("dim", format!("{n} is not 2 or 3")))
}

fn point(coords: &[f64]) -> [f64; 3] {
    let mut p = [0.0; 3];
    p[..coords.len()].copy_from_slice(coords);
    p
}

fn interval(text: &str, field: &str) -> Result<(f64, f64)> {
    match numbers(text, field)?[..] {
        [lo, hi] if hi > lo => Ok((lo, hi)),
        _ => Err(invalid(field, format!("`{text}` is not `lo,hi` with hi > lo"))),
    }
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct PhantomArgs {
    /// Spatial dimension, 2 or 3 [default: 2].
    #[arg(long)]
    pub dim: Option<usize>,
    /// Constant ball `x,y[,z],radius,value`; repeatable.
    #[arg(long)]
    pub ball: Option<Vec<String>>,
    /// Smooth bump `x,y[,z],radius,amplitude[,layers]`; repeatable.
    #[arg(long)]
    pub bump: Option<Vec<String>>,
    /// Cells per axis [default: 128 in 2D, 64 in 3D].
    #[arg(long)]
    pub m: Option<usize>,
    /// Half-width of the centred cell grid [default: 0.65 in 2D, 0.5 in 3D].
    #[arg(long)]
    pub half_width: Option<f64>,
    /// Sample on the nodes of `[lo,hi]^dim` with `m` intervals instead.
    #[arg(long)]
    pub nodes: Option<String>,
    /// Sub-samples per cell axis for cell averaging [default: 1].
    #[arg(long)]
    pub supersample: Option<usize>,
    /// Output stem; writes `.json`, `.raw`, `.pgm` and `.phantom.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn default_m(dim: Dim) -> usize {
    match dim {
        Dim::Two => 128,
        Dim::Three => 64,
    }
}

fn default_half_width(dim: Dim) -> f64 {
    match dim {
        Dim::Two => 0.65,
        Dim::Three => 0.5,
    }
}

pub fn parse_phantom(dim: Dim, balls: &[String], bumps: &[String]) -> Result<Phantom> {
    let n = dim.n();
    let mut p = Phantom::new(dim);
    for text in balls {
        let v = numbers(text, "ball")?;
        if v.len() != n + 2 {
            return Err(invalid("ball", format!("`{text}` needs {} numbers", n + 2)));
        }
        p = p.with_ball(point(&v[..n]), v[n], v[n + 1])?;
    }
    for text in bumps {
        let v = numbers(text, "bump")?;
        if v.len() != n + 2 && v.len() != n + 3 {
            return Err(invalid("bump", format!("`{text}` needs {} or {} numbers", n + 2, n + 3)));
        }
        let layers = v.get(n + 2).map_or(200, |&l| l as usize);
        p = p.union(&Phantom::smooth_bump(dim, point(&v[..n]), v[n], v[n + 1], layers)?)?;
    }
    if p.is_empty() {
        return Err(invalid("ball", "the phantom needs at least one ball or bump"));
    }
    Ok(p)
}

pub fn cmd_phantom(a: PhantomArgs) -> Result<Outcome> {
    let dim = dim_of(a.dim.unwrap_or(2))?;
    let out = io::stem(&required(a.out, "out")?);
    let p = parse_phantom(dim, a.ball.as_deref().unwrap_or(&[]), a.bump.as_deref().unwrap_or(&[]))?;
    let m = a.m.unwrap_or(default_m(dim));
    let spec = match &a.nodes {
        Some(text) => {
            let (lo, hi) = interval(text, "nodes")?;
            GridSpec::nodes(dim, lo, hi, m)?
        }
        None => GridSpec::centered(dim, a.half_width.unwrap_or(default_half_width(dim)), m)?,
    };
    let img = match a.supersample.unwrap_or(1) {
        0 => return Err(invalid("supersample", "must be at least 1")),
        1 => p.rasterize(&spec)?,
        sub => p.rasterize_averaged(&spec, sub)?,
    };
    io::write_image(&out, &img)?;
    io::write_phantom(&io::phantom_path(&out), &p)?;
    Ok(Outcome::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForwardModel {
    /// Closed-form means of the balls of a phantom file.
    Analytic,
    /// Angular quadrature over a sampled image.
    Quadrature,
    /// Finite-difference wave equation; records pressure.
    Wave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryName {
    Circle,
    Arc,
    Sphere,
    Rectangle,
    Cuboid,
    /// Boundary nodes of the image's node lattice (for the variable-speed methods).
    SquareNodes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindName {
    Integral,
    Mean,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct ForwardArgs {
    /// Phantom description written by `phantom` (analytic model).
    #[arg(long)]
    pub phantom: Option<PathBuf>,
    /// Sampled image (quadrature and wave models).
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// Forward model [default: analytic with --phantom, quadrature with --image].
    #[arg(long)]
    pub model: Option<ForwardModel>,
    /// Detector surface [default: circle in 2D, sphere in 3D].
    #[arg(long)]
    pub geometry: Option<GeometryName>,
    /// Radius of circles, arcs and spheres [default: 1].
    #[arg(long)]
    pub radius: Option<f64>,
    /// Start angle of an arc in radians [default: π/2].
    #[arg(long)]
    pub arc_start: Option<f64>,
    /// Angular span of an arc in radians [default: π].
    #[arg(long)]
    pub arc_span: Option<f64>,
    /// Rectangle or cuboid `[lo,hi]^dim` as `lo,hi` [default: -0.5,0.5].
    #[arg(long = "box")]
    #[serde(rename = "box")]
    pub bounds: Option<String>,
    /// Detectors on circles and arcs, polar rings on spheres, panels per edge
    /// on rectangles and cuboids [default: 256].
    #[arg(long)]
    pub detectors: Option<usize>,
    /// Largest radius (recording length for the wave model) [default: 2R, or
    /// 4·diam/v_min for square nodes].
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Radius samples [default: 513].
    #[arg(long)]
    pub samples: Option<usize>,
    /// Data kind [default: integral].
    #[arg(long)]
    pub kind: Option<KindName>,
    /// Gaussian noise level relative to the data RMS [default: 0].
    #[arg(long)]
    pub noise: Option<f64>,
    /// Noise seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sound-speed bump `x,y[,z],radius,amplitude` (wave model).
    #[arg(long)]
    pub speed_bump: Option<String>,
    /// Wave time step [default: h/8].
    #[arg(long)]
    pub wave_dt: Option<f64>,
    /// Output stem; writes `.json` and `.raw`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn detector_set(a: &ForwardArgs, dim: Dim, image: Option<&ImageGrid>) -> Result<DetectorSet> {
    let geometry = a.geometry.unwrap_or(match dim {
        Dim::Two => GeometryName::Circle,
        Dim::Three => GeometryName::Sphere,
    });
    let count = a.detectors.unwrap_or(256);
    let radius = a.radius.unwrap_or(1.0);
    let (lo, hi) = interval(a.bounds.as_deref().unwrap_or("-0.5,0.5"), "box")?;
    let set = match geometry {
        GeometryName::Circle => DetectorSet::circle(radius, count)?,
        GeometryName::Arc => DetectorSet::arc(
            radius,
            a.arc_start.unwrap_or(0.5 * PI),
            a.arc_span.unwrap_or(PI),
            count,
        )?,
        GeometryName::Sphere => DetectorSet::sphere(radius, count, 2 * count)?,
        GeometryName::Rectangle => DetectorSet::rectangle([lo; 2], [hi; 2], [count; 2])?,
        GeometryName::Cuboid => DetectorSet::cuboid([lo; 3], [hi; 3], count)?,
        GeometryName::SquareNodes => {
            let img = image.ok_or_else(|| invalid("image", "square-nodes detectors need a node image"))?;
            let spec = &img.spec;
            let m = spec.shape[0] - 1;
            let (lo, hi) = (spec.origin[0], spec.origin[0] + m as f64 * spec.spacing);
            if spec.dim != Dim::Two || spec.origin[1] != lo || spec.shape[1] != spec.shape[0] {
                return Err(invalid("image", "square-nodes detectors need a square 2D node image"));
            }
            DetectorSet::square_nodes(lo, hi, m)?
        }
    };
    if set.dim() != dim {
        return Err(tat_core::Error::DimensionMismatch {
            field: "geometry",
            expected: dim.n(),
            found: set.dim().n(),
        }
        .into());
    }
    Ok(set)
}

pub fn parse_speed(text: &str, dim: Dim) -> Result<SpeedJson> {
    let v = numbers(text, "speed-bump")?;
    let n = dim.n();
    if v.len() != n + 2 {
        return Err(invalid("speed-bump", format!("`{text}` needs {} numbers", n + 2)));
    }
    Ok(SpeedJson {
        center: point(&v[..n]),
        radius: v[n],
        amplitude: v[n + 1],
    })
}

pub fn speed_field(speed: Option<&SpeedJson>, spec: GridSpec) -> Result<SpeedField> {
    Ok(match speed {
        Some(s) => SpeedField::bump(spec, s.center, s.radius, s.amplitude)?,
        None => SpeedField::uniform(spec),
    })
}

pub fn cmd_forward(a: ForwardArgs) -> Result<Outcome> {
    let out = io::stem(&required(a.out.clone(), "out")?);
    let model = match (a.model, &a.phantom, &a.image) {
        (Some(m), _, _) => m,
        (None, Some(_), _) => ForwardModel::Analytic,
        (None, None, Some(_)) => ForwardModel::Quadrature,
        (None, None, None) => return Err(invalid("phantom", "give --phantom or --image")),
    };
    let kind = match a.kind.unwrap_or(KindName::Integral) {
        KindName::Integral => Kind::Integral,
        KindName::Mean => Kind::Mean,
    };
    let samples = a.samples.unwrap_or(513);
    let file = match model {
        ForwardModel::Analytic => {
            let p = io::read_phantom(&required(a.phantom.clone(), "phantom")?)?;
            let det = detector_set(&a, p.dim(), None)?;
            let times = TimeGrid::new(a.t_max.unwrap_or(2.0 * reach(&det)), samples)?;
            spherical(&a, forward_analytic(&p, &det, times, kind)?)?
        }
        ForwardModel::Quadrature => {
            let img = io::read_image(&required(a.image.clone(), "image")?)?;
            let det = detector_set(&a, img.spec.dim, Some(&img))?;
            let times = TimeGrid::new(a.t_max.unwrap_or(2.0 * reach(&det)), samples)?;
            spherical(&a, forward_quadrature(&img, &det, times, kind)?)?
        }
        ForwardModel::Wave => {
            if a.noise.is_some_and(|n| n != 0.0) {
                return Err(invalid("noise", "the wave model records noise-free pressure"));
            }
            let img = io::read_image(&required(a.image.clone(), "image")?)?;
            let dim = img.spec.dim;
            let det = detector_set(&a, dim, Some(&img))?;
            let speed_json = a.speed_bump.as_deref().map(|s| parse_speed(s, dim)).transpose()?;
            let speed = speed_field(speed_json.as_ref(), img.spec.clone())?;
            let t_end = match (a.t_max, a.geometry) {
                (Some(t), _) => t,
                (None, Some(GeometryName::SquareNodes)) => {
                    let lo = img.spec.origin[0];
                    let hi = lo + (img.spec.shape[0] - 1) as f64 * img.spec.spacing;
                    default_duration(lo, hi, &speed)
                }
                (None, _) => 2.0 * reach(&det),
            };
            let dt = a.wave_dt.unwrap_or(img.spec.spacing / 8.0);
            let rec = wave_forward(&img, &speed, &det, WaveOptions::new(t_end).with_dt(dt))?;
            ProjectionFile {
                data: Measurements::Pressure(rec),
                noise: None,
                speed: speed_json,
            }
        }
    };
    io::write_projection(&out, &file)?;
    Ok(Outcome::default())
}

/// Radius of the detector surface, or half its diameter for boxes.
fn reach(det: &DetectorSet) -> f64 {
    det.radius().unwrap_or_else(|| 0.5 * det.geometry().diameter())
}

fn spherical(a: &ForwardArgs, g: ProjectionData) -> Result<ProjectionFile> {
    let level = a.noise.unwrap_or(0.0);
    let seed = a.seed.unwrap_or(0);
    let noisy = level != 0.0;
    Ok(ProjectionFile {
        data: Measurements::Spherical(if noisy { add_noise(&g, level, seed)? } else { g }),
        noise: noisy.then_some(NoiseJson { level, seed }),
        speed: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    FprLap,
    FprFilt,
    Kun3d,
    FinchLog,
    FinchFilt,
    Kun2d,
    Series,
    VarspeedSeries,
    VarspeedOperator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterpName {
    Linear,
    Cubic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantName {
    A,
    B,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StencilName {
    Consistent,
    OneSided,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct ReconArgs {
    /// Projection file.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Reconstruction method.
    #[arg(long)]
    pub method: Option<Method>,
    /// Cells per axis [default: 128 in 2D, 64 in 3D]; ignored by the
    /// variable-speed methods, which use the recording's lattice.
    #[arg(long)]
    pub m: Option<usize>,
    /// Half-width of the centred grid [default: 0.65R in 2D, 0.5R in 3D];
    /// the series method covers its box instead.
    #[arg(long)]
    pub half_width: Option<f64>,
    /// Radial interpolation of filtered projections [default: linear].
    #[arg(long)]
    pub interp: Option<InterpName>,
    /// Number of eigenmodes [default: all below the grid Nyquist limit for
    /// series, every mode for the variable-speed methods].
    #[arg(long)]
    pub terms: Option<usize>,
    /// Coefficient formula for varspeed-series [default: c].
    #[arg(long)]
    pub variant: Option<VariantName>,
    /// Normal-derivative stencil of the variable-speed operator [default: consistent].
    #[arg(long)]
    pub stencil: Option<StencilName>,
    /// Output stem; writes `.json`, `.raw` and `.pgm`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn integrals(file: &ProjectionFile) -> Result<ProjectionData> {
    match &file.data {
        Measurements::Spherical(g) => Ok(g.convert_kind(Kind::Integral)),
        Measurements::Pressure(rec) if rec.detectors.dim() == Dim::Three && rec.unit_speed => {
            Ok(means_from_pressure(rec)?.convert_kind(Kind::Integral))
        }
        Measurements::Pressure(_) => Err(invalid(
            "kind",
            "pressure traces convert to spherical means only in 3D with unit speed",
        )),
    }
}

fn pressure(file: &ProjectionFile) -> Result<&WaveRecording> {
    match &file.data {
        Measurements::Pressure(rec) => Ok(rec),
        Measurements::Spherical(_) => Err(invalid("kind", "variable-speed methods need pressure traces")),
    }
}

pub fn reconstruct(file: &ProjectionFile, a: &ReconArgs) -> Result<(ImageGrid, Vec<String>)> {
    let method = required(a.method, "method")?;
    let dim = file.detectors().dim();
    let m = a.m.unwrap_or(default_m(dim));
    let r = file.detectors().radius().unwrap_or(1.0);
    let interp = match a.interp.unwrap_or(InterpName::Linear) {
        InterpName::Linear => Interpolation::Linear,
        InterpName::Cubic => Interpolation::Cubic,
    };
    let centered = || GridSpec::centered(dim, a.half_width.unwrap_or(r * default_half_width(dim)), m);
    let mut warnings = Vec::new();
    let img = match method {
        Method::FprLap | Method::FprFilt | Method::Kun3d => {
            let m3 = match method {
                Method::FprLap => Method3d::FprLaplacian,
                Method::FprFilt => Method3d::FprFiltered,
                _ => Method3d::Kunyansky,
            };
            reconstruct_3d(m3, &integrals(file)?, &centered()?, interp)?
        }
        Method::FinchLog | Method::FinchFilt | Method::Kun2d => {
            let m2 = match method {
                Method::FinchLog => Method2d::FinchLog,
                Method::FinchFilt => Method2d::FinchLogFiltered,
                _ => Method2d::Kunyansky,
            };
            reconstruct_2d(m2, &integrals(file)?, &centered()?, interp)?
        }
        Method::Series => {
            let g = integrals(file)?;
            let (lo, hi) = match *g.detectors.geometry() {
                Geometry::Rectangle { lo, hi } => ([lo[0], lo[1], 0.0], [hi[0], hi[1], 0.0]),
                Geometry::Cuboid { lo, hi } => (lo, hi),
                other => {
                    return Err(tat_core::Error::Geometry {
                        operation: "series reconstruction",
                        geometry: other.name().to_string(),
                    }
                    .into())
                }
            };
            let n = dim.n();
            let side = hi[0] - lo[0];
            if (1..n).any(|ax| ((hi[ax] - lo[ax]) - side).abs() > 1e-12 * side) {
                return Err(invalid("geometry", "series grids need a square or cubic box"));
            }
            let h = side / m as f64;
            let mut origin = [0.0; 3];
            let mut shape = [1; 3];
            for ax in 0..n {
                origin[ax] = lo[ax] + 0.5 * h;
                shape[ax] = m;
            }
            let spec = GridSpec::new(dim, origin, h, shape)?;
            let k = a.terms.unwrap_or_else(|| nyquist_count(dim, lo, hi, h));
            let basis = rect_eigenbasis(dim, lo, hi, k)?;
            series_sum(&series_coefficients(&g, &basis)?, &basis, &spec)?
        }
        Method::VarspeedSeries | Method::VarspeedOperator => {
            let rec = pressure(file)?;
            let (lo, hi, m) = square_lattice(&rec.detectors)?;
            let nodes = GridSpec::nodes(Dim::Two, lo, hi, m)?;
            let speed = speed_field(file.speed.as_ref(), nodes.clone())?;
            let stencil = match a.stencil.unwrap_or(StencilName::Consistent) {
                StencilName::Consistent => FluxStencil::Consistent,
                StencilName::OneSided => FluxStencil::OneSided,
            };
            let op = build_operator(lo, hi, m, &speed, a.terms, stencil)?;
            let (img, decay_warning) = if method == Method::VarspeedSeries {
                let variant = match a.variant.unwrap_or(VariantName::C) {
                    VariantName::A => Variant::A,
                    VariantName::B => Variant::B,
                    VariantName::C => Variant::C,
                };
                let traces = boundary_moments(rec, &op)?;
                let lambda: Vec<f64> = (0..op.len()).map(|k| op.lambda(k)).collect();
                let c = coefficients_varspeed(&traces, &lambda, variant)?;
                (recon_varspeed_series(&c.values, &op, &nodes)?, c.decay_warning)
            } else {
                recon_operator_form(rec, &op, &nodes)?
            };
            if decay_warning {
                warnings.push("recorded traces have not decayed by the end of the window".to_string());
            }
            img
        }
    };
    Ok((img, warnings))
}

/// `(lo, hi, m)` of the square lattice whose boundary nodes are `det`.
fn square_lattice(det: &DetectorSet) -> Result<(f64, f64, usize)> {
    let not_nodes = || invalid("detectors", "not the boundary nodes of a square lattice");
    let Geometry::Rectangle { lo, hi } = *det.geometry() else {
        return Err(not_nodes());
    };
    if lo[0] != lo[1] || hi[0] != hi[1] || det.len() % 4 != 0 {
        return Err(not_nodes());
    }
    let m = det.len() / 4 + 1;
    let expect = DetectorSet::square_nodes(lo[0], hi[0], m)?;
    let close = expect
        .positions()
        .iter()
        .zip(det.positions())
        .all(|(p, q)| (0..2).all(|ax| (p[ax] - q[ax]).abs() < 1e-12));
    if !close {
        return Err(not_nodes());
    }
    Ok((lo[0], hi[0], m))
}

pub fn cmd_recon(a: ReconArgs) -> Result<Outcome> {
    let out = io::stem(&required(a.out.clone(), "out")?);
    let file = io::read_projection(&required(a.data.clone(), "data")?)?;
    let (img, warnings) = reconstruct(&file, &a)?;
    io::write_image(&out, &img)?;
    Ok(Outcome { warnings })
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct ValidateArgs {
    /// Projection file on a circle (means or integrals).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Highest moment order [default: 5].
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Highest Bessel order for the orthogonality and zero checks [default: 4].
    #[arg(long)]
    pub max_order: Option<u32>,
    /// Zeros per Bessel order [default: 3].
    #[arg(long)]
    pub per_order: Option<usize>,
    /// Pass threshold of the moment residuals [default: 1e-3].
    #[arg(long)]
    pub threshold_moments: Option<f64>,
    /// Pass threshold of the orthogonality residuals [default: 1e-3].
    #[arg(long)]
    pub threshold_orthogonality: Option<f64>,
    /// Pass threshold of the Bessel-zero residuals [default: 1e-2].
    #[arg(long)]
    pub threshold_bessel_zeros: Option<f64>,
    /// Also write the report to this JSON file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cmd_validate(a: ValidateArgs) -> Result<Outcome> {
    let file = io::read_projection(&required(a.data.clone(), "data")?)?;
    let Measurements::Spherical(g) = &file.data else {
        return Err(invalid("kind", "range checks need spherical means or integrals"));
    };
    let defaults = RangeConfig::default();
    let t = RangeThresholds::default();
    let config = RangeConfig {
        k_max: a.k_max.unwrap_or(defaults.k_max),
        max_order: a.max_order.unwrap_or(defaults.max_order),
        per_order: a.per_order.unwrap_or(defaults.per_order),
        thresholds: RangeThresholds {
            moments: a.threshold_moments.unwrap_or(t.moments),
            orthogonality: a.threshold_orthogonality.unwrap_or(t.orthogonality),
            bessel_zeros: a.threshold_bessel_zeros.unwrap_or(t.bessel_zeros),
        },
    };
    let report = validate(&g.convert_kind(Kind::Mean), &config)?;
    let doc = json!({
        "pass": report.passes(),
        "moments": {"pass": report.moments_pass, "residuals": report.moments},
        "orthogonality": {"pass": report.orthogonality_pass, "residuals": report.orthogonality},
        "bessel_zeros": {"pass": report.bessel_zeros_pass, "residuals": report.bessel_zeros},
    });
    println!("{}", serde_json::to_string_pretty(&doc).expect("report serializes"));
    if let Some(path) = &a.out {
        io::write_json(path, &doc)?;
    }
    let mut warnings = Vec::new();
    if !report.passes() {
        warnings.push("data fails the range conditions".to_string());
    }
    Ok(Outcome { warnings })
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct CompareArgs {
    /// Image to assess.
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// Reference image on the same grid.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Boundary layers excluded from the masked norms [default: 2].
    #[arg(long)]
    pub rings: Option<usize>,
    /// Also write the norms to this JSON file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cmd_compare(a: CompareArgs) -> Result<Outcome> {
    let img = io::read_image(&required(a.image.clone(), "image")?)?;
    let reference = io::read_image(&required(a.reference.clone(), "reference")?)?;
    let c = compare(&img, &reference, a.rings.unwrap_or(2))?;
    let doc = json!({
        "l2": c.l2,
        "linf": c.linf,
        "rel_l2": c.rel_l2,
        "masked_l2": c.masked_l2,
        "masked_linf": c.masked_linf,
        "masked_rel_l2": c.masked_rel_l2,
    });
    println!("{}", serde_json::to_string_pretty(&doc).expect("norms serialize"));
    if let Some(path) = &a.out {
        io::write_json(path, &doc)?;
    }
    Ok(Outcome::default())
}
