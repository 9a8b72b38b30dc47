//! On-disk formats: raw little-endian f64 blobs with JSON sidecars, PGM previews.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tat_core::forward::WaveRecording;
use tat_core::{Ball, DetectorSet, Dim, Geometry, GridSpec, ImageGrid, Kind, Phantom, ProjectionData, TimeGrid};

use crate::error::{invalid, CliError, Result};

/// `path` without a `.json`, `.raw` or `.pgm` extension.
pub fn stem(path: &Path) -> PathBuf {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json" | "raw" | "pgm") => path.with_extension(""),
        _ => path.to_path_buf(),
    }
}

fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, bytes).map_err(io_err(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn write_raw(path: &Path, values: &[f64]) -> Result<()> {
    let bytes: Vec<u8> = values.iter().flat_map(|v| v.to_le_bytes()).collect();
    write_bytes(path, &bytes)
}

fn read_raw(path: &Path, expected: usize) -> Result<Vec<f64>> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    if bytes.len() != 8 * expected {
        return Err(invalid(
            path.display().to_string(),
            format!("holds {} bytes, sidecar implies {}", bytes.len(), 8 * expected),
        ));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}

fn dim_from(n: usize, field: &str) -> Result<Dim> {
    Dim::from_n(n).ok_or_else(|| invalid(field, format!("{n} is not 2 or 3")))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ImageSidecar {
    pub dim: usize,
    pub shape: Vec<usize>,
    pub origin: Vec<f64>,
    pub spacing: f64,
}

pub fn write_image(stem: &Path, img: &ImageGrid) -> Result<()> {
    let n = img.spec.dim.n();
    let sidecar = ImageSidecar {
        dim: n,
        shape: img.spec.shape[..n].to_vec(),
        origin: img.spec.origin[..n].to_vec(),
        spacing: img.spec.spacing,
    };
    write_json(&with_suffix(stem, ".json"), &sidecar)?;
    write_raw(&with_suffix(stem, ".raw"), &img.values)?;
    write_bytes(&with_suffix(stem, ".pgm"), &pgm(img))
}

pub fn read_image(path: &Path) -> Result<ImageGrid> {
    let stem = stem(path);
    let s: ImageSidecar = read_json(&with_suffix(&stem, ".json"))?;
    let dim = dim_from(s.dim, "dim")?;
    let n = dim.n();
    if s.shape.len() != n || s.origin.len() != n {
        return Err(invalid("shape", format!("expected {n} entries for shape and origin")));
    }
    let mut shape = [1; 3];
    let mut origin = [0.0; 3];
    shape[..n].copy_from_slice(&s.shape);
    origin[..n].copy_from_slice(&s.origin);
    let spec = GridSpec::new(dim, origin, s.spacing, shape)?;
    let values = read_raw(&with_suffix(&stem, ".raw"), spec.len())?;
    Ok(ImageGrid::from_values(spec, values)?)
}

/// 8-bit binary PGM of the image (the middle z-slice in 3D), y up, min-max windowed.
pub fn pgm(img: &ImageGrid) -> Vec<u8> {
    let [nx, ny, nz] = img.spec.shape;
    let k = nz / 2;
    let slice: Vec<f64> = (0..ny)
        .rev()
        .flat_map(|j| (0..nx).map(move |i| (i, j)))
        .map(|(i, j)| img.get(i, j, k))
        .collect();
    let lo = slice.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = slice.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let mut out = format!("P5\n{nx} {ny}\n255\n").into_bytes();
    out.extend(slice.iter().map(|v| {
        if span > 0.0 && span.is_finite() {
            ((v - lo) / span * 255.0).round().clamp(0.0, 255.0) as u8
        } else {
            0
        }
    }));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum GeometryJson {
    Circle { radius: f64 },
    Arc { radius: f64, start: f64, span: f64 },
    Sphere { radius: f64 },
    Rectangle { lo: [f64; 2], hi: [f64; 2] },
    Cuboid { lo: [f64; 3], hi: [f64; 3] },
}

impl From<Geometry> for GeometryJson {
    fn from(g: Geometry) -> Self {
        match g {
            Geometry::Circle { radius } => GeometryJson::Circle { radius },
            Geometry::Arc { radius, start, span } => GeometryJson::Arc { radius, start, span },
            Geometry::Sphere { radius } => GeometryJson::Sphere { radius },
            Geometry::Rectangle { lo, hi } => GeometryJson::Rectangle { lo, hi },
            Geometry::Cuboid { lo, hi } => GeometryJson::Cuboid { lo, hi },
        }
    }
}

impl From<GeometryJson> for Geometry {
    fn from(g: GeometryJson) -> Self {
        match g {
            GeometryJson::Circle { radius } => Geometry::Circle { radius },
            GeometryJson::Arc { radius, start, span } => Geometry::Arc { radius, start, span },
            GeometryJson::Sphere { radius } => Geometry::Sphere { radius },
            GeometryJson::Rectangle { lo, hi } => Geometry::Rectangle { lo, hi },
            GeometryJson::Cuboid { lo, hi } => Geometry::Cuboid { lo, hi },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseJson {
    pub level: f64,
    pub seed: u64,
}

/// Speed `1 + amplitude·exp(1 - 1/(1 - r²/radius²))` inside the ball, 1 outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedJson {
    pub center: [f64; 3],
    pub radius: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindJson {
    Integral,
    Mean,
    /// Pressure traces from the wave solver.
    Pressure,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ProjectionSidecar {
    pub geometry: GeometryJson,
    #[serde(rename = "R")]
    pub radius: Option<f64>,
    pub kind: KindJson,
    /// Polar angle of every detector (2D only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<Vec<f64>>,
    pub positions: Vec<[f64; 3]>,
    pub normals: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub t_max: f64,
    pub samples: usize,
    pub noise: Option<NoiseJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed: Option<SpeedJson>,
}

/// Projection data or wave recordings with their provenance.
#[derive(Debug, Clone)]
pub enum Measurements {
    Spherical(ProjectionData),
    Pressure(WaveRecording),
}

#[derive(Debug, Clone)]
pub struct ProjectionFile {
    pub data: Measurements,
    pub noise: Option<NoiseJson>,
    pub speed: Option<SpeedJson>,
}

impl ProjectionFile {
    pub fn detectors(&self) -> &DetectorSet {
        match &self.data {
            Measurements::Spherical(g) => &g.detectors,
            Measurements::Pressure(r) => &r.detectors,
        }
    }
}

pub fn write_projection(stem: &Path, file: &ProjectionFile) -> Result<()> {
    let det = file.detectors();
    let (kind, times, values) = match &file.data {
        Measurements::Spherical(g) => (
            match g.kind {
                Kind::Integral => KindJson::Integral,
                Kind::Mean => KindJson::Mean,
            },
            g.times,
            &g.values,
        ),
        Measurements::Pressure(r) => (KindJson::Pressure, r.times(), &r.values),
    };
    let sidecar = ProjectionSidecar {
        geometry: (*det.geometry()).into(),
        radius: det.radius(),
        kind,
        angles: (det.dim() == Dim::Two).then(|| (0..det.len()).map(|i| det.angle(i)).collect()),
        positions: det.positions().to_vec(),
        normals: det.normals().to_vec(),
        weights: det.weights().to_vec(),
        t_max: times.t_max,
        samples: times.samples,
        noise: file.noise,
        speed: file.speed,
    };
    write_json(&with_suffix(stem, ".json"), &sidecar)?;
    write_raw(&with_suffix(stem, ".raw"), values)
}

pub fn read_projection(path: &Path) -> Result<ProjectionFile> {
    let stem = stem(path);
    let s: ProjectionSidecar = read_json(&with_suffix(&stem, ".json"))?;
    let detectors = DetectorSet::from_parts(s.geometry.into(), s.positions, s.normals, s.weights)?;
    let times = TimeGrid::new(s.t_max, s.samples)?;
    let values = read_raw(&with_suffix(&stem, ".raw"), detectors.len() * times.samples)?;
    let data = match s.kind {
        KindJson::Integral | KindJson::Mean => {
            let kind = if s.kind == KindJson::Mean { Kind::Mean } else { Kind::Integral };
            Measurements::Spherical(ProjectionData::new(detectors, times, kind, values)?)
        }
        KindJson::Pressure => Measurements::Pressure(WaveRecording {
            detectors,
            dt: times.dt(),
            samples: times.samples,
            values,
            unit_speed: s.speed.is_none(),
        }),
    };
    Ok(ProjectionFile {
        data,
        noise: s.noise,
        speed: s.speed,
    })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BallJson {
    pub center: Vec<f64>,
    pub radius: f64,
    pub value: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PhantomJson {
    pub dim: usize,
    pub balls: Vec<BallJson>,
}

pub fn phantom_path(stem: &Path) -> PathBuf {
    with_suffix(stem, ".phantom.json")
}

pub fn write_phantom(path: &Path, p: &Phantom) -> Result<()> {
    let n = p.dim().n();
    let doc = PhantomJson {
        dim: n,
        balls: p
            .balls()
            .iter()
            .map(|b| BallJson {
                center: b.center[..n].to_vec(),
                radius: b.radius,
                value: b.value,
            })
            .collect(),
    };
    write_json(path, &doc)
}

pub fn read_phantom(path: &Path) -> Result<Phantom> {
    let doc: PhantomJson = read_json(path)?;
    let dim = dim_from(doc.dim, "dim")?;
    let balls = doc
        .balls
        .into_iter()
        .map(|b| {
            if b.center.len() != dim.n() {
                return Err(invalid("center", format!("expected {} coordinates", dim.n())));
            }
            let mut center = [0.0; 3];
            center[..dim.n()].copy_from_slice(&b.center);
            Ok(Ball {
                center,
                radius: b.radius,
                value: b.value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Phantom::from_balls(dim, balls)?)
}
