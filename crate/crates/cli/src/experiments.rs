//! Canned experiments with machine-readable PASS/FAIL reports.

use std::f64::consts::PI;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tat_core::fbp2d::{reconstruct_2d, Method2d};
use tat_core::fbp3d::{reconstruct_3d, Interpolation, Method3d};
use tat_core::forward::{forward_analytic, forward_quadrature};
use tat_core::metrics::rel_l2;
use tat_core::model::{norm, square_interface, visibility_map, InterfacePoint};
use tat_core::series::{nyquist_count, rect_eigenbasis, series_coefficients, series_sum};
use tat_core::{DetectorSet, Dim, GridSpec, ImageGrid, Kind, Phantom, ProjectionData, TimeGrid};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    /// Area-law data 4πt² on the unit sphere, which no function produces.
    Counterexample,
    /// Sources outside a square aperture, seen by the series and FBP methods.
    ExteriorSource,
    /// Half-circle aperture around a square inclusion.
    PartialData,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Counterexample => "counterexample",
            Experiment::ExteriorSource => "exterior-source",
            Experiment::PartialData => "partial-data",
        }
    }

    pub fn default_m(self) -> usize {
        match self {
            Experiment::Counterexample => 64,
            Experiment::ExteriorSource | Experiment::PartialData => 128,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// `"<="`, `"<"`, `">="` or `">"`.
    pub relation: &'static str,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: "<",
            threshold,
            pass: value < threshold,
        }
    }

    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            relation: "<=",
            pass: value <= threshold,
            ..Self::below(name, value, threshold)
        }
    }

    pub fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            relation: ">",
            pass: value > threshold,
            ..Self::below(name, value, threshold)
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            relation: ">=",
            pass: value >= threshold,
            ..Self::below(name, value, threshold)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub experiment: &'static str,
    pub parameters: Value,
    pub values: Value,
    pub checks: Vec<Check>,
    pub pass: bool,
}

pub struct Run {
    pub report: Report,
    pub images: Vec<(String, ImageGrid)>,
}

fn finish(experiment: Experiment, parameters: Value, values: Value, checks: Vec<Check>, images: Vec<(String, ImageGrid)>) -> Run {
    let pass = checks.iter().all(|c| c.pass);
    Run {
        report: Report {
            experiment: experiment.name(),
            parameters,
            values,
            checks,
            pass,
        },
        images,
    }
}

pub fn run(experiment: Experiment, m: usize) -> Result<Run> {
    match experiment {
        Experiment::Counterexample => counterexample(m),
        Experiment::ExteriorSource => exterior_source(m),
        Experiment::PartialData => partial_data(m),
    }
}

/// Spherical integrals `4πt²` of the constant 1 on B(0, 3), for every detector.
pub fn area_law(det: DetectorSet, times: TimeGrid) -> ProjectionData {
    let n = det.len();
    let values = (0..n)
        .flat_map(|_| (0..times.samples).map(move |j| 4.0 * PI * times.t(j).powi(2)))
        .collect();
    ProjectionData::new(det, times, Kind::Integral, values).expect("shape matches by construction")
}

/// Grid points at distance at least 0.2 from the unit sphere.
fn deep_interior(spec: &GridSpec) -> Vec<usize> {
    (0..spec.len()).filter(|&f| norm(&spec.point_at(f)) <= 0.8).collect()
}

pub fn counterexample(m: usize) -> Result<Run> {
    let polar = 32;
    let samples = 4 * m + 1;
    let g = area_law(DetectorSet::sphere(1.0, polar, 2 * polar)?, TimeGrid::new(2.0, samples)?);
    let spec = GridSpec::centered(Dim::Three, 0.5, m)?;
    let interior = deep_interior(&spec);
    let mut checks = Vec::new();
    let mut values = serde_json::Map::new();
    let mut images = Vec::new();
    let mut means = Vec::new();
    for (method, name, expect) in [
        (Method3d::FprLaplacian, "fpr-lap", -4.0),
        (Method3d::FprFiltered, "fpr-filt", -4.0),
        (Method3d::Kunyansky, "kun3d", 2.0),
    ] {
        let img = reconstruct_3d(method, &g, &spec, Interpolation::Linear)?;
        let mean = interior.iter().map(|&f| img.values[f]).sum::<f64>() / interior.len() as f64;
        let worst = interior
            .iter()
            .map(|&f| (img.values[f] - expect).abs() / expect.abs())
            .fold(0.0, f64::max);
        values.insert(name.to_string(), json!({"expected": expect, "interior_mean": mean, "max_relative_deviation": worst}));
        checks.push(Check::at_most(format!("{name} within 2% of {expect}"), worst, 0.02));
        means.push(mean);
        images.push((name.to_string(), img));
    }
    let gap = (means[1] - means[2]).abs().min((means[0] - means[2]).abs());
    checks.push(Check::above("families disagree (|mean difference|)", gap, 1.0));
    let parameters = json!({"m": m, "half_width": 0.5, "polar_rings": polar, "azimuths": 2 * polar, "samples": samples, "t_max": 2.0});
    Ok(finish(Experiment::Counterexample, parameters, Value::Object(values), checks, images))
}

pub fn exterior_source(m: usize) -> Result<Run> {
    let inside = Phantom::new(Dim::Two).with_ball([0.05, 0.02, 0.0], 0.25, 1.0)?;
    let with_exterior = inside
        .clone()
        .with_ball([0.85, 0.1, 0.0], 0.2, 1.0)?
        .with_ball([-0.7, -0.75, 0.0], 0.15, 2.0)?;
    let times = TimeGrid::new(2.5, 8 * m + 1)?;

    let (lo, hi) = ([-0.5, -0.5, 0.0], [0.5, 0.5, 0.0]);
    let square = DetectorSet::rectangle([-0.5; 2], [0.5; 2], [4 * m; 2])?;
    let spec = GridSpec::centered(Dim::Two, 0.5, m)?;
    let terms = nyquist_count(Dim::Two, lo, hi, spec.spacing);
    let basis = rect_eigenbasis(Dim::Two, lo, hi, terms)?;
    let series = |p: &Phantom| -> Result<ImageGrid> {
        let g = forward_analytic(p, &square, times, Kind::Integral)?;
        Ok(series_sum(&series_coefficients(&g, &basis)?, &basis, &spec)?)
    };
    let clean = series(&inside)?;
    let dirty = series(&with_exterior)?;
    let series_change = rel_l2(&dirty, &clean, None)?;
    let series_error = rel_l2(&clean, &inside.rasterize_averaged(&spec, 8)?, None)?;
    let mut checks = vec![Check::below("series interior change", series_change, 0.03)];
    let mut values = serde_json::Map::new();
    values.insert("series".into(), json!({"terms": terms, "error": series_error, "exterior_change": series_change}));

    // The FBP methods need a circle; this one encloses the inclusion and excludes both exterior balls.
    let circle = DetectorSet::circle(0.6, 4 * m)?;
    let fbp_spec = GridSpec::centered(Dim::Two, 0.35, m)?;
    let mask = fbp_spec.interior_mask(2);
    let g_clean = forward_analytic(&inside, &circle, times, Kind::Integral)?;
    let g_dirty = forward_analytic(&with_exterior, &circle, times, Kind::Integral)?;
    let mut images = vec![("series-clean".to_string(), clean), ("series-exterior".to_string(), dirty)];
    for (method, name) in [
        (Method2d::FinchLog, "finch-log"),
        (Method2d::FinchLogFiltered, "finch-filt"),
        (Method2d::Kunyansky, "kun2d"),
    ] {
        let a = reconstruct_2d(method, &g_clean, &fbp_spec, Interpolation::Linear)?;
        let b = reconstruct_2d(method, &g_dirty, &fbp_spec, Interpolation::Linear)?;
        let change = rel_l2(&b, &a, Some(&mask))?;
        values.insert(name.into(), json!({"exterior_change": change}));
        checks.push(Check::above(format!("{name} interior change"), change, 0.10));
        images.push((format!("{name}-exterior"), b));
    }
    let parameters = json!({
        "m": m,
        "square": [-0.5, 0.5],
        "panels_per_side": 4 * m,
        "samples": 8 * m + 1,
        "t_max": 2.5,
        "fbp_circle_radius": 0.6,
        "fbp_half_width": 0.35,
    });
    Ok(finish(Experiment::ExteriorSource, parameters, Value::Object(values), checks, images))
}

/// Largest central-difference gradient along the normal within ±3 cells of the interface.
pub fn edge_sharpness(img: &ImageGrid, p: &InterfacePoint) -> f64 {
    let h = img.spec.spacing;
    let at = |d: f64| {
        img.sample(&[
            p.position[0] + d * p.normal[0],
            p.position[1] + d * p.normal[1],
            0.0,
        ])
    };
    (-6..=6)
        .map(|s| {
            let o = s as f64 * 0.5 * h;
            ((at(o + h) - at(o - h)) / (2.0 * h)).abs()
        })
        .fold(0.0, f64::max)
}

/// Mean sharpness of visible edges over mean sharpness of invisible ones.
fn sharpness_ratio(img: &ImageGrid, points: &[InterfacePoint], visible: &[bool]) -> f64 {
    let mean = |want: bool| {
        let s: Vec<f64> = points
            .iter()
            .zip(visible)
            .filter(|&(_, &v)| v == want)
            .map(|(p, _)| edge_sharpness(img, p))
            .collect();
        s.iter().sum::<f64>() / s.len() as f64
    };
    mean(true) / mean(false)
}

pub fn partial_data(m: usize) -> Result<Run> {
    let (center, side) = ([0.15, 0.0], 0.5);
    let fine = GridSpec::centered(Dim::Two, 0.7, 2 * m)?;
    let square = ImageGrid::from_fn(fine, |p| {
        let inside = (p[0] - center[0]).abs() < 0.5 * side && (p[1] - center[1]).abs() < 0.5 * side;
        if inside { 1.0 } else { 0.0 }
    });
    let times = TimeGrid::new(2.0, 2 * m + 1)?;
    let spec = GridSpec::centered(Dim::Two, 0.65, m)?;
    let arc = DetectorSet::arc(1.0, 0.5 * PI, PI, 2 * m)?;
    let full = DetectorSet::circle(1.0, 4 * m)?;
    let points = square_interface(center, side, 8);
    let map = visibility_map(&points, &arc)?;
    let g_arc = forward_quadrature(&square, &arc, times, Kind::Integral)?;
    let g_full = forward_quadrature(&square, &full, times, Kind::Integral)?;
    let mut checks = Vec::new();
    let mut values = serde_json::Map::new();
    let mut images = Vec::new();
    for (method, name) in [(Method2d::FinchLog, "finch-log"), (Method2d::Kunyansky, "kun2d")] {
        let rec_arc = reconstruct_2d(method, &g_arc, &spec, Interpolation::Linear)?;
        let rec_full = reconstruct_2d(method, &g_full, &spec, Interpolation::Linear)?;
        let arc_ratio = sharpness_ratio(&rec_arc, &map.points, &map.visible);
        let full_ratio = sharpness_ratio(&rec_full, &map.points, &map.visible);
        values.insert(name.into(), json!({"arc_ratio": arc_ratio, "full_data_ratio": full_ratio}));
        checks.push(Check::at_least(format!("{name} visible/invisible sharpness"), arc_ratio, 3.0));
        images.push((format!("{name}-arc"), rec_arc));
        images.push((format!("{name}-full"), rec_full));
    }
    values.insert("visible_points".into(), json!(map.visible_count()));
    values.insert("interface_points".into(), json!(map.points.len()));
    let parameters = json!({
        "m": m,
        "square_center": center,
        "square_side": side,
        "arc_start": 0.5 * PI,
        "arc_span": PI,
        "arc_detectors": 2 * m,
        "circle_detectors": 4 * m,
        "samples": 2 * m + 1,
        "half_width": 0.65,
    });
    Ok(finish(Experiment::PartialData, parameters, Value::Object(values), checks, images))
}
