use std::f64::consts::PI;

use super::{Dim, Point};
use crate::error::{invalid, Result};

/// Observation surface S.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    Circle { radius: f64 },
    /// Circular arc from angle `start` counter-clockwise over `span` radians.
    Arc { radius: f64, start: f64, span: f64 },
    Sphere { radius: f64 },
    Rectangle { lo: [f64; 2], hi: [f64; 2] },
    Cuboid { lo: [f64; 3], hi: [f64; 3] },
}

impl Geometry {
    pub fn dim(&self) -> Dim {
        match self {
            Geometry::Circle { .. } | Geometry::Arc { .. } | Geometry::Rectangle { .. } => {
                Dim::Two
            }
            Geometry::Sphere { .. } | Geometry::Cuboid { .. } => Dim::Three,
        }
    }

    /// Radius of circular/spherical surfaces.
    pub fn radius(&self) -> Option<f64> {
        match *self {
            Geometry::Circle { radius }
            | Geometry::Arc { radius, .. }
            | Geometry::Sphere { radius } => Some(radius),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Geometry::Circle { .. } => "circle",
            Geometry::Arc { .. } => "arc",
            Geometry::Sphere { .. } => "sphere",
            Geometry::Rectangle { .. } => "rectangle",
            Geometry::Cuboid { .. } => "cuboid",
        }
    }

    /// Measure of the whole surface covered by the geometry.
    pub fn measure(&self) -> f64 {
        match *self {
            Geometry::Circle { radius } => 2.0 * PI * radius,
            Geometry::Arc { radius, span, .. } => radius * span,
            Geometry::Sphere { radius } => 4.0 * PI * radius * radius,
            Geometry::Rectangle { lo, hi } => 2.0 * ((hi[0] - lo[0]) + (hi[1] - lo[1])),
            Geometry::Cuboid { lo, hi } => {
                let (a, b, c) = (hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]);
                2.0 * (a * b + b * c + a * c)
            }
        }
    }

    /// Largest distance between two points of the enclosed region.
    pub fn diameter(&self) -> f64 {
        match *self {
            Geometry::Circle { radius }
            | Geometry::Arc { radius, .. }
            | Geometry::Sphere { radius } => 2.0 * radius,
            Geometry::Rectangle { lo, hi } => (hi[0] - lo[0]).hypot(hi[1] - lo[1]),
            Geometry::Cuboid { lo, hi } => ((hi[0] - lo[0]).powi(2)
                + (hi[1] - lo[1]).powi(2)
                + (hi[2] - lo[2]).powi(2))
            .sqrt(),
        }
    }
}

/// Detector positions, outward unit normals and surface quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorSet {
    geometry: Geometry,
    positions: Vec<Point>,
    normals: Vec<Point>,
    weights: Vec<f64>,
}

impl DetectorSet {
    /// Equispaced detectors for `geometry`. `count` is the number of detectors
    /// for circles and arcs, the number of polar rings for spheres (with twice
    /// as many azimuths), and panels per side/face edge for rectangles and cuboids.
    pub fn make(geometry: Geometry, count: usize) -> Result<Self> {
        if count < 4 {
            return Err(invalid("count", format!("{count} < 4 detectors")));
        }
        match geometry {
            Geometry::Circle { radius } => Self::circle(radius, count),
            Geometry::Arc {
                radius,
                start,
                span,
            } => Self::arc(radius, start, span, count),
            Geometry::Sphere { radius } => Self::sphere(radius, count, 2 * count),
            Geometry::Rectangle { lo, hi } => Self::rectangle(lo, hi, [count, count]),
            Geometry::Cuboid { lo, hi } => Self::cuboid(lo, hi, count),
        }
    }

    fn check_radius(radius: f64) -> Result<()> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid("radius", format!("{radius} is not positive")));
        }
        Ok(())
    }

    /// Detectors at angles 2πi/count.
    pub fn circle(radius: f64, count: usize) -> Result<Self> {
        Self::check_radius(radius)?;
        if count < 4 {
            return Err(invalid("count", format!("{count} < 4 detectors")));
        }
        let w = 2.0 * PI * radius / count as f64;
        let mut set = Self::empty(Geometry::Circle { radius });
        for i in 0..count {
            let th = 2.0 * PI * i as f64 / count as f64;
            set.push_polar(radius, th, w);
        }
        Ok(set)
    }

    /// Detectors at the midpoints of `count` equal sub-arcs.
    pub fn arc(radius: f64, start: f64, span: f64, count: usize) -> Result<Self> {
        Self::check_radius(radius)?;
        if !(span > 0.0 && span <= 2.0 * PI) {
            return Err(invalid("arc span", format!("{span} outside (0, 2π]")));
        }
        if count < 4 {
            return Err(invalid("count", format!("{count} < 4 detectors")));
        }
        let d = span / count as f64;
        let mut set = Self::empty(Geometry::Arc {
            radius,
            start,
            span,
        });
        for i in 0..count {
            set.push_polar(radius, start + (i as f64 + 0.5) * d, radius * d);
        }
        Ok(set)
    }

    /// Latitude-longitude product grid with exact cell areas as weights.
    pub fn sphere(radius: f64, n_polar: usize, n_azimuth: usize) -> Result<Self> {
        Self::check_radius(radius)?;
        if n_polar < 2 || n_azimuth < 4 {
            return Err(invalid("count", "sphere needs >= 2 rings and >= 4 azimuths"));
        }
        let mut set = Self::empty(Geometry::Sphere { radius });
        let dphi = 2.0 * PI / n_azimuth as f64;
        for i in 0..n_polar {
            let th0 = PI * i as f64 / n_polar as f64;
            let th1 = PI * (i + 1) as f64 / n_polar as f64;
            let th = 0.5 * (th0 + th1);
            let w = radius * radius * (th0.cos() - th1.cos()) * dphi;
            for j in 0..n_azimuth {
                let ph = dphi * j as f64;
                let n = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
                set.positions
                    .push([radius * n[0], radius * n[1], radius * n[2]]);
                set.normals.push(n);
                set.weights.push(w);
            }
        }
        Ok(set)
    }

    /// Midpoint panels on the boundary of the rectangle `[lo, hi]`; `panels[0]`
    /// along the sides parallel to x, `panels[1]` along the sides parallel to y.
    pub fn rectangle(lo: [f64; 2], hi: [f64; 2], panels: [usize; 2]) -> Result<Self> {
        if !(hi[0] > lo[0] && hi[1] > lo[1]) {
            return Err(invalid("rectangle", "hi must exceed lo"));
        }
        if panels[0] == 0 || panels[1] == 0 {
            return Err(invalid("count", "need at least one panel per side"));
        }
        let mut set = Self::empty(Geometry::Rectangle { lo, hi });
        let (lx, ly) = (hi[0] - lo[0], hi[1] - lo[1]);
        let dx = lx / panels[0] as f64;
        let dy = ly / panels[1] as f64;
        for i in 0..panels[0] {
            let x = lo[0] + (i as f64 + 0.5) * dx;
            set.push([x, lo[1], 0.0], [0.0, -1.0, 0.0], dx);
            set.push([x, hi[1], 0.0], [0.0, 1.0, 0.0], dx);
        }
        for j in 0..panels[1] {
            let y = lo[1] + (j as f64 + 0.5) * dy;
            set.push([lo[0], y, 0.0], [-1.0, 0.0, 0.0], dy);
            set.push([hi[0], y, 0.0], [1.0, 0.0, 0.0], dy);
        }
        Ok(set)
    }

    /// Detectors at the boundary nodes of the square lattice with `m` intervals
    /// per side (corners excluded), each with weight h.
    pub fn square_nodes(lo: f64, hi: f64, m: usize) -> Result<Self> {
        if !(hi > lo) || m < 2 {
            return Err(invalid("square", "need hi > lo and m >= 2"));
        }
        let h = (hi - lo) / m as f64;
        let mut set = Self::empty(Geometry::Rectangle {
            lo: [lo, lo],
            hi: [hi, hi],
        });
        for i in 1..m {
            let c = lo + i as f64 * h;
            set.push([c, lo, 0.0], [0.0, -1.0, 0.0], h);
            set.push([c, hi, 0.0], [0.0, 1.0, 0.0], h);
            set.push([lo, c, 0.0], [-1.0, 0.0, 0.0], h);
            set.push([hi, c, 0.0], [1.0, 0.0, 0.0], h);
        }
        Ok(set)
    }

    /// `panels`×`panels` midpoint panels on each face of the cuboid.
    pub fn cuboid(lo: [f64; 3], hi: [f64; 3], panels: usize) -> Result<Self> {
        if (0..3).any(|a| !(hi[a] > lo[a])) {
            return Err(invalid("cuboid", "hi must exceed lo"));
        }
        if panels == 0 {
            return Err(invalid("count", "need at least one panel per face edge"));
        }
        let mut set = Self::empty(Geometry::Cuboid { lo, hi });
        for axis in 0..3 {
            let (a, b) = ((axis + 1) % 3, (axis + 2) % 3);
            let da = (hi[a] - lo[a]) / panels as f64;
            let db = (hi[b] - lo[b]) / panels as f64;
            for (side, sign) in [(lo[axis], -1.0), (hi[axis], 1.0)] {
                for i in 0..panels {
                    for j in 0..panels {
                        let mut p = [0.0; 3];
                        p[axis] = side;
                        p[a] = lo[a] + (i as f64 + 0.5) * da;
                        p[b] = lo[b] + (j as f64 + 0.5) * db;
                        let mut n = [0.0; 3];
                        n[axis] = sign;
                        set.push(p, n, da * db);
                    }
                }
            }
        }
        Ok(set)
    }

    fn empty(geometry: Geometry) -> Self {
        Self {
            geometry,
            positions: Vec::new(),
            normals: Vec::new(),
            weights: Vec::new(),
        }
    }

    fn push(&mut self, p: Point, n: Point, w: f64) {
        self.positions.push(p);
        self.normals.push(n);
        self.weights.push(w);
    }

    fn push_polar(&mut self, radius: f64, th: f64, w: f64) {
        let (s, c) = th.sin_cos();
        self.push([radius * c, radius * s, 0.0], [c, s, 0.0], w);
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn dim(&self) -> Dim {
        self.geometry.dim()
    }

    pub fn radius(&self) -> Option<f64> {
        self.geometry.radius()
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn normals(&self) -> &[Point] {
        &self.normals
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Polar angle of detector `i` in the xy plane.
    pub fn angle(&self, i: usize) -> f64 {
        let p = self.positions[i];
        p[1].atan2(p[0])
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Dilation x -> s*x; weights scale with the surface measure.
    pub fn dilated(&self, s: f64) -> Self {
        let n = self.dim().n() as i32;
        let geometry = match self.geometry {
            Geometry::Circle { radius } => Geometry::Circle { radius: radius * s },
            Geometry::Arc {
                radius,
                start,
                span,
            } => Geometry::Arc {
                radius: radius * s,
                start,
                span,
            },
            Geometry::Sphere { radius } => Geometry::Sphere { radius: radius * s },
            Geometry::Rectangle { lo, hi } => Geometry::Rectangle {
                lo: [lo[0] * s, lo[1] * s],
                hi: [hi[0] * s, hi[1] * s],
            },
            Geometry::Cuboid { lo, hi } => Geometry::Cuboid {
                lo: lo.map(|v| v * s),
                hi: hi.map(|v| v * s),
            },
        };
        Self {
            geometry,
            positions: self.positions.iter().map(|p| p.map(|v| v * s)).collect(),
            normals: self.normals.clone(),
            weights: self.weights.iter().map(|w| w * s.powi(n - 1)).collect(),
        }
    }

    /// Raw constructor for externally supplied detector tables.
    pub fn from_parts(
        geometry: Geometry,
        positions: Vec<Point>,
        normals: Vec<Point>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if positions.len() != normals.len() || positions.len() != weights.len() {
            return Err(invalid("detectors", "positions/normals/weights lengths differ"));
        }
        for n in &normals {
            if (super::norm(n) - 1.0).abs() > 1e-9 {
                return Err(invalid("normals", "not unit length"));
            }
        }
        Ok(Self {
            geometry,
            positions,
            normals,
            weights,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::norm;

    #[test]
    fn four_point_circle() {
        let d = DetectorSet::make(Geometry::Circle { radius: 1.0 }, 4).unwrap();
        let expect = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        for (p, e) in d.positions().iter().zip(expect) {
            assert!((p[0] - e[0]).abs() < 1e-15 && (p[1] - e[1]).abs() < 1e-15);
        }
        for &w in d.weights() {
            assert!((w - PI / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn half_circle_measure() {
        for n in [4, 7, 64] {
            let d = DetectorSet::arc(1.0, PI / 2.0, PI, n).unwrap();
            assert!((d.total_weight() - PI).abs() < 1e-12);
        }
    }

    #[test]
    fn arc_span_is_validated() {
        assert!(DetectorSet::arc(1.0, 0.0, 0.0, 8).is_err());
        assert!(DetectorSet::arc(1.0, 0.0, 7.0, 8).is_err());
        assert!(DetectorSet::arc(1.0, 0.0, 2.0 * PI, 8).is_ok());
        assert!(DetectorSet::make(Geometry::Circle { radius: 1.0 }, 3).is_err());
    }

    #[test]
    fn sphere_area_and_normals() {
        let d = DetectorSet::make(Geometry::Sphere { radius: 1.0 }, 16).unwrap();
        // Closed-form area of the unit sphere.
        assert!((d.total_weight() - 4.0 * PI).abs() / (4.0 * PI) < 1e-6);
        for (p, n) in d.positions().iter().zip(d.normals()) {
            assert!((norm(n) - 1.0).abs() < 1e-14);
            assert!((norm(p) - 1.0).abs() < 1e-12);
        }
        let d2 = DetectorSet::sphere(2.5, 9, 14).unwrap();
        assert!((d2.total_weight() - 4.0 * PI * 6.25).abs() / (4.0 * PI * 6.25) < 1e-6);
    }

    #[test]
    fn polygonal_measures() {
        let r = DetectorSet::rectangle([-1.0, -0.5], [1.0, 0.5], [10, 5]).unwrap();
        assert!((r.total_weight() - 6.0).abs() < 1e-12);
        let c = DetectorSet::cuboid([0.0; 3], [1.0, 2.0, 3.0], 4).unwrap();
        assert!((c.total_weight() - 22.0).abs() < 1e-12);
        let s = DetectorSet::square_nodes(0.0, 1.0, 8).unwrap();
        assert_eq!(s.len(), 28);
        assert!((s.total_weight() - 3.5).abs() < 1e-12);
    }

    #[test]
    fn dilation_scales_weights() {
        let d = DetectorSet::sphere(1.0, 6, 12).unwrap().dilated(2.0);
        assert!((d.total_weight() - 16.0 * PI).abs() < 1e-9);
        assert_eq!(d.radius(), Some(2.0));
    }
}
