//! Domain data: phantoms, image grids, detector sets, projection containers
//! and the visibility map used for partial-data experiments.
//!
//! Points are always stored as `[f64; 3]`; two-dimensional objects keep the
//! third coordinate at zero.

mod detectors;
mod grid;
mod phantom;
mod projection;
mod visibility;

pub use detectors::{DetectorSet, Geometry};
pub use grid::{GridSpec, ImageGrid};
pub use phantom::{Ball, Phantom};
pub use projection::{integral_factor, Kind, ProjectionData, TimeGrid};
pub use visibility::{
    ball_interface, square_interface, visibility_map, InterfacePoint, VisibilityMap,
};

pub type Point = [f64; 3];

/// Spatial dimension of a problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dim {
    Two,
    Three,
}

impl Dim {
    pub fn n(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }

    pub fn from_n(n: usize) -> Option<Dim> {
        match n {
            2 => Some(Dim::Two),
            3 => Some(Dim::Three),
            _ => None,
        }
    }

    /// Surface measure of the unit sphere: 2π in 2D, 4π in 3D.
    pub fn unit_sphere_measure(self) -> f64 {
        match self {
            Dim::Two => 2.0 * std::f64::consts::PI,
            Dim::Three => 4.0 * std::f64::consts::PI,
        }
    }
}

#[inline]
pub fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist(a: &Point, b: &Point) -> f64 {
    norm(&sub(a, b))
}

/// Rotation by +90° about the z axis.
#[inline]
pub fn rot90_z(p: &Point) -> Point {
    [-p[1], p[0], p[2]]
}
