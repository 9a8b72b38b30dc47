//! Thermoacoustic tomography toolkit.
//!
//! Forward models (closed-form spherical means of ball phantoms, quadrature
//! over images, a finite-difference wave solver) and exact reconstruction
//! methods:
//!
//! * [`fbp3d`]: three filtered-backprojection inversions for spherical apertures,
//! * [`fbp2d`]: two log-kernel inversions and the Hilbert-kernel form for circles,
//! * [`series`]: Dirichlet-eigenfunction series for rectangles and boxes,
//! * [`varspeed`]: spectral reconstruction for a variable sound speed,
//! * [`range`]: consistency checks for circular-mean data on the unit disk.

pub(crate) mod backproject;
pub mod error;
pub mod fbp2d;
pub mod fbp3d;
pub mod forward;
pub(crate) mod interp;
pub mod metrics;
pub mod model;
pub mod range;
pub mod series;
pub mod specfun;
pub mod varspeed;

pub use error::{Error, Result};
pub use model::{
    Ball, DetectorSet, Dim, Geometry, GridSpec, ImageGrid, Kind, Phantom, Point,
    ProjectionData, TimeGrid,
};
