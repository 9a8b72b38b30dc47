use std::f64::consts::PI;

use super::{dot, Ball, DetectorSet, Dim, Geometry, Point};
use crate::error::{Error, Result};

/// A sample of a material interface with its unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfacePoint {
    pub position: Point,
    pub normal: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VisibilityMap {
    pub points: Vec<InterfacePoint>,
    pub visible: Vec<bool>,
}

impl VisibilityMap {
    pub fn visible_count(&self) -> usize {
        self.visible.iter().filter(|&&v| v).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&InterfacePoint, bool)> {
        self.points.iter().zip(self.visible.iter().copied())
    }
}

/// Points of the disk boundary at `count` equispaced angles.
pub fn ball_interface(ball: &Ball, count: usize) -> Vec<InterfacePoint> {
    (0..count)
        .map(|i| {
            let th = 2.0 * PI * i as f64 / count as f64;
            let n = [th.cos(), th.sin(), 0.0];
            InterfacePoint {
                position: [
                    ball.center[0] + ball.radius * n[0],
                    ball.center[1] + ball.radius * n[1],
                    0.0,
                ],
                normal: n,
            }
        })
        .collect()
}

/// Side midpoints of an axis-aligned square, `per_side` samples per side
/// (corners excluded).
pub fn square_interface(center: [f64; 2], side: f64, per_side: usize) -> Vec<InterfacePoint> {
    let half = 0.5 * side;
    let mut out = Vec::with_capacity(4 * per_side);
    for i in 0..per_side {
        let s = -half + side * (i as f64 + 0.5) / per_side as f64;
        let (cx, cy) = (center[0], center[1]);
        out.push(InterfacePoint {
            position: [cx + s, cy - half, 0.0],
            normal: [0.0, -1.0, 0.0],
        });
        out.push(InterfacePoint {
            position: [cx + s, cy + half, 0.0],
            normal: [0.0, 1.0, 0.0],
        });
        out.push(InterfacePoint {
            position: [cx - half, cy + s, 0.0],
            normal: [-1.0, 0.0, 0.0],
        });
        out.push(InterfacePoint {
            position: [cx + half, cy + s, 0.0],
            normal: [1.0, 0.0, 0.0],
        });
    }
    out
}

fn angle_in_arc(angle: f64, start: f64, span: f64) -> bool {
    let rel = (angle - start).rem_euclid(2.0 * PI);
    rel <= span + 1e-12
}

/// An interface point is visible when the line through it along its normal
/// meets the detector curve: some circle centered on S is then tangent to the
/// interface there.
pub fn visibility_map(points: &[InterfacePoint], detectors: &DetectorSet) -> Result<VisibilityMap> {
    if detectors.dim() != Dim::Two {
        return Err(Error::DimensionMismatch {
            field: "detectors",
            expected: 2,
            found: detectors.dim().n(),
        });
    }
    let (radius, start, span) = match *detectors.geometry() {
        Geometry::Circle { radius } => (radius, 0.0, 2.0 * PI),
        Geometry::Arc {
            radius,
            start,
            span,
        } => (radius, start, span),
        g => {
            return Err(Error::Geometry {
                operation: "visibility_map",
                geometry: g.name().to_string(),
            })
        }
    };
    let visible = points
        .iter()
        .map(|ip| {
            let p = ip.position;
            let n = ip.normal;
            let nn = dot(&n, &n);
            let b = dot(&p, &n) / nn;
            let c = (dot(&p, &p) - radius * radius) / nn;
            let disc = b * b - c;
            if disc < 0.0 {
                return false;
            }
            let sq = disc.sqrt();
            [-b - sq, -b + sq].iter().any(|&s| {
                let x = p[0] + s * n[0];
                let y = p[1] + s * n[1];
                angle_in_arc(y.atan2(x), start, span)
            })
        })
        .collect();
    Ok(VisibilityMap {
        points: points.to_vec(),
        visible,
    })
}
