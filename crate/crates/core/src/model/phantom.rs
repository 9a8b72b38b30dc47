use super::{dist, Dim, GridSpec, ImageGrid, Point};
use crate::error::{invalid, Result};

/// A ball (disk in 2D) of constant amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
    pub value: f64,
}

impl Ball {
    pub fn contains(&self, x: &Point) -> bool {
        dist(x, &self.center) <= self.radius
    }
}

/// Additive union of constant-valued balls.
#[derive(Debug, Clone, PartialEq)]
pub struct Phantom {
    dim: Dim,
    balls: Vec<Ball>,
}

impl Phantom {
    pub fn new(dim: Dim) -> Self {
        Self {
            dim,
            balls: Vec::new(),
        }
    }

    pub fn from_balls(dim: Dim, balls: Vec<Ball>) -> Result<Self> {
        let mut p = Self::new(dim);
        for b in balls {
            p.push(b)?;
        }
        Ok(p)
    }

    pub fn push(&mut self, ball: Ball) -> Result<()> {
        if !(ball.radius > 0.0) || !ball.radius.is_finite() {
            return Err(invalid("ball radius", format!("{} is not positive", ball.radius)));
        }
        if !ball.value.is_finite() || ball.center.iter().any(|c| !c.is_finite()) {
            return Err(invalid("ball", "non-finite center or value"));
        }
        if self.dim == Dim::Two && ball.center[2] != 0.0 {
            return Err(invalid("ball center", "2D phantoms require z = 0"));
        }
        self.balls.push(ball);
        Ok(())
    }

    pub fn with_ball(mut self, center: Point, radius: f64, value: f64) -> Result<Self> {
        self.push(Ball {
            center,
            radius,
            value,
        })?;
        Ok(self)
    }

    /// Radially symmetric bump `amplitude * (1 - (r/radius)^2)^2` approximated by
    /// `layers` nested balls; the staircase error is at most `amplitude / layers`.
    pub fn smooth_bump(
        dim: Dim,
        center: Point,
        radius: f64,
        amplitude: f64,
        layers: usize,
    ) -> Result<Self> {
        if layers == 0 {
            return Err(invalid("layers", "need at least one layer"));
        }
        let profile = |r: f64| {
            let s = 1.0 - (r / radius).powi(2);
            amplitude * s * s
        };
        let mut p = Self::new(dim);
        // Layer j covers r in [r_{j}, r_{j+1}) and carries the profile increment.
        let edges: Vec<f64> = (0..=layers)
            .map(|j| radius * j as f64 / layers as f64)
            .collect();
        for j in (1..=layers).rev() {
            let outer = edges[j];
            let mid_out = profile(0.5 * (edges[j - 1] + edges[j]));
            let mid_next = if j < layers {
                profile(0.5 * (edges[j] + edges[j + 1]))
            } else {
                0.0
            };
            let step = mid_out - mid_next;
            if step != 0.0 {
                p.push(Ball {
                    center,
                    radius: outer,
                    value: step,
                })?;
            }
        }
        Ok(p)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn eval(&self, x: &Point) -> f64 {
        self.balls
            .iter()
            .filter(|b| b.contains(x))
            .map(|b| b.value)
            .sum()
    }

    /// Largest |x| over the support.
    pub fn support_radius(&self) -> f64 {
        self.balls
            .iter()
            .map(|b| super::norm(&b.center) + b.radius)
            .fold(0.0, f64::max)
    }

    pub fn scaled_values(&self, c: f64) -> Self {
        let balls = self
            .balls
            .iter()
            .map(|b| Ball {
                value: b.value * c,
                ..*b
            })
            .collect();
        Self {
            dim: self.dim,
            balls,
        }
    }

    /// Spatial dilation x -> s*x.
    pub fn dilated(&self, s: f64) -> Self {
        let balls = self
            .balls
            .iter()
            .map(|b| Ball {
                center: [b.center[0] * s, b.center[1] * s, b.center[2] * s],
                radius: b.radius * s,
                value: b.value,
            })
            .collect();
        Self {
            dim: self.dim,
            balls,
        }
    }

    pub fn rotated_z90(&self) -> Self {
        let balls = self
            .balls
            .iter()
            .map(|b| Ball {
                center: super::rot90_z(&b.center),
                ..*b
            })
            .collect();
        Self {
            dim: self.dim,
            balls,
        }
    }

    /// Union of the balls of both phantoms (values add where they overlap).
    pub fn union(&self, other: &Phantom) -> Result<Self> {
        if self.dim != other.dim {
            return Err(crate::Error::DimensionMismatch {
                field: "phantom",
                expected: self.dim.n(),
                found: other.dim.n(),
            });
        }
        let mut balls = self.balls.clone();
        balls.extend_from_slice(&other.balls);
        Ok(Self {
            dim: self.dim,
            balls,
        })
    }

    /// Point-sample the phantom at every cell center.
    pub fn rasterize(&self, spec: &GridSpec) -> Result<ImageGrid> {
        if spec.dim != self.dim {
            return Err(crate::Error::DimensionMismatch {
                field: "grid",
                expected: self.dim.n(),
                found: spec.dim.n(),
            });
        }
        Ok(ImageGrid::from_fn(spec.clone(), |x| self.eval(x)))
    }

    /// Cell-averaged rasterization using `sub`^dim sub-samples per cell.
    pub fn rasterize_averaged(&self, spec: &GridSpec, sub: usize) -> Result<ImageGrid> {
        if spec.dim != self.dim {
            return Err(crate::Error::DimensionMismatch {
                field: "grid",
                expected: self.dim.n(),
                found: spec.dim.n(),
            });
        }
        let sub = sub.max(1);
        let h = spec.spacing;
        let offs: Vec<f64> = (0..sub)
            .map(|k| ((k as f64 + 0.5) / sub as f64 - 0.5) * h)
            .collect();
        let zoffs: Vec<f64> = if self.dim == Dim::Three {
            offs.clone()
        } else {
            vec![0.0]
        };
        let count = (offs.len() * offs.len() * zoffs.len()) as f64;
        Ok(ImageGrid::from_fn(spec.clone(), |x| {
            let mut acc = 0.0;
            for dx in &offs {
                for dy in &offs {
                    for dz in &zoffs {
                        acc += self.eval(&[x[0] + dx, x[1] + dy, x[2] + dz]);
                    }
                }
            }
            acc / count
        }))
    }
}
