//! Node placement and distances in the `L x L` deployment square.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Position of a sensor node. Both coordinates lie in `[0, L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_inside(&self, side: f64) -> bool {
        (0.0..side).contains(&self.x) && (0.0..side).contains(&self.y)
    }
}

/// Boundary treatment of the deployment square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryMode {
    /// Periodic boundaries: the square is glued into a torus.
    #[default]
    Torus,
    /// Plain Euclidean square, no wrap-around.
    Planar,
}

impl BoundaryMode {
    /// Largest distance attainable between two points of a square of side `side`.
    pub fn max_distance(self, side: f64) -> f64 {
        match self {
            BoundaryMode::Torus => side * std::f64::consts::SQRT_2 / 2.0,
            BoundaryMode::Planar => side * std::f64::consts::SQRT_2,
        }
    }
}

impl fmt::Display for BoundaryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryMode::Torus => "torus",
            BoundaryMode::Planar => "planar",
        })
    }
}

impl FromStr for BoundaryMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "torus" | "periodic" => Ok(BoundaryMode::Torus),
            "planar" | "open" => Ok(BoundaryMode::Planar),
            other => Err(Error::invalid(
                "boundary",
                format!("expected `torus` or `planar`, got `{other}`"),
            )),
        }
    }
}

/// Node density, nodes per unit area.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Density(f64);

impl Density {
    pub fn new(rho: f64) -> Result<Self> {
        if rho.is_finite() && rho > 0.0 {
            Ok(Density(rho))
        } else {
            Err(Error::invalid("rho", format!("density must be positive, got {rho}")))
        }
    }

    /// `N / L^2` for `n` nodes on a square of side `side`.
    pub fn from_counts(n: usize, side: f64) -> Result<Self> {
        Density::new(n as f64 / (side * side))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Draws `n` points i.i.d. uniform on `[0, side)^2`.
pub fn sample_points<R: Rng + ?Sized>(n: usize, side: f64, rng: &mut R) -> Result<Vec<Point>> {
    if n == 0 {
        return Err(Error::invalid("n_nodes", "need at least one node"));
    }
    check_side(side)?;
    let coord = |rng: &mut R| {
        let v = rng.random::<f64>() * side;
        // u * side can round up to side itself.
        if v >= side {
            side.next_down()
        } else {
            v
        }
    };
    Ok((0..n)
        .map(|_| {
            let x = coord(rng);
            let y = coord(rng);
            Point { x, y }
        })
        .collect())
}

pub(crate) fn check_side(side: f64) -> Result<()> {
    if side.is_finite() && side > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("L", format!("side length must be positive, got {side}")))
    }
}

/// Per-axis separation under the boundary mode.
#[inline]
pub(crate) fn axis_delta(a: f64, b: f64, side: f64, boundary: BoundaryMode) -> f64 {
    let d = (a - b).abs();
    match boundary {
        BoundaryMode::Planar => d,
        BoundaryMode::Torus => d.min(side - d),
    }
}

#[inline]
pub(crate) fn distance_sq(p: Point, q: Point, side: f64, boundary: BoundaryMode) -> f64 {
    let dx = axis_delta(p.x, q.x, side, boundary);
    let dy = axis_delta(p.y, q.y, side, boundary);
    dx * dx + dy * dy
}

/// Distance between two points; the torus metric uses the minimum image
/// along each axis.
#[inline]
pub fn distance(p: Point, q: Point, side: f64, boundary: BoundaryMode) -> f64 {
    distance_sq(p, q, side, boundary).sqrt()
}

/// Mean degree of a random geometric graph, `rho * pi * R^2`.
pub fn expected_degree(rho: Density, range: f64) -> Result<f64> {
    if !(range >= 0.0) {
        return Err(Error::invalid("R", format!("radio range must be >= 0, got {range}")));
    }
    Ok(rho.get() * PI * range * range)
}

/// Radio range that yields mean degree `alpha`; inverse of [`expected_degree`].
pub fn range_for_degree(rho: Density, alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) {
        return Err(Error::invalid("alpha", format!("mean degree must be >= 0, got {alpha}")));
    }
    Ok((alpha / (rho.get() * PI)).sqrt())
}
