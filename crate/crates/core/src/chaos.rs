//! Two-dimensional chaotic maps used as number generators.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A point of a two-dimensional map.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MapPoint {
    pub x: f64,
    pub y: f64,
}

impl MapPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        MapPoint { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<(f64, f64)> for MapPoint {
    fn from((x, y): (f64, f64)) -> Self {
        MapPoint { x, y }
    }
}

/// Coefficients of the Tinkerbell map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TinkerbellParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Default for TinkerbellParams {
    fn default() -> Self {
        TinkerbellParams {
            a: 0.9,
            b: -0.6013,
            c: 2.0,
            d: 0.5,
        }
    }
}

/// Which map drives a chaotic source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChaoticMapKind {
    Gingerbread,
    Tinkerbell(TinkerbellParams),
}

impl ChaoticMapKind {
    /// Tinkerbell with its customary coefficients.
    pub fn tinkerbell() -> Self {
        ChaoticMapKind::Tinkerbell(TinkerbellParams::default())
    }

    pub fn name(&self) -> &'static str {
        match self {
            ChaoticMapKind::Gingerbread => "gingerbread",
            ChaoticMapKind::Tinkerbell(_) => "tinkerbell",
        }
    }

    pub fn default_initial_point(&self) -> MapPoint {
        match self {
            ChaoticMapKind::Gingerbread => MapPoint::new(9.0, 3.7),
            ChaoticMapKind::Tinkerbell(_) => MapPoint::new(0.1, -0.1),
        }
    }

    #[inline]
    pub fn step(&self, p: MapPoint) -> MapPoint {
        match self {
            ChaoticMapKind::Gingerbread => gingerbread_step(p),
            ChaoticMapKind::Tinkerbell(q) => tinkerbell_step(p, q),
        }
    }

    /// Starts an orbit at `p0`; the first yielded point is `step(p0)`.
    pub fn orbit(&self, p0: MapPoint) -> Orbit {
        Orbit {
            kind: *self,
            current: p0,
            index: 0,
        }
    }
}

impl fmt::Display for ChaoticMapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `gingerbread` (or `gingerbreadman`) and `tinkerbell` with default
/// parameters.
impl std::str::FromStr for ChaoticMapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gingerbread" | "gingerbreadman" => Ok(ChaoticMapKind::Gingerbread),
            "tinkerbell" => Ok(ChaoticMapKind::tinkerbell()),
            other => Err(Error::invalid(format!("unknown map {other:?}; expected gingerbread or tinkerbell"))),
        }
    }
}

/// `x' = 1 - y + |x|`, `y' = x`.
#[inline]
pub fn gingerbread_step(p: MapPoint) -> MapPoint {
    MapPoint {
        x: 1.0 - p.y + p.x.abs(),
        y: p.x,
    }
}

/// `x' = x^2 - y^2 + a x + b y`, `y' = 2 x y + c x + d y`.
#[inline]
pub fn tinkerbell_step(p: MapPoint, q: &TinkerbellParams) -> MapPoint {
    let MapPoint { x, y } = p;
    MapPoint {
        x: x * x - y * y + q.a * x + q.b * y,
        y: 2.0 * x * y + q.c * x + q.d * y,
    }
}

/// Returns the first `n` iterates of `p0`; `p0` itself is not included.
pub fn iterate(kind: ChaoticMapKind, p0: MapPoint, n: usize) -> Result<Vec<MapPoint>> {
    let mut orbit = kind.orbit(p0);
    (0..n).map(|_| orbit.next_point()).collect()
}

/// A running orbit that remembers how far it has gone.
#[derive(Debug, Clone)]
pub struct Orbit {
    kind: ChaoticMapKind,
    current: MapPoint,
    index: usize,
}

impl Orbit {
    pub fn kind(&self) -> ChaoticMapKind {
        self.kind
    }

    /// Last emitted point (or the seed point before the first step).
    pub fn current(&self) -> MapPoint {
        self.current
    }

    /// Number of steps taken so far.
    pub fn steps(&self) -> usize {
        self.index
    }

    pub fn next_point(&mut self) -> Result<MapPoint> {
        let next = self.kind.step(self.current);
        if !next.is_finite() {
            return Err(Error::NonFinite {
                iteration: self.index,
            });
        }
        self.current = next;
        self.index += 1;
        Ok(next)
    }
}

impl Iterator for Orbit {
    type Item = Result<MapPoint>;

    fn next(&mut self) -> Option<Self::Item> {
        Some(self.next_point())
    }
}
