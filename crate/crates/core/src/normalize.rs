//! Folding raw map output into `[0, 1)`.
//!
//! Three schemes are provided. `Modulo` keeps the fractional part of `|x|`,
//! `Bounds` rescales `x` linearly using a pre-computed range, and `Atan2`
//! maps the phase angle of the point around the running centre of the orbit
//! onto the unit interval.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::chaos::{ChaoticMapKind, MapPoint, TinkerbellParams};
use crate::{Error, Result};

/// Largest `f64` strictly below one.
pub const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

/// Number of map iterates used for bounds estimation by default.
pub const DEFAULT_BOUNDS_SAMPLES: usize = 1_000_000;

/// Number of discarded iterates that seed the Atan2 centre.
pub const DEFAULT_ATAN2_WARMUP: usize = 1000;

/// A value in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UnitSample(f64);

impl UnitSample {
    pub const ZERO: UnitSample = UnitSample(0.0);

    pub fn new(value: f64) -> Option<Self> {
        (0.0..1.0).contains(&value).then_some(UnitSample(value))
    }

    /// Clamps into `[0, BELOW_ONE]`; NaN maps to zero.
    pub fn saturating(value: f64) -> Self {
        if value >= 0.0 {
            UnitSample(value.min(BELOW_ONE))
        } else {
            UnitSample(0.0)
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<UnitSample> for f64 {
    fn from(u: UnitSample) -> f64 {
        u.0
    }
}

/// Name of a normalization scheme, without its state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Modulo,
    Bounds,
    Atan2,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Atan2, Scheme::Bounds, Scheme::Modulo];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Modulo => "modulo",
            Scheme::Bounds => "bounds",
            Scheme::Atan2 => "atan2",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "modulo" => Ok(Scheme::Modulo),
            "bounds" => Ok(Scheme::Bounds),
            "atan2" => Ok(Scheme::Atan2),
            _ => Err(Error::invalid(format!("unknown normalization scheme {s:?}"))),
        }
    }
}

/// `|n| mod 1`.
pub fn normalize_modulo(n: f64) -> UnitSample {
    let a = n.abs();
    UnitSample::saturating(a - a.floor())
}

/// Observed range of the x coordinate of an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsEstimate {
    pub min_x: f64,
    pub max_x: f64,
    pub sample_count: usize,
}

impl BoundsEstimate {
    pub fn new(min_x: f64, max_x: f64, sample_count: usize) -> Result<Self> {
        if sample_count < 2 {
            return Err(Error::invalid("bounds estimate needs at least two samples"));
        }
        if !(min_x < max_x) {
            return Err(Error::DegenerateBounds { value: min_x });
        }
        Ok(BoundsEstimate {
            min_x,
            max_x,
            sample_count,
        })
    }

    /// The estimate over [`DEFAULT_BOUNDS_SAMPLES`] iterates from the map's
    /// default initial point. Computed once per process for the default maps.
    pub fn default_for(kind: ChaoticMapKind) -> Result<Self> {
        static GINGERBREAD: OnceLock<BoundsEstimate> = OnceLock::new();
        static TINKERBELL: OnceLock<BoundsEstimate> = OnceLock::new();

        let slot = match kind {
            ChaoticMapKind::Gingerbread => &GINGERBREAD,
            ChaoticMapKind::Tinkerbell(q) if q == TinkerbellParams::default() => &TINKERBELL,
            ChaoticMapKind::Tinkerbell(_) => return estimate_bounds(kind, DEFAULT_BOUNDS_SAMPLES),
        };
        if let Some(b) = slot.get() {
            return Ok(*b);
        }
        let b = estimate_bounds(kind, DEFAULT_BOUNDS_SAMPLES)?;
        Ok(*slot.get_or_init(|| b))
    }
}

/// Min and max of the x coordinate over the first `samples` iterates from the
/// default initial point.
pub fn estimate_bounds(kind: ChaoticMapKind, samples: usize) -> Result<BoundsEstimate> {
    estimate_bounds_from(kind, kind.default_initial_point(), samples)
}

pub fn estimate_bounds_from(kind: ChaoticMapKind, p0: MapPoint, samples: usize) -> Result<BoundsEstimate> {
    if samples < 2 {
        return Err(Error::invalid("bounds estimate needs at least two samples"));
    }
    let mut orbit = kind.orbit(p0);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..samples {
        let p = orbit.next_point()?;
        lo = lo.min(p.x);
        hi = hi.max(p.x);
    }
    BoundsEstimate::new(lo, hi, samples)
}

/// `(x - min) / (max - min)`, clamped into `[0, 1)`.
pub fn normalize_bounds(x: f64, b: &BoundsEstimate) -> UnitSample {
    UnitSample::saturating((x - b.min_x) / (b.max_x - b.min_x))
}

/// Running mean of the orbit points seen so far.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CenterState {
    pub mean_x: f64,
    pub mean_y: f64,
    pub count: u64,
}

impl CenterState {
    pub fn center(&self) -> MapPoint {
        MapPoint::new(self.mean_x, self.mean_y)
    }
}

pub fn update_center(c: CenterState, p: MapPoint) -> CenterState {
    let n = (c.count + 1) as f64;
    CenterState {
        mean_x: c.mean_x + (p.x - c.mean_x) / n,
        mean_y: c.mean_y + (p.y - c.mean_y) / n,
        count: c.count + 1,
    }
}

/// Phase angle of `p` around the centre, mapped by `(theta + pi) / (2 pi)`.
pub fn normalize_atan2(p: MapPoint, c: &CenterState) -> UnitSample {
    let dx = p.x - c.mean_x;
    let dy = p.y - c.mean_y;
    if dx == 0.0 && dy == 0.0 {
        return UnitSample::ZERO;
    }
    let z = (dy.atan2(dx) + PI) / (2.0 * PI);
    if z >= 1.0 {
        UnitSample::ZERO
    } else {
        UnitSample::saturating(z)
    }
}

/// A normalization scheme together with whatever state it carries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NormalizerKind {
    Modulo,
    Bounds(BoundsEstimate),
    Atan2 { center: CenterState, warmup: usize },
}

impl NormalizerKind {
    pub fn scheme(&self) -> Scheme {
        match self {
            NormalizerKind::Modulo => Scheme::Modulo,
            NormalizerKind::Bounds(_) => Scheme::Bounds,
            NormalizerKind::Atan2 { .. } => Scheme::Atan2,
        }
    }

    /// Normalizes the next map point. Atan2 folds the point into its centre
    /// before measuring the angle.
    #[inline]
    pub fn apply(&mut self, p: MapPoint) -> UnitSample {
        match self {
            NormalizerKind::Modulo => normalize_modulo(p.x),
            NormalizerKind::Bounds(b) => normalize_bounds(p.x, b),
            NormalizerKind::Atan2 { center, .. } => {
                *center = update_center(*center, p);
                normalize_atan2(p, center)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn modulo_examples() {
        assert!((normalize_modulo(1.2).get() - 0.2).abs() < 1e-12);
        assert!((normalize_modulo(-3.7).get() - 0.7).abs() < 1e-12);
        assert_eq!(normalize_modulo(0.5).get(), 0.5);
        assert_eq!(normalize_modulo(-0.0).get(), 0.0);
    }

    #[test]
    fn modulo_never_reaches_one() {
        // the largest double below 3 has fractional part just below 1
        let n = 3.0_f64 - 4.0 * f64::EPSILON;
        assert!(normalize_modulo(n).get() < 1.0);
        assert!(normalize_modulo(-n).get() < 1.0);
    }

    #[test]
    fn bounds_examples() {
        let b = BoundsEstimate::new(-3.6, 6.3, 3).unwrap();
        assert_eq!(normalize_bounds(-3.6, &b).get(), 0.0);
        assert!((normalize_bounds((-3.6 + 6.3) / 2.0, &b).get() - 0.5).abs() < 1e-15);
        assert_eq!(normalize_bounds(-10.0, &b).get(), 0.0);
        assert_eq!(normalize_bounds(6.3, &b).get(), BELOW_ONE);
        assert_eq!(normalize_bounds(100.0, &b).get(), BELOW_ONE);
    }

    #[test]
    fn bounds_estimation() {
        let b = estimate_bounds(ChaoticMapKind::Gingerbread, 3).unwrap();
        assert!((b.min_x + 3.6).abs() < 1e-12);
        assert!((b.max_x - 6.3).abs() < 1e-12);
        assert_eq!(b.sample_count, 3);
        assert!(estimate_bounds(ChaoticMapKind::Gingerbread, 1).is_err());
        assert!(matches!(
            BoundsEstimate::new(1.0, 1.0, 10),
            Err(Error::DegenerateBounds { .. })
        ));
        // the origin is a Tinkerbell fixed point, so the range collapses
        assert!(matches!(
            estimate_bounds_from(ChaoticMapKind::tinkerbell(), MapPoint::default(), 10),
            Err(Error::DegenerateBounds { .. })
        ));
    }

    #[test]
    fn tinkerbell_bounds_inside_basin() {
        let b = estimate_bounds(ChaoticMapKind::tinkerbell(), DEFAULT_BOUNDS_SAMPLES).unwrap();
        assert!(b.min_x > -2.0 && b.max_x < 2.0, "{b:?}");
        assert_eq!(BoundsEstimate::default_for(ChaoticMapKind::tinkerbell()).unwrap(), b);
    }

    #[test]
    fn atan2_examples() {
        let c = CenterState::default();
        assert_eq!(normalize_atan2(MapPoint::new(1.0, 0.0), &c).get(), 0.5);
        assert_eq!(normalize_atan2(MapPoint::new(0.0, 1.0), &c).get(), 0.75);
        assert_eq!(normalize_atan2(MapPoint::new(0.0, 0.0), &c).get(), 0.0);
        // theta = pi lands exactly on one and wraps
        assert_eq!(normalize_atan2(MapPoint::new(-1.0, 0.0), &c).get(), 0.0);
        assert_eq!(normalize_atan2(MapPoint::new(-1.0, -0.0), &c).get(), 0.0);
    }

    #[test]
    fn center_updates() {
        let c = update_center(CenterState::default(), MapPoint::new(1.0, 0.0));
        assert_eq!(c.center(), MapPoint::new(1.0, 0.0));
        let c = update_center(c, MapPoint::new(3.0, 4.0));
        assert_eq!((c.mean_x, c.mean_y, c.count), (2.0, 2.0, 2));
    }

    #[test]
    fn center_matches_batch_mean() {
        let mut mt = crate::source::Mt19937::new(99);
        let pts: Vec<MapPoint> = (0..10_000)
            .map(|_| MapPoint::new(mt.next_f64() * 200.0 - 100.0, mt.next_f64() * 4.0 + 7.0))
            .collect();
        let c = pts.iter().fold(CenterState::default(), |c, &p| update_center(c, p));
        let bx = pts.iter().map(|p| p.x).sum::<f64>() / pts.len() as f64;
        let by = pts.iter().map(|p| p.y).sum::<f64>() / pts.len() as f64;
        assert!(((c.mean_x - bx) / bx).abs() < 1e-12);
        assert!(((c.mean_y - by) / by).abs() < 1e-12);
    }

    #[test]
    fn atan2_normalizer_updates_center_first() {
        let mut n = NormalizerKind::Atan2 {
            center: CenterState::default(),
            warmup: 0,
        };
        // first point becomes the centre, so the angle is undefined -> 0
        assert_eq!(n.apply(MapPoint::new(2.0, 5.0)).get(), 0.0);
        // centre is now (1.5, 2.5); the point (1, 0) lies below-left of it
        let u = n.apply(MapPoint::new(1.0, 0.0)).get();
        let expected = ((-2.5f64).atan2(-0.5) + PI) / (2.0 * PI);
        assert_eq!(u, expected);
    }

    fn circular_gap(a: f64, b: f64) -> f64 {
        let d = (a - b).abs();
        d.min(1.0 - d)
    }

    proptest! {
        #[test]
        fn modulo_in_range(n in -1e6f64..1e6) {
            let u = normalize_modulo(n).get();
            prop_assert!((0.0..1.0).contains(&u));
        }

        // |n| mod 1 is periodic on each half-line; crossing zero reflects it
        #[test]
        fn modulo_integer_shift(n in 4.0f64..1e4, neg in any::<bool>(), k in -3i32..=3) {
            let n = if neg { -n } else { n };
            let a = normalize_modulo(n).get();
            let b = normalize_modulo(n + k as f64).get();
            prop_assert!(circular_gap(a, b) < 1e-12);
        }

        #[test]
        fn modulo_reflects_across_zero(n in 0.0f64..1.0) {
            let a = normalize_modulo(n).get();
            let b = normalize_modulo(n - 1.0).get();
            prop_assert!(circular_gap(a, 1.0 - b) < 1e-12);
        }

        #[test]
        fn bounds_monotone(lo in -10.0f64..0.0, width in 0.1f64..20.0, s in 0.0f64..1.0, t in 0.0f64..1.0) {
            let b = BoundsEstimate::new(lo, lo + width, 2).unwrap();
            let (x1, x2) = (lo + s.min(t) * width, lo + s.max(t) * width);
            prop_assert!(normalize_bounds(x1, &b) <= normalize_bounds(x2, &b));
        }

        #[test]
        fn atan2_scale_invariant(cx in -2.0f64..2.0, cy in -2.0f64..2.0,
                                 dx in -3.0f64..3.0, dy in -3.0f64..3.0) {
            prop_assume!(dx.abs() > 1e-6 || dy.abs() > 1e-6);
            let c = CenterState { mean_x: cx, mean_y: cy, count: 1 };
            let base = normalize_atan2(MapPoint::new(cx + dx, cy + dy), &c).get();
            for k in [0.5, 2.0, 10.0] {
                let scaled = normalize_atan2(MapPoint::new(cx + k * dx, cy + k * dy), &c).get();
                prop_assert!(circular_gap(base, scaled) < 1e-9);
            }
        }
    }
}
