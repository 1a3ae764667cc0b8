//! Everything that hands unit samples to the optimizer.
//!
//! A DE run owns exactly one [`RandomSource`] and pulls every random number
//! from it in program order: population initialization, parent selection
//! and crossover.

mod matched;
mod mt;
mod spec;

pub use matched::{build_empirical_distribution, EmpiricalDistribution, MatchedSource, DEFAULT_BINS, DEFAULT_BUILD_SAMPLES};
pub use mt::{Mt19937, DEFAULT_SEED};
pub use spec::SourceSpec;

use crate::chaos::{ChaoticMapKind, MapPoint, Orbit};
use crate::normalize::{BoundsEstimate, CenterState, NormalizerKind, Scheme, UnitSample, DEFAULT_ATAN2_WARMUP};
use crate::{Error, Result};

pub trait RandomSource {
    fn next_unit(&mut self) -> Result<UnitSample>;

    /// `floor(u * n)`, always below `n`.
    fn rand_index(&mut self, n: usize) -> Result<usize> {
        if n == 0 {
            return Err(Error::invalid("rand_index needs n >= 1"));
        }
        let u = self.next_unit()?.get();
        // u * n may round up to n when u is the largest double below one
        Ok(((u * n as f64) as usize).min(n - 1))
    }

    /// `lo + u * (hi - lo)`, in `[lo, hi)`.
    fn rand_range(&mut self, lo: f64, hi: f64) -> Result<f64> {
        if !(lo < hi) {
            return Err(Error::invalid(format!("rand_range needs lo < hi, got [{lo}, {hi})")));
        }
        let u = self.next_unit()?.get();
        let v = lo + u * (hi - lo);
        Ok(if v >= hi { hi.next_down() } else { v })
    }
}

impl<S: RandomSource + ?Sized> RandomSource for &mut S {
    fn next_unit(&mut self) -> Result<UnitSample> {
        (**self).next_unit()
    }
}

impl<S: RandomSource + ?Sized> RandomSource for Box<S> {
    fn next_unit(&mut self) -> Result<UnitSample> {
        (**self).next_unit()
    }
}

/// Plain MT19937 with `word / 2^32` unit conversion.
#[derive(Debug, Clone)]
pub struct MtSource(pub Mt19937);

impl MtSource {
    pub fn new(seed: u32) -> Self {
        MtSource(Mt19937::new(seed))
    }
}

impl RandomSource for MtSource {
    #[inline]
    fn next_unit(&mut self) -> Result<UnitSample> {
        Ok(UnitSample::saturating(self.0.next_f64()))
    }
}

/// A chaotic map composed with a normalizer.
#[derive(Debug, Clone)]
pub struct ChaoticSource {
    orbit: Orbit,
    normalizer: NormalizerKind,
}

impl ChaoticSource {
    /// Starts at `p0`. For Atan2 the normalizer's `warmup` iterates are
    /// consumed here to seed the centre and are never emitted.
    pub fn new(kind: ChaoticMapKind, p0: MapPoint, mut normalizer: NormalizerKind) -> Result<Self> {
        let mut orbit = kind.orbit(p0);
        if let NormalizerKind::Atan2 { center, warmup } = &mut normalizer {
            for _ in 0..*warmup {
                *center = crate::normalize::update_center(*center, orbit.next_point()?);
            }
        }
        Ok(ChaoticSource { orbit, normalizer })
    }

    /// Default state for `scheme`: the process-wide bounds estimate for
    /// Bounds, a fresh centre with the standard warm-up for Atan2.
    pub fn with_scheme(kind: ChaoticMapKind, p0: MapPoint, scheme: Scheme) -> Result<Self> {
        let normalizer = match scheme {
            Scheme::Modulo => NormalizerKind::Modulo,
            Scheme::Bounds => NormalizerKind::Bounds(BoundsEstimate::default_for(kind)?),
            Scheme::Atan2 => NormalizerKind::Atan2 {
                center: CenterState::default(),
                warmup: DEFAULT_ATAN2_WARMUP,
            },
        };
        ChaoticSource::new(kind, p0, normalizer)
    }

    pub fn kind(&self) -> ChaoticMapKind {
        self.orbit.kind()
    }

    pub fn normalizer(&self) -> &NormalizerKind {
        &self.normalizer
    }

    pub fn current(&self) -> MapPoint {
        self.orbit.current()
    }
}

impl RandomSource for ChaoticSource {
    #[inline]
    fn next_unit(&mut self) -> Result<UnitSample> {
        let p = self.orbit.next_point()?;
        Ok(self.normalizer.apply(p))
    }
}

/// Replays a fixed list of values cyclically. Handy for tracing a run by
/// hand.
#[derive(Debug, Clone)]
pub struct ScriptedSource {
    values: Vec<f64>,
    pos: usize,
}

impl ScriptedSource {
    /// Panics if `values` is empty or any value lies outside `[0, 1)`.
    pub fn new(values: impl Into<Vec<f64>>) -> Self {
        let values = values.into();
        assert!(!values.is_empty(), "scripted source needs at least one value");
        assert!(
            values.iter().all(|v| (0.0..1.0).contains(v)),
            "scripted values must lie in [0, 1)"
        );
        ScriptedSource { values, pos: 0 }
    }

    /// Number of values handed out so far.
    pub fn draws(&self) -> usize {
        self.pos
    }
}

impl RandomSource for ScriptedSource {
    fn next_unit(&mut self) -> Result<UnitSample> {
        let v = self.values[self.pos % self.values.len()];
        self.pos += 1;
        Ok(UnitSample::saturating(v))
    }
}
