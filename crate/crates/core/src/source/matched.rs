//! Mersenne Twister reshaped to follow another source's histogram.

use serde::{Deserialize, Serialize};

use super::{Mt19937, RandomSource};
use crate::normalize::UnitSample;
use crate::{Error, Result};

pub const DEFAULT_BUILD_SAMPLES: usize = 1_000_000;
pub const DEFAULT_BINS: usize = 1024;
const MIN_BUILD_SAMPLES: usize = 100_000;

/// Histogram over uniform bins of `[0, 1)` and its cumulative proportions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    counts: Vec<u64>,
    cdf: Vec<f64>,
}

impl EmpiricalDistribution {
    /// Builds from raw bin counts. Needs at least two bins and one
    /// non-empty bin.
    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        if counts.len() < 2 {
            return Err(Error::invalid("empirical distribution needs at least two bins"));
        }
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::invalid("empirical distribution built from zero samples"));
        }
        let mut cdf = Vec::with_capacity(counts.len() + 1);
        let mut acc = 0u64;
        cdf.push(0.0);
        for &c in &counts {
            acc += c;
            cdf.push(acc as f64 / total as f64);
        }
        Ok(EmpiricalDistribution { counts, cdf })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Cumulative proportions, `bins + 1` entries from 0 to 1.
    pub fn cdf(&self) -> &[f64] {
        &self.cdf
    }

    pub fn sample_count(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn bin_width(&self) -> f64 {
        1.0 / self.bins() as f64
    }

    /// Piecewise-linear inverse of the CDF. Bins with zero mass are never
    /// selected.
    pub fn inverse(&self, u: f64) -> f64 {
        let b = self.bins();
        // first j with cdf[j] <= u < cdf[j + 1]; cdf[b] == 1 > u keeps j < b
        let j = self.cdf.partition_point(|&c| c <= u).clamp(1, b) - 1;
        let (lo, hi) = (self.cdf[j], self.cdf[j + 1]);
        let width = self.bin_width();
        let left = j as f64 * width;
        let right = (j + 1) as f64 * width;
        let v = left + width * (u - lo) / (hi - lo);
        v.clamp(left, right.next_down())
    }

    /// Histogram proportions of the bins, summing to one.
    pub fn proportions(&self) -> Vec<f64> {
        self.cdf.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Histogram of `n` draws from `src` over `bins` uniform bins.
pub fn build_empirical_distribution<S: RandomSource + ?Sized>(
    src: &mut S,
    n: usize,
    bins: usize,
) -> Result<EmpiricalDistribution> {
    if n < MIN_BUILD_SAMPLES {
        return Err(Error::invalid(format!(
            "empirical distribution needs at least {MIN_BUILD_SAMPLES} samples, got {n}"
        )));
    }
    if bins < 2 {
        return Err(Error::invalid("empirical distribution needs at least two bins"));
    }
    let mut counts = vec![0u64; bins];
    for _ in 0..n {
        let u = src.next_unit()?.get();
        counts[((u * bins as f64) as usize).min(bins - 1)] += 1;
    }
    EmpiricalDistribution::from_counts(counts)
}

/// MT19937 pushed through an empirical inverse CDF.
#[derive(Debug, Clone)]
pub struct MatchedSource {
    dist: std::sync::Arc<EmpiricalDistribution>,
    mt: Mt19937,
}

impl MatchedSource {
    pub fn new(dist: impl Into<std::sync::Arc<EmpiricalDistribution>>, mt: Mt19937) -> Self {
        MatchedSource { dist: dist.into(), mt }
    }

    pub fn distribution(&self) -> &EmpiricalDistribution {
        &self.dist
    }
}

impl RandomSource for MatchedSource {
    #[inline]
    fn next_unit(&mut self) -> Result<UnitSample> {
        let u = self.mt.next_f64();
        Ok(UnitSample::saturating(self.dist.inverse(u)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::{MtSource, ScriptedSource};

    fn two_bin() -> EmpiricalDistribution {
        EmpiricalDistribution::from_counts(vec![3, 1]).unwrap()
    }

    #[test]
    fn inverse_examples() {
        let d = two_bin();
        assert_eq!(d.cdf(), &[0.0, 0.75, 1.0]);
        assert_eq!(d.inverse(0.375), 0.25);
        assert_eq!(d.inverse(0.0), 0.0);
        assert_eq!(d.inverse(0.75), 0.5);
    }

    #[test]
    fn inverse_skips_empty_bins() {
        let d = EmpiricalDistribution::from_counts(vec![0, 0, 5, 0, 5, 0]).unwrap();
        assert_eq!(d.inverse(0.0), 2.0 / 6.0);
        for k in 0..1000 {
            let v = d.inverse(k as f64 / 1000.0);
            let bin = (v * 6.0) as usize;
            assert!(bin == 2 || bin == 4, "{v}");
        }
        let top = d.inverse(crate::normalize::BELOW_ONE);
        assert!(top < 5.0 / 6.0);
    }

    #[test]
    fn constant_source_fills_one_bin() {
        let d = build_empirical_distribution(&mut ScriptedSource::new([0.25]), 100_000, 4).unwrap();
        assert_eq!(d.cdf(), &[0.0, 0.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn uniform_source_gives_flat_cdf() {
        let (n, bins) = (200_000usize, 64usize);
        let d = build_empirical_distribution(&mut MtSource::new(1), n, bins).unwrap();
        let tol = 5.0 * (1.0 / (n as f64 * bins as f64)).sqrt();
        for p in d.proportions() {
            assert!((p - 1.0 / bins as f64).abs() <= tol, "{p}");
        }
    }

    #[test]
    fn build_preconditions() {
        assert!(build_empirical_distribution(&mut MtSource::new(1), 10, 4).is_err());
        assert!(build_empirical_distribution(&mut MtSource::new(1), 100_000, 1).is_err());
    }

    #[test]
    fn matched_follows_histogram() {
        let d = EmpiricalDistribution::from_counts(vec![1, 0, 3, 0]).unwrap();
        let mut s = MatchedSource::new(d, Mt19937::new(3));
        let mut counts = [0usize; 4];
        for _ in 0..40_000 {
            counts[(s.next_unit().unwrap().get() * 4.0) as usize] += 1;
        }
        assert_eq!(counts[1] + counts[3], 0);
        let p0 = counts[0] as f64 / 40_000.0;
        assert!((p0 - 0.25).abs() < 0.01, "{p0}");
    }
}
