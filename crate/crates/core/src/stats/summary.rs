use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Min/Max/Mean/Median/Std over a column of results.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    /// Sample standard deviation (n − 1). Reported as 0 when `n == 1`.
    pub std: f64,
    pub n: usize,
}

impl SummaryStats {
    /// True when `std` is a placeholder because only one value was seen.
    pub fn std_is_degenerate(&self) -> bool {
        self.n < 2
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance with n − 1 in the denominator; callers ensure `n >= 2`.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

pub fn summary(samples: &[f64]) -> Result<SummaryStats> {
    if samples.is_empty() {
        return Err(Error::invalid("summary of an empty sample"));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::invalid("summary of a sample containing NaN"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let mean = mean(&sorted);
    // keep mean within [min, max] despite rounding
    let mean = mean.clamp(sorted[0], sorted[n - 1]);
    let std = if n >= 2 { sample_variance(&sorted).sqrt() } else { 0.0 };
    Ok(SummaryStats {
        min: sorted[0],
        max: sorted[n - 1],
        mean,
        median,
        std,
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn four_values() {
        let s = summary(&[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!((s.min, s.max, s.mean, s.median, s.n), (1.0, 4.0, 2.5, 2.5, 4));
        let want = (((1.5f64).powi(2) * 2.0 + 0.5f64.powi(2) * 2.0) / 3.0).sqrt();
        assert!((s.std - want).abs() < 1e-15);
        assert!((s.std - 1.2909944).abs() < 1e-7);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(summary(&[]).is_err());
        let one = summary(&[-3.5]).unwrap();
        assert_eq!((one.min, one.max, one.mean, one.median, one.std), (-3.5, -3.5, -3.5, -3.5, 0.0));
        assert!(one.std_is_degenerate());
        let c = summary(&[7.25; 9]).unwrap();
        assert_eq!((c.min, c.max, c.mean, c.median, c.std), (7.25, 7.25, 7.25, 7.25, 0.0));
    }

    proptest! {
        #[test]
        fn ordering_holds(xs in proptest::collection::vec(-1e6f64..1e6, 1..60)) {
            let s = summary(&xs).unwrap();
            prop_assert!(s.min <= s.median && s.median <= s.max);
            prop_assert!(s.min <= s.mean && s.mean <= s.max);
            prop_assert!(s.std >= 0.0);
        }
    }
}
