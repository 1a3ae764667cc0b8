//! Summaries and the hypothesis tests of the analysis pipeline.

mod hypothesis;
pub mod special;
mod summary;

pub use hypothesis::{
    anova_oneway, f_test_variances, ks_normality, ks_one_sample, ks_statistic, ks_two_sample, t_test,
    Alternative, Df, TestOutcome,
};
pub use summary::{mean, sample_variance, summary, SummaryStats};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const DEFAULT_ALPHA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatConfig {
    pub alpha: f64,
}

impl StatConfig {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(StatConfig { alpha })
        } else {
            Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")))
        }
    }
}

impl Default for StatConfig {
    fn default() -> Self {
        StatConfig { alpha: DEFAULT_ALPHA }
    }
}
