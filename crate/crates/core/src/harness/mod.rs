//! Experiment orchestration: repetitions, result files, win and summary
//! tables, and the hypothesis-testing pipeline.

mod cache;
mod io;
mod pipeline;
mod tables;

pub use cache::{default_cache_dir, DistributionCache, DistributionKey, CACHE_ENV};
pub use io::{read_experiment, write_experiment, ExperimentMeta, FINALS_FILE, META_FILE, SUMMARY_FILE, TRAJECTORIES_FILE};
pub use pipeline::{stats_pipeline, Branch, GroupReport, PairComparison, PairTest, RankEntry, StatReport, Verdict};
pub use tables::{
    parse_summary_markdown, summary_rows, summary_table_markdown, win_table, win_tables_markdown, SummaryRow, WinTable,
};

use std::path::PathBuf;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmarks::{make_instance, BenchmarkId, BenchmarkInstance};
use crate::chaos::{ChaoticMapKind, MapPoint};
use crate::de::{run_de, DeConfig, RunRecord, Variant};
use crate::source::{ChaoticSource, MatchedSource, Mt19937, MtSource, RandomSource, SourceSpec};
use crate::stats::{summary, SummaryStats};
use crate::{Error, Result};

pub const DEFAULT_REPEATS: usize = 50;
pub const DEFAULT_TIE_TOLERANCE: f64 = 1e-3;
pub const DEFAULT_JITTER: f64 = 1e-3;

// stream tags keep the generators for different purposes apart
const TAG_JITTER: u32 = 0x6a69_7474;
const TAG_SOURCE: u32 = 0x7372_6365;

fn default_repeats() -> usize {
    DEFAULT_REPEATS
}

fn default_tolerance() -> f64 {
    DEFAULT_TIE_TOLERANCE
}

fn default_jitter() -> f64 {
    DEFAULT_JITTER
}

fn default_build_samples() -> usize {
    crate::source::DEFAULT_BUILD_SAMPLES
}

fn default_bins() -> usize {
    crate::source::DEFAULT_BINS
}

/// One cell of the experiment grid: an algorithm on a function in a given
/// dimension, compared across several random sources.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub algorithm: Variant,
    pub function: BenchmarkId,
    pub dimension: usize,
    /// Overrides NP = 5D.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pop_size: Option<usize>,
    /// Overrides G = 20D.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generations: Option<usize>,
    pub sources: Vec<SourceSpec>,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tolerance")]
    pub tie_tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Half-width of the per-repetition perturbation of chaotic start points.
    #[serde(default = "default_jitter")]
    pub jitter: f64,
    /// Seed of the benchmark instance (shift and rotation). Defaults to 0 so
    /// the instance stays fixed when only the master seed changes.
    #[serde(default)]
    pub instance_seed: u64,
    #[serde(default = "default_build_samples")]
    pub matched_samples: usize,
    #[serde(default = "default_bins")]
    pub matched_bins: usize,
}

impl ExperimentSpec {
    pub fn new(algorithm: Variant, function: BenchmarkId, dimension: usize, sources: Vec<SourceSpec>) -> Self {
        ExperimentSpec {
            algorithm,
            function,
            dimension,
            pop_size: None,
            generations: None,
            sources,
            repeats: DEFAULT_REPEATS,
            seed: 0,
            tie_tolerance: DEFAULT_TIE_TOLERANCE,
            output_dir: None,
            jitter: DEFAULT_JITTER,
            instance_seed: 0,
            matched_samples: crate::source::DEFAULT_BUILD_SAMPLES,
            matched_bins: crate::source::DEFAULT_BINS,
        }
    }

    pub fn de_config(&self) -> DeConfig {
        let mut cfg = DeConfig::standard(self.algorithm, self.dimension);
        if let Some(np) = self.pop_size {
            cfg.pop_size = np;
        }
        if let Some(g) = self.generations {
            cfg.generations = g;
        }
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        self.de_config().validate()?;
        if self.sources.is_empty() {
            return Err(Error::invalid("experiment needs at least one source"));
        }
        for (i, s) in self.sources.iter().enumerate() {
            if self.sources[..i].contains(s) {
                return Err(Error::invalid(format!("source {s} listed twice")));
            }
        }
        if self.repeats == 0 {
            return Err(Error::invalid("repeats must be positive"));
        }
        if !(self.tie_tolerance > 0.0 && self.tie_tolerance.is_finite()) {
            return Err(Error::invalid("tie tolerance must be positive"));
        }
        if !(self.jitter >= 0.0 && self.jitter.is_finite()) {
            return Err(Error::invalid("jitter must be non-negative"));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn instance(&self) -> Result<BenchmarkInstance> {
        make_instance(self.function, self.dimension, self.instance_seed)
    }
}

/// All repetitions of one source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeResult {
    pub label: String,
    /// Indexed by repetition.
    pub records: Vec<RunRecord>,
    pub summary: SummaryStats,
}

impl SchemeResult {
    pub fn new(label: impl Into<String>, records: Vec<RunRecord>) -> Result<Self> {
        let finals: Vec<f64> = records.iter().map(|r| r.final_best).collect();
        Ok(SchemeResult {
            label: label.into(),
            summary: summary(&finals)?,
            records,
        })
    }

    pub fn finals(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.final_best).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

/// Start point of every chaotic source in repetition `r`.
pub fn jittered_start(kind: ChaoticMapKind, master: u64, r: usize, jitter: f64) -> MapPoint {
    let p = kind.default_initial_point();
    if jitter == 0.0 {
        return p;
    }
    let mut meta = Mt19937::from_parts(master, &[TAG_JITTER, r as u32]);
    let dx = (2.0 * meta.next_f64() - 1.0) * jitter;
    let dy = (2.0 * meta.next_f64() - 1.0) * jitter;
    MapPoint::new(p.x + dx, p.y + dy)
}

/// Generator for source `label` in repetition `r`. Keyed by the label rather
/// than the source's position, so adding a source leaves the others alone.
pub fn source_mt(master: u64, r: usize, label: &str) -> Mt19937 {
    Mt19937::from_parts(master, &[TAG_SOURCE, r as u32, fnv1a(label.as_bytes())])
}

fn fnv1a(bytes: &[u8]) -> u32 {
    bytes
        .iter()
        .fold(0x811c_9dc5u32, |h, &b| (h ^ b as u32).wrapping_mul(0x0100_0193))
}

/// Builds the source used for `spec` in repetition `r`.
pub fn build_source(
    spec: SourceSpec,
    master: u64,
    r: usize,
    jitter: f64,
    matched: Option<&Arc<crate::source::EmpiricalDistribution>>,
) -> Result<Box<dyn RandomSource + Send>> {
    let label = spec.to_string();
    Ok(match spec {
        SourceSpec::Mt => Box::new(MtSource(source_mt(master, r, &label))),
        SourceSpec::Chaos(kind, scheme) => {
            Box::new(ChaoticSource::with_scheme(kind, jittered_start(kind, master, r, jitter), scheme)?)
        }
        SourceSpec::Matched(..) => {
            let dist = matched.ok_or_else(|| Error::invalid(format!("{label} needs a prebuilt distribution")))?;
            Box::new(MatchedSource::new(Arc::clone(dist), source_mt(master, r, &label)))
        }
    })
}

/// Runs every (repetition, source) pair. Output is ordered by source, then
/// repetition, whatever the execution mode.
pub fn run_experiment(
    spec: &ExperimentSpec,
    execution: Execution,
    cache: &DistributionCache,
) -> Result<Vec<SchemeResult>> {
    spec.validate()?;
    let cfg = spec.de_config();
    let instance = spec.instance()?;
    let dists: Vec<Option<Arc<crate::source::EmpiricalDistribution>>> = spec
        .sources
        .iter()
        .map(|s| match s {
            SourceSpec::Matched(map, scheme) => cache
                .get(DistributionKey::new(*map, *scheme, spec.matched_samples, spec.matched_bins))
                .map(Some),
            _ => Ok(None),
        })
        .collect::<Result<_>>()?;

    let tasks: Vec<(usize, usize)> = (0..spec.sources.len())
        .flat_map(|s| (0..spec.repeats).map(move |r| (s, r)))
        .collect();
    let run_one = |&(s, r): &(usize, usize)| -> Result<RunRecord> {
        let source = spec.sources[s];
        let wrap = |e: Error| Error::Run {
            repeat: r,
            source_label: source.to_string(),
            inner: Box::new(e),
        };
        let mut src = build_source(source, spec.seed, r, spec.jitter, dists[s].as_ref()).map_err(wrap)?;
        run_de(&cfg, &mut src, &instance).map_err(wrap)
    };
    let records: Vec<RunRecord> = match execution {
        Execution::Sequential => tasks.iter().map(run_one).collect::<Result<_>>()?,
        Execution::Parallel => tasks.par_iter().map(run_one).collect::<Result<_>>()?,
    };

    let mut it = records.into_iter();
    spec.sources
        .iter()
        .map(|s| SchemeResult::new(s.to_string(), it.by_ref().take(spec.repeats).collect()))
        .collect()
}
