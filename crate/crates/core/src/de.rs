//! DE/rand/1/bin and DE/best/1/bin.
//!
//! Every random number comes from the single [`RandomSource`] handed to
//! [`run_de`], consumed strictly in program order, so a run is a pure
//! function of its configuration, instance and source state.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::benchmarks::{BenchmarkInstance, SEARCH_HI, SEARCH_LO};
use crate::source::RandomSource;
use crate::{Error, Result};

/// Rejected index draws tolerated before a source is declared stuck.
const MAX_INDEX_REJECTIONS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Rand1Bin,
    Best1Bin,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Rand1Bin => "rand1bin",
            Variant::Best1Bin => "best1bin",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['/', '-', '_'], "").as_str() {
            "rand1bin" | "derand1bin" => Ok(Variant::Rand1Bin),
            "best1bin" | "debest1bin" => Ok(Variant::Best1Bin),
            _ => Err(Error::invalid(format!("unknown DE variant {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeConfig {
    pub variant: Variant,
    pub dim: usize,
    pub pop_size: usize,
    pub generations: usize,
    /// Mutation constant F.
    pub f: f64,
    /// Crossover probability CR.
    pub cr: f64,
    pub lo: f64,
    pub hi: f64,
    /// Force one randomly chosen coordinate to come from the noise vector.
    #[serde(default)]
    pub force_jrand: bool,
}

impl DeConfig {
    /// Population size and generation count tied to the dimension:
    /// D=10 -> (50, 200), D=20 -> (100, 400), D=30 -> (150, 600); other
    /// dimensions follow the same NP = 5D, G = 20D rule.
    pub fn schedule(dim: usize) -> (usize, usize) {
        (5 * dim, 20 * dim)
    }

    pub fn standard(variant: Variant, dim: usize) -> Self {
        let (pop_size, generations) = DeConfig::schedule(dim);
        DeConfig {
            variant,
            dim,
            pop_size,
            generations,
            f: 0.5,
            cr: 0.85,
            lo: SEARCH_LO,
            hi: SEARCH_HI,
            force_jrand: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 4 {
            return Err(Error::invalid(format!("population size must be >= 4, got {}", self.pop_size)));
        }
        if self.dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if !(self.lo < self.hi) {
            return Err(Error::invalid("domain needs lo < hi"));
        }
        if !(0.0..=1.0).contains(&self.cr) || !self.f.is_finite() {
            return Err(Error::invalid("CR must lie in [0, 1] and F must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub params: Vec<f64>,
    pub fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub members: Vec<Individual>,
    pub best_index: usize,
}

impl Population {
    pub fn new(members: Vec<Individual>) -> Self {
        let best_index = best_of(&members);
        Population { members, best_index }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn best(&self) -> &Individual {
        &self.members[self.best_index]
    }
}

/// Lowest fitness, ties to the lowest index. NaN never wins.
fn best_of(members: &[Individual]) -> usize {
    let mut best = 0;
    for (i, m) in members.iter().enumerate().skip(1) {
        if m.fitness < members[best].fitness || members[best].fitness.is_nan() && !m.fitness.is_nan() {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// Best fitness after initialization (index 0) and after each generation.
    pub best_by_generation: Vec<f64>,
    pub final_best: f64,
    pub final_vector: Vec<f64>,
    pub evaluations: usize,
}

impl RunRecord {
    /// First generation whose best, rounded to multiples of `tol`, equals
    /// the rounded final best.
    pub fn first_hit_generation(&self, tol: f64) -> usize {
        let target = round_to(self.final_best, tol);
        self.best_by_generation
            .iter()
            .position(|&v| round_to(v, tol) == target)
            .unwrap_or(self.best_by_generation.len().saturating_sub(1))
    }
}

/// `round(v / tol)`, the comparison key for ties.
pub fn round_to(v: f64, tol: f64) -> f64 {
    (v / tol).round()
}

pub fn init_population<S: RandomSource + ?Sized>(
    cfg: &DeConfig,
    src: &mut S,
    inst: &BenchmarkInstance,
) -> Result<Population> {
    cfg.validate()?;
    let mut members = Vec::with_capacity(cfg.pop_size);
    for _ in 0..cfg.pop_size {
        let params = (0..cfg.dim)
            .map(|_| src.rand_range(cfg.lo, cfg.hi))
            .collect::<Result<Vec<_>>>()?;
        members.push(Individual { params, fitness: f64::NAN });
    }
    for m in &mut members {
        m.fitness = inst.evaluate(&m.params)?;
    }
    Ok(Population::new(members))
}

/// Draws an index in `0..n` not contained in `exclude`.
fn draw_distinct<S: RandomSource + ?Sized>(src: &mut S, n: usize, exclude: &[usize]) -> Result<usize> {
    for _ in 0..MAX_INDEX_REJECTIONS {
        let r = src.rand_index(n)?;
        if !exclude.contains(&r) {
            return Ok(r);
        }
    }
    Err(Error::SourceStalled {
        draws: MAX_INDEX_REJECTIONS,
    })
}

/// `x_r3 + F (x_r1 - x_r2)` with r1, r2, r3 drawn in that order.
pub fn mutate_rand1<S: RandomSource + ?Sized>(
    pop: &Population,
    target: usize,
    f: f64,
    src: &mut S,
) -> Result<Vec<f64>> {
    let n = pop.len();
    let r1 = draw_distinct(src, n, &[target])?;
    let r2 = draw_distinct(src, n, &[target, r1])?;
    let r3 = draw_distinct(src, n, &[target, r1, r2])?;
    let (a, b, c) = (&pop.members[r1].params, &pop.members[r2].params, &pop.members[r3].params);
    Ok(c.iter().zip(a.iter().zip(b)).map(|(c, (a, b))| c + f * (a - b)).collect())
}

/// `x_best + F (x_r2 - x_r3)`.
pub fn mutate_best1<S: RandomSource + ?Sized>(
    pop: &Population,
    target: usize,
    f: f64,
    src: &mut S,
) -> Result<Vec<f64>> {
    let n = pop.len();
    let best = pop.best_index;
    let r2 = draw_distinct(src, n, &[target, best])?;
    let r3 = draw_distinct(src, n, &[target, best, r2])?;
    let (x, b, c) = (&pop.members[best].params, &pop.members[r2].params, &pop.members[r3].params);
    Ok(x.iter().zip(b.iter().zip(c)).map(|(x, (b, c))| x + f * (b - c)).collect())
}

/// Per-coordinate Bernoulli crossover: coordinate `j` comes from `noise` when
/// the draw is below `cr`.
pub fn crossover_bin<S: RandomSource + ?Sized>(
    target: &[f64],
    noise: &[f64],
    cr: f64,
    src: &mut S,
    force_jrand: bool,
) -> Result<Vec<f64>> {
    if target.len() != noise.len() {
        return Err(Error::DimensionMismatch {
            expected: target.len(),
            actual: noise.len(),
        });
    }
    let mut trial = Vec::with_capacity(target.len());
    for (t, v) in target.iter().zip(noise) {
        let r = src.next_unit()?.get();
        trial.push(if r < cr { *v } else { *t });
    }
    if force_jrand && !trial.is_empty() {
        let j = src.rand_index(trial.len())?;
        trial[j] = noise[j];
    }
    Ok(trial)
}

/// The trial replaces the target only when strictly better.
pub fn select(target: Individual, trial: Individual) -> Individual {
    if trial.fitness < target.fitness {
        trial
    } else {
        target
    }
}

pub fn repair_bounds(mut v: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    v.iter_mut().for_each(|x| *x = x.clamp(lo, hi));
    v
}

/// Runs `cfg.generations` synchronous generations.
pub fn run_de<S: RandomSource + ?Sized>(
    cfg: &DeConfig,
    src: &mut S,
    inst: &BenchmarkInstance,
) -> Result<RunRecord> {
    if inst.dim() != cfg.dim {
        return Err(Error::DimensionMismatch {
            expected: cfg.dim,
            actual: inst.dim(),
        });
    }
    let mut pop = init_population(cfg, src, inst)?;
    let mut evaluations = pop.len();
    let mut history = Vec::with_capacity(cfg.generations + 1);
    history.push(pop.best().fitness);

    for _ in 0..cfg.generations {
        let mut next = Vec::with_capacity(pop.len());
        for i in 0..pop.len() {
            let noise = match cfg.variant {
                Variant::Rand1Bin => mutate_rand1(&pop, i, cfg.f, src)?,
                Variant::Best1Bin => mutate_best1(&pop, i, cfg.f, src)?,
            };
            let noise = repair_bounds(noise, cfg.lo, cfg.hi);
            let target = &pop.members[i];
            let params = crossover_bin(&target.params, &noise, cfg.cr, src, cfg.force_jrand)?;
            let fitness = inst.evaluate(&params)?;
            evaluations += 1;
            next.push(select(target.clone(), Individual { params, fitness }));
        }
        pop = Population::new(next);
        history.push(pop.best().fitness);
    }

    let best = pop.best();
    Ok(RunRecord {
        final_best: best.fitness,
        final_vector: best.params.clone(),
        best_by_generation: history,
        evaluations,
    })
}
