//! Result directory layout: `experiment.json`, `finals.csv`,
//! `trajectories.csv` and `summary.md`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::tables::{summary_rows, summary_table_markdown};
use super::{ExperimentSpec, SchemeResult};
use crate::de::{DeConfig, RunRecord};
use crate::{Error, Result};

pub const META_FILE: &str = "experiment.json";
pub const FINALS_FILE: &str = "finals.csv";
pub const TRAJECTORIES_FILE: &str = "trajectories.csv";
pub const SUMMARY_FILE: &str = "summary.md";

/// Everything needed to reproduce the directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentMeta {
    pub spec: ExperimentSpec,
    pub de: DeConfig,
    pub version: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct FinalRow {
    algo: String,
    source: String,
    func: String,
    dim: usize,
    repeat: usize,
    final_best: f64,
    first_hit_generation: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct TrajectoryRow {
    run_id: String,
    generation: usize,
    best_fitness: f64,
}

fn run_id(source: &str, repeat: usize) -> String {
    format!("{source}/{repeat}")
}

fn parse_run_id(id: &str) -> Result<(&str, usize)> {
    let (source, r) = id
        .rsplit_once('/')
        .ok_or_else(|| Error::invalid(format!("malformed run_id {id:?}")))?;
    let r = r
        .parse()
        .map_err(|_| Error::invalid(format!("malformed repeat in run_id {id:?}")))?;
    Ok((source, r))
}

pub fn write_experiment(dir: &Path, spec: &ExperimentSpec, results: &[SchemeResult]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut stored = spec.clone();
    // the directory itself is not part of the result
    stored.output_dir = None;
    let meta = ExperimentMeta {
        de: spec.de_config(),
        spec: stored,
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let meta_path = dir.join(META_FILE);
    let mut text = serde_json::to_string_pretty(&meta)?;
    text.push('\n');
    std::fs::write(&meta_path, text).map_err(|e| Error::io(&meta_path, e))?;

    let finals_path = dir.join(FINALS_FILE);
    let mut finals = csv::Writer::from_path(&finals_path)?;
    let traj_path = dir.join(TRAJECTORIES_FILE);
    let mut traj = csv::Writer::from_path(&traj_path)?;
    for s in results {
        for (r, rec) in s.records.iter().enumerate() {
            finals.serialize(FinalRow {
                algo: spec.algorithm.to_string(),
                source: s.label.clone(),
                func: spec.function.to_string(),
                dim: spec.dimension,
                repeat: r,
                final_best: rec.final_best,
                first_hit_generation: rec.first_hit_generation(spec.tie_tolerance),
            })?;
            let id = run_id(&s.label, r);
            for (g, &v) in rec.best_by_generation.iter().enumerate() {
                traj.serialize(TrajectoryRow {
                    run_id: id.clone(),
                    generation: g,
                    best_fitness: v,
                })?;
            }
        }
    }
    finals.flush().map_err(|e| Error::io(&finals_path, e))?;
    traj.flush().map_err(|e| Error::io(&traj_path, e))?;

    let summary_path = dir.join(SUMMARY_FILE);
    let md = summary_table_markdown(&summary_rows(&spec.function.to_string(), results));
    std::fs::write(&summary_path, md).map_err(|e| Error::io(&summary_path, e))
}

/// Reloads a directory written by [`write_experiment`]. Final vectors are
/// not stored, so the records come back with empty `final_vector`.
pub fn read_experiment(dir: &Path) -> Result<(ExperimentMeta, Vec<SchemeResult>)> {
    let meta_path = dir.join(META_FILE);
    let text = std::fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let meta: ExperimentMeta = serde_json::from_str(&text)?;
    let labels: Vec<String> = meta.spec.sources.iter().map(|s| s.to_string()).collect();
    let repeats = meta.spec.repeats;

    let mut trajectories: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    let mut reader = csv::Reader::from_path(dir.join(TRAJECTORIES_FILE))?;
    for row in reader.deserialize() {
        let row: TrajectoryRow = row?;
        let (source, r) = parse_run_id(&row.run_id)?;
        let s = labels
            .iter()
            .position(|l| l == source)
            .ok_or_else(|| Error::invalid(format!("trajectory for unknown source {source}")))?;
        let traj = trajectories.entry((s, r)).or_default();
        if row.generation != traj.len() {
            return Err(Error::invalid(format!("trajectory {} is out of order", row.run_id)));
        }
        traj.push(row.best_fitness);
    }

    let mut finals: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut reader = csv::Reader::from_path(dir.join(FINALS_FILE))?;
    for row in reader.deserialize() {
        let row: FinalRow = row?;
        let s = labels
            .iter()
            .position(|l| *l == row.source)
            .ok_or_else(|| Error::invalid(format!("final for unknown source {}", row.source)))?;
        finals.insert((s, row.repeat), row.final_best);
    }

    let evaluations = meta.de.pop_size * (meta.de.generations + 1);
    let mut results = Vec::with_capacity(labels.len());
    for (s, label) in labels.iter().enumerate() {
        let mut records = Vec::with_capacity(repeats);
        for r in 0..repeats {
            let traj = trajectories
                .remove(&(s, r))
                .ok_or_else(|| Error::invalid(format!("missing trajectory for {label} repeat {r}")))?;
            let final_best = *finals
                .get(&(s, r))
                .ok_or_else(|| Error::invalid(format!("missing final for {label} repeat {r}")))?;
            if traj.last() != Some(&final_best) {
                return Err(Error::invalid(format!("final and trajectory disagree for {label} repeat {r}")));
            }
            records.push(RunRecord {
                best_by_generation: traj,
                final_best,
                final_vector: Vec::new(),
                evaluations,
            });
        }
        results.push(SchemeResult::new(label.clone(), records)?);
    }
    Ok((meta, results))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::BenchmarkId;
    use crate::de::Variant;
    use crate::harness::{run_experiment, DistributionCache, Execution};
    use crate::source::SourceSpec;

    fn spec() -> ExperimentSpec {
        let mut s = ExperimentSpec::new(
            Variant::Best1Bin,
            BenchmarkId::F1,
            3,
            vec![SourceSpec::Mt, "chaos:gingerbread:bounds".parse().unwrap()],
        );
        s.repeats = 3;
        s.generations = Some(8);
        s
    }

    #[test]
    fn write_then_read() {
        let dir = tempfile::tempdir().unwrap();
        let spec = spec();
        let res = run_experiment(&spec, Execution::Parallel, &DistributionCache::in_memory()).unwrap();
        write_experiment(dir.path(), &spec, &res).unwrap();
        let (meta, back) = read_experiment(dir.path()).unwrap();
        assert_eq!(meta.spec, spec);
        for (a, b) in res.iter().zip(&back) {
            assert_eq!(a.label, b.label);
            assert_eq!(a.summary, b.summary);
            for (x, y) in a.records.iter().zip(&b.records) {
                assert_eq!(x.best_by_generation, y.best_by_generation);
                assert_eq!(x.evaluations, y.evaluations);
            }
        }
        let finals = std::fs::read_to_string(dir.path().join(FINALS_FILE)).unwrap();
        assert!(finals.starts_with("algo,source,func,dim,repeat,final_best,first_hit_generation\n"));
        let traj = std::fs::read_to_string(dir.path().join(TRAJECTORIES_FILE)).unwrap();
        assert!(traj.starts_with("run_id,generation,best_fitness\n"));
        assert_eq!(traj.lines().count(), 1 + 2 * 3 * 9);
    }

    #[test]
    fn rewriting_is_byte_identical() {
        let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let cache = DistributionCache::in_memory();
        let mut spec = spec();
        for d in [&d1, &d2] {
            spec.output_dir = Some(d.path().to_path_buf());
            let res = run_experiment(&spec, Execution::Parallel, &cache).unwrap();
            write_experiment(d.path(), &spec, &res).unwrap();
        }
        for f in [META_FILE, FINALS_FILE, TRAJECTORIES_FILE, SUMMARY_FILE] {
            assert_eq!(std::fs::read(d1.path().join(f)).unwrap(), std::fs::read(d2.path().join(f)).unwrap(), "{f}");
        }
    }

    #[test]
    fn missing_dir_errors() {
        assert!(read_experiment(Path::new("/nonexistent/chaosde")).is_err());
    }
}
