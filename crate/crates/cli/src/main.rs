//! `chaosde`: command line front-end for the experiment suite.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chaosde_core::benchmarks::BenchmarkId;
use chaosde_core::chaos::ChaoticMapKind;
use chaosde_core::de::Variant;
use chaosde_core::harness::{
    build_source, read_experiment, run_experiment, stats_pipeline, summary_rows, summary_table_markdown, win_table,
    win_tables_markdown, write_experiment, DistributionCache, DistributionKey, Execution, ExperimentSpec, SUMMARY_FILE,
};
use chaosde_core::normalize::{estimate_bounds, DEFAULT_BOUNDS_SAMPLES};
use chaosde_core::source::{SourceSpec, DEFAULT_BINS, DEFAULT_BUILD_SAMPLES};
use chaosde_core::{Error, Result, StatConfig};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "chaosde", version, about = "Differential evolution driven by chaotic number generators")]
struct Cli {
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file or directory, depending on the subcommand.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Experiment spec as JSON (used by `run`; flags override its fields).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Histogram of a source's unit samples as CSV.
    Histogram {
        #[arg(long)]
        source: SourceSpec,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 64)]
        bins: usize,
        /// Perturbation of the chaotic start point (0 keeps the default point).
        #[arg(long, default_value_t = 0.0)]
        jitter: f64,
    },
    /// Estimate the x-range used by the Bounds normalizer.
    Bounds {
        #[arg(long)]
        map: ChaoticMapKind,
        #[arg(long, default_value_t = DEFAULT_BOUNDS_SAMPLES)]
        samples: usize,
    },
    /// Run one experiment and write finals.csv, trajectories.csv and summary.md.
    Run {
        #[arg(long)]
        algo: Option<Variant>,
        #[arg(long)]
        func: Option<BenchmarkId>,
        #[arg(long)]
        dim: Option<usize>,
        /// Comma-separated source specs, e.g. chaos:tinkerbell:atan2,mt.
        #[arg(long, value_delimiter = ',')]
        sources: Option<Vec<SourceSpec>>,
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        jitter: Option<f64>,
        #[arg(long)]
        pop_size: Option<usize>,
        #[arg(long)]
        generations: Option<usize>,
        #[arg(long)]
        instance_seed: Option<u64>,
        /// Run repetitions on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Min/Max/Mean/Med./Std. dev. table for result directories.
    Table {
        #[arg(long = "in", required = true, num_args = 1..)]
        input: Vec<PathBuf>,
    },
    /// Win percentages per source for result directories.
    Wins {
        #[arg(long = "in", required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        /// Tie tolerance; defaults to the one stored with each experiment.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Normality, variance and mean tests across the sources of a result directory.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = chaosde_core::stats::DEFAULT_ALPHA)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = Format::Markdown)]
        format: Format,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Markdown,
    Json,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            std::fs::write(path, text).map_err(|e| Error::io(path, e))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn histogram(cli: &Cli, source: SourceSpec, samples: usize, bins: usize, jitter: f64) -> Result<()> {
    if bins == 0 || samples == 0 {
        return Err(Error::invalid("samples and bins must be positive"));
    }
    let cache = DistributionCache::from_env();
    let dist = match source {
        SourceSpec::Matched(map, scheme) => {
            Some(cache.get(DistributionKey::new(map, scheme, DEFAULT_BUILD_SAMPLES, DEFAULT_BINS))?)
        }
        _ => None,
    };
    let mut src = build_source(source, cli.seed.unwrap_or(0), 0, jitter, dist.as_ref())?;
    let mut counts = vec![0u64; bins];
    for _ in 0..samples {
        let u = src.next_unit()?.get();
        counts[((u * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["bin", "left", "right", "count", "proportion"])?;
    for (j, c) in counts.iter().enumerate() {
        w.write_record([
            j.to_string(),
            (j as f64 / bins as f64).to_string(),
            ((j + 1) as f64 / bins as f64).to_string(),
            c.to_string(),
            (*c as f64 / samples as f64).to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::io("<csv buffer>", e.into_error()))?;
    emit(cli.out.as_deref(), &String::from_utf8_lossy(&bytes))
}

fn bounds(cli: &Cli, map: ChaoticMapKind, samples: usize) -> Result<()> {
    let b = estimate_bounds(map, samples)?;
    let json = serde_json::json!({
        "map": map.name(),
        "min_x": b.min_x,
        "max_x": b.max_x,
        "sample_count": b.sample_count,
    });
    emit(cli.out.as_deref(), &format!("{}\n", serde_json::to_string_pretty(&json)?))
}

fn run(cli: &Cli, cmd: &Command) -> Result<()> {
    let Command::Run {
        algo,
        func,
        dim,
        sources,
        repeats,
        tol,
        jitter,
        pop_size,
        generations,
        instance_seed,
        sequential,
    } = cmd
    else {
        unreachable!()
    };
    let mut spec = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            serde_json::from_str::<ExperimentSpec>(&text)?
        }
        None => {
            let missing = |what: &str| Error::invalid(format!("--{what} is required without --config"));
            ExperimentSpec::new(
                algo.ok_or_else(|| missing("algo"))?,
                func.ok_or_else(|| missing("func"))?,
                dim.ok_or_else(|| missing("dim"))?,
                sources.clone().ok_or_else(|| missing("sources"))?,
            )
        }
    };
    if let Some(v) = algo {
        spec.algorithm = *v;
    }
    if let Some(v) = func {
        spec.function = *v;
    }
    if let Some(v) = dim {
        spec.dimension = *v;
    }
    if let Some(v) = sources {
        spec.sources = v.clone();
    }
    if let Some(v) = repeats {
        spec.repeats = *v;
    }
    if let Some(v) = tol {
        spec.tie_tolerance = *v;
    }
    if let Some(v) = jitter {
        spec.jitter = *v;
    }
    if pop_size.is_some() {
        spec.pop_size = *pop_size;
    }
    if generations.is_some() {
        spec.generations = *generations;
    }
    if let Some(v) = instance_seed {
        spec.instance_seed = *v;
    }
    if let Some(v) = cli.seed {
        spec.seed = v;
    }
    if let Some(v) = &cli.out {
        spec.output_dir = Some(v.clone());
    }
    spec.validate()?;
    let dir = spec
        .output_dir
        .clone()
        .ok_or_else(|| Error::invalid("an output directory is required (--out or output_dir)"))?;

    let execution = if *sequential { Execution::Sequential } else { Execution::Parallel };
    let results = run_experiment(&spec, execution, &DistributionCache::from_env())?;
    write_experiment(&dir, &spec, &results)?;
    let md = std::fs::read_to_string(dir.join(SUMMARY_FILE)).map_err(|e| Error::io(dir.join(SUMMARY_FILE), e))?;
    emit(None, &md)
}

fn table(cli: &Cli, input: &[PathBuf]) -> Result<()> {
    let mut rows = Vec::new();
    for dir in input {
        let (meta, results) = read_experiment(dir)?;
        rows.extend(summary_rows(&meta.spec.function.to_string(), &results));
    }
    emit(cli.out.as_deref(), &summary_table_markdown(&rows))
}

fn wins(cli: &Cli, input: &[PathBuf], tol: Option<f64>) -> Result<()> {
    let mut rows = Vec::new();
    for dir in input {
        let (meta, results) = read_experiment(dir)?;
        let t = win_table(&results, tol.unwrap_or(meta.spec.tie_tolerance))?;
        rows.push((meta.spec.function.to_string(), t));
    }
    emit(cli.out.as_deref(), &win_tables_markdown(&rows)?)
}

fn stats(cli: &Cli, input: &Path, alpha: f64, format: Format) -> Result<()> {
    let (_, results) = read_experiment(input)?;
    let groups: Vec<(String, Vec<f64>)> = results.iter().map(|s| (s.label.clone(), s.finals())).collect();
    let report = stats_pipeline(&groups, &StatConfig::new(alpha)?)?;
    let text = match format {
        Format::Markdown => report.to_markdown(),
        Format::Json => format!("{}\n", report.to_json()?),
    };
    emit(cli.out.as_deref(), &text)
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Histogram {
            source,
            samples,
            bins,
            jitter,
        } => histogram(cli, *source, *samples, *bins, *jitter),
        Command::Bounds { map, samples } => bounds(cli, *map, *samples),
        cmd @ Command::Run { .. } => run(cli, cmd),
        Command::Table { input } => table(cli, input),
        Command::Wins { input, tol } => wins(cli, input, *tol),
        Command::Stats { input, alpha, format } => stats(cli, input, *alpha, *format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
