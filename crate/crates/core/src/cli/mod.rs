//! Command-line front end.
//!
//! Each subcommand accepts `--config FILE` (flat TOML whose keys match the
//! long flag names with `-` replaced by `_`); flags given on the command line
//! override the file. Without `--out`, output goes to a default file name in
//! `$VORCANDS_OUT_DIR` if set, otherwise to standard output.
//!
//! Exit codes: 0 success, 1 I/O failure or failed experiment cells,
//! 2 usage or configuration error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand};

use crate::bench::{ProblemKind, PROBLEM_NAMES};
use crate::driver::{
    boundary_study, candidate_cloud, run_suite, sidecar_path, write_boundary_rows, write_cloud, write_trajectories,
    BoundarySettings, CloudScheme, CloudSettings, Method, RunSettings,
};
use crate::error::{Error, Result};
use crate::metrics::Metric;
use crate::vorcands::Strategy;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "VORCANDS_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "vorcands", version, about = "Bayesian optimization with Voronoi-boundary candidates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run replicated optimization experiments and write trajectories.
    Run(RunArgs),
    /// Measure how often Voronoi walks end on the cube boundary.
    BoundaryStudy(BoundaryArgs),
    /// Dump a design and candidate points for plotting.
    Candidates(CandidatesArgs),
    /// List the built-in test problems.
    Problems,
}

fn parse_switch(s: &str) -> std::result::Result<bool, String> {
    match s.to_ascii_lowercase().as_str() {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected on or off, got {s:?}")),
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML file with default settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Test problem (see the `problems` subcommand).
    #[arg(long)]
    pub problem: Option<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Comma-separated acquisition methods: vor, lhs, sobol, opt.
    #[arg(long, value_delimiter = ',')]
    pub method: Option<Vec<Method>>,
    /// Total evaluations per run, initial design included.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Number of replicates; replicate r uses seed + r.
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Explicit comma-separated seed list (overrides --seed).
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    /// Candidates per acquisition [default: min(5000, 100·dim)].
    #[arg(long)]
    pub candidates: Option<usize>,
    /// Initial design size [default: 3·dim].
    #[arg(long)]
    pub init_size: Option<usize>,
    /// Refit hyperparameters at every acquisition before this one.
    #[arg(long)]
    pub refit_all_until: Option<usize>,
    /// Afterwards, refit every this many acquisitions.
    #[arg(long)]
    pub refit_every: Option<usize>,
    /// Starting points for `opt` [default: 2·dim + 1].
    #[arg(long)]
    pub opt_starts: Option<usize>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Include evaluated coordinates (on/off).
    #[arg(long, value_parser = parse_switch)]
    pub x_columns: Option<bool>,
    /// Timing columns (on/off); off leaves them empty for reproducible output.
    #[arg(long, value_parser = parse_switch)]
    pub timing: Option<bool>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated design sizes [default: 10,100,1000].
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Comma-separated dimensions [default: 2,10,100].
    #[arg(long, value_delimiter = ',')]
    pub dim: Option<Vec<usize>>,
    /// Comma-separated strategies: unif, rect, proj.
    #[arg(long, value_delimiter = ',')]
    pub strategy: Option<Vec<Strategy>>,
    /// Comma-separated metrics: l1, l2, linf.
    #[arg(long, value_delimiter = ',')]
    pub metric: Option<Vec<Metric>>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Walks per cell.
    #[arg(long)]
    pub candidates: Option<usize>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CandidatesArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Size of the generated Latin hypercube design.
    #[arg(long)]
    pub n: Option<usize>,
    /// CSV of design rows to use instead of a generated design.
    #[arg(long)]
    pub design: Option<PathBuf>,
    /// Comma-separated schemes: vor, lhs, sobol.
    #[arg(long, value_delimiter = ',')]
    pub scheme: Option<Vec<CloudScheme>>,
    /// Candidates per scheme.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Walk strategy for vor (default: alternate rect and proj by --iteration).
    #[arg(long)]
    pub strategy: Option<Strategy>,
    /// Metric for vor with an explicit strategy [default: linf].
    #[arg(long)]
    pub metric: Option<Metric>,
    #[arg(long)]
    pub iteration: Option<usize>,
    /// Design row that incumbent-biased walks start from.
    #[arg(long)]
    pub incumbent: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Contract(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// Where a subcommand's CSV goes.
fn destination(out: Option<PathBuf>, default_name: &str) -> Option<PathBuf> {
    out.or_else(|| {
        std::env::var_os(OUT_DIR_ENV)
            .filter(|d| !d.is_empty())
            .map(|d| Path::new(&d).join(default_name))
    })
}

fn open(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            Box::new(std::io::BufWriter::new(std::fs::File::create(p)?))
        }
        None => Box::new(std::io::stdout().lock()),
    })
}

fn report(e: &Error) -> i32 {
    eprintln!("vorcands: {e}");
    exit_code(e)
}

pub fn cmd_run(args: RunArgs) -> i32 {
    let go = || -> Result<i32> {
        let file = match &args.config {
            Some(p) => RunSettings::from_file(p)?,
            None => RunSettings::default(),
        };
        let flags = RunSettings {
            problem: args.problem,
            dim: args.dim,
            method: args.method,
            budget: args.budget,
            reps: args.reps,
            seed: args.seed,
            seeds: args.seeds,
            candidates: args.candidates,
            init_size: args.init_size,
            refit_all_until: args.refit_all_until,
            refit_every: args.refit_every,
            opt_starts: args.opt_starts,
            jobs: args.jobs,
            x_columns: args.x_columns,
            timing: args.timing,
            out: args.out,
        };
        let mut cfg = file.overlay(flags).resolve()?;
        cfg.out = destination(cfg.out.take(), "run.csv");
        let suite = run_suite(&cfg)?;
        let mut w = open(&cfg.out)?;
        write_trajectories(&mut w, &suite)?;
        w.flush()?;
        if let Some(path) = &cfg.out {
            std::fs::write(sidecar_path(path), crate::driver::metadata_toml(&suite)?)?;
        }
        for cell in suite.failures() {
            if let Err(e) = &cell.outcome {
                eprintln!("vorcands: {} seed {} failed: {e}", cell.method, cell.seed);
            }
        }
        Ok(if suite.all_ok() { EXIT_OK } else { EXIT_FAILURE })
    };
    go().unwrap_or_else(|e| report(&e))
}

pub fn cmd_boundary_study(args: BoundaryArgs) -> i32 {
    let go = || -> Result<i32> {
        let file = match &args.config {
            Some(p) => BoundarySettings::from_file(p)?,
            None => BoundarySettings::default(),
        };
        let flags = BoundarySettings {
            n: args.n,
            dim: args.dim,
            strategy: args.strategy,
            metric: args.metric,
            reps: args.reps,
            seed: args.seed,
            candidates: args.candidates,
            jobs: args.jobs,
            out: args.out,
        };
        let mut cfg = file.overlay(flags).resolve()?;
        cfg.out = destination(cfg.out.take(), "boundary_study.csv");
        let rows = boundary_study(&cfg)?;
        let mut w = open(&cfg.out)?;
        write_boundary_rows(&mut w, &rows)?;
        w.flush()?;
        if let Some(path) = &cfg.out {
            let meta = toml::to_string(&StudyMeta {
                command: "boundary-study",
                version: env!("CARGO_PKG_VERSION"),
                config: &cfg,
            })
            .map_err(|e| Error::Config(e.to_string()))?;
            std::fs::write(sidecar_path(path), meta)?;
        }
        Ok(EXIT_OK)
    };
    go().unwrap_or_else(|e| report(&e))
}

#[derive(serde::Serialize)]
struct StudyMeta<'a, T: serde::Serialize> {
    command: &'static str,
    version: &'static str,
    config: &'a T,
}

pub fn cmd_candidates(args: CandidatesArgs) -> i32 {
    let go = || -> Result<i32> {
        let file = match &args.config {
            Some(p) => CloudSettings::from_file(p)?,
            None => CloudSettings::default(),
        };
        let flags = CloudSettings {
            dim: args.dim,
            n: args.n,
            design: args.design,
            scheme: args.scheme,
            count: args.count,
            seed: args.seed,
            strategy: args.strategy,
            metric: args.metric,
            iteration: args.iteration,
            incumbent: args.incumbent,
            out: args.out,
        };
        let mut cfg = file.overlay(flags).resolve()?;
        cfg.out = destination(cfg.out.take(), "candidates.csv");
        let cloud = candidate_cloud(&cfg)?;
        let mut w = open(&cfg.out)?;
        write_cloud(&mut w, &cloud)?;
        w.flush()?;
        if let Some(path) = &cfg.out {
            let meta = toml::to_string(&StudyMeta {
                command: "candidates",
                version: env!("CARGO_PKG_VERSION"),
                config: &cfg,
            })
            .map_err(|e| Error::Config(e.to_string()))?;
            std::fs::write(sidecar_path(path), meta)?;
        }
        Ok(EXIT_OK)
    };
    go().unwrap_or_else(|e| report(&e))
}

pub fn cmd_problems() -> i32 {
    println!("name,domain,known_best");
    for name in PROBLEM_NAMES {
        let kind: ProblemKind = name.parse().expect("listed problem parses");
        let (lo, hi) = kind.domain();
        let note = if kind == ProblemKind::Ackley { " (randomly shifted)" } else { "" };
        println!("{name},[{lo}; {hi}]^P{note},0");
    }
    EXIT_OK
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let (name, code) = match cli.command {
        Command::Run(a) => ("run", cmd_run(a)),
        Command::BoundaryStudy(a) => ("boundary-study", cmd_boundary_study(a)),
        Command::Candidates(a) => ("candidates", cmd_candidates(a)),
        Command::Problems => ("problems", cmd_problems()),
    };
    if code == EXIT_USAGE {
        if let Some(sub) = Cli::command().find_subcommand(name) {
            eprintln!("\n{}", sub.clone().bin_name(format!("vorcands {name}")).render_usage());
        }
    }
    code
}
