//! Command-line front end: `solve`, `study` and `diagnose-kappa`.
//!
//! Settings resolve as flag, then `--config` JSON file, then default. The
//! output directory additionally falls back to `$BANGBANG_PG_OUT` before the
//! default `out`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::benchmark::{
    analytic_bstar_pbar, coupled_alpha, coupled_time_steps, default_alphas, measure_diagnostic,
    run_study, table_to_csv, table_to_markdown, trajectory_csv, write_file, BenchmarkProblem,
    EocTable, KappaReport, LevelErrors, StudyConfig,
};
use crate::error::Error;
use crate::mesh_fem::{build_uniform_mesh, FemSpace, MAX_LEVEL, PCG_TOLERANCE};
use crate::optimizer::{DiscreteProblem, FixedPointOptions, DEFAULT_MAX_ITER, DEFAULT_T0};
use crate::time::build_time_grid;

pub const OUT_ENV: &str = "BANGBANG_PG_OUT";
pub const DEFAULT_OUT: &str = "out";
pub const DEFAULT_LEVELS: (u32, u32) = (1, 6);
pub const DEFAULT_SEED: u64 = 0;
/// Uniform samples in every trajectory CSV, on top of the breakpoints.
pub const TRAJECTORY_SAMPLES: usize = 1000;
/// Sampling intervals for the analytic `B*p̄` in `diagnose-kappa --analytic`.
pub const KAPPA_SAMPLES: usize = 1 << 16;
pub const TIME_STEP_RULE: &str = "M = round(2^(3l/2+1))";

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Solve,
    Study,
    DiagnoseKappa,
}

/// Fully resolved run settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    /// One entry for `solve` and the discrete `diagnose-kappa`.
    pub levels: Vec<u32>,
    /// Overrides the coupled `α = 2^{-2ℓ}`.
    pub alpha: Option<f64>,
    pub t0: f64,
    pub max_iter: usize,
    pub out: PathBuf,
    pub parallel_levels: bool,
    pub analytic: bool,
    /// Recorded in the metadata only; CLI runs are deterministic.
    pub seed: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// `--help` / `--version` output; not a failure.
    #[error("{0}")]
    Info(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Run(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Info(_) => 0,
            CliError::Usage(_) => EXIT_CONFIG,
            CliError::Run(e) => exit_code(e),
        }
    }
}

/// Exit status for a library error: configuration 2, solver 3, I/O 4.
pub fn exit_code(e: &Error) -> i32 {
    match e.root() {
        Error::Config(_) | Error::Data(_) => EXIT_CONFIG,
        Error::LinearSolver { .. } | Error::NonConvergence { .. } => EXIT_SOLVER,
        Error::Io { .. } | Error::Format { .. } => EXIT_IO,
        Error::Level { .. } => unreachable!("root strips level context"),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "bangbang-pg",
    version,
    about = "Variational discretization of a bang-bang parabolic control benchmark",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Solve the benchmark on one level and write the control trajectory.
    Solve(CommonArgs),
    /// Coupled convergence study with error and EOC tables.
    Study(CommonArgs),
    /// Fit the measure-condition exponent of B*p.
    DiagnoseKappa(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Level range `A..B` (inclusive) or a single level.
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    level: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t0: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    parallel_levels: bool,
    /// Use the closed-form B*p̄ instead of a discrete solve.
    #[arg(long)]
    analytic: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// JSON file with flat keys named like the flags (underscores).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum LevelsValue {
    Range(String),
    List(Vec<u32>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    levels: Option<LevelsValue>,
    level: Option<u32>,
    alpha: Option<f64>,
    t0: Option<f64>,
    max_iter: Option<usize>,
    out: Option<PathBuf>,
    parallel_levels: Option<bool>,
    analytic: Option<bool>,
    seed: Option<u64>,
}

/// Parses `A..B`, `A..=B` or `N`.
pub fn parse_levels(s: &str) -> Result<Vec<u32>, Error> {
    let bad = || Error::Config(format!("invalid level range '{s}', expected A..B"));
    let num = |t: &str| t.trim().parse::<u32>().map_err(|_| bad());
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let n = num(s)?;
            (n, n)
        }
    };
    if lo > hi {
        return Err(bad());
    }
    Ok((lo..=hi).collect())
}

fn check_level(level: u32) -> Result<u32, Error> {
    if (1..=MAX_LEVEL).contains(&level) {
        Ok(level)
    } else {
        Err(Error::Config(format!("level {level} outside 1..={MAX_LEVEL}")))
    }
}

/// Parses command-line arguments (including the program name).
pub fn parse_config<I, T>(args: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    parse_config_with_env(args, std::env::var_os(OUT_ENV))
}

/// [`parse_config`] with an explicit value for `$BANGBANG_PG_OUT`.
pub fn parse_config_with_env<I, T>(args: I, out_env: Option<OsString>) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Info(e.render().to_string()),
            _ => CliError::Usage(e.render().to_string()),
        }
    })?;
    let (command, args) = match cli.command {
        CliCommand::Solve(a) => (Command::Solve, a),
        CliCommand::Study(a) => (Command::Study, a),
        CliCommand::DiagnoseKappa(a) => (Command::DiagnoseKappa, a),
    };
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            serde_json::from_str::<FileConfig>(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    Ok(resolve(command, args, file, out_env)?)
}

fn resolve(command: Command, args: CommonArgs, file: FileConfig, out_env: Option<OsString>) -> Result<RunConfig, Error> {
    let levels_range = match (args.levels, file.levels) {
        (Some(s), _) | (None, Some(LevelsValue::Range(s))) => Some(parse_levels(&s)?),
        (None, Some(LevelsValue::List(v))) => Some(v),
        (None, None) => None,
    };
    let level = args.level.or(file.level);
    let analytic = args.analytic || file.analytic.unwrap_or(false);

    let levels = match command {
        Command::Study => {
            if level.is_some() {
                return Err(Error::Config("study takes --levels, not --level".into()));
            }
            let mut v = levels_range.unwrap_or_else(|| (DEFAULT_LEVELS.0..=DEFAULT_LEVELS.1).collect());
            v.sort_unstable();
            v.dedup();
            if v.is_empty() {
                return Err(Error::Config("empty level list".into()));
            }
            v
        }
        Command::Solve | Command::DiagnoseKappa => {
            if levels_range.is_some() {
                return Err(Error::Config("this command takes --level, not --levels".into()));
            }
            match level {
                Some(l) => vec![l],
                None if command == Command::DiagnoseKappa && analytic => Vec::new(),
                None => return Err(Error::Config("missing --level".into())),
            }
        }
    };
    for &l in &levels {
        check_level(l)?;
    }
    if analytic && command != Command::DiagnoseKappa {
        return Err(Error::Config("--analytic only applies to diagnose-kappa".into()));
    }

    let alpha = args.alpha.or(file.alpha);
    if let Some(a) = alpha {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Config(format!("alpha must be positive, got {a}")));
        }
    }
    let t0 = args.t0.or(file.t0).unwrap_or(DEFAULT_T0);
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::Config(format!("t0 must be positive, got {t0}")));
    }
    let max_iter = args.max_iter.or(file.max_iter).unwrap_or(DEFAULT_MAX_ITER);
    if max_iter == 0 {
        return Err(Error::Config("max_iter must be at least 1".into()));
    }
    let out = args
        .out
        .or(file.out)
        .or_else(|| out_env.filter(|s| !s.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));

    Ok(RunConfig {
        command,
        levels,
        alpha,
        t0,
        max_iter,
        out,
        parallel_levels: args.parallel_levels || file.parallel_levels.unwrap_or(false),
        analytic,
        seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
    })
}

#[derive(Debug, Clone, Serialize)]
struct LevelMeta {
    level: u32,
    alpha: f64,
    h: f64,
    nodes: usize,
    dofs: usize,
    triangles: usize,
    time_steps: usize,
}

fn level_meta(level: u32, alpha_override: Option<f64>) -> Result<LevelMeta, Error> {
    let mesh = build_uniform_mesh(level)?;
    Ok(LevelMeta {
        level,
        alpha: alpha_override.unwrap_or_else(|| coupled_alpha(level)),
        h: mesh.mesh_size(),
        nodes: mesh.num_nodes(),
        dofs: mesh.dof_map().num_dofs(),
        triangles: mesh.triangles().len(),
        time_steps: coupled_time_steps(level),
    })
}

#[derive(Debug, Serialize)]
struct Metadata<'a> {
    version: &'static str,
    config: &'a RunConfig,
    grids: Vec<LevelMeta>,
    fixed_point_t0: f64,
    fixed_point_max_iter: usize,
    pcg_relative_tolerance: f64,
    time_step_rule: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa_hat: Option<f64>,
    wall_time_seconds: f64,
}

#[derive(Debug, Serialize)]
struct SolveSummary {
    level: u32,
    alpha: f64,
    h: f64,
    time_steps: usize,
    iterations: usize,
    objective_value: f64,
    residual_history: Vec<f64>,
    errors: LevelErrors,
}

/// Runs a resolved configuration, prints a summary and returns the written
/// files.
pub fn main_dispatch(config: &RunConfig) -> Result<Vec<PathBuf>, Error> {
    let start = Instant::now();
    let problem = BenchmarkProblem::default();
    let mut written = Vec::new();
    let mut kappa_hat = None;
    let write = |name: &str, contents: &str, written: &mut Vec<PathBuf>| -> Result<(), Error> {
        let path = config.out.join(name);
        write_file(&path, contents)?;
        written.push(path);
        Ok(())
    };

    match config.command {
        Command::Solve => {
            let outcome = run_study(&problem, &study_config(config))?.remove(0);
            let summary = SolveSummary {
                level: outcome.level,
                alpha: outcome.alpha,
                h: outcome.h,
                time_steps: outcome.steps,
                iterations: outcome.iterations,
                objective_value: outcome.objective_value,
                residual_history: outcome.residual_history.clone(),
                errors: outcome.errors,
            };
            println!(
                "level {} alpha {} M {}: {} iterations, J = {}",
                summary.level, summary.alpha, summary.time_steps, summary.iterations, summary.objective_value
            );
            let e = &summary.errors;
            println!("  u - ubar     L1 {:.6e}  L2 {:.6e}  Linf {:.6e}", e.control.l1, e.control.l2, e.control.linf);
            println!("  y - ybar     L1 {:.6e}  L2 {:.6e}  Linf {:.6e}", e.state.l1, e.state.l2, e.state.linf);
            println!(
                "  pi y - ybar  L1 {:.6e}  L2 {:.6e}  Linf {:.6e}",
                e.projected_state.l1, e.projected_state.l2, e.projected_state.linf
            );
            println!("  p - pbar     L1 {:.6e}  L2 {:.6e}  Linf {:.6e}", e.adjoint.l1, e.adjoint.l2, e.adjoint.linf);
            write("summary.json", &to_json(&summary)?, &mut written)?;
            let traj = trajectory_csv(&outcome.control, &problem.ubar_profile(), TRAJECTORY_SAMPLES);
            write("trajectory.csv", &traj, &mut written)?;
        }
        Command::Study => {
            let outcomes = run_study(&problem, &study_config(config))?;
            let table = EocTable::from_outcomes(&outcomes);
            let md = table_to_markdown(&table);
            print!("{md}");
            write("eoc_table.csv", &table_to_csv(&table)?, &mut written)?;
            write("eoc_table.md", &md, &mut written)?;
            for o in &outcomes {
                let traj = trajectory_csv(&o.control, &problem.ubar_profile(), TRAJECTORY_SAMPLES);
                write(&format!("trajectory_level{}.csv", o.level), &traj, &mut written)?;
            }
        }
        Command::DiagnoseKappa => {
            let q = if config.analytic {
                analytic_bstar_pbar(&problem, KAPPA_SAMPLES)?
            } else {
                let level = config.levels[0];
                let space = FemSpace::new(build_uniform_mesh(level)?);
                let grid = build_time_grid(coupled_time_steps(level), problem.horizon)?;
                let data = problem.control_problem(&space)?;
                let alpha = config.alpha.unwrap_or_else(|| coupled_alpha(level));
                let options = FixedPointOptions { t0: config.t0, max_iter: config.max_iter };
                DiscreteProblem::new(&data, &space, &grid)
                    .fixed_point_solve(alpha, options)
                    .map_err(|e| Error::Level { level, source: Box::new(e) })?
                    .bstar_adjoint
            };
            let report = measure_diagnostic(&q, &default_alphas(), problem.bounds)?;
            let csv = kappa_csv(&report);
            print!("{csv}");
            println!("kappa_hat = {}", report.kappa_hat);
            write("kappa.csv", &csv, &mut written)?;
            kappa_hat = Some(report.kappa_hat);
        }
    }

    let grids = config
        .levels
        .iter()
        .map(|&l| level_meta(l, config.alpha))
        .collect::<Result<Vec<_>, _>>()?;
    let meta = Metadata {
        version: env!("CARGO_PKG_VERSION"),
        config,
        grids,
        fixed_point_t0: config.t0,
        fixed_point_max_iter: config.max_iter,
        pcg_relative_tolerance: PCG_TOLERANCE,
        time_step_rule: TIME_STEP_RULE,
        kappa_hat,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    write("metadata.json", &to_json(&meta)?, &mut written)?;
    Ok(written)
}

fn study_config(config: &RunConfig) -> StudyConfig {
    let mut s = StudyConfig::new(config.levels.iter().copied());
    s.alpha_override = config.alpha;
    s.t0 = config.t0;
    s.max_iter = config.max_iter;
    s.parallel = config.parallel_levels;
    s
}

fn kappa_csv(report: &KappaReport) -> String {
    let mut s = String::from("alpha,measure\n");
    for (a, m) in report.alphas.iter().zip(&report.measures) {
        let _ = writeln!(s, "{a},{m}");
    }
    s
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Error> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Data(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Parses, dispatches and reports; returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let result = parse_config(args).and_then(|config| main_dispatch(&config).map_err(CliError::from));
    match result {
        Ok(files) => {
            for f in files {
                eprintln!("wrote {}", f.display());
            }
            0
        }
        Err(CliError::Info(text)) => {
            print!("{text}");
            0
        }
        Err(CliError::Usage(text)) => {
            eprint!("{text}");
            EXIT_CONFIG
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
