//! The `shakebal` command line.
//!
//! Values come from built-in defaults, then the `--config` file, then flags.
//! Output directories are created as needed; existing output files are only
//! replaced with `--force`.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 run failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bench::{
    emit_convergence, emit_polar, emit_runtime_growth, read_solutions, run_plan, run_single, summarize, write_results,
    write_summary, write_table,
};
use crate::config::{with_constraint_bounds, AppConfig};
use crate::error::Error;
use crate::mechanism::DecisionVector;
use crate::objective::calibrate_bounds;
use crate::optimizers::Algorithm;

#[derive(Debug, Parser)]
#[command(
    name = "shakebal",
    version,
    about = "Counterweight balancing of a double crank-slider mechanism"
)]
pub struct Cli {
    /// Config file (`section.key = value` lines); built-in defaults when omitted
    #[arg(short, long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one optimization and write its convergence trace and polar profile
    Balance(BalanceArgs),
    /// Estimate moment constraint bounds by random search
    Calibrate(CalibrateArgs),
    /// Run the repeated multi-algorithm benchmark
    Bench(BenchArgs),
    /// Write polar force profiles for named solutions
    Profile(ProfileArgs),
}

#[derive(Debug, Args)]
pub struct BalanceArgs {
    /// Algorithm: pso, abc, bga or hgapso
    #[arg(long, default_value = "pso")]
    pub algo: Algorithm,
    /// Iterations [default: the algorithm's config value, 300 built in]
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output directory for convergence.csv and polar.csv
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Samples per revolution in polar.csv
    #[arg(long, default_value_t = 360)]
    pub samples: usize,
    /// Overwrite existing output files
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Random decision vectors to sample [default: objective.calibration_samples, 1000 built in]
    #[arg(long)]
    pub samples: Option<usize>,
    /// Fraction of the observed maxima [default: objective.calibration_fraction, 0.5 built in]
    #[arg(long)]
    pub fraction: Option<f64>,
    /// [default: objective.calibration_seed, 0 built in]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write a copy of the config with the new bounds to this file
    #[arg(long, value_name = "FILE")]
    pub write: Option<PathBuf>,
    /// Overwrite an existing --write file
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Output directory for results, summary, convergence and runtime CSVs
    #[arg(long, default_value = "bench-out")]
    pub out: PathBuf,
    /// Parallel runs [default: number of logical processors]
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Repeats per (algorithm, budget) [default: bench.repeats, 10 built in]
    #[arg(long)]
    pub repeats: Option<usize>,
    /// Seed of the first repeat [default: bench.base_seed, 1 built in]
    #[arg(long)]
    pub base_seed: Option<u64>,
    /// Overwrite existing output files
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    /// CSV with header `name,m1,m2,phi1,phi2`
    #[arg(long, value_name = "FILE")]
    pub solutions: PathBuf,
    /// Samples per revolution
    #[arg(long, default_value_t = 360)]
    pub samples: usize,
    /// Output directory for polar.csv
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Overwrite existing output files
    #[arg(long)]
    pub force: bool,
}

/// Why a command failed, deciding the exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(Error),
    Run(Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Run(_) => 2,
        }
    }

    fn error(&self) -> &Error {
        match self {
            Failure::Usage(e) | Failure::Run(e) => e,
        }
    }
}

fn usage(e: Error) -> Failure {
    Failure::Usage(e)
}

fn run_failure(e: Error) -> Failure {
    Failure::Run(e)
}

type CmdResult = std::result::Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    1
                }
            };
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.error());
            failure.exit_code()
        }
    }
}

fn load_config(path: Option<&Path>) -> std::result::Result<AppConfig, Failure> {
    match path {
        Some(p) => AppConfig::load(p).map_err(usage),
        None => Ok(AppConfig::default()),
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> CmdResult {
    let config = load_config(cli.config.as_deref())?;
    match &cli.command {
        Command::Balance(args) => cmd_balance(&config, args, out),
        Command::Calibrate(args) => cmd_calibrate(&config, cli.config.as_deref(), args, out),
        Command::Bench(args) => cmd_bench(&config, args, out),
        Command::Profile(args) => cmd_profile(&config, args, out),
    }
}

/// Creates `dir` and returns the output paths, refusing to clobber existing
/// files unless `force` is set.
fn prepare_outputs(dir: &Path, names: &[&str], force: bool) -> std::result::Result<Vec<PathBuf>, Failure> {
    std::fs::create_dir_all(dir).map_err(|e| usage(e.into()))?;
    let paths: Vec<PathBuf> = names.iter().map(|n| dir.join(n)).collect();
    check_overwrite(&paths, force)?;
    Ok(paths)
}

fn check_overwrite(paths: &[PathBuf], force: bool) -> CmdResult {
    if !force {
        if let Some(existing) = paths.iter().find(|p| p.exists()) {
            return Err(usage(Error::WouldOverwrite(existing.clone())));
        }
    }
    Ok(())
}

fn io(e: std::io::Error) -> Failure {
    run_failure(e.into())
}

pub fn cmd_balance(config: &AppConfig, args: &BalanceArgs, out: &mut dyn Write) -> CmdResult {
    let paths = prepare_outputs(&args.out, &["convergence.csv", "polar.csv"], args.force)?;
    if args.samples < 8 {
        return Err(usage(Error::invalid("--samples", "must be >= 8")));
    }
    let problem = config.problem().map_err(usage)?;
    let params = config.algorithms.params(args.algo);
    let iterations = args.iters.unwrap_or_else(|| params.iterations());
    params.clone().with_iterations(iterations).validate().map_err(usage)?;

    let record = run_single(&problem, &params, iterations, 1, args.seed);
    let (Some(solution), Some(wall)) = (record.row.solution, record.row.wall_time_s) else {
        return Err(run_failure(Error::invalid("run", record.row.status.clone())));
    };
    let unbalanced = problem.evaluate(&DecisionVector::ZERO);
    let spec = problem.spec();

    writeln!(out, "algorithm        {}", args.algo).map_err(io)?;
    writeln!(out, "seed             {}", args.seed).map_err(io)?;
    writeln!(out, "iterations       {iterations}").map_err(io)?;
    writeln!(out, "m1               {}", solution.m1).map_err(io)?;
    writeln!(out, "m2               {}", solution.m2).map_err(io)?;
    writeln!(out, "phi1_rad         {}", solution.phi1).map_err(io)?;
    writeln!(out, "phi2_rad         {}", solution.phi2).map_err(io)?;
    writeln!(out, "raw_cost         {}", solution.raw_cost).map_err(io)?;
    writeln!(out, "c1               {} (max {})", solution.c1, spec.c1_max).map_err(io)?;
    writeln!(out, "c2               {} (max {})", solution.c2, spec.c2_max).map_err(io)?;
    writeln!(out, "total_cost       {}", solution.total_cost).map_err(io)?;
    writeln!(out, "unbalanced_cost  {}", unbalanced.total).map_err(io)?;
    writeln!(out, "wall_time_s      {wall}").map_err(io)?;

    let balanced = solution.decision_vector().map_err(run_failure)?;
    emit_convergence(std::slice::from_ref(&record), &paths[0]).map_err(run_failure)?;
    emit_polar(
        problem.mechanism(),
        &DecisionVector::ZERO,
        &[(args.algo.to_string(), balanced)],
        args.samples,
        &paths[1],
    )
    .map_err(run_failure)?;
    Ok(())
}

pub fn cmd_calibrate(
    config: &AppConfig,
    config_path: Option<&Path>,
    args: &CalibrateArgs,
    out: &mut dyn Write,
) -> CmdResult {
    if let Some(target) = &args.write {
        check_overwrite(std::slice::from_ref(target), args.force)?;
    }
    let o = &config.objective;
    let bounds = config.objective_bounds().map_err(usage)?;
    let (c1, c2) = calibrate_bounds(
        &config.mechanism,
        &bounds,
        o.n_samples,
        args.samples.unwrap_or(o.calibration_samples),
        args.fraction.unwrap_or(o.calibration_fraction),
        args.seed.unwrap_or(o.calibration_seed),
    )
    .map_err(usage)?;
    if c1 <= 0.0 || c2 <= 0.0 {
        return Err(run_failure(Error::invalid(
            "calibration",
            "observed no shaking moment; the mechanism has no mass",
        )));
    }
    writeln!(out, "c1_max = {c1}").map_err(io)?;
    writeln!(out, "c2_max = {c2}").map_err(io)?;

    if let Some(target) = &args.write {
        let original = match config_path {
            Some(p) => std::fs::read_to_string(p).map_err(|e| usage(e.into()))?,
            None => String::new(),
        };
        if let Some(parent) = target.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(io)?;
        }
        std::fs::write(target, with_constraint_bounds(&original, c1, c2)).map_err(io)?;
    }
    Ok(())
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

pub fn cmd_bench(config: &AppConfig, args: &BenchArgs, out: &mut dyn Write) -> CmdResult {
    let paths = prepare_outputs(
        &args.out,
        &["results.csv", "summary.csv", "convergence.csv", "runtime.csv"],
        args.force,
    )?;
    let mut plan = config.plan().map_err(usage)?;
    if let Some(r) = args.repeats {
        plan.repeats = r;
    }
    if let Some(s) = args.base_seed {
        plan.base_seed = s;
    }
    plan.validate().map_err(usage)?;
    let jobs = args.jobs.unwrap_or_else(default_jobs).max(1);

    let records = run_plan(&plan, jobs).map_err(run_failure)?;
    let rows: Vec<_> = records.iter().map(|r| r.row.clone()).collect();
    let summary = summarize(&rows);

    write_results(&rows, &paths[0]).map_err(run_failure)?;
    write_summary(&summary, &paths[1]).map_err(run_failure)?;
    emit_convergence(&records, &paths[2]).map_err(run_failure)?;
    emit_runtime_growth(&records, &paths[3]).map_err(run_failure)?;
    write_table(&rows, &summary, &mut *out).map_err(run_failure)?;

    let failed = rows.iter().filter(|r| !r.is_ok()).count();
    if failed > 0 {
        return Err(run_failure(Error::invalid(
            "bench",
            format!("{failed} of {} runs failed; see results.csv", rows.len()),
        )));
    }
    Ok(())
}

pub fn cmd_profile(config: &AppConfig, args: &ProfileArgs, out: &mut dyn Write) -> CmdResult {
    let paths = prepare_outputs(&args.out, &["polar.csv"], args.force)?;
    let solutions = read_solutions(&args.solutions).map_err(usage)?;
    emit_polar(
        &config.mechanism,
        &DecisionVector::ZERO,
        &solutions,
        args.samples,
        &paths[0],
    )
    .map_err(usage)?;
    writeln!(
        out,
        "wrote {} ({} solutions, {} samples)",
        paths[0].display(),
        solutions.len(),
        args.samples
    )
    .map_err(io)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("shakebal").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn help_lists_flags_with_defaults() {
        let (code, out, _) = run_args(&["balance", "--help"]);
        assert_eq!(code, 0);
        for flag in ["--algo", "--iters", "--seed", "--out", "--force", "--config"] {
            assert!(out.contains(flag), "missing {flag} in\n{out}");
        }
        assert!(out.contains("[default: pso]"));
        for sub in ["calibrate", "bench", "profile"] {
            let (code, out, _) = run_args(&[sub, "--help"]);
            assert_eq!(code, 0);
            assert!(out.contains("default"), "{sub}: {out}");
        }
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_args(&["frobnicate"]).0, 1);
        assert_eq!(run_args(&["balance", "--algo", "de"]).0, 1);
        assert_eq!(run_args(&["--config", "/nonexistent/x.conf", "balance"]).0, 1);
    }

    #[test]
    fn bad_config_exit_one_with_location() {
        let dir = tempfile::tempdir().unwrap();
        let conf = dir.path().join("bad.conf");
        std::fs::write(&conf, "mechanism.L = -1\n").unwrap();
        let (code, _, err) = run_args(&["--config", conf.to_str().unwrap(), "calibrate"]);
        assert_eq!(code, 1);
        assert!(err.contains("bad.conf:1") && err.contains("mechanism.L"), "{err}");
    }

    #[test]
    fn refuses_to_overwrite_without_force() {
        let dir = tempfile::tempdir().unwrap();
        let outdir = dir.path().join("o");
        let args = ["balance", "--iters", "3", "--out", outdir.to_str().unwrap()];
        assert_eq!(run_args(&args).0, 0);
        let (code, _, err) = run_args(&args);
        assert_eq!(code, 1);
        assert!(err.contains("--force"));
        let mut forced = args.to_vec();
        forced.push("--force");
        assert_eq!(run_args(&forced).0, 0);
    }
}
