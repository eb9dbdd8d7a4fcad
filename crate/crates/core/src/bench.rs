//! Benchmark campaigns: every algorithm at every iteration budget, repeated
//! over consecutive seeds, with per-group average/best/worst statistics and
//! CSV outputs for convergence traces, runtime growth and polar profiles.
//!
//! All CSV files are UTF-8 with LF line endings. Floats are written in their
//! shortest round-trip decimal form.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mechanism::{force_x, force_y, uniform_grid, DecisionVector, MechanismConfig};
use crate::objective::BalancingProblem;
use crate::optimizers::{optimize, AbcParams, Algorithm, BgaParams, HgapsoParams, OptimizerParams, PsoParams};

pub const RESULTS_HEADER: [&str; 14] = [
    "algorithm",
    "budget",
    "experiment",
    "seed",
    "m1",
    "m2",
    "phi1",
    "phi2",
    "raw_cost",
    "c1",
    "c2",
    "total_cost",
    "wall_time_s",
    "status",
];
pub const SUMMARY_HEADER: [&str; 6] = ["algorithm", "budget", "metric", "average", "best", "worst"];

/// Hyperparameters for each algorithm; iteration counts are overridden by
/// the plan's budgets.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AlgorithmSettings {
    pub pso: PsoParams,
    pub abc: AbcParams,
    pub bga: BgaParams,
    pub hgapso: HgapsoParams,
}

impl AlgorithmSettings {
    pub fn params(&self, algorithm: Algorithm) -> OptimizerParams {
        match algorithm {
            Algorithm::Pso => OptimizerParams::Pso(self.pso.clone()),
            Algorithm::Abc => OptimizerParams::Abc(self.abc.clone()),
            Algorithm::Bga => OptimizerParams::Bga(self.bga.clone()),
            Algorithm::Hgapso => OptimizerParams::Hgapso(HgapsoParams {
                pso: self.pso.clone(),
                bga: self.bga.clone(),
                ..self.hgapso.clone()
            }),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub algorithms: Vec<Algorithm>,
    pub iteration_budgets: Vec<usize>,
    pub repeats: usize,
    pub base_seed: u64,
    pub problem: BalancingProblem,
    pub settings: AlgorithmSettings,
}

impl ExperimentPlan {
    pub fn new(problem: BalancingProblem) -> Self {
        Self {
            algorithms: Algorithm::ALL.to_vec(),
            iteration_budgets: vec![200, 300],
            repeats: 10,
            base_seed: 1,
            problem,
            settings: AlgorithmSettings::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::invalid("bench.algorithms", "need at least one algorithm"));
        }
        if self.iteration_budgets.is_empty() {
            return Err(Error::invalid("bench.iteration_budgets", "need at least one budget"));
        }
        if self.iteration_budgets.contains(&0) {
            return Err(Error::invalid("bench.iteration_budgets", "budgets must be >= 1"));
        }
        if self.repeats < 1 {
            return Err(Error::invalid("bench.repeats", "must be >= 1"));
        }
        for &algorithm in &self.algorithms {
            self.settings.params(algorithm).with_iterations(1).validate()?;
        }
        Ok(())
    }

    /// `(algorithm, budget, repeat)` in table order.
    fn tasks(&self) -> Vec<(Algorithm, usize, usize)> {
        let mut tasks = Vec::new();
        for &algorithm in &self.algorithms {
            for &budget in &self.iteration_budgets {
                for repeat in 0..self.repeats {
                    tasks.push((algorithm, budget, repeat));
                }
            }
        }
        tasks
    }
}

/// The decoded best point of a successful run and its cost terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solution {
    pub m1: f64,
    pub m2: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub raw_cost: f64,
    pub c1: f64,
    pub c2: f64,
    pub total_cost: f64,
}

impl Solution {
    pub fn decision_vector(&self) -> Result<DecisionVector> {
        DecisionVector::new(self.m1, self.m2, self.phi1, self.phi2)
    }
}

/// One line of `results.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub algorithm: Algorithm,
    pub budget: usize,
    /// 1-based experiment number within its group.
    pub experiment: usize,
    pub seed: u64,
    /// `None` for a failed run.
    pub solution: Option<Solution>,
    pub wall_time_s: Option<f64>,
    /// `ok`, or `failed: <reason>`.
    pub status: String,
}

impl ResultRow {
    pub fn is_ok(&self) -> bool {
        self.solution.is_some()
    }
}

/// A result row plus the per-iteration data that goes to the trace files.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub row: ResultRow,
    pub trace: Vec<f64>,
    /// Cumulative seconds after each iteration.
    pub checkpoints: Vec<f64>,
}

/// Runs one optimization of the plan's problem.
pub fn run_single(
    problem: &BalancingProblem,
    params: &OptimizerParams,
    budget: usize,
    experiment: usize,
    seed: u64,
) -> RunRecord {
    let algorithm = params.algorithm();
    let params = params.clone().with_iterations(budget);
    let outcome = optimize(|x: &[f64]| problem.cost(x), problem.bounds(), &params, seed).and_then(|run| {
        let dv = DecisionVector::from_point(&run.best_x)?;
        Ok((run, dv))
    });
    match outcome {
        Ok((run, dv)) => {
            let cost = problem.evaluate(&dv);
            RunRecord {
                row: ResultRow {
                    algorithm,
                    budget,
                    experiment,
                    seed,
                    solution: Some(Solution {
                        m1: dv.m1(),
                        m2: dv.m2(),
                        phi1: dv.phi1(),
                        phi2: dv.phi2(),
                        raw_cost: cost.raw_cost,
                        c1: cost.c1,
                        c2: cost.c2,
                        total_cost: cost.total,
                    }),
                    wall_time_s: Some(run.wall_time.as_secs_f64()),
                    status: "ok".to_string(),
                },
                trace: run.trace,
                checkpoints: run.checkpoints,
            }
        }
        Err(err) => RunRecord {
            row: ResultRow {
                algorithm,
                budget,
                experiment,
                seed,
                solution: None,
                wall_time_s: None,
                status: format!("failed: {err}"),
            },
            trace: Vec::new(),
            checkpoints: Vec::new(),
        },
    }
}

/// Runs every `(algorithm, budget, repeat)` of the plan on up to `jobs`
/// threads. Repeat `r` uses seed `base_seed + r`. Records come back in
/// table order whatever the completion order; failed runs are kept as rows.
pub fn run_plan(plan: &ExperimentPlan, jobs: usize) -> Result<Vec<RunRecord>> {
    plan.validate()?;
    let tasks = plan.tasks();
    let run = |&(algorithm, budget, repeat): &(Algorithm, usize, usize)| {
        run_single(
            &plan.problem,
            &plan.settings.params(algorithm),
            budget,
            repeat + 1,
            plan.base_seed.wrapping_add(repeat as u64),
        )
    };
    if jobs <= 1 {
        return Ok(tasks.iter().map(run).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::invalid("jobs", e.to_string()))?;
    Ok(pool.install(|| tasks.par_iter().map(run).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Metric {
    Cost,
    WallTime,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Cost => "cost",
            Metric::WallTime => "wall_time_s",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub average: f64,
    pub best: f64,
    pub worst: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let sum: f64 = values.iter().sum();
        Some(Self {
            average: sum / values.len() as f64,
            best: values.iter().copied().fold(f64::INFINITY, f64::min),
            worst: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algorithm: Algorithm,
    pub budget: usize,
    pub metric: Metric,
    pub stats: Stats,
}

/// Average, best (min) and worst (max) of total cost and wall time per
/// `(algorithm, budget)` group, over successful runs. Groups appear in the
/// order they first occur in `rows`.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut order: Vec<(Algorithm, usize)> = Vec::new();
    let mut groups: BTreeMap<(Algorithm, usize), (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for row in rows {
        let key = (row.algorithm, row.budget);
        if !groups.contains_key(&key) {
            order.push(key);
        }
        let entry = groups.entry(key).or_default();
        if let (Some(solution), Some(time)) = (row.solution, row.wall_time_s) {
            entry.0.push(solution.total_cost);
            entry.1.push(time);
        }
    }
    let mut summary = Vec::new();
    for key in order {
        let (costs, times) = &groups[&key];
        for (metric, values) in [(Metric::Cost, costs), (Metric::WallTime, times)] {
            if let Some(stats) = Stats::of(values) {
                summary.push(SummaryRow {
                    algorithm: key.0,
                    budget: key.1,
                    metric,
                    stats,
                });
            }
        }
    }
    summary
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?)
}

pub fn write_results(rows: &[ResultRow], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(RESULTS_HEADER)?;
    for row in rows {
        let mut record = vec![
            row.algorithm.to_string(),
            row.budget.to_string(),
            row.experiment.to_string(),
            row.seed.to_string(),
        ];
        match row.solution {
            Some(s) => record.extend([s.m1, s.m2, s.phi1, s.phi2, s.raw_cost, s.c1, s.c2, s.total_cost].map(fmt)),
            None => record.extend(std::iter::repeat_n(String::new(), 8)),
        }
        record.push(row.wall_time_s.map(fmt).unwrap_or_default());
        record.push(row.status.clone());
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

fn parse_error(path: &Path, line: u64, message: impl std::fmt::Display) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        message: format!("line {line}: {message}"),
    }
}

fn check_header(path: &Path, reader: &mut csv::Reader<File>, expected: &[&str]) -> Result<()> {
    let header = reader.headers()?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(parse_error(
            path,
            1,
            format!("expected header `{}`", expected.join(",")),
        ));
    }
    Ok(())
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    check_header(path, &mut reader, &RESULTS_HEADER)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or("");
        let num = |i: usize| -> Result<f64> {
            field(i)
                .parse::<f64>()
                .map_err(|e| parse_error(path, line, format!("{}: {e}", RESULTS_HEADER[i])))
        };
        let int = |i: usize| -> Result<u64> {
            field(i)
                .parse::<u64>()
                .map_err(|e| parse_error(path, line, format!("{}: {e}", RESULTS_HEADER[i])))
        };
        let status = field(13).to_string();
        let solution = if status == "ok" {
            Some(Solution {
                m1: num(4)?,
                m2: num(5)?,
                phi1: num(6)?,
                phi2: num(7)?,
                raw_cost: num(8)?,
                c1: num(9)?,
                c2: num(10)?,
                total_cost: num(11)?,
            })
        } else {
            None
        };
        rows.push(ResultRow {
            algorithm: field(0).parse().map_err(|e| parse_error(path, line, e))?,
            budget: int(1)? as usize,
            experiment: int(2)? as usize,
            seed: int(3)?,
            solution,
            wall_time_s: if field(12).is_empty() { None } else { Some(num(12)?) },
            status,
        });
    }
    Ok(rows)
}

pub fn write_summary(summary: &[SummaryRow], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(SUMMARY_HEADER)?;
    for row in summary {
        w.write_record([
            row.algorithm.to_string(),
            row.budget.to_string(),
            row.metric.name().to_string(),
            fmt(row.stats.average),
            fmt(row.stats.best),
            fmt(row.stats.worst),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `algorithm,seed,iteration,best_cost`, iteration 0 being the initial best.
pub fn emit_convergence(records: &[RunRecord], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["algorithm", "seed", "iteration", "best_cost"])?;
    for record in records {
        for (iteration, best) in record.trace.iter().enumerate() {
            w.write_record([
                record.row.algorithm.to_string(),
                record.row.seed.to_string(),
                iteration.to_string(),
                fmt(*best),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `algorithm,seed,iteration,cumulative_seconds`, one row per completed
/// iteration (1-based). A successful run without timing checkpoints is an
/// error; nothing is made up for it.
pub fn emit_runtime_growth(records: &[RunRecord], path: &Path) -> Result<()> {
    for record in records {
        if record.row.is_ok() && record.checkpoints.len() != record.row.budget {
            return Err(Error::MissingTiming {
                algorithm: record.row.algorithm.to_string(),
                seed: record.row.seed,
            });
        }
    }
    let mut w = writer(path)?;
    w.write_record(["algorithm", "seed", "iteration", "cumulative_seconds"])?;
    for record in records {
        for (k, seconds) in record.checkpoints.iter().enumerate() {
            w.write_record([
                record.row.algorithm.to_string(),
                record.row.seed.to_string(),
                (k + 1).to_string(),
                fmt(*seconds),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Radial force curve `|P1(θ)| + |P2(θ)|` on the uniform grid.
pub fn force_radii(cfg: &MechanismConfig, dv: &DecisionVector, n_samples: usize) -> Vec<f64> {
    uniform_grid(n_samples)
        .map(|t| force_x(cfg, dv, t).abs() + force_y(cfg, dv, t).abs())
        .collect()
}

/// `theta_rad,r_unbalanced,r_<name>...`: one column per supplied solution.
pub fn emit_polar(
    cfg: &MechanismConfig,
    unbalanced: &DecisionVector,
    balanced: &[(String, DecisionVector)],
    n_samples: usize,
    path: &Path,
) -> Result<()> {
    if n_samples < 8 {
        return Err(Error::invalid("n_samples", format!("must be >= 8, got {n_samples}")));
    }
    let mut columns = vec![force_radii(cfg, unbalanced, n_samples)];
    for (_, dv) in balanced {
        columns.push(force_radii(cfg, dv, n_samples));
    }
    let mut w = writer(path)?;
    let mut header = vec!["theta_rad".to_string(), "r_unbalanced".to_string()];
    header.extend(balanced.iter().map(|(name, _)| format!("r_{name}")));
    w.write_record(&header)?;
    for (k, theta) in uniform_grid(n_samples).enumerate() {
        let mut record = vec![fmt(theta)];
        record.extend(columns.iter().map(|c| fmt(c[k])));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `name,m1,m2,phi1,phi2` rows describing named solutions.
pub fn read_solutions(path: &Path) -> Result<Vec<(String, DecisionVector)>> {
    const HEADER: [&str; 5] = ["name", "m1", "m2", "phi1", "phi2"];
    let mut reader = csv::Reader::from_path(path)?;
    check_header(path, &mut reader, &HEADER)?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let name = record.get(0).unwrap_or("").trim().to_string();
        if name.is_empty() {
            return Err(parse_error(path, line, "empty solution name"));
        }
        let mut values = [0.0; 4];
        for (i, v) in values.iter_mut().enumerate() {
            let text = record.get(i + 1).unwrap_or("").trim();
            *v = text
                .parse()
                .map_err(|e| parse_error(path, line, format!("{}: {e}", HEADER[i + 1])))?;
        }
        let dv = DecisionVector::from_point(&values).map_err(|e| parse_error(path, line, e))?;
        out.push((name, dv));
    }
    Ok(out)
}

/// Writes a text report in the layout of a per-group result table.
pub fn write_table<W: Write>(rows: &[ResultRow], summary: &[SummaryRow], mut out: W) -> Result<()> {
    for key in summary
        .iter()
        .filter(|s| s.metric == Metric::Cost)
        .map(|s| (s.algorithm, s.budget))
    {
        writeln!(out, "{} / {} iterations", key.0, key.1)?;
        writeln!(
            out,
            "{:>10} {:>12} {:>12} {:>10} {:>10} {:>16} {:>10}",
            "experiment", "m1", "m2", "phi1", "phi2", "cost", "time_s"
        )?;
        for row in rows.iter().filter(|r| (r.algorithm, r.budget) == key) {
            match (row.solution, row.wall_time_s) {
                (Some(s), Some(t)) => writeln!(
                    out,
                    "{:>10} {:>12.6} {:>12.6} {:>10.6} {:>10.6} {:>16.6} {:>10.4}",
                    format!("#{}", row.experiment),
                    s.m1,
                    s.m2,
                    s.phi1,
                    s.phi2,
                    s.total_cost,
                    t
                )?,
                _ => writeln!(out, "{:>10} {}", format!("#{}", row.experiment), row.status)?,
            }
        }
        for s in summary.iter().filter(|s| (s.algorithm, s.budget) == key) {
            let label = s.metric.name();
            writeln!(
                out,
                "  {label:<12} average {:.6}  best {:.6}  worst {:.6}",
                s.stats.average, s.stats.best, s.stats.worst
            )?;
        }
        writeln!(out)?;
    }
    Ok(())
}
