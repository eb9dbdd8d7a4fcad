//! Seeded, box-bounded, derivative-free minimizers.
//!
//! All four share the same calling convention: an objective `Fn(&[f64]) -> f64`,
//! a [`Bounds`] box, algorithm parameters and a seed. Each returns a
//! [`RunResult`] with the best point found and a best-so-far trace holding the
//! initial best followed by one entry per iteration.

mod abc;
mod bga;
mod hgapso;
mod pso;
mod rng;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::Rng;

pub use abc::{fitness_transform, optimize_abc, selection_probabilities, AbcParams};
pub use bga::{optimize_bga, BgaParams, Chromosome, Codec};
pub use hgapso::{elite_count, optimize_hgapso, HgapsoParams};
pub use pso::{inertia_weight, optimize_pso, PsoParams, SwarmState};

use crate::error::{Error, Result};

/// Per-dimension search box `lower_j <= x_j <= upper_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::invalid("bounds", "need at least one dimension"));
        }
        if lower.len() != upper.len() {
            return Err(Error::invalid(
                "bounds",
                format!("{} lower vs {} upper values", lower.len(), upper.len()),
            ));
        }
        for (j, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::invalid("bounds", format!("dimension {j} is not finite")));
            }
            if lo > hi {
                return Err(Error::invalid(
                    "bounds",
                    format!("dimension {j}: lower {lo} > upper {hi}"),
                ));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval on every dimension.
    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, j: usize) -> f64 {
        self.upper[j] - self.lower[j]
    }

    /// `x_j = x_j^min + u (x_j^max − x_j^min)` for `u ∈ [0, 1]`.
    pub fn interpolate(&self, j: usize, u: f64) -> f64 {
        if u >= 1.0 {
            return self.upper[j];
        }
        self.lower[j] + u * self.width(j)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.dim())
            .map(|j| self.interpolate(j, rng.random::<f64>()))
            .collect()
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (j, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lower[j], self.upper[j]);
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .enumerate()
                .all(|(j, v)| (self.lower[j]..=self.upper[j]).contains(v))
    }
}

/// Outcome of one optimizer run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best_x: Vec<f64>,
    pub best_f: f64,
    /// Best-so-far objective: index 0 after initialization, then one entry
    /// per iteration.
    pub trace: Vec<f64>,
    pub evaluations: usize,
    /// Wall-clock duration of the whole run.
    pub wall_time: Duration,
    /// Cumulative wall-clock seconds at the end of each iteration.
    pub checkpoints: Vec<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Pso,
    Abc,
    Bga,
    Hgapso,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Pso, Algorithm::Abc, Algorithm::Bga, Algorithm::Hgapso];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Pso => "pso",
            Algorithm::Abc => "abc",
            Algorithm::Bga => "bga",
            Algorithm::Hgapso => "hgapso",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pso" => Ok(Algorithm::Pso),
            "abc" => Ok(Algorithm::Abc),
            "bga" => Ok(Algorithm::Bga),
            "hgapso" => Ok(Algorithm::Hgapso),
            other => Err(Error::invalid(
                "algorithm",
                format!("unknown algorithm `{other}` (expected pso, abc, bga or hgapso)"),
            )),
        }
    }
}

/// Parameters for any of the four algorithms.
#[derive(Debug, Clone, PartialEq)]
pub enum OptimizerParams {
    Pso(PsoParams),
    Abc(AbcParams),
    Bga(BgaParams),
    Hgapso(HgapsoParams),
}

impl OptimizerParams {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            OptimizerParams::Pso(_) => Algorithm::Pso,
            OptimizerParams::Abc(_) => Algorithm::Abc,
            OptimizerParams::Bga(_) => Algorithm::Bga,
            OptimizerParams::Hgapso(_) => Algorithm::Hgapso,
        }
    }

    pub fn iterations(&self) -> usize {
        match self {
            OptimizerParams::Pso(p) => p.iterations,
            OptimizerParams::Abc(p) => p.iterations,
            OptimizerParams::Bga(p) => p.iterations,
            OptimizerParams::Hgapso(p) => p.iterations,
        }
    }

    pub fn with_iterations(mut self, iterations: usize) -> Self {
        match &mut self {
            OptimizerParams::Pso(p) => p.iterations = iterations,
            OptimizerParams::Abc(p) => p.iterations = iterations,
            OptimizerParams::Bga(p) => p.iterations = iterations,
            OptimizerParams::Hgapso(p) => p.iterations = iterations,
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            OptimizerParams::Pso(p) => p.validate(),
            OptimizerParams::Abc(p) => p.validate(),
            OptimizerParams::Bga(p) => p.validate(),
            OptimizerParams::Hgapso(p) => p.validate(),
        }
    }
}

/// Runs whichever algorithm `params` selects.
pub fn optimize<F>(objective: F, bounds: &Bounds, params: &OptimizerParams, seed: u64) -> Result<RunResult>
where
    F: Fn(&[f64]) -> f64,
{
    match params {
        OptimizerParams::Pso(p) => optimize_pso(objective, bounds, p, seed),
        OptimizerParams::Abc(p) => optimize_abc(objective, bounds, p, seed),
        OptimizerParams::Bga(p) => optimize_bga(objective, bounds, p, seed),
        OptimizerParams::Hgapso(p) => optimize_hgapso(objective, bounds, p, seed),
    }
}

/// Objective wrapper that counts calls and rejects non-finite values.
struct Evaluator<F> {
    objective: F,
    count: usize,
}

impl<F: Fn(&[f64]) -> f64> Evaluator<F> {
    fn new(objective: F) -> Self {
        Self { objective, count: 0 }
    }

    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        self.count += 1;
        let value = (self.objective)(x);
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::NonFiniteObjective {
                point: x.to_vec(),
                value,
            })
        }
    }
}

/// Best-so-far bookkeeping shared by all algorithms.
struct Tracker {
    best_x: Vec<f64>,
    best_f: f64,
    trace: Vec<f64>,
    checkpoints: Vec<f64>,
    started: Instant,
}

impl Tracker {
    fn new(dim: usize, iterations: usize) -> Self {
        Self {
            best_x: vec![f64::NAN; dim],
            best_f: f64::INFINITY,
            trace: Vec::with_capacity(iterations + 1),
            checkpoints: Vec::with_capacity(iterations),
            started: Instant::now(),
        }
    }

    fn offer(&mut self, x: &[f64], f: f64) {
        if f < self.best_f {
            self.best_f = f;
            self.best_x.copy_from_slice(x);
        }
    }

    /// Records the initial best, before any iteration ran.
    fn record_initial(&mut self) {
        self.trace.push(self.best_f);
    }

    /// Records the best and the elapsed time after an iteration.
    fn record_iteration(&mut self) {
        self.trace.push(self.best_f);
        self.checkpoints.push(self.started.elapsed().as_secs_f64());
    }

    fn finish(self, evaluations: usize, seed: u64) -> RunResult {
        RunResult {
            best_x: self.best_x,
            best_f: self.best_f,
            trace: self.trace,
            evaluations,
            wall_time: self.started.elapsed(),
            checkpoints: self.checkpoints,
            seed,
        }
    }
}

fn rank_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    order
}
