//! `section.key = value` configuration files.
//!
//! ```text
//! # lab rig
//! mechanism.omega = 62.83
//! mechanism.alpha = 180deg
//! objective.c1_max = auto
//! bench.algorithms = pso, abc
//! ```
//!
//! `#` starts a comment. Numbers may use scientific notation. Angle keys take
//! an optional `rad` or `deg` suffix (radians when bare). Unknown or repeated
//! keys are errors; missing keys keep their defaults.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use crate::bench::{AlgorithmSettings, ExperimentPlan};
use crate::error::{Error, Result};
use crate::mechanism::MechanismConfig;
use crate::objective::{
    calibrate_bounds, default_bounds, BalancingProblem, ObjectiveSpec, DEFAULT_PENALTY, DEFAULT_SAMPLES,
};
use crate::optimizers::{Algorithm, Bounds};

/// Objective settings as written in the file. Missing constraint bounds are
/// calibrated by random search when the problem is built.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveSection {
    pub n_samples: usize,
    /// `None` means calibrate.
    pub c1_max: Option<f64>,
    pub c2_max: Option<f64>,
    pub penalty_weight: f64,
    /// `[m1, m2, φ1, φ2]` overrides of the default box.
    pub lower: [Option<f64>; 4],
    pub upper: [Option<f64>; 4],
    pub calibration_samples: usize,
    pub calibration_fraction: f64,
    pub calibration_seed: u64,
}

impl Default for ObjectiveSection {
    fn default() -> Self {
        Self {
            n_samples: DEFAULT_SAMPLES,
            c1_max: None,
            c2_max: None,
            penalty_weight: DEFAULT_PENALTY,
            lower: [None; 4],
            upper: [None; 4],
            calibration_samples: 1000,
            calibration_fraction: 0.5,
            calibration_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSection {
    pub algorithms: Vec<Algorithm>,
    pub iteration_budgets: Vec<usize>,
    pub repeats: usize,
    pub base_seed: u64,
}

impl Default for BenchSection {
    fn default() -> Self {
        Self {
            algorithms: Algorithm::ALL.to_vec(),
            iteration_budgets: vec![200, 300],
            repeats: 10,
            base_seed: 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AppConfig {
    pub mechanism: MechanismConfig,
    pub objective: ObjectiveSection,
    pub algorithms: AlgorithmSettings,
    pub bench: BenchSection,
    /// Where each key was set, for error messages.
    source: Option<PathBuf>,
    lines: HashMap<String, usize>,
}

#[derive(Clone, Copy)]
enum Kind {
    Number,
    Angle,
    Count,
    Seed,
    /// Number or `auto`.
    AutoNumber,
    AlgorithmList,
    CountList,
}

const KEYS: &[(&str, Kind)] = &[
    ("mechanism.m_c", Kind::Number),
    ("mechanism.m_p", Kind::Number),
    ("mechanism.R", Kind::Number),
    ("mechanism.L", Kind::Number),
    ("mechanism.omega", Kind::Number),
    ("mechanism.m_0", Kind::Number),
    ("mechanism.R_0", Kind::Number),
    ("mechanism.alpha", Kind::Angle),
    ("mechanism.a_1", Kind::Number),
    ("mechanism.a_2", Kind::Number),
    ("mechanism.theta_0", Kind::Angle),
    ("mechanism.r_1", Kind::Number),
    ("mechanism.r_2", Kind::Number),
    ("objective.n_samples", Kind::Count),
    ("objective.c1_max", Kind::AutoNumber),
    ("objective.c2_max", Kind::AutoNumber),
    ("objective.penalty_weight", Kind::Number),
    ("objective.m1_min", Kind::Number),
    ("objective.m1_max", Kind::Number),
    ("objective.m2_min", Kind::Number),
    ("objective.m2_max", Kind::Number),
    ("objective.phi1_min", Kind::Angle),
    ("objective.phi1_max", Kind::Angle),
    ("objective.phi2_min", Kind::Angle),
    ("objective.phi2_max", Kind::Angle),
    ("objective.calibration_samples", Kind::Count),
    ("objective.calibration_fraction", Kind::Number),
    ("objective.calibration_seed", Kind::Seed),
    ("pso.population", Kind::Count),
    ("pso.iterations", Kind::Count),
    ("pso.c1", Kind::Number),
    ("pso.c2", Kind::Number),
    ("pso.w_max", Kind::Number),
    ("pso.w_min", Kind::Number),
    ("pso.v_max_fraction", Kind::Number),
    ("abc.food_sources", Kind::Count),
    ("abc.iterations", Kind::Count),
    ("abc.limit", Kind::Count),
    ("bga.population", Kind::Count),
    ("bga.iterations", Kind::Count),
    ("bga.bits_per_variable", Kind::Count),
    ("bga.crossover_points", Kind::Count),
    ("bga.crossover_prob", Kind::Number),
    ("bga.mutation_prob", Kind::AutoNumber),
    ("bga.elitism", Kind::Count),
    ("hgapso.population", Kind::Count),
    ("hgapso.iterations", Kind::Count),
    ("hgapso.breeding_ratio", Kind::Number),
    ("bench.algorithms", Kind::AlgorithmList),
    ("bench.iteration_budgets", Kind::CountList),
    ("bench.repeats", Kind::Count),
    ("bench.base_seed", Kind::Seed),
];

enum Value {
    Number(f64),
    Count(usize),
    Seed(u64),
    Auto,
    Algorithms(Vec<Algorithm>),
    Counts(Vec<usize>),
}

fn parse_number(text: &str) -> std::result::Result<f64, String> {
    text.parse::<f64>().map_err(|_| format!("`{text}` is not a number"))
}

fn parse_value(kind: Kind, text: &str) -> std::result::Result<Value, String> {
    match kind {
        Kind::Number => parse_number(text).map(Value::Number),
        Kind::Angle => {
            let (number, scale) = if let Some(v) = text.strip_suffix("deg") {
                (v, TAU / 360.0)
            } else if let Some(v) = text.strip_suffix("rad") {
                (v, 1.0)
            } else {
                (text, 1.0)
            };
            parse_number(number.trim()).map(|v| Value::Number(v * scale))
        }
        Kind::Count => text
            .parse::<usize>()
            .map(Value::Count)
            .map_err(|_| format!("`{text}` is not a non-negative integer")),
        Kind::Seed => text
            .parse::<u64>()
            .map(Value::Seed)
            .map_err(|_| format!("`{text}` is not a non-negative integer")),
        Kind::AutoNumber => {
            if text == "auto" {
                Ok(Value::Auto)
            } else {
                parse_number(text).map(Value::Number)
            }
        }
        Kind::AlgorithmList => text
            .split(',')
            .map(|s| s.parse::<Algorithm>().map_err(|e| e.to_string()))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Value::Algorithms),
        Kind::CountList => text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("`{}` is not a non-negative integer", s.trim()))
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Value::Counts),
    }
}

impl AppConfig {
    /// Reads and validates a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            file: path.to_path_buf(),
            line: 0,
            key: String::new(),
            message: format!("cannot read file: {e}"),
        })?;
        Self::parse(&text, path)
    }

    /// Parses config text; `path` only labels error messages.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut cfg = AppConfig {
            source: Some(path.to_path_buf()),
            ..AppConfig::default()
        };
        let config_error = |line: usize, key: &str, message: String| Error::Config {
            file: path.to_path_buf(),
            line,
            key: key.to_string(),
            message,
        };

        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(config_error(line, content, "expected `section.key = value`".into()));
            };
            let (key, value) = (key.trim(), value.trim());
            let Some(&(_, kind)) = KEYS.iter().find(|(k, _)| *k == key) else {
                return Err(config_error(line, key, "unknown key".into()));
            };
            if let Some(first) = cfg.lines.get(key) {
                return Err(config_error(line, key, format!("already set on line {first}")));
            }
            let parsed = parse_value(kind, value).map_err(|m| config_error(line, key, m))?;
            cfg.apply(key, parsed);
            cfg.lines.insert(key.to_string(), line);
        }

        cfg.validate()?;
        cfg.mechanism = cfg.mechanism.validated()?;
        Ok(cfg)
    }

    fn apply(&mut self, key: &str, value: Value) {
        let m = &mut self.mechanism;
        let o = &mut self.objective;
        let a = &mut self.algorithms;
        let b = &mut self.bench;
        match (key, value) {
            ("mechanism.m_c", Value::Number(v)) => m.crank_mass = v,
            ("mechanism.m_p", Value::Number(v)) => m.slider_mass = v,
            ("mechanism.R", Value::Number(v)) => m.crank_radius = v,
            ("mechanism.L", Value::Number(v)) => m.rod_length = v,
            ("mechanism.omega", Value::Number(v)) => m.omega = v,
            ("mechanism.m_0", Value::Number(v)) => m.unbalance_mass = v,
            ("mechanism.R_0", Value::Number(v)) => m.unbalance_radius = v,
            ("mechanism.alpha", Value::Number(v)) => m.unbalance_angle = v,
            ("mechanism.a_1", Value::Number(v)) => m.outer_spacing = v,
            ("mechanism.a_2", Value::Number(v)) => m.inner_spacing = v,
            ("mechanism.theta_0", Value::Number(v)) => m.phase = v,
            ("mechanism.r_1", Value::Number(v)) => m.counterweight_radius_1 = v,
            ("mechanism.r_2", Value::Number(v)) => m.counterweight_radius_2 = v,
            ("objective.n_samples", Value::Count(v)) => o.n_samples = v,
            ("objective.c1_max", Value::Number(v)) => o.c1_max = Some(v),
            ("objective.c1_max", Value::Auto) => o.c1_max = None,
            ("objective.c2_max", Value::Number(v)) => o.c2_max = Some(v),
            ("objective.c2_max", Value::Auto) => o.c2_max = None,
            ("objective.penalty_weight", Value::Number(v)) => o.penalty_weight = v,
            ("objective.m1_min", Value::Number(v)) => o.lower[0] = Some(v),
            ("objective.m2_min", Value::Number(v)) => o.lower[1] = Some(v),
            ("objective.phi1_min", Value::Number(v)) => o.lower[2] = Some(v),
            ("objective.phi2_min", Value::Number(v)) => o.lower[3] = Some(v),
            ("objective.m1_max", Value::Number(v)) => o.upper[0] = Some(v),
            ("objective.m2_max", Value::Number(v)) => o.upper[1] = Some(v),
            ("objective.phi1_max", Value::Number(v)) => o.upper[2] = Some(v),
            ("objective.phi2_max", Value::Number(v)) => o.upper[3] = Some(v),
            ("objective.calibration_samples", Value::Count(v)) => o.calibration_samples = v,
            ("objective.calibration_fraction", Value::Number(v)) => o.calibration_fraction = v,
            ("objective.calibration_seed", Value::Seed(v)) => o.calibration_seed = v,
            ("pso.population", Value::Count(v)) => a.pso.population = v,
            ("pso.iterations", Value::Count(v)) => a.pso.iterations = v,
            ("pso.c1", Value::Number(v)) => a.pso.c1 = v,
            ("pso.c2", Value::Number(v)) => a.pso.c2 = v,
            ("pso.w_max", Value::Number(v)) => a.pso.w_max = v,
            ("pso.w_min", Value::Number(v)) => a.pso.w_min = v,
            ("pso.v_max_fraction", Value::Number(v)) => a.pso.v_max_fraction = v,
            ("abc.food_sources", Value::Count(v)) => a.abc.food_sources = v,
            ("abc.iterations", Value::Count(v)) => a.abc.iterations = v,
            ("abc.limit", Value::Count(v)) => a.abc.limit = v,
            ("bga.population", Value::Count(v)) => a.bga.population = v,
            ("bga.iterations", Value::Count(v)) => a.bga.iterations = v,
            ("bga.bits_per_variable", Value::Count(v)) => {
                a.bga.bits_per_variable = u32::try_from(v).unwrap_or(u32::MAX)
            }
            ("bga.crossover_points", Value::Count(v)) => a.bga.crossover_points = v,
            ("bga.crossover_prob", Value::Number(v)) => a.bga.crossover_prob = v,
            ("bga.mutation_prob", Value::Number(v)) => a.bga.mutation_prob = Some(v),
            ("bga.mutation_prob", Value::Auto) => a.bga.mutation_prob = None,
            ("bga.elitism", Value::Count(v)) => a.bga.elitism = v,
            ("hgapso.population", Value::Count(v)) => a.hgapso.population = v,
            ("hgapso.iterations", Value::Count(v)) => a.hgapso.iterations = v,
            ("hgapso.breeding_ratio", Value::Number(v)) => a.hgapso.breeding_ratio = v,
            ("bench.algorithms", Value::Algorithms(v)) => b.algorithms = v,
            ("bench.iteration_budgets", Value::Counts(v)) => b.iteration_budgets = v,
            ("bench.repeats", Value::Count(v)) => b.repeats = v,
            ("bench.base_seed", Value::Seed(v)) => b.base_seed = v,
            _ => unreachable!("key table and apply() disagree on {key}"),
        }
    }

    /// Turns a parameter error into a config error pointing at the line
    /// that set the key (line 0 when the default was used).
    fn locate(&self, section: &str, err: Error) -> Error {
        match err {
            Error::InvalidParameter { name, reason } => {
                let key = if name.contains('.') {
                    name.to_string()
                } else {
                    format!("{section}.{name}")
                };
                Error::Config {
                    file: self.source.clone().unwrap_or_default(),
                    line: self.lines.get(&key).copied().unwrap_or(0),
                    key,
                    message: reason,
                }
            }
            other => other,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.mechanism.validate().map_err(|e| self.locate("mechanism", e))?;
        self.objective_bounds().map_err(|e| self.locate("objective", e))?;
        let o = &self.objective;
        let probe = ObjectiveSpec {
            n_samples: o.n_samples,
            c1_max: o.c1_max.unwrap_or(f64::INFINITY),
            c2_max: o.c2_max.unwrap_or(f64::INFINITY),
            penalty_weight: o.penalty_weight,
            bounds: self.objective_bounds()?,
        };
        probe.validate().map_err(|e| self.locate("objective", e))?;
        if o.calibration_samples == 0 {
            return Err(self.locate("objective", Error::invalid("calibration_samples", "must be >= 1")));
        }
        if !(o.calibration_fraction > 0.0 && o.calibration_fraction <= 1.0) {
            return Err(self.locate(
                "objective",
                Error::invalid("calibration_fraction", "must lie in (0, 1]"),
            ));
        }
        let a = &self.algorithms;
        a.pso.validate().map_err(|e| self.locate("pso", e))?;
        a.abc.validate().map_err(|e| self.locate("abc", e))?;
        a.bga.validate().map_err(|e| self.locate("bga", e))?;
        a.hgapso.validate().map_err(|e| self.locate("hgapso", e))?;
        let b = &self.bench;
        if b.algorithms.is_empty() {
            return Err(self.locate("bench", Error::invalid("algorithms", "must not be empty")));
        }
        if b.iteration_budgets.is_empty() || b.iteration_budgets.contains(&0) {
            return Err(self.locate(
                "bench",
                Error::invalid("iteration_budgets", "need at least one budget, all >= 1"),
            ));
        }
        if b.repeats == 0 {
            return Err(self.locate("bench", Error::invalid("repeats", "must be >= 1")));
        }
        Ok(())
    }

    pub fn objective_bounds(&self) -> Result<Bounds> {
        let defaults = default_bounds(&self.mechanism);
        let pick = |over: &[Option<f64>; 4], base: &[f64]| -> Vec<f64> {
            over.iter().zip(base).map(|(o, b)| o.unwrap_or(*b)).collect()
        };
        Bounds::new(
            pick(&self.objective.lower, defaults.lower()),
            pick(&self.objective.upper, defaults.upper()),
        )
    }

    /// Constraint bounds: the configured values, with missing ones found by
    /// random search over the decision box.
    pub fn constraint_bounds(&self) -> Result<(f64, f64)> {
        let o = &self.objective;
        if let (Some(c1), Some(c2)) = (o.c1_max, o.c2_max) {
            return Ok((c1, c2));
        }
        let (c1, c2) = calibrate_bounds(
            &self.mechanism,
            &self.objective_bounds()?,
            o.n_samples,
            o.calibration_samples,
            o.calibration_fraction,
            o.calibration_seed,
        )?;
        let resolved = (o.c1_max.unwrap_or(c1), o.c2_max.unwrap_or(c2));
        if resolved.0 <= 0.0 || resolved.1 <= 0.0 {
            return Err(Error::invalid(
                "objective.c1_max",
                "calibration found no shaking moment (massless mechanism?); set c1_max and c2_max explicitly",
            ));
        }
        Ok(resolved)
    }

    pub fn problem(&self) -> Result<BalancingProblem> {
        let (c1_max, c2_max) = self.constraint_bounds()?;
        let spec = ObjectiveSpec {
            n_samples: self.objective.n_samples,
            c1_max,
            c2_max,
            penalty_weight: self.objective.penalty_weight,
            bounds: self.objective_bounds()?,
        };
        BalancingProblem::new(self.mechanism, spec)
    }

    pub fn plan(&self) -> Result<ExperimentPlan> {
        Ok(ExperimentPlan {
            algorithms: self.bench.algorithms.clone(),
            iteration_budgets: self.bench.iteration_budgets.clone(),
            repeats: self.bench.repeats,
            base_seed: self.bench.base_seed,
            problem: self.problem()?,
            settings: self.algorithms.clone(),
        })
    }
}

/// Config text with `objective.c1_max` and `objective.c2_max` replaced by
/// the given values; other lines are kept verbatim.
pub fn with_constraint_bounds(text: &str, c1_max: f64, c2_max: f64) -> String {
    let mut out = String::new();
    for line in text.lines() {
        let key = line
            .split('#')
            .next()
            .unwrap_or("")
            .split('=')
            .next()
            .unwrap_or("")
            .trim();
        if key == "objective.c1_max" || key == "objective.c2_max" {
            continue;
        }
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(&format!("objective.c1_max = {c1_max}\nobjective.c2_max = {c2_max}\n"));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn parse(text: &str) -> Result<AppConfig> {
        AppConfig::parse(text, Path::new("test.conf"))
    }

    #[test]
    fn empty_file_is_defaults() {
        let cfg = parse("").unwrap();
        assert_eq!(cfg.mechanism, MechanismConfig::default().validated().unwrap());
        assert_eq!(cfg.objective, ObjectiveSection::default());
        assert_eq!(cfg.algorithms, AlgorithmSettings::default());
        assert_eq!(cfg.bench, BenchSection::default());
    }

    #[test]
    fn degrees_convert_to_radians() {
        let cfg = parse("mechanism.alpha = 180deg\nmechanism.theta_0 = 1.5rad\n").unwrap();
        assert!((cfg.mechanism.unbalance_angle - PI).abs() < 1e-15);
        assert_eq!(cfg.mechanism.phase, 1.5);
    }

    #[test]
    fn negative_length_names_key_and_line() {
        let err = parse("# comment\nmechanism.L = -1\n").unwrap_err();
        let msg = err.to_string();
        match err {
            Error::Config { line, key, .. } => {
                assert_eq!(line, 2);
                assert_eq!(key, "mechanism.L");
            }
            other => panic!("unexpected {other}"),
        }
        assert!(msg.contains("test.conf:2"), "{msg}");
        assert!(msg.contains("must be > 0"), "{msg}");
    }

    #[test]
    fn unknown_and_malformed_keys() {
        let err = parse("mechanism.zeta = 1").unwrap_err();
        assert!(err.to_string().contains("unknown key"));
        let err = parse("pso.c1 = fast").unwrap_err();
        assert!(err.to_string().contains("pso.c1"));
        let err = parse("pso.c1 = 1\npso.c1 = 2").unwrap_err();
        assert!(err.to_string().contains("already set"));
        let err = parse("mechanism.omega = 10deg").unwrap_err();
        assert!(err.to_string().contains("mechanism.omega"));
        assert!(parse("just some words").is_err());
    }

    #[test]
    fn full_example() {
        let text = "\
mechanism.m_c = 1.5e-1   # crank
mechanism.omega = 100
objective.c1_max = 2.5
objective.c2_max = auto
objective.phi1_max = 360deg
pso.population = 30
bga.mutation_prob = 0.01
bench.algorithms = pso, hgapso
bench.iteration_budgets = 50,100
bench.base_seed = 42
";
        let cfg = parse(text).unwrap();
        assert_eq!(cfg.mechanism.crank_mass, 0.15);
        assert_eq!(cfg.objective.c1_max, Some(2.5));
        assert_eq!(cfg.objective.c2_max, None);
        assert_eq!(cfg.algorithms.pso.population, 30);
        assert_eq!(cfg.algorithms.bga.mutation_prob, Some(0.01));
        assert_eq!(cfg.bench.algorithms, vec![Algorithm::Pso, Algorithm::Hgapso]);
        assert_eq!(cfg.bench.iteration_budgets, vec![50, 100]);
        assert_eq!(cfg.bench.base_seed, 42);
    }

    #[test]
    fn invariant_errors_in_algorithm_sections() {
        let err = parse("bga.population = 9").unwrap_err();
        match err {
            Error::Config { key, line, .. } => {
                assert_eq!(key, "bga.population");
                assert_eq!(line, 1);
            }
            other => panic!("unexpected {other}"),
        }
        assert!(parse("hgapso.breeding_ratio = 1.5").is_err());
        assert!(parse("objective.c1_max = 0").is_err());
        assert!(parse("objective.m1_min = 5\nobjective.m1_max = 1").is_err());
    }

    #[test]
    fn rewrite_keeps_other_lines() {
        let text = "mechanism.omega = 5\nobjective.c1_max = 1 # old\n";
        let out = with_constraint_bounds(text, 3.5, 4.25);
        assert_eq!(
            out,
            "mechanism.omega = 5\nobjective.c1_max = 3.5\nobjective.c2_max = 4.25\n"
        );
        let cfg = parse(&out).unwrap();
        assert_eq!(cfg.constraint_bounds().unwrap(), (3.5, 4.25));
    }

    #[test]
    fn auto_bounds_are_calibrated() {
        let cfg = parse("objective.calibration_samples = 50").unwrap();
        let (c1, c2) = cfg.constraint_bounds().unwrap();
        assert!(c1 > 0.0 && c2 > 0.0);
        assert_eq!(cfg.constraint_bounds().unwrap(), (c1, c2));
    }
}
