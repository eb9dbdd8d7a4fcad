//! Scalar balancing cost and moment constraints.
//!
//! The cost is the area enclosed by the polar curve `r(θ) = |P1(θ)| + |P2(θ)|`
//! over one crank revolution, `½∮r²dθ`. The constraint measures C1 and C2 are
//! the same polar area taken over `|P3|` and `|P4|`. Constraint violation is
//! handled with an exterior penalty on the violation relative to each bound.

use std::f64::consts::{PI, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mechanism::{series, DecisionVector, MechanismConfig};
use crate::optimizers::Bounds;
use crate::quadrature::PolarQuadrature;

pub const DEFAULT_SAMPLES: usize = 720;
pub const DEFAULT_PENALTY: f64 = 1e6;

/// Polar area `½·(2π/n)·Σ r_k²` of radii sampled on the uniform grid
/// `θ_k = 2πk/n` (periodic rectangle rule).
pub fn polar_area(radii: &[f64]) -> Result<f64> {
    if radii.is_empty() {
        return Err(Error::invalid("radii", "need at least one sample"));
    }
    let mut sum = 0.0;
    for (k, &r) in radii.iter().enumerate() {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::invalid(
                "radii",
                format!("sample {k} is {r}; radii must be finite and >= 0"),
            ));
        }
        sum += r * r;
    }
    Ok(0.5 * (TAU / radii.len() as f64) * sum)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveSpec {
    /// Grid resolution over one revolution.
    pub n_samples: usize,
    pub c1_max: f64,
    pub c2_max: f64,
    pub penalty_weight: f64,
    /// Box for `(m1, m2, φ1, φ2)`.
    pub bounds: Bounds,
}

impl ObjectiveSpec {
    /// Defaults for a mechanism: masses in `[0, 50·m_0]`, angles in
    /// `[0, 2π]`, and no moment constraint until bounds are calibrated.
    pub fn for_mechanism(cfg: &MechanismConfig) -> Self {
        Self {
            n_samples: DEFAULT_SAMPLES,
            c1_max: f64::INFINITY,
            c2_max: f64::INFINITY,
            penalty_weight: DEFAULT_PENALTY,
            bounds: default_bounds(cfg),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 8 {
            return Err(Error::invalid(
                "n_samples",
                format!("must be >= 8, got {}", self.n_samples),
            ));
        }
        for (name, v) in [("c1_max", self.c1_max), ("c2_max", self.c2_max)] {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::invalid(name, format!("must be > 0, got {v}")));
            }
        }
        if !self.penalty_weight.is_finite() || self.penalty_weight < 0.0 {
            return Err(Error::invalid(
                "penalty_weight",
                format!("must be finite and >= 0, got {}", self.penalty_weight),
            ));
        }
        if self.bounds.dim() != 4 {
            return Err(Error::invalid(
                "bounds",
                "need exactly 4 dimensions (m1, m2, phi1, phi2)",
            ));
        }
        if self.bounds.lower()[0] < 0.0 || self.bounds.lower()[1] < 0.0 {
            return Err(Error::invalid("bounds", "counterweight masses must be >= 0"));
        }
        Ok(())
    }
}

pub fn default_bounds(cfg: &MechanismConfig) -> Bounds {
    let m_max = 50.0 * cfg.unbalance_mass;
    Bounds::new(vec![0.0, 0.0, 0.0, 0.0], vec![m_max, m_max, TAU, TAU]).expect("default bounds are ordered")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    /// Polar area of `|P1| + |P2|`.
    pub raw_cost: f64,
    /// Polar area of `|P3|`.
    pub c1: f64,
    /// Polar area of `|P4|`.
    pub c2: f64,
    /// `max(0, c1 − c1_max)/c1_max + max(0, c2 − c2_max)/c2_max`.
    pub violation: f64,
    /// `raw_cost + penalty_weight · violation`.
    pub total: f64,
}

impl CostBreakdown {
    pub fn is_feasible(&self) -> bool {
        self.violation == 0.0
    }
}

fn relative_excess(value: f64, bound: f64) -> f64 {
    if value > bound {
        (value - bound) / bound
    } else {
        0.0
    }
}

/// A mechanism plus objective settings, with the quadrature tables built
/// once. This is what the optimizers minimize.
#[derive(Debug, Clone)]
pub struct BalancingProblem {
    cfg: MechanismConfig,
    spec: ObjectiveSpec,
    quadrature: PolarQuadrature,
}

impl BalancingProblem {
    pub fn new(cfg: MechanismConfig, spec: ObjectiveSpec) -> Result<Self> {
        let cfg = cfg.validated()?;
        spec.validate()?;
        let quadrature = PolarQuadrature::new(spec.n_samples);
        Ok(Self { cfg, spec, quadrature })
    }

    pub fn mechanism(&self) -> &MechanismConfig {
        &self.cfg
    }

    pub fn spec(&self) -> &ObjectiveSpec {
        &self.spec
    }

    pub fn bounds(&self) -> &Bounds {
        &self.spec.bounds
    }

    pub fn evaluate(&self, dv: &DecisionVector) -> CostBreakdown {
        let [fx, fy, mx, my] = series(&self.cfg, dv);
        let raw_cost = self.quadrature.polar_area(&[fx, fy]);
        let c1 = self.quadrature.polar_area(&[mx]);
        let c2 = self.quadrature.polar_area(&[my]);
        let violation = relative_excess(c1, self.spec.c1_max) + relative_excess(c2, self.spec.c2_max);
        CostBreakdown {
            raw_cost,
            c1,
            c2,
            violation,
            total: raw_cost + self.spec.penalty_weight * violation,
        }
    }

    /// Penalized cost of an optimizer point `[m1, m2, φ1, φ2]`; NaN for a
    /// point that is not a valid decision vector.
    pub fn cost(&self, point: &[f64]) -> f64 {
        match DecisionVector::from_point(point) {
            Ok(dv) => self.evaluate(&dv).total,
            Err(_) => f64::NAN,
        }
    }

    /// `(C1, C2)` only.
    pub fn moment_areas(&self, dv: &DecisionVector) -> (f64, f64) {
        let [_, _, mx, my] = series(&self.cfg, dv);
        (self.quadrature.polar_area(&[mx]), self.quadrature.polar_area(&[my]))
    }
}

/// One-off evaluation; builds the quadrature tables on every call.
pub fn evaluate(cfg: &MechanismConfig, dv: &DecisionVector, spec: &ObjectiveSpec) -> Result<CostBreakdown> {
    Ok(BalancingProblem::new(*cfg, spec.clone())?.evaluate(dv))
}

/// Constraint bounds from random search: samples `n_random` decision
/// vectors uniformly in `bounds` and returns `fraction` times the largest
/// observed C1 and C2.
///
/// A mechanism without any mass yields `(0, 0)`, which [`ObjectiveSpec`]
/// rejects.
pub fn calibrate_bounds(
    cfg: &MechanismConfig,
    bounds: &Bounds,
    n_samples: usize,
    n_random: usize,
    fraction: f64,
    seed: u64,
) -> Result<(f64, f64)> {
    if n_random == 0 {
        return Err(Error::invalid("n_random", "need at least one sample"));
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::invalid(
            "fraction",
            format!("must lie in (0, 1], got {fraction}"),
        ));
    }
    let spec = ObjectiveSpec {
        n_samples,
        bounds: bounds.clone(),
        ..ObjectiveSpec::for_mechanism(cfg)
    };
    let problem = BalancingProblem::new(*cfg, spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut c1_max, mut c2_max) = (0.0f64, 0.0f64);
    for _ in 0..n_random {
        let dv = DecisionVector::from_point(&bounds.sample(&mut rng))?;
        let (c1, c2) = problem.moment_areas(&dv);
        c1_max = c1_max.max(c1);
        c2_max = c2_max.max(c2);
    }
    Ok((fraction * c1_max, fraction * c2_max))
}

/// Counterweight that exactly cancels the unbalance mass on its own disk:
/// `m1 r1 = m0 R0` placed opposite it.
pub fn same_plane_cancellation(cfg: &MechanismConfig) -> DecisionVector {
    let m1 = cfg.unbalance_mass * cfg.unbalance_radius / cfg.counterweight_radius_1;
    DecisionVector::new(m1, 0.0, cfg.unbalance_angle + PI, 0.0).expect("finite non-negative mass")
}
