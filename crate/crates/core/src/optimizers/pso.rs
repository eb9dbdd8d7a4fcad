use rand::Rng;

use super::rng::{stream, Phase};
use super::{Bounds, Evaluator, RunResult, Tracker};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PsoParams {
    pub population: usize,
    pub iterations: usize,
    /// Cognitive acceleration, pulls towards the particle's own best.
    pub c1: f64,
    /// Social acceleration, pulls towards the swarm best.
    pub c2: f64,
    pub w_max: f64,
    pub w_min: f64,
    /// Velocity limit per dimension as a fraction of the box width.
    pub v_max_fraction: f64,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self {
            population: 50,
            iterations: 300,
            c1: 0.25,
            c2: 0.15,
            w_max: 0.9,
            w_min: 0.4,
            v_max_fraction: 0.5,
        }
    }
}

impl PsoParams {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::invalid("pso.population", "must be >= 2"));
        }
        if self.iterations < 1 {
            return Err(Error::invalid("pso.iterations", "must be >= 1"));
        }
        self.validate_motion()
    }

    /// Checks only the coefficients of the update rule.
    pub(crate) fn validate_motion(&self) -> Result<()> {
        for (name, v) in [
            ("pso.c1", self.c1),
            ("pso.c2", self.c2),
            ("pso.w_max", self.w_max),
            ("pso.w_min", self.w_min),
            ("pso.v_max_fraction", self.v_max_fraction),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        if self.w_max < self.w_min {
            return Err(Error::invalid(
                "pso.w_max",
                format!("w_max {} < w_min {}", self.w_max, self.w_min),
            ));
        }
        if self.v_max_fraction == 0.0 {
            return Err(Error::invalid("pso.v_max_fraction", "must be > 0"));
        }
        Ok(())
    }
}

/// Linearly decreasing inertia weight,
/// `w = w_max − ((w_max − w_min) / iter_max) · iter`.
pub fn inertia_weight(w_max: f64, w_min: f64, iter_max: usize, iter: usize) -> f64 {
    if iter >= iter_max {
        return w_min;
    }
    w_max - ((w_max - w_min) / iter_max as f64) * iter as f64
}

/// Positions, velocities and memories of a particle swarm.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    pub positions: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub pbest: Vec<Vec<f64>>,
    pub pbest_values: Vec<f64>,
    pub gbest: Vec<f64>,
    pub gbest_value: f64,
    /// Iterations completed so far.
    pub iteration: usize,
    /// Inertia weight used by the most recent move.
    pub inertia: f64,
}

impl SwarmState {
    /// Swarm at the given positions and velocities; nothing evaluated yet.
    pub fn from_parts(positions: Vec<Vec<f64>>, velocities: Vec<Vec<f64>>) -> Self {
        let n = positions.len();
        let dim = positions.first().map_or(0, Vec::len);
        Self {
            pbest: positions.clone(),
            positions,
            velocities,
            values: vec![f64::INFINITY; n],
            pbest_values: vec![f64::INFINITY; n],
            gbest: vec![f64::NAN; dim],
            gbest_value: f64::INFINITY,
            iteration: 0,
            inertia: f64::NAN,
        }
    }

    /// Uniform random positions in the box and uniform random velocities
    /// within the velocity limit.
    pub fn random<R: Rng + ?Sized>(n: usize, bounds: &Bounds, v_max_fraction: f64, rng: &mut R) -> Self {
        let positions: Vec<Vec<f64>> = (0..n).map(|_| bounds.sample(rng)).collect();
        let velocities = (0..n)
            .map(|_| {
                (0..bounds.dim())
                    .map(|j| {
                        let vmax = v_max_fraction * bounds.width(j);
                        vmax * (2.0 * rng.random::<f64>() - 1.0)
                    })
                    .collect()
            })
            .collect();
        Self::from_parts(positions, velocities)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Applies the velocity and position updates to particle `i`:
    ///
    /// `v ← w v + c1 r1 (pbest − x) + c2 r2 (gbest − x)`, then `x ← x + v`,
    /// with fresh `r1, r2 ~ U(0,1)` per dimension. Velocities are clamped to
    /// `±v_max_fraction · width` and positions to the box.
    pub fn move_particle<R: Rng + ?Sized>(
        &mut self,
        i: usize,
        w: f64,
        params: &PsoParams,
        bounds: &Bounds,
        rng: &mut R,
    ) {
        for j in 0..bounds.dim() {
            let r1: f64 = rng.random();
            let r2: f64 = rng.random();
            let x = self.positions[i][j];
            let vmax = params.v_max_fraction * bounds.width(j);
            let v = w * self.velocities[i][j]
                + params.c1 * r1 * (self.pbest[i][j] - x)
                + params.c2 * r2 * (self.gbest[j] - x);
            let v = v.clamp(-vmax, vmax);
            self.velocities[i][j] = v;
            self.positions[i][j] = (x + v).clamp(bounds.lower()[j], bounds.upper()[j]);
        }
    }

    /// Stores the value of particle `i`'s current position and updates its
    /// personal best. The swarm best is updated separately by
    /// [`SwarmState::refresh_gbest`].
    pub fn record_value(&mut self, i: usize, value: f64) {
        self.values[i] = value;
        if value < self.pbest_values[i] {
            self.pbest_values[i] = value;
            self.pbest[i].clone_from(&self.positions[i]);
        }
    }

    /// Replaces particle `i` with a fresh individual at `position`, zero
    /// velocity and no memory beyond its own value.
    pub fn reset_particle(&mut self, i: usize, position: Vec<f64>, value: f64) {
        self.velocities[i].iter_mut().for_each(|v| *v = 0.0);
        self.pbest[i].clone_from(&position);
        self.pbest_values[i] = value;
        self.positions[i] = position;
        self.values[i] = value;
    }

    pub fn refresh_gbest(&mut self) {
        for i in 0..self.len() {
            if self.pbest_values[i] < self.gbest_value {
                self.gbest_value = self.pbest_values[i];
                self.gbest.clone_from(&self.pbest[i]);
            }
        }
    }
}

/// Global-best particle swarm optimization with linearly decreasing inertia.
///
/// The swarm best is updated synchronously once every particle has moved
/// and been evaluated. Evaluations: `population · (iterations + 1)`.
pub fn optimize_pso<F>(objective: F, bounds: &Bounds, params: &PsoParams, seed: u64) -> Result<RunResult>
where
    F: Fn(&[f64]) -> f64,
{
    params.validate()?;
    let mut eval = Evaluator::new(objective);
    let mut tracker = Tracker::new(bounds.dim(), params.iterations);

    let mut init_rng = stream(seed, Phase::Init);
    let mut motion_rng = stream(seed, Phase::Motion);

    let mut swarm = SwarmState::random(params.population, bounds, params.v_max_fraction, &mut init_rng);
    for i in 0..swarm.len() {
        let value = eval.eval(&swarm.positions[i])?;
        swarm.record_value(i, value);
        tracker.offer(&swarm.positions[i], value);
    }
    swarm.refresh_gbest();
    tracker.record_initial();

    for iter in 0..params.iterations {
        let w = inertia_weight(params.w_max, params.w_min, params.iterations, iter);
        swarm.inertia = w;
        for i in 0..swarm.len() {
            swarm.move_particle(i, w, params, bounds, &mut motion_rng);
        }
        for i in 0..swarm.len() {
            let value = eval.eval(&swarm.positions[i])?;
            swarm.record_value(i, value);
            tracker.offer(&swarm.positions[i], value);
        }
        swarm.refresh_gbest();
        swarm.iteration = iter + 1;
        tracker.record_iteration();
    }

    Ok(tracker.finish(eval.count, seed))
}
