use super::bga::{breed, Codec};
use super::rng::{stream, Phase};
use super::{inertia_weight, rank_order, BgaParams, Bounds, Evaluator, PsoParams, RunResult, SwarmState, Tracker};
use crate::error::{Error, Result};

/// Hybrid GA/PSO ("breeding swarm") settings. The embedded PSO and BGA
/// parameters supply the operator settings; their own population and
/// iteration counts are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct HgapsoParams {
    pub population: usize,
    pub iterations: usize,
    /// Fraction of the ranked population enhanced by a PSO step.
    pub breeding_ratio: f64,
    pub pso: PsoParams,
    pub bga: BgaParams,
}

impl Default for HgapsoParams {
    fn default() -> Self {
        Self {
            population: 50,
            iterations: 300,
            breeding_ratio: 0.5,
            pso: PsoParams::default(),
            bga: BgaParams::default(),
        }
    }
}

impl HgapsoParams {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::invalid("hgapso.population", "must be >= 2"));
        }
        if self.iterations < 1 {
            return Err(Error::invalid("hgapso.iterations", "must be >= 1"));
        }
        if !(self.breeding_ratio > 0.0 && self.breeding_ratio <= 1.0) {
            return Err(Error::invalid(
                "hgapso.breeding_ratio",
                format!("must lie in (0, 1], got {}", self.breeding_ratio),
            ));
        }
        self.pso.validate_motion()?;
        self.bga.validate_operators()
    }
}

/// Number of elites `⌈ratio · population⌉`, at least one.
pub fn elite_count(population: usize, breeding_ratio: f64) -> usize {
    ((breeding_ratio * population as f64).ceil() as usize).clamp(1, population)
}

/// One generation: rank the population; the top `⌈φ·N⌉` individuals take a
/// PSO step (persistent velocity and personal best, swarm best = best point
/// found so far) and survive; the other slots are refilled with GA offspring
/// bred from the whole pre-step population through the binary encoding.
///
/// Elites move in index order and GA variation has its own random stream,
/// so with `breeding_ratio = 1` the run reproduces [`super::optimize_pso`]
/// exactly for the same seed and PSO settings.
///
/// Evaluations: `population · (iterations + 1)`.
pub fn optimize_hgapso<F>(objective: F, bounds: &Bounds, params: &HgapsoParams, seed: u64) -> Result<RunResult>
where
    F: Fn(&[f64]) -> f64,
{
    params.validate()?;
    let codec = Codec::new(bounds.clone(), params.bga.bits_per_variable);
    let rate = params.bga.mutation_rate(bounds.dim());
    let n = params.population;
    let n_elite = elite_count(n, params.breeding_ratio);

    let mut eval = Evaluator::new(objective);
    let mut tracker = Tracker::new(bounds.dim(), params.iterations);
    let mut init_rng = stream(seed, Phase::Init);
    let mut motion_rng = stream(seed, Phase::Motion);
    let mut breed_rng = stream(seed, Phase::Breeding);

    let mut swarm = SwarmState::random(n, bounds, params.pso.v_max_fraction, &mut init_rng);
    for i in 0..n {
        let value = eval.eval(&swarm.positions[i])?;
        swarm.record_value(i, value);
        tracker.offer(&swarm.positions[i], value);
    }
    swarm.refresh_gbest();
    tracker.record_initial();

    for generation in 0..params.iterations {
        let w = inertia_weight(params.pso.w_max, params.pso.w_min, params.iterations, generation);
        swarm.inertia = w;

        let order = rank_order(&swarm.values);
        let mut elites = order[..n_elite].to_vec();
        let mut others = order[n_elite..].to_vec();
        elites.sort_unstable();
        others.sort_unstable();

        let offspring = if others.is_empty() {
            Vec::new()
        } else {
            let encoded: Vec<_> = swarm.positions.iter().map(|x| codec.encode(x)).collect();
            breed(&encoded, &swarm.values, others.len(), &params.bga, rate, &mut breed_rng)
        };

        for &i in &elites {
            swarm.move_particle(i, w, &params.pso, bounds, &mut motion_rng);
        }
        for &i in &elites {
            let value = eval.eval(&swarm.positions[i])?;
            swarm.record_value(i, value);
            tracker.offer(&swarm.positions[i], value);
        }
        for (&slot, child) in others.iter().zip(&offspring) {
            let x = codec.decode(child);
            let value = eval.eval(&x)?;
            tracker.offer(&x, value);
            swarm.reset_particle(slot, x, value);
        }
        swarm.refresh_gbest();
        swarm.iteration = generation + 1;
        tracker.record_iteration();
    }

    Ok(tracker.finish(eval.count, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizers::optimize_pso;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    #[test]
    fn elite_counts() {
        assert_eq!(elite_count(2, 0.5), 1);
        assert_eq!(elite_count(50, 0.5), 25);
        assert_eq!(elite_count(5, 0.5), 3);
        assert_eq!(elite_count(10, 1.0), 10);
        assert_eq!(elite_count(10, 0.01), 1);
    }

    #[test]
    fn full_breeding_ratio_is_pso() {
        let bounds = Bounds::uniform(4, -5.12, 5.12).unwrap();
        let pso = PsoParams {
            population: 20,
            iterations: 40,
            ..PsoParams::default()
        };
        let hybrid = HgapsoParams {
            population: 20,
            iterations: 40,
            breeding_ratio: 1.0,
            pso: pso.clone(),
            bga: BgaParams::default(),
        };
        let a = optimize_pso(sphere, &bounds, &pso, 17).unwrap();
        let b = optimize_hgapso(sphere, &bounds, &hybrid, 17).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.best_x, b.best_x);
        assert_eq!(a.evaluations, b.evaluations);
    }

    #[test]
    fn two_individuals_split_one_and_one() {
        let bounds = Bounds::uniform(2, -1.0, 1.0).unwrap();
        let params = HgapsoParams {
            population: 2,
            iterations: 10,
            breeding_ratio: 0.5,
            ..HgapsoParams::default()
        };
        let r = optimize_hgapso(sphere, &bounds, &params, 3).unwrap();
        assert_eq!(r.evaluations, 2 * 11);
    }

    #[test]
    fn rejects_zero_ratio() {
        let bounds = Bounds::uniform(2, -1.0, 1.0).unwrap();
        let params = HgapsoParams {
            breeding_ratio: 0.0,
            ..HgapsoParams::default()
        };
        assert!(optimize_hgapso(sphere, &bounds, &params, 3).is_err());
    }
}
