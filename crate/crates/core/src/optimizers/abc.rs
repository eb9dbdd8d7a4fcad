use rand::Rng;

use super::rng::{stream, Phase};
use super::{Bounds, Evaluator, RunResult, Tracker};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct AbcParams {
    /// Number of food sources, equal to the number of employed bees and of
    /// onlookers; the colony holds twice as many bees.
    pub food_sources: usize,
    pub iterations: usize,
    /// Failed improvement trials after which a source is abandoned.
    pub limit: usize,
}

impl Default for AbcParams {
    fn default() -> Self {
        Self {
            food_sources: 25,
            iterations: 300,
            limit: 100,
        }
    }
}

impl AbcParams {
    pub fn validate(&self) -> Result<()> {
        if self.food_sources < 2 {
            return Err(Error::invalid("abc.food_sources", "must be >= 2"));
        }
        if self.iterations < 1 {
            return Err(Error::invalid("abc.iterations", "must be >= 1"));
        }
        if self.limit < 1 {
            return Err(Error::invalid("abc.limit", "must be >= 1"));
        }
        Ok(())
    }
}

/// Positive fitness of a cost value: `1/(1+f)` for `f >= 0`, else `1+|f|`.
pub fn fitness_transform(cost: f64) -> f64 {
    if cost >= 0.0 {
        1.0 / (1.0 + cost)
    } else {
        1.0 + cost.abs()
    }
}

/// Onlooker selection probabilities `P_i = fit_i / Σ fit`.
pub fn selection_probabilities(costs: &[f64]) -> Vec<f64> {
    let fit: Vec<f64> = costs.iter().copied().map(fitness_transform).collect();
    normalize(fit)
}

fn normalize(weights: Vec<f64>) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

fn roulette<R: Rng + ?Sized>(probabilities: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probabilities.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probabilities.len() - 1
}

struct Colony {
    sources: Vec<Vec<f64>>,
    costs: Vec<f64>,
    trials: Vec<usize>,
}

impl Colony {
    /// `v_ij = x_ij + φ (x_ij − x_kj)` on one random dimension `j` with a
    /// random partner `k ≠ i` and `φ ~ U(−1, 1)`, followed by greedy
    /// replacement.
    fn explore<F, R>(
        &mut self,
        i: usize,
        bounds: &Bounds,
        eval: &mut Evaluator<F>,
        tracker: &mut Tracker,
        rng: &mut R,
    ) -> Result<()>
    where
        F: Fn(&[f64]) -> f64,
        R: Rng + ?Sized,
    {
        let n = self.sources.len();
        let mut k = rng.random_range(0..n - 1);
        if k >= i {
            k += 1;
        }
        let j = rng.random_range(0..bounds.dim());
        let phi: f64 = rng.random_range(-1.0..=1.0);

        let mut candidate = self.sources[i].clone();
        let xij = candidate[j];
        candidate[j] = (xij + phi * (xij - self.sources[k][j])).clamp(bounds.lower()[j], bounds.upper()[j]);

        let cost = eval.eval(&candidate)?;
        tracker.offer(&candidate, cost);
        if cost < self.costs[i] {
            self.sources[i] = candidate;
            self.costs[i] = cost;
            self.trials[i] = 0;
        } else {
            self.trials[i] += 1;
        }
        Ok(())
    }
}

/// Artificial bee colony: employed, onlooker and scout phases per cycle.
///
/// Evaluations: `SN` for the initial sources, `2·SN` per cycle, plus one per
/// scout replacement.
pub fn optimize_abc<F>(objective: F, bounds: &Bounds, params: &AbcParams, seed: u64) -> Result<RunResult>
where
    F: Fn(&[f64]) -> f64,
{
    params.validate()?;
    let mut eval = Evaluator::new(objective);
    let mut tracker = Tracker::new(bounds.dim(), params.iterations);

    let mut init_rng = stream(seed, Phase::Init);
    let mut employed_rng = stream(seed, Phase::Employed);
    let mut onlooker_rng = stream(seed, Phase::Onlooker);
    let mut scout_rng = stream(seed, Phase::Scout);

    let sn = params.food_sources;
    let sources: Vec<Vec<f64>> = (0..sn).map(|_| bounds.sample(&mut init_rng)).collect();
    let mut costs = Vec::with_capacity(sn);
    for source in &sources {
        let cost = eval.eval(source)?;
        tracker.offer(source, cost);
        costs.push(cost);
    }
    let mut colony = Colony {
        sources,
        costs,
        trials: vec![0; sn],
    };
    tracker.record_initial();

    for _ in 0..params.iterations {
        for i in 0..sn {
            colony.explore(i, bounds, &mut eval, &mut tracker, &mut employed_rng)?;
        }

        let probabilities = selection_probabilities(&colony.costs);
        debug_assert!((probabilities.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        for _ in 0..sn {
            let i = roulette(&probabilities, &mut onlooker_rng);
            colony.explore(i, bounds, &mut eval, &mut tracker, &mut onlooker_rng)?;
        }

        for i in 0..sn {
            if colony.trials[i] > params.limit {
                let fresh = bounds.sample(&mut scout_rng);
                let cost = eval.eval(&fresh)?;
                tracker.offer(&fresh, cost);
                colony.sources[i] = fresh;
                colony.costs[i] = cost;
                colony.trials[i] = 0;
            }
        }
        tracker.record_iteration();
    }

    Ok(tracker.finish(eval.count, seed))
}
