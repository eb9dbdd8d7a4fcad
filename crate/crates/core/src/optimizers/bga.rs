use rand::seq::index::sample;
use rand::Rng;

use super::rng::{stream, Phase};
use super::{rank_order, Bounds, Evaluator, RunResult, Tracker};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BgaParams {
    /// Must be even.
    pub population: usize,
    pub iterations: usize,
    pub bits_per_variable: u32,
    pub crossover_points: usize,
    pub crossover_prob: f64,
    /// Per-bit flip probability; `None` means `1 / (bits_per_variable · dim)`.
    pub mutation_prob: Option<f64>,
    /// Best individuals copied unchanged into the next generation.
    pub elitism: usize,
}

impl Default for BgaParams {
    fn default() -> Self {
        Self {
            population: 50,
            iterations: 300,
            bits_per_variable: 16,
            crossover_points: 2,
            crossover_prob: 0.9,
            mutation_prob: None,
            elitism: 1,
        }
    }
}

impl BgaParams {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 || !self.population.is_multiple_of(2) {
            return Err(Error::invalid(
                "bga.population",
                format!("must be even and >= 2, got {}", self.population),
            ));
        }
        if self.iterations < 1 {
            return Err(Error::invalid("bga.iterations", "must be >= 1"));
        }
        if self.elitism >= self.population {
            return Err(Error::invalid("bga.elitism", "must be smaller than the population"));
        }
        self.validate_operators()
    }

    /// Checks only the encoding and variation settings.
    pub(crate) fn validate_operators(&self) -> Result<()> {
        if !(8..=32).contains(&self.bits_per_variable) {
            return Err(Error::invalid(
                "bga.bits_per_variable",
                format!("must lie in [8, 32], got {}", self.bits_per_variable),
            ));
        }
        if self.crossover_points < 1 {
            return Err(Error::invalid("bga.crossover_points", "must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.crossover_prob) {
            return Err(Error::invalid("bga.crossover_prob", "must lie in [0, 1]"));
        }
        if let Some(p) = self.mutation_prob {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid("bga.mutation_prob", "must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    pub fn mutation_rate(&self, dim: usize) -> f64 {
        self.mutation_prob
            .unwrap_or(1.0 / (self.bits_per_variable as f64 * dim as f64))
    }
}

/// Concatenated fixed-point encodings, most significant bit first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chromosome(pub Vec<bool>);

impl Chromosome {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Linear map between `[lower_j, upper_j]` and `0..=2^bits − 1` per variable.
#[derive(Debug, Clone)]
pub struct Codec {
    bounds: Bounds,
    bits: u32,
}

impl Codec {
    pub fn new(bounds: Bounds, bits: u32) -> Self {
        assert!((1..=32).contains(&bits));
        Self { bounds, bits }
    }

    fn levels(&self) -> u64 {
        (1u64 << self.bits) - 1
    }

    pub fn chromosome_len(&self) -> usize {
        self.bits as usize * self.bounds.dim()
    }

    pub fn decode(&self, chrom: &Chromosome) -> Vec<f64> {
        let levels = self.levels();
        chrom
            .0
            .chunks(self.bits as usize)
            .enumerate()
            .map(|(j, gene)| {
                let q = gene.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
                self.bounds.interpolate(j, q as f64 / levels as f64)
            })
            .collect()
    }

    /// Nearest representable encoding of `x` (clamped into the box).
    pub fn encode(&self, x: &[f64]) -> Chromosome {
        let levels = self.levels();
        let mut bits = Vec::with_capacity(self.chromosome_len());
        for (j, &v) in x.iter().enumerate() {
            let width = self.bounds.width(j);
            let q = if width > 0.0 {
                let u = ((v - self.bounds.lower()[j]) / width).clamp(0.0, 1.0);
                (u * levels as f64).round() as u64
            } else {
                0
            };
            bits.extend((0..self.bits).rev().map(|b| (q >> b) & 1 == 1));
        }
        Chromosome(bits)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Chromosome {
        Chromosome((0..self.chromosome_len()).map(|_| rng.random()).collect())
    }
}

/// Roulette wheel over rank weights: the best of `n` gets weight `n`, the
/// worst weight 1.
pub(crate) struct RankWheel {
    order: Vec<usize>,
    total: f64,
}

impl RankWheel {
    pub(crate) fn new(costs: &[f64]) -> Self {
        let n = costs.len();
        Self {
            order: rank_order(costs),
            total: (n * (n + 1) / 2) as f64,
        }
    }

    pub(crate) fn spin<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let n = self.order.len();
        let target = rng.random::<f64>() * self.total;
        let mut acc = 0.0;
        for (rank, &idx) in self.order.iter().enumerate() {
            acc += (n - rank) as f64;
            if target < acc {
                return idx;
            }
        }
        self.order[n - 1]
    }
}

/// Multipoint crossover with `points` distinct cut positions; segments
/// between consecutive cuts alternate between the parents.
pub(crate) fn crossover<R: Rng + ?Sized>(
    a: &Chromosome,
    b: &Chromosome,
    points: usize,
    rng: &mut R,
) -> (Chromosome, Chromosome) {
    let len = a.len();
    let mut left = a.clone();
    let mut right = b.clone();
    if len < 2 {
        return (left, right);
    }
    let mut cuts = sample(rng, len - 1, points.min(len - 1)).into_vec();
    cuts.iter_mut().for_each(|c| *c += 1);
    cuts.sort_unstable();
    cuts.push(len);

    let mut swap = false;
    let mut start = 0;
    for cut in cuts {
        if swap {
            left.0[start..cut].copy_from_slice(&b.0[start..cut]);
            right.0[start..cut].copy_from_slice(&a.0[start..cut]);
        }
        swap = !swap;
        start = cut;
    }
    (left, right)
}

pub(crate) fn mutate<R: Rng + ?Sized>(chrom: &mut Chromosome, rate: f64, rng: &mut R) {
    if rate <= 0.0 {
        return;
    }
    for bit in chrom.0.iter_mut() {
        if rng.random::<f64>() < rate {
            *bit = !*bit;
        }
    }
}

/// Produces `count` offspring from `parents` by rank selection, crossover
/// with probability `crossover_prob` and per-bit mutation.
pub(crate) fn breed<R: Rng + ?Sized>(
    parents: &[Chromosome],
    costs: &[f64],
    count: usize,
    params: &BgaParams,
    mutation_rate: f64,
    rng: &mut R,
) -> Vec<Chromosome> {
    let wheel = RankWheel::new(costs);
    let mut offspring = Vec::with_capacity(count + 1);
    while offspring.len() < count {
        let a = &parents[wheel.spin(rng)];
        let b = &parents[wheel.spin(rng)];
        let (mut c, mut d) = if rng.random::<f64>() < params.crossover_prob {
            crossover(a, b, params.crossover_points, rng)
        } else {
            (a.clone(), b.clone())
        };
        mutate(&mut c, mutation_rate, rng);
        mutate(&mut d, mutation_rate, rng);
        offspring.push(c);
        offspring.push(d);
    }
    offspring.truncate(count);
    offspring
}

/// Binary genetic algorithm with elitism.
///
/// Evaluations: `population + iterations · (population − elitism)`; elites
/// keep their cached cost.
pub fn optimize_bga<F>(objective: F, bounds: &Bounds, params: &BgaParams, seed: u64) -> Result<RunResult>
where
    F: Fn(&[f64]) -> f64,
{
    params.validate()?;
    let codec = Codec::new(bounds.clone(), params.bits_per_variable);
    let rate = params.mutation_rate(bounds.dim());
    let mut eval = Evaluator::new(objective);
    let mut tracker = Tracker::new(bounds.dim(), params.iterations);

    let mut init_rng = stream(seed, Phase::Init);
    let mut breed_rng = stream(seed, Phase::Breeding);

    let mut population: Vec<Chromosome> = (0..params.population).map(|_| codec.random(&mut init_rng)).collect();
    let mut costs = Vec::with_capacity(params.population);
    for chrom in &population {
        let x = codec.decode(chrom);
        let cost = eval.eval(&x)?;
        tracker.offer(&x, cost);
        costs.push(cost);
    }
    tracker.record_initial();

    for _ in 0..params.iterations {
        let order = rank_order(&costs);
        let mut next: Vec<Chromosome> = Vec::with_capacity(params.population);
        let mut next_costs = Vec::with_capacity(params.population);
        for &idx in order.iter().take(params.elitism) {
            next.push(population[idx].clone());
            next_costs.push(costs[idx]);
        }
        let children = breed(
            &population,
            &costs,
            params.population - params.elitism,
            params,
            rate,
            &mut breed_rng,
        );
        for child in children {
            let x = codec.decode(&child);
            let cost = eval.eval(&x)?;
            tracker.offer(&x, cost);
            next.push(child);
            next_costs.push(cost);
        }
        population = next;
        costs = next_costs;
        tracker.record_iteration();
    }

    Ok(tracker.finish(eval.count, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn codec() -> Codec {
        Codec::new(Bounds::new(vec![-5.12, 0.0], vec![5.12, 2.0]).unwrap(), 16)
    }

    #[test]
    fn endpoints_decode_to_bounds() {
        let c = codec();
        assert_eq!(c.decode(&Chromosome(vec![false; 32])), vec![-5.12, 0.0]);
        assert_eq!(c.decode(&Chromosome(vec![true; 32])), vec![5.12, 2.0]);
    }

    #[test]
    fn encode_is_within_one_level() {
        let c = codec();
        let x = [1.234, 0.777];
        let y = c.decode(&c.encode(&x));
        assert!((x[0] - y[0]).abs() <= 10.24 / 65535.0);
        assert!((x[1] - y[1]).abs() <= 2.0 / 65535.0);
    }

    #[test]
    fn crossover_of_identical_parents_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = codec();
        let a = c.random(&mut rng);
        let (x, y) = crossover(&a, &a, 3, &mut rng);
        assert_eq!(x, a);
        assert_eq!(y, a);
    }

    #[test]
    fn crossover_preserves_bit_multiset() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = Chromosome(vec![false; 40]);
        let b = Chromosome(vec![true; 40]);
        for points in 1..6 {
            let (x, y) = crossover(&a, &b, points, &mut rng);
            for i in 0..40 {
                assert_ne!(x.0[i], y.0[i]);
            }
            // number of segment switches in x equals the number of cuts
            let switches = x.0.windows(2).filter(|w| w[0] != w[1]).count();
            assert_eq!(switches, points);
        }
    }

    #[test]
    fn identical_population_without_mutation_is_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = codec();
        let a = c.random(&mut rng);
        let parents = vec![a.clone(); 10];
        let costs = vec![1.0; 10];
        let params = BgaParams {
            mutation_prob: Some(0.0),
            ..BgaParams::default()
        };
        for _ in 0..20 {
            let kids = breed(&parents, &costs, 9, &params, 0.0, &mut rng);
            assert_eq!(kids.len(), 9);
            assert!(kids.iter().all(|k| *k == a));
        }
    }

    #[test]
    fn rank_wheel_prefers_better() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let wheel = RankWheel::new(&[10.0, 0.0, 5.0]);
        let mut counts = [0usize; 3];
        for _ in 0..60_000 {
            counts[wheel.spin(&mut rng)] += 1;
        }
        // weights 1, 3, 2 out of 6
        assert!((counts[0] as f64 / 60_000.0 - 1.0 / 6.0).abs() < 0.01);
        assert!((counts[1] as f64 / 60_000.0 - 3.0 / 6.0).abs() < 0.01);
    }

    #[test]
    fn evaluation_budget_and_param_checks() {
        let bounds = Bounds::uniform(3, -1.0, 1.0).unwrap();
        let params = BgaParams {
            population: 10,
            iterations: 5,
            ..BgaParams::default()
        };
        let r = optimize_bga(|x: &[f64]| x.iter().map(|v| v * v).sum(), &bounds, &params, 1).unwrap();
        assert_eq!(r.evaluations, 10 + 5 * 9);
        assert!(optimize_bga(
            |x: &[f64]| x[0],
            &bounds,
            &BgaParams {
                population: 9,
                ..params.clone()
            },
            1
        )
        .is_err());
        assert!(optimize_bga(
            |x: &[f64]| x[0],
            &bounds,
            &BgaParams {
                bits_per_variable: 40,
                ..params
            },
            1
        )
        .is_err());
    }
}
