#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shakebal::{DecisionVector, MechanismConfig};

/// Signed terms of one equilibrium equation, summed by the caller.
pub struct Terms(pub Vec<f64>);

impl Terms {
    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Σ|term|, the magnitude scale used for relative comparisons when the
    /// terms cancel.
    pub fn scale(&self) -> f64 {
        self.0.iter().map(|t| t.abs()).sum()
    }
}

/// Second, deliberately plain transcription of the four equilibrium sums.
pub struct Oracle<'a> {
    pub cfg: &'a MechanismConfig,
    pub m1: f64,
    pub m2: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl<'a> Oracle<'a> {
    pub fn new(cfg: &'a MechanismConfig, dv: &DecisionVector) -> Self {
        Self {
            cfg,
            m1: dv.m1(),
            m2: dv.m2(),
            phi1: dv.phi1(),
            phi2: dv.phi2(),
        }
    }

    pub fn fx(&self, t: f64) -> Terms {
        let c = self.cfg;
        let w = c.omega * c.omega;
        let rl = c.crank_radius / c.rod_length;
        let t2 = t + c.phase;
        Terms(vec![
            c.slider_mass * c.crank_radius * w * t.cos(),
            c.slider_mass * c.crank_radius * w * rl * (2.0 * t).cos(),
            c.crank_mass * c.crank_radius * w * t.cos(),
            c.unbalance_mass * c.unbalance_radius * w * (t + c.unbalance_angle).cos(),
            self.m1 * c.counterweight_radius_1 * w * (t + self.phi1).cos(),
            self.m2 * c.counterweight_radius_2 * w * (t + self.phi2).cos(),
            c.slider_mass * c.crank_radius * w * t2.cos(),
            c.slider_mass * c.crank_radius * w * rl * (2.0 * t2).cos(),
            c.crank_mass * c.crank_radius * w * t2.cos(),
        ])
    }

    pub fn fy(&self, t: f64) -> Terms {
        let c = self.cfg;
        let w = c.omega * c.omega;
        let t2 = t + c.phase;
        Terms(vec![
            c.crank_mass * c.crank_radius * w * t.sin(),
            c.unbalance_mass * c.unbalance_radius * w * (t + c.unbalance_angle).sin(),
            self.m1 * c.counterweight_radius_1 * w * (t + self.phi1).sin(),
            self.m2 * c.counterweight_radius_2 * w * (t + self.phi2).sin(),
            c.crank_mass * c.crank_radius * w * t2.sin(),
        ])
    }

    pub fn mx(&self, t: f64) -> Terms {
        let c = self.cfg;
        let w = c.omega * c.omega;
        let t2 = t + c.phase;
        let (a1, a2) = (c.outer_spacing, c.inner_spacing);
        Terms(vec![
            a1 * c.unbalance_mass * c.unbalance_radius * w * (t + c.unbalance_angle).sin(),
            a1 * self.m1 * c.counterweight_radius_1 * w * (t + self.phi1).sin(),
            (a1 + a2) * self.m2 * c.counterweight_radius_2 * w * (t + self.phi2).sin(),
            (2.0 * a1 + a2) * c.crank_mass * c.crank_radius * w * t2.sin(),
        ])
    }

    pub fn my(&self, t: f64) -> Terms {
        let c = self.cfg;
        let w = c.omega * c.omega;
        let rl = c.crank_radius / c.rod_length;
        let t2 = t + c.phase;
        let (a1, a2) = (c.outer_spacing, c.inner_spacing);
        Terms(vec![
            a1 * c.unbalance_mass * c.unbalance_radius * w * (t + c.unbalance_angle).cos(),
            a1 * self.m1 * c.counterweight_radius_1 * w * (t + self.phi1).cos(),
            (a1 + a2) * self.m2 * c.counterweight_radius_2 * w * (t + self.phi2).cos(),
            (2.0 * a1 + a2) * c.slider_mass * c.crank_radius * w * t2.cos(),
            (2.0 * a1 + a2) * c.slider_mass * c.crank_radius * w * rl * (2.0 * t2).cos(),
            (2.0 * a1 + a2) * c.crank_mass * c.crank_radius * w * t2.cos(),
        ])
    }
}

pub fn random_config<R: Rng>(rng: &mut R) -> MechanismConfig {
    let crank_radius = rng.random_range(0.01..0.2);
    MechanismConfig {
        crank_mass: rng.random_range(0.0..2.0),
        slider_mass: rng.random_range(0.0..2.0),
        crank_radius,
        rod_length: crank_radius * rng.random_range(1.0..6.0),
        omega: rng.random_range(1.0..200.0),
        unbalance_mass: rng.random_range(0.0..1.0),
        unbalance_radius: rng.random_range(0.01..0.2),
        unbalance_angle: rng.random_range(0.0..TAU),
        outer_spacing: rng.random_range(0.01..0.5),
        inner_spacing: rng.random_range(0.01..0.5),
        phase: rng.random_range(0.0..TAU),
        counterweight_radius_1: rng.random_range(0.01..0.2),
        counterweight_radius_2: rng.random_range(0.01..0.2),
    }
}

pub fn random_dv<R: Rng>(rng: &mut R) -> DecisionVector {
    DecisionVector::new(
        rng.random_range(0.0..5.0),
        rng.random_range(0.0..5.0),
        rng.random_range(0.0..TAU),
        rng.random_range(0.0..TAU),
    )
    .unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unit-scale mechanism without crank or slider masses; the unbalance can be
/// cancelled exactly by the first counterweight.
pub fn cancellation_config() -> MechanismConfig {
    MechanismConfig {
        crank_mass: 0.0,
        slider_mass: 0.0,
        crank_radius: 1.0,
        rod_length: 4.0,
        omega: 1.0,
        unbalance_mass: 1.0,
        unbalance_radius: 1.0,
        unbalance_angle: 0.7,
        outer_spacing: 1.0,
        inner_spacing: 1.0,
        phase: PI,
        counterweight_radius_1: 0.5,
        counterweight_radius_2: 1.0,
    }
}

/// Largest deviation of the four library sums from the oracle, relative to
/// each equation's term scale.
pub fn oracle_error(cfg: &MechanismConfig, dv: &DecisionVector, theta: f64) -> f64 {
    let s = shakebal::mechanism::sample_at(cfg, dv, theta);
    let o = Oracle::new(cfg, dv);
    [
        (s.p1, o.fx(theta)),
        (s.p2, o.fy(theta)),
        (s.p3, o.mx(theta)),
        (s.p4, o.my(theta)),
    ]
    .into_iter()
    .map(|(got, terms)| {
        let scale = terms.scale();
        if scale == 0.0 {
            got.abs()
        } else {
            (got - terms.sum()).abs() / scale
        }
    })
    .fold(0.0, f64::max)
}
