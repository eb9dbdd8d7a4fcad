//! Shaking forces and moments of the double crank-slider mechanism.
//!
//! The mechanism has four disks on one shaft. Crank-slider 1 sits on plane 1,
//! disk 2 (unbalance mass plus counterweight 1) on plane 2, disk 3
//! (counterweight 2) on plane 3 and crank-slider 2 on plane 4. Moments are
//! taken about plane 1. Every force term is a rotating mass times radius
//! times the squared shaft speed; the sliders additionally carry the
//! second-harmonic `R/L cos 2θ` term and only act along x.
//!
//! Units are whatever the caller uses consistently: masses, lengths and the
//! speed in rad/s combine into force and force·length with no conversion.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Wraps an angle into `[0, 2π)`.
pub fn normalize_angle(angle: f64) -> f64 {
    let wrapped = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

/// Fixed physical parameters of the mechanism.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanismConfig {
    /// Eccentric crank mass `m_c`, identical for both crank-sliders.
    pub crank_mass: f64,
    /// Equivalent slider mass `m_p`, identical for both sliders.
    pub slider_mass: f64,
    /// Crank radius `R`.
    pub crank_radius: f64,
    /// Connecting-rod length `L`.
    pub rod_length: f64,
    /// Shaft speed `ω` in rad/s.
    pub omega: f64,
    /// Known unbalance mass `m_0` on disk 2.
    pub unbalance_mass: f64,
    /// Radius `R_0` of the unbalance mass.
    pub unbalance_radius: f64,
    /// Angular position `α` of the unbalance mass relative to the crank.
    pub unbalance_angle: f64,
    /// Axial spacing `a_1` between planes 1–2 and 3–4.
    pub outer_spacing: f64,
    /// Axial spacing `a_2` between planes 2–3.
    pub inner_spacing: f64,
    /// Phase offset `θ_0` of the second crank-slider.
    pub phase: f64,
    /// Counterweight radius `r_1` on disk 2.
    pub counterweight_radius_1: f64,
    /// Counterweight radius `r_2` on disk 3.
    pub counterweight_radius_2: f64,
}

impl Default for MechanismConfig {
    fn default() -> Self {
        Self {
            crank_mass: 0.5,
            slider_mass: 0.3,
            crank_radius: 0.05,
            rod_length: 0.2,
            omega: TAU * 10.0,
            unbalance_mass: 0.2,
            unbalance_radius: 0.04,
            unbalance_angle: 0.0,
            outer_spacing: 0.1,
            inner_spacing: 0.15,
            phase: std::f64::consts::PI,
            counterweight_radius_1: 0.04,
            counterweight_radius_2: 0.04,
        }
    }
}

impl MechanismConfig {
    /// Same mechanism with every mass set to zero.
    pub fn massless(&self) -> Self {
        Self {
            crank_mass: 0.0,
            slider_mass: 0.0,
            unbalance_mass: 0.0,
            ..*self
        }
    }

    /// Checks every invariant and returns the config with its angles wrapped
    /// into `[0, 2π)`.
    pub fn validated(mut self) -> Result<Self> {
        self.validate()?;
        self.unbalance_angle = normalize_angle(self.unbalance_angle);
        self.phase = normalize_angle(self.phase);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in self.named_fields() {
            if !value.is_finite() {
                return Err(Error::invalid(name, format!("{value} is not finite")));
            }
        }
        for (name, value) in [
            ("m_c", self.crank_mass),
            ("m_p", self.slider_mass),
            ("m_0", self.unbalance_mass),
        ] {
            if value < 0.0 {
                return Err(Error::invalid(name, format!("mass must be >= 0, got {value}")));
            }
        }
        for (name, value) in [
            ("R", self.crank_radius),
            ("L", self.rod_length),
            ("R_0", self.unbalance_radius),
            ("r_1", self.counterweight_radius_1),
            ("r_2", self.counterweight_radius_2),
            ("a_1", self.outer_spacing),
            ("a_2", self.inner_spacing),
            ("omega", self.omega),
        ] {
            if value <= 0.0 {
                return Err(Error::invalid(name, format!("must be > 0, got {value}")));
            }
        }
        if self.crank_radius > self.rod_length {
            return Err(Error::invalid(
                "R",
                format!(
                    "crank ratio R/L must be <= 1, got {}",
                    self.crank_radius / self.rod_length
                ),
            ));
        }
        Ok(())
    }

    fn named_fields(&self) -> [(&'static str, f64); 13] {
        [
            ("m_c", self.crank_mass),
            ("m_p", self.slider_mass),
            ("R", self.crank_radius),
            ("L", self.rod_length),
            ("omega", self.omega),
            ("m_0", self.unbalance_mass),
            ("R_0", self.unbalance_radius),
            ("alpha", self.unbalance_angle),
            ("a_1", self.outer_spacing),
            ("a_2", self.inner_spacing),
            ("theta_0", self.phase),
            ("r_1", self.counterweight_radius_1),
            ("r_2", self.counterweight_radius_2),
        ]
    }

    fn crank_ratio(&self) -> f64 {
        self.crank_radius / self.rod_length
    }
}

/// The four balancing unknowns: counterweight masses on disks 2 and 3 and
/// their angular positions relative to the crank.
///
/// Angles are wrapped into `[0, 2π)` on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionVector {
    m1: f64,
    m2: f64,
    phi1: f64,
    phi2: f64,
}

impl DecisionVector {
    pub const ZERO: DecisionVector = DecisionVector {
        m1: 0.0,
        m2: 0.0,
        phi1: 0.0,
        phi2: 0.0,
    };

    pub fn new(m1: f64, m2: f64, phi1: f64, phi2: f64) -> Result<Self> {
        for (name, value) in [("m1", m1), ("m2", m2), ("phi1", phi1), ("phi2", phi2)] {
            if !value.is_finite() {
                return Err(Error::invalid(name, format!("{value} is not finite")));
            }
        }
        if m1 < 0.0 {
            return Err(Error::invalid("m1", format!("mass must be >= 0, got {m1}")));
        }
        if m2 < 0.0 {
            return Err(Error::invalid("m2", format!("mass must be >= 0, got {m2}")));
        }
        Ok(Self {
            m1,
            m2,
            phi1: normalize_angle(phi1),
            phi2: normalize_angle(phi2),
        })
    }

    /// Builds a decision vector from an optimizer point `[m1, m2, φ1, φ2]`.
    pub fn from_point(point: &[f64]) -> Result<Self> {
        match *point {
            [m1, m2, phi1, phi2] => Self::new(m1, m2, phi1, phi2),
            _ => Err(Error::invalid(
                "decision point",
                format!("expected 4 components, got {}", point.len()),
            )),
        }
    }

    pub fn to_point(&self) -> [f64; 4] {
        [self.m1, self.m2, self.phi1, self.phi2]
    }

    pub fn m1(&self) -> f64 {
        self.m1
    }

    pub fn m2(&self) -> f64 {
        self.m2
    }

    pub fn phi1(&self) -> f64 {
        self.phi1
    }

    pub fn phi2(&self) -> f64 {
        self.phi2
    }
}

/// Net shaking forces and moments at one crank angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsSample {
    pub theta: f64,
    /// ΣF_x
    pub p1: f64,
    /// ΣF_y
    pub p2: f64,
    /// ΣM_x
    pub p3: f64,
    /// ΣM_y
    pub p4: f64,
}

/// ΣF_x: both sliders (primary and secondary harmonic), both cranks, the
/// unbalance mass and both counterweights.
pub fn force_x(cfg: &MechanismConfig, dv: &DecisionVector, theta: f64) -> f64 {
    let w2 = cfg.omega * cfg.omega;
    let ratio = cfg.crank_ratio();
    let shifted = theta + cfg.phase;
    cfg.slider_mass * cfg.crank_radius * w2 * (theta.cos() + ratio * (2.0 * theta).cos())
        + cfg.crank_mass * cfg.crank_radius * w2 * theta.cos()
        + cfg.unbalance_mass * cfg.unbalance_radius * w2 * (theta + cfg.unbalance_angle).cos()
        + dv.m1 * cfg.counterweight_radius_1 * w2 * (theta + dv.phi1).cos()
        + dv.m2 * cfg.counterweight_radius_2 * w2 * (theta + dv.phi2).cos()
        + cfg.slider_mass * cfg.crank_radius * w2 * (shifted.cos() + ratio * (2.0 * shifted).cos())
        + cfg.crank_mass * cfg.crank_radius * w2 * shifted.cos()
}

/// ΣF_y: the sliders reciprocate along x only, so no slider terms appear.
pub fn force_y(cfg: &MechanismConfig, dv: &DecisionVector, theta: f64) -> f64 {
    let w2 = cfg.omega * cfg.omega;
    let shifted = theta + cfg.phase;
    cfg.crank_mass * cfg.crank_radius * w2 * theta.sin()
        + cfg.unbalance_mass * cfg.unbalance_radius * w2 * (theta + cfg.unbalance_angle).sin()
        + dv.m1 * cfg.counterweight_radius_1 * w2 * (theta + dv.phi1).sin()
        + dv.m2 * cfg.counterweight_radius_2 * w2 * (theta + dv.phi2).sin()
        + cfg.crank_mass * cfg.crank_radius * w2 * shifted.sin()
}

/// ΣM_y about plane 1.
pub fn moment_y(cfg: &MechanismConfig, dv: &DecisionVector, theta: f64) -> f64 {
    let w2 = cfg.omega * cfg.omega;
    let ratio = cfg.crank_ratio();
    let shifted = theta + cfg.phase;
    let (a1, a2) = (cfg.outer_spacing, cfg.inner_spacing);
    (cfg.unbalance_mass * cfg.unbalance_radius * w2 * (theta + cfg.unbalance_angle).cos()
        + dv.m1 * cfg.counterweight_radius_1 * w2 * (theta + dv.phi1).cos())
        * a1
        + (dv.m2 * cfg.counterweight_radius_2 * w2 * (theta + dv.phi2).cos()) * (a1 + a2)
        + (cfg.slider_mass * cfg.crank_radius * w2 * (shifted.cos() + ratio * (2.0 * shifted).cos())) * (2.0 * a1 + a2)
        + (cfg.crank_mass * cfg.crank_radius * w2 * shifted.cos()) * (2.0 * a1 + a2)
}

/// ΣM_x about plane 1; like [`moment_y`] but without a slider term.
pub fn moment_x(cfg: &MechanismConfig, dv: &DecisionVector, theta: f64) -> f64 {
    let w2 = cfg.omega * cfg.omega;
    let shifted = theta + cfg.phase;
    let (a1, a2) = (cfg.outer_spacing, cfg.inner_spacing);
    (cfg.unbalance_mass * cfg.unbalance_radius * w2 * (theta + cfg.unbalance_angle).sin()
        + dv.m1 * cfg.counterweight_radius_1 * w2 * (theta + dv.phi1).sin())
        * a1
        + (dv.m2 * cfg.counterweight_radius_2 * w2 * (theta + dv.phi2).sin()) * (a1 + a2)
        + (cfg.crank_mass * cfg.crank_radius * w2 * shifted.sin()) * (2.0 * a1 + a2)
}

pub fn sample_at(cfg: &MechanismConfig, dv: &DecisionVector, theta: f64) -> DynamicsSample {
    DynamicsSample {
        theta,
        p1: force_x(cfg, dv, theta),
        p2: force_y(cfg, dv, theta),
        p3: moment_x(cfg, dv, theta),
        p4: moment_y(cfg, dv, theta),
    }
}

/// Uniform angle grid `θ_k = 2πk/n`, `k = 0..n`, excluding the endpoint.
pub fn uniform_grid(n_samples: usize) -> impl ExactSizeIterator<Item = f64> {
    (0..n_samples).map(move |k| TAU * k as f64 / n_samples as f64)
}

/// Samples P1..P4 over one revolution on the uniform grid.
pub fn sample_profile(cfg: &MechanismConfig, dv: &DecisionVector, n_samples: usize) -> Result<Vec<DynamicsSample>> {
    if n_samples < 8 {
        return Err(Error::invalid(
            "n_samples",
            format!("need at least 8 samples per revolution, got {n_samples}"),
        ));
    }
    Ok(uniform_grid(n_samples).map(|theta| sample_at(cfg, dv, theta)).collect())
}

/// A truncated Fourier series `c1 cos θ + s1 sin θ + c2 cos 2θ + s2 sin 2θ`.
///
/// Every P_i is of this form; collecting the coefficients once per decision
/// vector makes repeated evaluation cheap.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TrigSeries {
    pub c1: f64,
    pub s1: f64,
    pub c2: f64,
    pub s2: f64,
}

impl TrigSeries {
    /// Adds `amplitude · cos(θ + phase)` (or the sine when `sine` is set).
    fn add_first(&mut self, amplitude: f64, phase: f64, sine: bool) {
        let (sp, cp) = phase.sin_cos();
        if sine {
            // sin(θ+φ) = sinθ cosφ + cosθ sinφ
            self.s1 += amplitude * cp;
            self.c1 += amplitude * sp;
        } else {
            // cos(θ+φ) = cosθ cosφ − sinθ sinφ
            self.c1 += amplitude * cp;
            self.s1 -= amplitude * sp;
        }
    }

    /// Adds `amplitude · cos 2(θ + phase)`.
    fn add_second_cos(&mut self, amplitude: f64, phase: f64) {
        let (sp, cp) = (2.0 * phase).sin_cos();
        self.c2 += amplitude * cp;
        self.s2 -= amplitude * sp;
    }

    /// Evaluates given `(cos θ, sin θ, cos 2θ, sin 2θ)`.
    #[inline]
    pub fn eval_trig(&self, trig: &[f64; 4]) -> f64 {
        self.c1 * trig[0] + self.s1 * trig[1] + self.c2 * trig[2] + self.s2 * trig[3]
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.eval_trig(&trig_at(theta))
    }

    /// Derivative with respect to θ.
    pub fn derivative(&self, theta: f64) -> f64 {
        let [c, s, c2, s2] = trig_at(theta);
        -self.c1 * s + self.s1 * c - 2.0 * self.c2 * s2 + 2.0 * self.s2 * c2
    }

    pub fn is_zero(&self) -> bool {
        self.c1 == 0.0 && self.s1 == 0.0 && self.c2 == 0.0 && self.s2 == 0.0
    }
}

#[inline]
pub fn trig_at(theta: f64) -> [f64; 4] {
    let (s, c) = theta.sin_cos();
    [c, s, c * c - s * s, 2.0 * s * c]
}

/// Fourier coefficients of (P1, P2, P3, P4).
pub fn series(cfg: &MechanismConfig, dv: &DecisionVector) -> [TrigSeries; 4] {
    let w2 = cfg.omega * cfg.omega;
    let (a1, a2) = (cfg.outer_spacing, cfg.inner_spacing);
    let far = 2.0 * a1 + a2;
    let slider = cfg.slider_mass * cfg.crank_radius * w2;
    let slider2 = slider * cfg.crank_ratio();
    let crank = cfg.crank_mass * cfg.crank_radius * w2;
    let unbalance = cfg.unbalance_mass * cfg.unbalance_radius * w2;
    let cw1 = dv.m1 * cfg.counterweight_radius_1 * w2;
    let cw2 = dv.m2 * cfg.counterweight_radius_2 * w2;

    let mut fx = TrigSeries::default();
    fx.add_first(slider + crank, 0.0, false);
    fx.add_second_cos(slider2, 0.0);
    fx.add_first(unbalance, cfg.unbalance_angle, false);
    fx.add_first(cw1, dv.phi1, false);
    fx.add_first(cw2, dv.phi2, false);
    fx.add_first(slider + crank, cfg.phase, false);
    fx.add_second_cos(slider2, cfg.phase);

    let mut fy = TrigSeries::default();
    fy.add_first(crank, 0.0, true);
    fy.add_first(unbalance, cfg.unbalance_angle, true);
    fy.add_first(cw1, dv.phi1, true);
    fy.add_first(cw2, dv.phi2, true);
    fy.add_first(crank, cfg.phase, true);

    let mut mx = TrigSeries::default();
    mx.add_first(unbalance * a1, cfg.unbalance_angle, true);
    mx.add_first(cw1 * a1, dv.phi1, true);
    mx.add_first(cw2 * (a1 + a2), dv.phi2, true);
    mx.add_first(crank * far, cfg.phase, true);

    let mut my = TrigSeries::default();
    my.add_first(unbalance * a1, cfg.unbalance_angle, false);
    my.add_first(cw1 * a1, dv.phi1, false);
    my.add_first(cw2 * (a1 + a2), dv.phi2, false);
    my.add_first((slider + crank) * far, cfg.phase, false);
    my.add_second_cos(slider2 * far, cfg.phase);

    [fx, fy, mx, my]
}
