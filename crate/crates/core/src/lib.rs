//! Dynamic balancing of a double four-bar crank-slider mechanism.
//!
//! Two counterweights (masses `m1`, `m2` at angles `φ1`, `φ2` on disks 2 and
//! 3) are chosen to minimize the polar area of the net shaking force over one
//! crank revolution, subject to bounds on the matching shaking-moment areas.
//!
//! - [`mechanism`]: shaking forces and moments P1..P4 as functions of crank angle.
//! - [`objective`]: polar-area cost, moment constraints, penalty, bound calibration.
//! - [`optimizers`]: PSO, ABC, binary GA and the hybrid GA/PSO.
//! - [`bench`]: repeated seeded runs, summary statistics and CSV outputs.
//! - [`config`] and [`cli`]: the `shakebal` command-line tool.

pub mod bench;
pub mod cli;
pub mod config;
pub mod error;
pub mod mechanism;
pub mod objective;
pub mod optimizers;
pub mod quadrature;

pub use error::{Error, Result};
pub use mechanism::{DecisionVector, DynamicsSample, MechanismConfig};
pub use objective::{BalancingProblem, CostBreakdown, ObjectiveSpec};
pub use optimizers::{Algorithm, Bounds, OptimizerParams, RunResult};
