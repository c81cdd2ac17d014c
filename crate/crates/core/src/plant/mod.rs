//! Plant models: the nonlinear test rig and linear stand-ins.

pub mod actuator;
pub mod cats;
pub mod gas;
pub mod linear;
pub mod valve;

pub use actuator::{Actuator, ActuatorModel, DelayedCommand};
pub use cats::{CatsConfig, CatsPlant, Linearization, Normalization, OperatingPoint};
pub use gas::{choked_c_star, GasParams, InflowPolynomial};
pub use linear::LinearPlant;
pub use valve::{ValveGeometry, COUNTS_PER_TURN};

use crate::error::Result;

/// A plant driven at a fixed integration step in controller units.
pub trait Plant {
    /// Integration step, s.
    fn dt(&self) -> f64;

    /// Measured output in controller units.
    fn output(&self) -> f64;

    /// Latches a command (controller units) until the next call. Returns
    /// whether the command saturated.
    fn command(&mut self, u: f64) -> bool;

    /// Constant input disturbance in the plant's native command units.
    fn set_disturbance(&mut self, d0: f64);

    fn step(&mut self) -> Result<()>;
}
