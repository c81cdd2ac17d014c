pub mod calibration;
pub mod config;
pub mod controller;
pub mod error;
pub mod general;
pub mod lintools;
pub mod plant;
pub mod scalar;
pub mod sim;

pub use controller::{ControlOutput, Controller, ControllerConfig};
pub use error::{Error, Result};
