//! Common interface of the pressure controllers.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::general::{GeneralAdaptive, GeneralAdaptiveConfig};
use crate::scalar::{check_spr_gate, PiConfig, PiController, ScalarAdaptive, ScalarAdaptiveConfig};

/// What a controller produced on one tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOutput {
    /// Command sent to the plant, after output limits.
    pub u: f64,
    /// Reference-model output used for this tick's tracking error.
    pub y_m: f64,
    /// `y_p − y_m`.
    pub e1: f64,
    /// Whether the command hit the output limits.
    pub saturated: bool,
}

/// A sampled controller working in deviation coordinates about its design
/// operating point.
pub trait Controller {
    /// Sampling interval, s.
    fn dt(&self) -> f64;

    /// Computes the command for the current measurement and reference, then
    /// advances internal states by one interval.
    fn step(&mut self, y_p: f64, r: f64) -> Result<ControlOutput>;

    /// Current adjustable parameters (empty when there are none).
    fn params(&self) -> Vec<f64>;

    /// Parameter bound the controller guarantees, if any.
    fn param_bound(&self) -> Option<f64> {
        None
    }
}

/// Serializable description of any controller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ControllerConfig {
    Pi(PiConfig),
    /// First-order MRAC, CRM or DR-CRM.
    Adaptive(ScalarAdaptiveConfig),
    /// General-order MRAC, CRM or DR-CRM with signal generators.
    General(GeneralAdaptiveConfig),
}

impl ControllerConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ControllerConfig::Pi(_) => "pi",
            ControllerConfig::Adaptive(c) => c.mode.name(),
            ControllerConfig::General(c) => c.mode.name(),
        }
    }

    pub fn dt(&self) -> f64 {
        match self {
            ControllerConfig::Pi(c) => c.dt,
            ControllerConfig::Adaptive(c) => c.dt,
            ControllerConfig::General(c) => c.dt,
        }
    }

    /// Runs every construction check, including the SPR gate, and returns the
    /// live controller.
    pub fn build(&self) -> Result<Box<dyn Controller>> {
        Ok(match self {
            ControllerConfig::Pi(c) => Box::new(PiController::new(*c)?),
            ControllerConfig::Adaptive(c) => {
                check_spr_gate(&c.reference)?;
                Box::new(ScalarAdaptive::new(c.clone())?)
            }
            ControllerConfig::General(c) => Box::new(GeneralAdaptive::new(c.clone())?),
        })
    }
}
