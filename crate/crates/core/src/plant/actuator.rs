//! Position-controlled motor: first-order lag behind a pure command delay.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lintools::{steps_for, DelayBuffer};

/// Closed-loop actuator approximation `θ_mes/θ_com = e^{−s·delay}/(τ_act·s + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActuatorModel {
    /// Time constant, s.
    pub tau_act: f64,
    /// Communication and computation lag, s.
    pub delay: f64,
}

impl ActuatorModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_act > 0.0) || !(self.delay >= 0.0) || !self.delay.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "actuator needs tau_act > 0 and delay ≥ 0 (got {} s, {} s)",
                self.tau_act, self.delay
            )));
        }
        Ok(())
    }

    /// Delay expressed in steps of `dt`.
    pub fn delay_steps(&self, dt: f64) -> Result<usize> {
        steps_for(self.delay, dt).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "actuator delay {} s is not a multiple of the step {} s",
                self.delay, dt
            ))
        })
    }

    /// `dθ_mes/dt` for an effective command.
    pub fn rate(&self, theta_mes: f64, command: f64) -> f64 {
        (command - theta_mes) / self.tau_act
    }
}

/// Pure transport delay on a sampled command.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayedCommand {
    steps: usize,
    buffer: DelayBuffer,
}

impl DelayedCommand {
    pub fn new(steps: usize, dt: f64, initial: f64) -> Self {
        DelayedCommand {
            steps,
            buffer: DelayBuffer::new(steps, dt, initial),
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Records `command` for this step and returns the one issued `steps`
    /// steps ago.
    pub fn advance(&mut self, command: f64) -> f64 {
        if self.steps == 0 {
            return command;
        }
        let out = self.buffer.sample(self.steps);
        self.buffer.push(command);
        out
    }
}

/// Stand-alone actuator, advanced with the exact lag response over each step.
#[derive(Debug, Clone, PartialEq)]
pub struct Actuator {
    model: ActuatorModel,
    dt: f64,
    line: DelayedCommand,
    theta_mes: f64,
}

impl Actuator {
    pub fn new(model: ActuatorModel, dt: f64, theta0: f64) -> Result<Self> {
        model.validate()?;
        let steps = model.delay_steps(dt)?;
        Ok(Actuator {
            model,
            dt,
            line: DelayedCommand::new(steps, dt, theta0),
            theta_mes: theta0,
        })
    }

    pub fn position(&self) -> f64 {
        self.theta_mes
    }

    pub fn step(&mut self, command: f64) -> f64 {
        let c = self.line.advance(command);
        let decay = (-self.dt / self.model.tau_act).exp();
        self.theta_mes = c + (self.theta_mes - c) * decay;
        self.theta_mes
    }
}
