//! Linear time-invariant plant with input delay, advanced exactly.

use nalgebra::{DMatrix, DVector};

use super::actuator::DelayedCommand;
use super::Plant;
use crate::error::{Error, Result};
use crate::lintools::{steps_for, StateSpaceSiso, ZohMap};

/// `ẋ = A x + b·(u(t − τ) + d0)`, `y = y0 + hᵀx`, with the command entering as
/// `u − u0`.
///
/// Each step applies the exact zero-order-hold transition, so the only error
/// against the continuous model is rounding.
#[derive(Debug, Clone)]
pub struct LinearPlant {
    map: ZohMap,
    h: DVector<f64>,
    x: DVector<f64>,
    dt: f64,
    line: DelayedCommand,
    y0: f64,
    u0: f64,
    held: f64,
    d0: f64,
    limits: Option<(f64, f64)>,
}

impl LinearPlant {
    pub fn new(ss: &StateSpaceSiso, tau: f64, dt: f64) -> Result<Self> {
        let steps = steps_for(tau, dt).ok_or_else(|| {
            Error::InvalidArgument(format!("delay {tau} s is not a multiple of the step {dt} s"))
        })?;
        let n = ss.order();
        let b = DMatrix::from_column_slice(n, 1, ss.b.as_slice());
        Ok(LinearPlant {
            map: ZohMap::new(&ss.a, &b, dt),
            h: ss.h.clone(),
            x: DVector::zeros(n),
            dt,
            line: DelayedCommand::new(steps, dt, 0.0),
            y0: 0.0,
            u0: 0.0,
            held: 0.0,
            d0: 0.0,
            limits: None,
        })
    }

    /// `ẏ = a·y + b·u(t − τ)`.
    pub fn first_order(a: f64, b: f64, tau: f64, dt: f64) -> Result<Self> {
        let ss = StateSpaceSiso::new(
            DMatrix::from_element(1, 1, a),
            DVector::from_element(1, b),
            DVector::from_element(1, 1.0),
        )?;
        Self::new(&ss, tau, dt)
    }

    /// Places the plant at rest around `(y0, u0)` in absolute units.
    pub fn with_offsets(mut self, y0: f64, u0: f64) -> Self {
        self.y0 = y0;
        self.u0 = u0;
        self.held = 0.0;
        self
    }

    /// Absolute command range; commands outside are clamped and flagged.
    pub fn with_limits(mut self, lo: f64, hi: f64) -> Self {
        self.limits = Some((lo, hi));
        self
    }

    pub fn state(&self) -> &DVector<f64> {
        &self.x
    }

    pub fn set_state(&mut self, x: DVector<f64>) {
        self.x = x;
    }
}

impl Plant for LinearPlant {
    fn dt(&self) -> f64 {
        self.dt
    }

    fn output(&self) -> f64 {
        self.y0 + self.h.dot(&self.x)
    }

    fn command(&mut self, u: f64) -> bool {
        let (u, sat) = match self.limits {
            Some((lo, _)) if u < lo => (lo, true),
            Some((_, hi)) if u > hi => (hi, true),
            _ => (u, false),
        };
        self.held = u - self.u0;
        sat
    }

    fn set_disturbance(&mut self, d0: f64) {
        self.d0 = d0;
    }

    fn step(&mut self) -> Result<()> {
        let v = self.line.advance(self.held) + self.d0;
        self.x = self.map.apply(&self.x, &DVector::from_element(1, v));
        if self.x.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite("linear plant state"))
        }
    }
}
