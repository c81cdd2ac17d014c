//! First-order reference models, open- and closed-loop.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lintools::{steps_for, DelayBuffer, RationalTransfer};

/// Parameters of `ẏ_m = a_m·y_m + b_m·r(t − τ) + ℓ·(y_p − y_m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefModelParams {
    pub a_m: f64,
    pub b_m: f64,
    /// Closed-loop feedback gain ℓ; zero gives the open-loop model.
    #[serde(default)]
    pub ell: f64,
    /// Delay on the reference input, s.
    #[serde(default)]
    pub delay: f64,
}

impl RefModelParams {
    /// Unity-DC-gain model with time constant `tau_m`.
    pub fn with_time_constant(tau_m: f64) -> Self {
        RefModelParams {
            a_m: -1.0 / tau_m,
            b_m: 1.0 / tau_m,
            ell: 0.0,
            delay: 0.0,
        }
    }

    pub fn tau_m(&self) -> f64 {
        -1.0 / self.a_m
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a_m < 0.0) || !self.b_m.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "reference model needs a_m < 0 (got {})",
                self.a_m
            )));
        }
        if !(self.ell >= 0.0) || !(self.delay >= 0.0) {
            return Err(Error::InvalidArgument("reference model needs ℓ ≥ 0 and delay ≥ 0".into()));
        }
        Ok(())
    }

    /// `W_m(s) = b_m/(s − a_m)`.
    pub fn transfer(&self) -> RationalTransfer {
        RationalTransfer::first_order(self.b_m, self.a_m)
    }

    /// Error dynamics `W_e(s) = 1/(s − a_m + ℓ)`.
    pub fn error_transfer(&self) -> RationalTransfer {
        RationalTransfer::first_order(1.0, self.a_m - self.ell)
    }
}

/// Sampled reference model.
///
/// Advanced over each interval with `r(t − τ)` and `y_p` held, using the exact
/// transition of the pole `a_m − ℓ`. With ℓ = 0 this is the open-loop model.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarRefModel {
    params: RefModelParams,
    dt: f64,
    decay: f64,
    gain: f64,
    y_m: f64,
    r_line: Option<DelayBuffer>,
    primed: bool,
}

impl ScalarRefModel {
    pub fn new(params: RefModelParams, dt: f64, y_m0: f64) -> Result<Self> {
        params.validate()?;
        if !(dt > 0.0) {
            return Err(Error::InvalidArgument("reference model needs dt > 0".into()));
        }
        let pole = params.a_m - params.ell;
        let decay = (pole * dt).exp();
        let gain = (decay - 1.0) / pole;
        let r_line = match steps_for(params.delay, dt) {
            Some(0) => None,
            Some(m) => Some(DelayBuffer::new(m, dt, 0.0)),
            None => {
                return Err(Error::InvalidArgument(format!(
                    "reference delay {} s is not a multiple of dt = {dt} s",
                    params.delay
                )))
            }
        };
        Ok(ScalarRefModel {
            params,
            dt,
            decay,
            gain,
            y_m: y_m0,
            r_line,
            primed: false,
        })
    }

    pub fn params(&self) -> &RefModelParams {
        &self.params
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn output(&self) -> f64 {
        self.y_m
    }

    /// Advances one interval. The delayed-reference history is filled with the
    /// first reference seen.
    pub fn advance(&mut self, r: f64, y_p: f64) {
        let r_used = match &mut self.r_line {
            None => r,
            Some(line) => {
                if !self.primed {
                    line.reset(r);
                }
                let m = line.capacity();
                let past = line.sample(m);
                line.push(r);
                past
            }
        };
        self.primed = true;
        let drive = self.params.b_m * r_used + self.params.ell * y_p;
        self.y_m = self.decay * self.y_m + self.gain * drive;
    }
}
