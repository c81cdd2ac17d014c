//! Classical fixed-step Runge–Kutta integration.

use std::ops::{Add, Mul};

use nalgebra::DVector;

use crate::error::{Error, Result};

/// A state type the integrator can combine linearly.
pub trait OdeState: Clone + Add<Output = Self> + Mul<f64, Output = Self> {
    fn all_finite(&self) -> bool;
}

impl OdeState for f64 {
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl OdeState for DVector<f64> {
    fn all_finite(&self) -> bool {
        self.iter().all(|x| x.is_finite())
    }
}

/// Two-component state, used by the plant (pressure and pintle position).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair(pub f64, pub f64);

impl Add for Pair {
    type Output = Pair;
    fn add(self, o: Pair) -> Pair {
        Pair(self.0 + o.0, self.1 + o.1)
    }
}

impl Mul<f64> for Pair {
    type Output = Pair;
    fn mul(self, k: f64) -> Pair {
        Pair(self.0 * k, self.1 * k)
    }
}

impl OdeState for Pair {
    fn all_finite(&self) -> bool {
        self.0.is_finite() && self.1.is_finite()
    }
}

/// Advances `ẋ = f(x, u, t)` by one classical RK4 step with `u` held.
///
/// A non-finite stage derivative aborts the step.
pub fn rk4_step<S, F>(mut f: F, x: &S, u: f64, t: f64, dt: f64) -> Result<S>
where
    S: OdeState,
    F: FnMut(&S, f64, f64) -> S,
{
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("rk4 step needs dt > 0, got {dt}")));
    }
    let h2 = dt / 2.0;
    let k1 = f(x, u, t);
    check(&k1, "rk4 derivative (stage 1)")?;
    let k2 = f(&(x.clone() + k1.clone() * h2), u, t + h2);
    check(&k2, "rk4 derivative (stage 2)")?;
    let k3 = f(&(x.clone() + k2.clone() * h2), u, t + h2);
    check(&k3, "rk4 derivative (stage 3)")?;
    let k4 = f(&(x.clone() + k3.clone() * dt), u, t + dt);
    check(&k4, "rk4 derivative (stage 4)")?;
    Ok(x.clone() + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0))
}

fn check<S: OdeState>(k: &S, stage: &'static str) -> Result<()> {
    if k.all_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(stage))
    }
}
