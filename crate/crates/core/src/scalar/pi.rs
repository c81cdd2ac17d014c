//! Proportional-integral controller with integrator clamping.

use serde::{Deserialize, Serialize};

use super::refmodel::{RefModelParams, ScalarRefModel};
use crate::controller::{ControlOutput, Controller};
use crate::error::{Error, Result};

/// `u = K_p·(e + (1/T_i)·∫e dt)` with `e = r − y_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiConfig {
    pub k_p: f64,
    /// Integral time, s.
    pub t_i: f64,
    /// Sampling interval, s.
    pub dt: f64,
    /// Output limits in deviation units.
    pub u_min: f64,
    pub u_max: f64,
    /// Model whose output is logged for comparison with the adaptive designs.
    pub reference: RefModelParams,
}

impl PiConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_i > 0.0) || !(self.dt > 0.0) || !self.k_p.is_finite() {
            return Err(Error::InvalidArgument("PI needs T_i > 0, dt > 0 and finite K_p".into()));
        }
        if !(self.u_min < self.u_max) {
            return Err(Error::InvalidArgument("PI output limits must satisfy u_min < u_max".into()));
        }
        self.reference.validate()
    }
}

#[derive(Debug, Clone)]
pub struct PiController {
    cfg: PiConfig,
    integral: f64,
    prev_e: Option<f64>,
    refm: ScalarRefModel,
}

impl PiController {
    pub fn new(cfg: PiConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(PiController {
            refm: ScalarRefModel::new(cfg.reference, cfg.dt, 0.0)?,
            cfg,
            integral: 0.0,
            prev_e: None,
        })
    }

    pub fn integral(&self) -> f64 {
        self.integral
    }

    /// One trapezoidal update over the interval ending at this sample. The
    /// first call treats the error as constant over its interval.
    ///
    /// Returns the limited output and whether it saturated. When the
    /// unclamped output is beyond a limit and the error drives it further, the
    /// integrator keeps its previous value.
    pub fn update(&mut self, e: f64) -> (f64, bool) {
        let prev = self.prev_e.unwrap_or(e);
        self.prev_e = Some(e);
        let candidate = self.integral + 0.5 * self.cfg.dt * (prev + e);
        let raw = self.cfg.k_p * (e + candidate / self.cfg.t_i);
        let pushing_out = (raw > self.cfg.u_max && candidate > self.integral && self.cfg.k_p > 0.0)
            || (raw > self.cfg.u_max && candidate < self.integral && self.cfg.k_p < 0.0)
            || (raw < self.cfg.u_min && candidate < self.integral && self.cfg.k_p > 0.0)
            || (raw < self.cfg.u_min && candidate > self.integral && self.cfg.k_p < 0.0);
        if !pushing_out {
            self.integral = candidate;
        }
        let u = self.cfg.k_p * (e + self.integral / self.cfg.t_i);
        let clamped = u.clamp(self.cfg.u_min, self.cfg.u_max);
        (clamped, clamped != u)
    }
}

impl Controller for PiController {
    fn dt(&self) -> f64 {
        self.cfg.dt
    }

    fn step(&mut self, y_p: f64, r: f64) -> Result<ControlOutput> {
        if !(y_p.is_finite() && r.is_finite()) {
            return Err(Error::NonFinite("PI input"));
        }
        let y_m = self.refm.output();
        let (u, saturated) = self.update(r - y_p);
        self.refm.advance(r, y_p);
        Ok(ControlOutput {
            u,
            y_m,
            e1: y_p - y_m,
            saturated,
        })
    }

    fn params(&self) -> Vec<f64> {
        vec![self.integral]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pi(k_p: f64, t_i: f64, lim: f64) -> PiController {
        PiController::new(PiConfig {
            k_p,
            t_i,
            dt: 0.05,
            u_min: -lim,
            u_max: lim,
            reference: RefModelParams::with_time_constant(0.5),
        })
        .unwrap()
    }

    #[test]
    fn unit_error_for_one_second() {
        let mut c = pi(2.0, 1.0, 1e9);
        let mut u = 0.0;
        for _ in 0..20 {
            u = c.update(1.0).0;
        }
        assert!((u - 4.0).abs() < 1e-12);
    }

    #[test]
    fn zero_error_keeps_integrator() {
        let mut c = pi(2.0, 1.0, 1e9);
        for _ in 0..5 {
            assert_eq!(c.update(0.0).0, 0.0);
        }
        assert_eq!(c.integral(), 0.0);
    }

    #[test]
    fn saturation_freezes_integrator() {
        for k_p in [2.0, -2.0] {
            let mut c = pi(k_p, 1.0, 1.0);
            let mut frozen = None;
            for _ in 0..40 {
                let (_, sat) = c.update(1.0);
                if sat {
                    match frozen {
                        None => frozen = Some(c.integral()),
                        Some(v) => assert_eq!(c.integral(), v),
                    }
                }
            }
            assert!(frozen.is_some());
        }
    }
}
