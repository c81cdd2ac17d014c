//! First-order adaptive controllers: MRAC, CRM and the delay-resistant CRM.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::projection::ProjectionConfig;
use super::refmodel::{RefModelParams, ScalarRefModel};
use crate::controller::{ControlOutput, Controller};
use crate::error::{Error, Result};
use crate::lintools::{steps_for, DelayBuffer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdaptiveMode {
    Mrac,
    Crm,
    Drcrm,
}

impl AdaptiveMode {
    pub fn name(&self) -> &'static str {
        match self {
            AdaptiveMode::Mrac => "mrac",
            AdaptiveMode::Crm => "crm",
            AdaptiveMode::Drcrm => "drcrm",
        }
    }
}

/// Complete description of a first-order adaptive controller.
///
/// Parameter layout: MRAC/CRM `[θ0, θr, θ3]`; DR-CRM
/// `[α_y, λ_1 … λ_m, k, θ3]` with `m = τ/dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarAdaptiveConfig {
    pub mode: AdaptiveMode,
    /// Sampling interval, s.
    pub dt: f64,
    /// Known input delay, s (DR-CRM uses it for the λ terms and the reference
    /// delay).
    pub tau: f64,
    /// Sign of the plant high-frequency gain.
    pub sign_bp: f64,
    pub reference: RefModelParams,
    /// Initial parameters.
    pub theta0: Vec<f64>,
    /// Diagonal adaptation rates, one per parameter.
    pub rates: Vec<f64>,
    pub projection: ProjectionConfig,
    /// Output limits in deviation units.
    pub u_min: f64,
    pub u_max: f64,
}

impl ScalarAdaptiveConfig {
    /// Number of λ terms.
    pub fn delay_steps(&self) -> Result<usize> {
        match self.mode {
            AdaptiveMode::Drcrm => steps_for(self.tau, self.dt).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "delay τ = {} s is not a multiple of dt = {} s",
                    self.tau, self.dt
                ))
            }),
            _ => Ok(0),
        }
    }

    pub fn param_count(&self) -> Result<usize> {
        Ok(match self.mode {
            AdaptiveMode::Drcrm => self.delay_steps()? + 3,
            _ => 3,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !(self.tau >= 0.0) {
            return Err(Error::InvalidArgument("need dt > 0 and τ ≥ 0".into()));
        }
        if self.sign_bp != 1.0 && self.sign_bp != -1.0 {
            return Err(Error::InvalidArgument("sign_bp must be +1 or −1".into()));
        }
        self.reference.validate()?;
        self.projection.validate()?;
        let k = self.param_count()?;
        if self.theta0.len() != k || self.rates.len() != k {
            return Err(Error::InvalidArgument(format!(
                "{} expects {k} parameters and rates, got {} and {}",
                self.mode.name(),
                self.theta0.len(),
                self.rates.len()
            )));
        }
        if self.rates.iter().any(|g| !(*g >= 0.0) || !g.is_finite()) {
            return Err(Error::InvalidArgument("adaptation rates must be finite and ≥ 0".into()));
        }
        if self.mode == AdaptiveMode::Mrac && self.reference.ell != 0.0 {
            return Err(Error::InvalidArgument("MRAC uses the open-loop model (ℓ = 0)".into()));
        }
        let expected_delay = if self.mode == AdaptiveMode::Drcrm { self.tau } else { 0.0 };
        if (self.reference.delay - expected_delay).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "{} reference delay must be {expected_delay} s",
                self.mode.name()
            )));
        }
        if !(self.u_min < self.u_max) {
            return Err(Error::InvalidArgument("output limits must satisfy u_min < u_max".into()));
        }
        Ok(())
    }
}

/// Running first-order adaptive controller.
///
/// Each tick: `e1 = y_p − y_m`; `u = Θᵀω` limited to the output range;
/// `Θ ← Θ + dt·Proj(Θ, −sign(b_p)·Γ·e1·ω)`, then held inside the hard
/// projection bound; the reference model advances; `u` enters the input
/// history.
#[derive(Debug, Clone)]
pub struct ScalarAdaptive {
    cfg: ScalarAdaptiveConfig,
    theta: DVector<f64>,
    rates: DVector<f64>,
    refm: ScalarRefModel,
    history: DelayBuffer,
}

impl ScalarAdaptive {
    pub fn new(cfg: ScalarAdaptiveConfig) -> Result<Self> {
        cfg.validate()?;
        let m = cfg.delay_steps()?;
        Ok(ScalarAdaptive {
            theta: DVector::from_vec(cfg.theta0.clone()),
            rates: DVector::from_vec(cfg.rates.clone()),
            refm: ScalarRefModel::new(cfg.reference, cfg.dt, 0.0)?,
            history: DelayBuffer::new(m, cfg.dt, 0.0),
            cfg,
        })
    }

    pub fn config(&self) -> &ScalarAdaptiveConfig {
        &self.cfg
    }

    pub fn theta(&self) -> &DVector<f64> {
        &self.theta
    }

    pub fn y_m(&self) -> f64 {
        self.refm.output()
    }

    pub fn history(&self) -> &DelayBuffer {
        &self.history
    }

    fn regressor(&self, y_p: f64, r: f64) -> DVector<f64> {
        match self.cfg.mode {
            AdaptiveMode::Drcrm => {
                let m = self.history.capacity();
                let mut w = DVector::zeros(m + 3);
                w[0] = y_p;
                for j in 1..=m {
                    w[j] = self.history.sample(j);
                }
                w[m + 1] = r;
                w[m + 2] = 1.0;
                w
            }
            _ => DVector::from_vec(vec![y_p, r, 1.0]),
        }
    }
}

impl Controller for ScalarAdaptive {
    fn dt(&self) -> f64 {
        self.cfg.dt
    }

    fn step(&mut self, y_p: f64, r: f64) -> Result<ControlOutput> {
        if !(y_p.is_finite() && r.is_finite()) {
            return Err(Error::NonFinite("adaptive controller input"));
        }
        let y_m = self.refm.output();
        let e1 = y_p - y_m;
        let omega = self.regressor(y_p, r);
        let raw = self.theta.dot(&omega);
        if !raw.is_finite() {
            return Err(Error::NonFinite("adaptive control signal"));
        }
        let u = raw.clamp(self.cfg.u_min, self.cfg.u_max);

        let direction = omega.component_mul(&self.rates) * (-self.cfg.sign_bp * e1);
        let step = self.cfg.projection.project(&self.theta, &direction) * self.cfg.dt;
        self.theta += step;
        self.cfg.projection.enforce(&mut self.theta);
        if self.theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("adaptive parameters"));
        }

        self.refm.advance(r, y_p);
        self.history.push(u);
        Ok(ControlOutput {
            u,
            y_m,
            e1,
            saturated: u != raw,
        })
    }

    fn params(&self) -> Vec<f64> {
        self.theta.iter().copied().collect()
    }

    fn param_bound(&self) -> Option<f64> {
        Some(self.cfg.projection.hard_bound())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(mode: AdaptiveMode) -> ScalarAdaptiveConfig {
        let (theta0, rates, delay, ell) = match mode {
            AdaptiveMode::Drcrm => (vec![0.1; 9], vec![0.5; 9], 0.3, 1.0),
            AdaptiveMode::Crm => (vec![0.5, -1.0, 0.0], vec![1.0; 3], 0.0, 1.0),
            AdaptiveMode::Mrac => (vec![0.5, -1.0, 0.0], vec![1.0; 3], 0.0, 0.0),
        };
        ScalarAdaptiveConfig {
            mode,
            dt: 0.05,
            tau: 0.3,
            sign_bp: -1.0,
            reference: RefModelParams {
                a_m: -2.0,
                b_m: 2.0,
                ell,
                delay,
            },
            projection: ProjectionConfig::new(10.0, 0.1).unwrap(),
            theta0,
            rates,
            u_min: -100.0,
            u_max: 100.0,
        }
    }

    #[test]
    fn six_lambda_terms() {
        let c = cfg(AdaptiveMode::Drcrm);
        assert_eq!(c.delay_steps().unwrap(), 6);
        assert_eq!(c.param_count().unwrap(), 9);
        let mut bad = c.clone();
        bad.tau = 0.32;
        bad.reference.delay = 0.32;
        assert!(ScalarAdaptive::new(bad).is_err());
    }

    #[test]
    fn zero_error_freezes_parameters() {
        for mode in [AdaptiveMode::Mrac, AdaptiveMode::Crm, AdaptiveMode::Drcrm] {
            let mut c = ScalarAdaptive::new(cfg(mode)).unwrap();
            let before = c.params();
            // y_p equal to y_m (zero at rest) with zero reference
            let out = c.step(0.0, 0.0).unwrap();
            assert_eq!(out.e1, 0.0);
            assert_eq!(c.params(), before);
        }
    }

    #[test]
    fn positive_error_raises_theta0_for_negative_gain() {
        let mut c = ScalarAdaptive::new(cfg(AdaptiveMode::Mrac)).unwrap();
        let before = c.theta()[0];
        let out = c.step(0.2, 0.0).unwrap();
        assert!(out.e1 > 0.0);
        assert!(c.theta()[0] > before);
    }

    #[test]
    fn history_holds_past_commands() {
        let mut c = ScalarAdaptive::new(cfg(AdaptiveMode::Drcrm)).unwrap();
        let mut us = vec![];
        for k in 0..8 {
            us.push(c.step(0.01 * k as f64, 1.0).unwrap().u);
        }
        for j in 1..=6 {
            assert_eq!(c.history().sample(j), us[us.len() - j]);
        }
    }

    #[test]
    fn mismatched_layout_rejected() {
        let mut c = cfg(AdaptiveMode::Crm);
        c.rates.pop();
        assert!(ScalarAdaptive::new(c).is_err());
        let mut c = cfg(AdaptiveMode::Mrac);
        c.reference.ell = 1.0;
        assert!(ScalarAdaptive::new(c).is_err());
    }
}
