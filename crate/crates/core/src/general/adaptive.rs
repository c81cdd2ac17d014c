//! General-order MRAC, CRM and delay-resistant CRM laws.

use std::collections::VecDeque;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::generators::SignalGenerators;
use super::refmodel::{GeneralRefConfig, GeneralRefModel};
use crate::controller::{ControlOutput, Controller};
use crate::error::{Error, Result};
use crate::lintools::{steps_for, DelayBuffer, Poly};
use crate::scalar::{AdaptiveMode, ProjectionConfig};

/// Configuration of [`GeneralAdaptive`].
///
/// Parameter layout, with `q` generator states each and `m = τ/dt`:
/// MRAC/CRM `[θ0, θ1…, θ2…, θr]` against `[y_p, ω1, ω2, r]`;
/// DR-CRM `[α0, α1…, α2…, φ1…φm, k]` against
/// `[y_p, ω1, ω2, u(t−dt)·dt, …, u(t−m·dt)·dt, r]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralAdaptiveConfig {
    pub mode: AdaptiveMode,
    pub dt: f64,
    /// Known input delay, s.
    pub tau: f64,
    /// Sign of the plant high-frequency gain.
    pub sign_kp: f64,
    /// Monic generator polynomial `Λ(s)`, highest power first.
    pub generator_poly: Vec<f64>,
    pub reference: GeneralRefConfig,
    pub theta0: Vec<f64>,
    pub rates: Vec<f64>,
    pub projection: ProjectionConfig,
    pub u_min: f64,
    pub u_max: f64,
}

impl GeneralAdaptiveConfig {
    pub fn generator_dim(&self) -> usize {
        Poly::new(self.generator_poly.clone()).degree()
    }

    pub fn delay_steps(&self) -> Result<usize> {
        steps_for(self.tau, self.dt).ok_or_else(|| {
            Error::Design(format!("delay {} s is not a multiple of dt = {} s", self.tau, self.dt))
        })
    }

    pub fn param_count(&self) -> Result<usize> {
        let q = self.generator_dim();
        Ok(match self.mode {
            AdaptiveMode::Drcrm => 2 * q + self.delay_steps()? + 2,
            _ => 2 * q + 2,
        })
    }

    /// Structural checks plus the SPR gate on `W_e`.
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || self.sign_kp.abs() != 1.0 {
            return Err(Error::Design("need dt > 0 and sign_kp = ±1".into()));
        }
        let k = self.param_count()?;
        if self.theta0.len() != k || self.rates.len() != k {
            return Err(Error::Design(format!(
                "{} expects {k} parameters, got {} initial values and {} rates",
                self.mode.name(),
                self.theta0.len(),
                self.rates.len()
            )));
        }
        if self.rates.iter().any(|g| !(*g >= 0.0) || !g.is_finite()) {
            return Err(Error::Design("adaptation rates must be finite and ≥ 0".into()));
        }
        if !(self.u_min < self.u_max) {
            return Err(Error::Design("u_min must be below u_max".into()));
        }
        self.projection.validate()?;
        let l = self.reference.gain_vector()?;
        match self.mode {
            AdaptiveMode::Mrac if l.iter().any(|v| *v != 0.0) => {
                return Err(Error::Design("MRAC takes no CRM gain".into()))
            }
            AdaptiveMode::Drcrm if (self.reference.delay - self.tau).abs() > 1e-12 => {
                return Err(Error::Design("the DR-CRM reference model must be delayed by τ".into()))
            }
            AdaptiveMode::Mrac | AdaptiveMode::Crm if self.reference.delay != 0.0 => {
                return Err(Error::Design("only DR-CRM delays its reference model".into()))
            }
            _ => {}
        }
        let gens = SignalGenerators::from_poly(&Poly::new(self.generator_poly.clone()))?;
        let slowest = self.reference.slowest_pole()?;
        if gens.dim() > 0 && !(gens.slowest_rate() < slowest) {
            return Err(Error::Design(format!(
                "generator poles (slowest {:.4}) must be faster than the reference model ({slowest:.4})",
                gens.slowest_rate()
            )));
        }
        self.reference.check_spr()
    }
}

/// Output-feedback adaptive controller for plants of relative degree one.
#[derive(Debug, Clone)]
pub struct GeneralAdaptive {
    cfg: GeneralAdaptiveConfig,
    theta: DVector<f64>,
    rates: DVector<f64>,
    gens: SignalGenerators,
    refm: GeneralRefModel,
    history: DelayBuffer,
    /// Adaptation regressors of the last `m` ticks, oldest first.
    lagged: VecDeque<DVector<f64>>,
}

impl GeneralAdaptive {
    pub fn new(cfg: GeneralAdaptiveConfig) -> Result<Self> {
        cfg.validate()?;
        let m = cfg.delay_steps()?;
        let k = cfg.param_count()?;
        let lagged = match cfg.mode {
            AdaptiveMode::Drcrm => std::iter::repeat_n(DVector::zeros(k), m).collect(),
            _ => VecDeque::new(),
        };
        Ok(GeneralAdaptive {
            theta: DVector::from_vec(cfg.theta0.clone()),
            rates: DVector::from_vec(cfg.rates.clone()),
            gens: SignalGenerators::from_poly(&Poly::new(cfg.generator_poly.clone()))?,
            refm: GeneralRefModel::new(&cfg.reference, cfg.dt)?,
            history: DelayBuffer::new(m, cfg.dt, 0.0),
            lagged,
            cfg,
        })
    }

    pub fn config(&self) -> &GeneralAdaptiveConfig {
        &self.cfg
    }

    pub fn theta(&self) -> &DVector<f64> {
        &self.theta
    }

    pub fn generators(&self) -> &SignalGenerators {
        &self.gens
    }

    /// Age of the regressor used for adaptation, s.
    pub fn regressor_lag(&self) -> f64 {
        self.lagged.len() as f64 * self.cfg.dt
    }

    /// Control and adaptation regressors; they differ only in the `dt`
    /// factor on the input-history entries.
    fn regressors(&self, y_p: f64, r: f64) -> (DVector<f64>, DVector<f64>) {
        let q = self.gens.dim();
        let m = self.history.capacity();
        let drcrm = self.cfg.mode == AdaptiveMode::Drcrm;
        let k = 2 * q + 2 + if drcrm { m } else { 0 };
        let mut w = DVector::zeros(k);
        w[0] = y_p;
        w.rows_mut(1, q).copy_from(self.gens.omega1());
        w.rows_mut(1 + q, q).copy_from(self.gens.omega2());
        let mut control = w.clone();
        if drcrm {
            for j in 1..=m {
                let u = self.history.sample(j);
                w[2 * q + j] = u;
                control[2 * q + j] = u * self.cfg.dt;
            }
        }
        w[k - 1] = r;
        control[k - 1] = r;
        (control, w)
    }
}

impl Controller for GeneralAdaptive {
    fn dt(&self) -> f64 {
        self.cfg.dt
    }

    fn step(&mut self, y_p: f64, r: f64) -> Result<ControlOutput> {
        if !(y_p.is_finite() && r.is_finite()) {
            return Err(Error::NonFinite("adaptive controller input"));
        }
        let y_m = self.refm.output();
        let e1 = y_p - y_m;
        let (control, current) = self.regressors(y_p, r);
        let raw = self.theta.dot(&control);
        if !raw.is_finite() {
            return Err(Error::NonFinite("adaptive control signal"));
        }
        let u = raw.clamp(self.cfg.u_min, self.cfg.u_max);

        let adapt = match self.lagged.pop_front() {
            Some(old) => {
                self.lagged.push_back(current);
                old
            }
            None => current,
        };
        let direction = adapt.component_mul(&self.rates) * (-self.cfg.sign_kp * e1);
        let step = self.cfg.projection.project(&self.theta, &direction) * self.cfg.dt;
        self.theta += step;
        self.cfg.projection.enforce(&mut self.theta);
        if self.theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("adaptive parameters"));
        }

        self.refm.advance(r, y_p);
        let m = self.history.capacity();
        let u_delayed = if m == 0 { u } else { self.history.sample(m) };
        self.gens.step(u_delayed, y_p, self.cfg.dt)?;
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

    fn cfg(mode: AdaptiveMode) -> GeneralAdaptiveConfig {
        let (tau, ell, k) = match mode {
            AdaptiveMode::Drcrm => (0.3, vec![1.0, 0.0], 10),
            AdaptiveMode::Crm => (0.0, vec![1.0, 0.0], 4),
            AdaptiveMode::Mrac => (0.0, vec![], 4),
        };
        GeneralAdaptiveConfig {
            mode,
            dt: 0.05,
            tau,
            sign_kp: 1.0,
            generator_poly: vec![1.0, 5.0],
            reference: GeneralRefConfig {
                num: vec![2.0, 10.0],
                den: vec![1.0, 5.0, 6.0],
                ell,
                delay: tau,
            },
            theta0: vec![0.1; k],
            rates: vec![0.5; k],
            projection: ProjectionConfig::new(10.0, 0.1).unwrap(),
            u_min: -100.0,
            u_max: 100.0,
        }
    }

    #[test]
    fn zero_error_freezes_parameters() {
        for mode in [AdaptiveMode::Mrac, AdaptiveMode::Crm, AdaptiveMode::Drcrm] {
            let mut c = GeneralAdaptive::new(cfg(mode)).unwrap();
            let before = c.params();
            // at rest with y_p = y_m = 0 the error stays zero
            for _ in 0..20 {
                let out = c.step(0.0, 0.0).unwrap();
                assert_eq!(out.e1, 0.0);
            }
            assert_eq!(c.params(), before);
        }
    }

    #[test]
    fn drcrm_regressor_lag_is_the_delay() {
        let c = GeneralAdaptive::new(cfg(AdaptiveMode::Drcrm)).unwrap();
        assert!((c.regressor_lag() - 0.3).abs() < 1e-12);
        assert_eq!(GeneralAdaptive::new(cfg(AdaptiveMode::Crm)).unwrap().regressor_lag(), 0.0);
    }

    #[test]
    fn drcrm_adapts_on_the_delayed_regressor() {
        let mut c = GeneralAdaptive::new(cfg(AdaptiveMode::Drcrm)).unwrap();
        // nonzero error from the start, but the regressor buffer holds zeros
        // for the first m ticks, so nothing moves before then
        let theta0 = c.params();
        for _ in 0..6 {
            c.step(1.0, 0.0).unwrap();
            assert_eq!(c.params(), theta0);
        }
        c.step(1.0, 0.0).unwrap();
        assert_ne!(c.params(), theta0);
    }

    #[test]
    fn slow_generators_rejected() {
        let mut bad = cfg(AdaptiveMode::Mrac);
        bad.generator_poly = vec![1.0, 1.0];
        assert!(matches!(GeneralAdaptive::new(bad), Err(Error::Design(_))));
    }
}
