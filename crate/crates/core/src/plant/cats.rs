//! Nonlinear cold-air test setup: pressure chamber, valve and actuator.

use serde::{Deserialize, Serialize};

use super::actuator::{ActuatorModel, DelayedCommand};
use super::gas::{GasParams, InflowPolynomial};
use super::valve::ValveGeometry;
use super::Plant;
use crate::error::{Error, Result};
use crate::lintools::{rk4_step, Pair, RationalTransfer};

/// Scales between physical and controller units.
///
/// Controller output is `P / pressure`, controller input is `A_t / area`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    /// Pa per output unit.
    pub pressure: f64,
    /// mm² per input unit.
    pub area: f64,
}

/// Full parameter set of the nonlinear plant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatsConfig {
    pub gas: GasParams,
    pub inflow: InflowPolynomial,
    pub valve: ValveGeometry,
    pub actuator: ActuatorModel,
    pub normalization: Normalization,
    /// Pressure above which a run aborts, Pa.
    pub p_max: f64,
}

impl CatsConfig {
    /// Synthetic stand-in for the test rig, tuned so the plant pole and gain
    /// sit on the same time scale as the controller design targets.
    pub fn nominal() -> Self {
        CatsConfig {
            gas: GasParams::nitrogen(0.04),
            inflow: InflowPolynomial::with_droop(1.0, 0.3, 3e6),
            valve: ValveGeometry {
                r0: 15.0,
                y0: 13.5,
                alpha: 15f64.to_radians(),
                r1: 66.0,
                r2: 1.0,
                theta_max: 2.0e6,
            },
            actuator: ActuatorModel {
                tau_act: 0.05,
                delay: 0.3,
            },
            normalization: Normalization {
                pressure: 3e6,
                area: 300.0,
            },
            p_max: 4e6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.gas.validate()?;
        self.valve.validate()?;
        self.actuator.validate()?;
        if !(self.normalization.pressure > 0.0 && self.normalization.area > 0.0) {
            return Err(Error::InvalidArgument("normalization bases must be positive".into()));
        }
        if !(self.p_max > 0.0) {
            return Err(Error::InvalidArgument("p_max must be positive".into()));
        }
        self.inflow.validate_positive(0.0, self.p_max)
    }

    /// `Ṗ = c1·ṁ_in(P) − c2·P·A_t` in Pa/s with `A_t` in mm².
    pub fn pressure_rate(&self, p: f64, area_mm2: f64) -> f64 {
        self.gas.c1() * self.inflow.mass_flow(p) - self.gas.c2() * p * area_mm2 * 1e-6
    }

    /// Throat area holding pressure `p` steady, mm².
    pub fn equilibrium_area(&self, p: f64) -> f64 {
        self.gas.c1() * self.inflow.mass_flow(p) / (self.gas.c2() * p * 1e-6)
    }

    /// Steady pressure for a fixed throat area, by bisection on `(0, p_max]`.
    pub fn equilibrium_pressure(&self, area_mm2: f64) -> Result<f64> {
        let f = |p: f64| self.pressure_rate(p, area_mm2);
        let (mut lo, mut hi) = (1e-9 * self.p_max, self.p_max);
        if !(f(lo) > 0.0 && f(hi) < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "no equilibrium below p_max for area {area_mm2} mm²"
            )));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-12 * hi {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Steady state at chamber pressure `p`.
    pub fn operating_point(&self, p: f64) -> Result<OperatingPoint> {
        let area = self.equilibrium_area(p);
        let theta = self.valve.theta_for_area(area)?;
        Ok(OperatingPoint {
            pressure: p,
            area,
            theta,
            area_command: self.valve.linear_area(theta),
        })
    }

    /// Small-signal model about `(p0, area0)`.
    pub fn linearize_at(&self, p0: f64, area0: f64) -> Linearization {
        let c2 = self.gas.c2();
        Linearization {
            a_p: -c2 * area0 * 1e-6,
            b_p: -c2 * p0 * 1e-6,
            inflow_slope: self.gas.c1() * self.inflow.slope(p0),
            tau: self.actuator.delay,
        }
    }
}

/// A steady state of the plant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    /// Pa.
    pub pressure: f64,
    /// True throat area, mm².
    pub area: f64,
    /// Motor position, qc.
    pub theta: f64,
    /// Area command that the linear valve inverse maps to `theta`, mm².
    pub area_command: f64,
}

/// `ΔṖ = (a_p + inflow_slope)·ΔP + b_p·ΔA_t(t − τ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Linearization {
    /// Outflow contribution `−c2·A_t0`, 1/s.
    pub a_p: f64,
    /// `−c2·P0`, Pa/(mm²·s).
    pub b_p: f64,
    /// `c1·dṁ_in/dP` at `P0`, 1/s. Zero for a constant supply.
    pub inflow_slope: f64,
    /// Input delay, s.
    pub tau: f64,
}

impl Linearization {
    /// Open-loop pole including the supply droop.
    pub fn pole(&self) -> f64 {
        self.a_p + self.inflow_slope
    }

    /// Pole and gain in controller units.
    pub fn normalized(&self, norm: &Normalization) -> (f64, f64) {
        (self.pole(), self.b_p * norm.area / norm.pressure)
    }

    /// Delay-free part `b_p/(s − pole)`.
    pub fn transfer(&self) -> RationalTransfer {
        RationalTransfer::first_order(self.b_p, self.pole())
    }
}

/// Running nonlinear plant.
#[derive(Debug, Clone)]
pub struct CatsPlant {
    cfg: CatsConfig,
    dt: f64,
    line: DelayedCommand,
    pressure: f64,
    theta_mes: f64,
    held: f64,
    d0: f64,
    time: f64,
}

impl CatsPlant {
    /// Plant resting at `op` with the command history filled accordingly.
    pub fn at_rest(cfg: CatsConfig, op: &OperatingPoint, dt: f64) -> Result<Self> {
        cfg.validate()?;
        let steps = cfg.actuator.delay_steps(dt)?;
        Ok(CatsPlant {
            cfg,
            dt,
            line: DelayedCommand::new(steps, dt, op.theta),
            pressure: op.pressure,
            theta_mes: op.theta,
            held: op.theta,
            d0: 0.0,
            time: 0.0,
        })
    }

    pub fn config(&self) -> &CatsConfig {
        &self.cfg
    }

    pub fn pressure(&self) -> f64 {
        self.pressure
    }

    pub fn theta_mes(&self) -> f64 {
        self.theta_mes
    }

    /// Latches a motor position command, qc.
    pub fn command_theta(&mut self, theta: f64) {
        self.held = theta;
    }

    /// One integration step of pressure and motor position.
    pub fn advance(&mut self) -> Result<()> {
        let effective = self.line.advance(self.held) + self.d0;
        let cfg = self.cfg;
        let f = |x: &Pair, cmd: f64, _t: f64| {
            let area = cfg.valve.throat_area_clamped(x.1);
            Pair(cfg.pressure_rate(x.0, area), cfg.actuator.rate(x.1, cmd))
        };
        let next = rk4_step(f, &Pair(self.pressure, self.theta_mes), effective, self.time, self.dt)
            .map_err(|e| Error::PlantAbort {
                time: self.time,
                reason: e.to_string(),
            })?;
        self.time += self.dt;
        if !(next.0 > 0.0 && next.0 < self.cfg.p_max) {
            return Err(Error::PlantAbort {
                time: self.time,
                reason: format!("pressure {:.4e} Pa left (0, {:.4e})", next.0, self.cfg.p_max),
            });
        }
        self.pressure = next.0;
        self.theta_mes = next.1;
        Ok(())
    }
}

impl Plant for CatsPlant {
    fn dt(&self) -> f64 {
        self.dt
    }

    fn output(&self) -> f64 {
        self.pressure / self.cfg.normalization.pressure
    }

    fn command(&mut self, u: f64) -> bool {
        let (theta, saturated) = self.cfg.valve.area_to_theta(u * self.cfg.normalization.area);
        self.held = theta;
        saturated
    }

    fn set_disturbance(&mut self, d0: f64) {
        self.d0 = d0;
    }

    fn step(&mut self) -> Result<()> {
        self.advance()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nominal_plant(p0: f64) -> (CatsConfig, OperatingPoint, CatsPlant) {
        let cfg = CatsConfig::nominal();
        let op = cfg.operating_point(p0).unwrap();
        let plant = CatsPlant::at_rest(cfg, &op, 0.001).unwrap();
        (cfg, op, plant)
    }

    #[test]
    fn nominal_is_valid() {
        let cfg = CatsConfig::nominal();
        cfg.validate().unwrap();
        let op = cfg.operating_point(2e6).unwrap();
        assert!(op.theta > 0.0 && op.theta < cfg.valve.theta_max);
        assert!((cfg.valve.throat_area(op.theta).unwrap() - op.area).abs() < 1e-9);
    }

    #[test]
    fn rest_stays_at_rest() {
        let (_, op, mut plant) = nominal_plant(2e6);
        for _ in 0..2000 {
            plant.advance().unwrap();
        }
        assert!((plant.pressure() - op.pressure).abs() < 1e-6 * op.pressure);
        assert!((plant.theta_mes() - op.theta).abs() < 1e-6);
    }

    #[test]
    fn balance_and_sign() {
        let cfg = CatsConfig::nominal();
        let a = cfg.equilibrium_area(2e6);
        assert!(cfg.pressure_rate(2e6, a).abs() < 1e-6);
        assert!(cfg.pressure_rate(2e6, 2.0 * a) < 0.0);
    }

    #[test]
    fn linearization_signs_and_definition() {
        let mut cfg = CatsConfig::nominal();
        cfg.inflow = InflowPolynomial::constant(1.0);
        let lin = cfg.linearize_at(2e6, 200.0);
        assert_eq!(lin.a_p, -cfg.gas.c2() * 200.0 * 1e-6);
        assert_eq!(lin.inflow_slope, 0.0);
        assert_eq!(lin.pole(), lin.a_p);
        assert!(lin.b_p < 0.0);
        assert_eq!(lin.tau, 0.3);
    }

    #[test]
    fn motor_waits_out_the_delay() {
        let (cfg, op, mut plant) = nominal_plant(2e6);
        plant.command_theta(op.theta + 10_000.0);
        let mut moved_at = None;
        for k in 0..600 {
            plant.advance().unwrap();
            if moved_at.is_none() && (plant.theta_mes() - op.theta).abs() > 1e-9 {
                moved_at = Some(k);
            }
        }
        // step k integrates [k·dt, (k+1)·dt]; the new command is first used at t = 0.3 s
        assert_eq!(moved_at, Some(300));
        assert!(cfg.actuator.delay == 0.3);
    }

    #[test]
    fn excessive_pressure_aborts() {
        let mut cfg = CatsConfig::nominal();
        cfg.p_max = 2.05e6;
        let op = cfg.operating_point(2e6).unwrap();
        let mut plant = CatsPlant::at_rest(cfg, &op, 0.001).unwrap();
        plant.command_theta(0.0);
        let err = (0..5000).try_for_each(|_| plant.advance()).unwrap_err();
        assert!(matches!(err, Error::PlantAbort { .. }));
    }
}
