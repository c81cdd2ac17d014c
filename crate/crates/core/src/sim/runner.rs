//! Two-rate closed-loop engine.

use super::scenario::{NoiseSource, Scenario};
use super::trace::{SimTrace, TraceRow};
use crate::controller::Controller;
use crate::error::{Error, Result};
use crate::plant::Plant;

/// Operating point the controller works around, absolute units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Offsets {
    pub y0: f64,
    pub u0: f64,
}

/// Outcome of a run: the trace up to the last completed tick, and the reason
/// it stopped early, if it did.
#[derive(Debug)]
pub struct SimRun {
    pub trace: SimTrace,
    pub abort: Option<Error>,
}

impl SimRun {
    pub fn completed(&self) -> bool {
        self.abort.is_none()
    }
}

/// Runs `controller` against `plant` over `scenario`.
///
/// At every controller tick the noisy output is read, the controller computes
/// a deviation command, and the absolute command is latched into the plant,
/// which then integrates `dt_ctrl/dt_sim` steps with it held. Plant or
/// controller failures end the run and are returned with the partial trace;
/// inconsistent timing is an error before anything runs.
pub fn run_closed_loop(
    plant: &mut dyn Plant,
    controller: &mut dyn Controller,
    offsets: Offsets,
    scenario: &Scenario,
) -> Result<SimRun> {
    scenario.validate()?;
    let (sub, ticks) = scenario.timing()?;
    if (plant.dt() - scenario.dt_sim).abs() > 1e-12 * scenario.dt_sim {
        return Err(Error::Config(format!(
            "plant step {} s differs from dt_sim = {} s",
            plant.dt(),
            scenario.dt_sim
        )));
    }
    if (controller.dt() - scenario.dt_ctrl).abs() > 1e-12 * scenario.dt_ctrl {
        return Err(Error::Config(format!(
            "controller period {} s differs from dt_ctrl = {} s",
            controller.dt(),
            scenario.dt_ctrl
        )));
    }
    let mut noise = NoiseSource::new(scenario.noise, scenario.seed);
    let mut trace = SimTrace::new(controller.params().len());
    for k in 0..ticks {
        let t = k as f64 * scenario.dt_ctrl;
        let r = scenario.reference_at(t);
        let d0 = scenario.disturbance_at(t);
        plant.set_disturbance(d0);
        let y_p = plant.output();
        let measured = y_p + noise.sample();
        let out = match controller.step(measured - offsets.y0, r - offsets.y0) {
            Ok(out) => out,
            Err(e) => return Ok(SimRun { trace, abort: Some(e) }),
        };
        let u = offsets.u0 + out.u;
        let plant_sat = plant.command(u);
        trace.push(TraceRow {
            t,
            r,
            y_m: offsets.y0 + out.y_m,
            y_p,
            u,
            e1: out.e1,
            theta: controller.params(),
            d0,
            sat: out.saturated || plant_sat,
        });
        for _ in 0..sub {
            if let Err(e) = plant.step() {
                return Ok(SimRun { trace, abort: Some(e) });
            }
        }
    }
    Ok(SimRun { trace, abort: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plant::LinearPlant;
    use crate::scalar::{PiConfig, PiController, RefModelParams};
    use crate::sim::scenario::Segment;

    fn scenario() -> Scenario {
        Scenario {
            name: "flat".into(),
            duration: 5.0,
            dt_sim: 0.01,
            dt_ctrl: 0.05,
            reference: vec![Segment::hold(5.0, 0.6)],
            disturbance: vec![],
            noise: None,
            seed: 0,
            windows: vec![],
        }
    }

    fn pi(k_p: f64) -> PiController {
        PiController::new(PiConfig {
            k_p,
            t_i: 1.0,
            dt: 0.05,
            u_min: -10.0,
            u_max: 10.0,
            reference: RefModelParams::with_time_constant(0.3),
        })
        .unwrap()
    }

    #[test]
    fn zero_gain_at_equilibrium_is_flat() {
        let mut plant = LinearPlant::first_order(-1.0, -1.0, 0.3, 0.01).unwrap().with_offsets(0.6, 0.4);
        let mut c = pi(0.0);
        let run = run_closed_loop(&mut plant, &mut c, Offsets { y0: 0.6, u0: 0.4 }, &scenario()).unwrap();
        assert!(run.completed());
        assert_eq!(run.trace.len(), 100);
        for row in &run.trace.rows {
            assert_eq!(row.y_p, 0.6);
            assert_eq!(row.u, 0.4);
        }
    }

    #[test]
    fn mismatched_rates_rejected() {
        let mut plant = LinearPlant::first_order(-1.0, -1.0, 0.0, 0.002).unwrap();
        let mut c = pi(0.0);
        assert!(run_closed_loop(&mut plant, &mut c, Offsets::default(), &scenario()).is_err());
    }

    #[test]
    fn plant_failure_keeps_partial_trace() {
        // positive feedback on an unstable plant diverges to non-finite values
        let mut plant = LinearPlant::first_order(50.0, 1.0, 0.0, 0.01).unwrap();
        let mut c = pi(0.0);
        let mut s = scenario();
        s.duration = 100.0;
        s.disturbance = vec![crate::sim::scenario::DisturbanceStep { time: 0.0, value: 1.0 }];
        let run = run_closed_loop(&mut plant, &mut c, Offsets::default(), &s).unwrap();
        assert!(!run.completed());
        assert!(run.trace.len() > 0 && run.trace.len() < 2000);
    }
}
