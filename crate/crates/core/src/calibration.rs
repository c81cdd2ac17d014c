//! Identification of the supply characteristic and the actuator response from
//! test data.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plant::{ActuatorModel, GasParams, InflowPolynomial};

/// Result of [`fit_inflow_polynomial`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InflowFit {
    pub inflow: InflowPolynomial,
    /// Degree actually fitted (3 unless the data were too few).
    pub degree: usize,
    /// RMS of the fit residual, kg/s.
    pub residual_rms: f64,
    pub warning: Option<String>,
}

/// Fits `ṁ_in(P)` from steady operating points `(P_ss [Pa], A_t [mm²])`.
///
/// At steady state the inflow equals the choked outflow `P·A_t/c*`. The cubic is
/// fitted by least squares in `P / max P`. With fewer than four distinct
/// pressures the degree drops to `distinct − 1` and a warning is attached.
pub fn fit_inflow_polynomial(points: &[(f64, f64)], gas: &GasParams) -> Result<InflowFit> {
    gas.validate()?;
    if points.is_empty() {
        return Err(Error::Calibration("no steady-state points".into()));
    }
    if let Some((p, a)) = points.iter().find(|(p, a)| !(*p > 0.0 && *a > 0.0)) {
        return Err(Error::Calibration(format!(
            "steady point (P = {p}, A_t = {a}) must have positive pressure and area"
        )));
    }
    let flows: Vec<f64> = points.iter().map(|&(p, a)| gas.outflow(p, a)).collect();
    let scale = points.iter().map(|p| p.0).fold(0.0, f64::max);

    let mut distinct: Vec<f64> = points.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * scale);
    let degree = (distinct.len() - 1).min(3);
    let warning = (degree < 3).then(|| {
        format!(
            "only {} distinct pressure(s); fitted degree {degree} instead of a cubic",
            distinct.len()
        )
    });

    let n = points.len();
    let x = DMatrix::from_fn(n, degree + 1, |i, j| (points[i].0 / scale).powi(j as i32));
    let y = DVector::from_vec(flows.clone());
    let beta = least_squares(&x, &y)?;

    let mut c = [0.0; 4];
    for (j, b) in beta.iter().enumerate() {
        c[j] = b / scale.powi(j as i32);
    }
    let inflow = InflowPolynomial {
        c3: c[3],
        c4: c[2],
        c5: c[1],
        c6: c[0],
    };
    let residual_rms = (points
        .iter()
        .zip(&flows)
        .map(|(&(p, _), q)| (inflow.mass_flow(p) - q).powi(2))
        .sum::<f64>()
        / n as f64)
        .sqrt();
    Ok(InflowFit {
        inflow,
        degree,
        residual_rms,
        warning,
    })
}

fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    let qr = x.clone().qr();
    let qty = qr.q().transpose() * y;
    let r = qr.r();
    r.solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Calibration("rank-deficient least-squares problem".into()))
}

/// Result of [`fit_first_order_delay`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActuatorFit {
    pub model: ActuatorModel,
    /// RMS of the normalized model residual over the whole trace.
    pub residual_rms: f64,
}

/// Level defining the delay: the response first reaching 2 % of its final
/// amplitude.
pub const DELAY_THRESHOLD: f64 = 0.02;

/// Fits `θ_mes/θ_com = e^{−s·delay}/(τ·s + 1)` to a step response.
///
/// The step is assumed applied at the first sample time. `τ` comes from a
/// least-squares line through `ln(1 − y)` over the 5 %–90 % span of the
/// normalized response `y`. The 2 % crossing is located by log-linear
/// interpolation and the lag's own rise to 2 %, `τ·ln(1/0.98)`, is removed to
/// leave the dead time.
pub fn fit_first_order_delay(trace: &[(f64, f64)], step: f64) -> Result<ActuatorFit> {
    if trace.len() < 20 {
        return Err(Error::Calibration("step trace needs at least 20 samples".into()));
    }
    if trace.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::Calibration("trace times must increase strictly".into()));
    }
    let t0 = trace[0].0;
    let start = trace[0].1;
    let tail = &trace[trace.len() - (trace.len() / 10).max(2)..];
    let final_value = tail.iter().map(|s| s.1).sum::<f64>() / tail.len() as f64;
    let amplitude = final_value - start;
    if amplitude == 0.0 || (step != 0.0 && amplitude.signum() != step.signum()) {
        return Err(Error::Calibration(format!(
            "response amplitude {amplitude} does not follow the commanded step {step}"
        )));
    }
    let std = (tail.iter().map(|s| (s.1 - final_value).powi(2)).sum::<f64>() / tail.len() as f64).sqrt();
    let half = tail.len() / 2;
    let mean = |s: &[(f64, f64)]| s.iter().map(|v| v.1).sum::<f64>() / s.len() as f64;
    let drift = (mean(&tail[half..]) - mean(&tail[..half])).abs();
    if std > 0.01 * amplitude.abs() || drift > 0.01 * amplitude.abs() {
        return Err(Error::Calibration(format!(
            "trace has not settled: final-window spread {:.3} % and drift {:.3} % of amplitude",
            100.0 * std / amplitude.abs(),
            100.0 * drift / amplitude.abs()
        )));
    }
    let norm: Vec<(f64, f64)> = trace.iter().map(|&(t, v)| (t - t0, (v - start) / amplitude)).collect();

    // time constant from the log-linear span
    let span: Vec<(f64, f64)> = norm
        .iter()
        .filter(|s| s.1 >= 0.05 && s.1 <= 0.90)
        .map(|&(t, y)| (t, (1.0 - y).ln()))
        .collect();
    if span.len() < 3 {
        return Err(Error::Calibration(
            "too few samples between 5 % and 90 % of the response".into(),
        ));
    }
    let k = span.len() as f64;
    let mt = span.iter().map(|s| s.0).sum::<f64>() / k;
    let mz = span.iter().map(|s| s.1).sum::<f64>() / k;
    let sxx = span.iter().map(|s| (s.0 - mt).powi(2)).sum::<f64>();
    let slope = span.iter().map(|s| (s.0 - mt) * (s.1 - mz)).sum::<f64>() / sxx;
    if !(slope < 0.0) {
        return Err(Error::Calibration("response does not decay towards its final value".into()));
    }
    let tau = -1.0 / slope;

    let i = norm
        .iter()
        .position(|s| s.1 >= DELAY_THRESHOLD)
        .ok_or_else(|| Error::Calibration("response never reaches 2 % of its amplitude".into()))?;
    let crossing = if i == 0 {
        0.0
    } else {
        let (ta, ya) = norm[i - 1];
        let (tb, yb) = norm[i];
        let (za, zb, zt) = ((1.0 - ya).ln(), (1.0 - yb).ln(), (1.0 - DELAY_THRESHOLD).ln());
        ta + (zt - za) / (zb - za) * (tb - ta)
    };
    let delay = (crossing - tau * (1.0 / (1.0 - DELAY_THRESHOLD)).ln()).max(0.0);

    let residual_rms = (norm
        .iter()
        .map(|&(t, y)| {
            let model = if t > delay { 1.0 - (-(t - delay) / tau).exp() } else { 0.0 };
            (model - y).powi(2)
        })
        .sum::<f64>()
        / norm.len() as f64)
        .sqrt();
    Ok(ActuatorFit {
        model: ActuatorModel { tau_act: tau, delay },
        residual_rms,
    })
}

fn read_pairs(path: &Path, columns: [&str; 2]) -> Result<Vec<(f64, f64)>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let headers = reader.headers()?.clone();
    let idx = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::Calibration(format!("{}: missing column `{name}`", path.display()))
        })
    };
    let (a, b) = (idx(columns[0])?, idx(columns[1])?);
    let mut out = vec![];
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let parse = |i: usize| {
            record.get(i).and_then(|s| s.parse::<f64>().ok()).ok_or_else(|| {
                Error::Calibration(format!("{}:{}: unreadable number", path.display(), line + 2))
            })
        };
        out.push((parse(a)?, parse(b)?));
    }
    Ok(out)
}

/// Reads steady operating points from a CSV with columns `P_ss,A_t`.
pub fn read_inflow_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    read_pairs(path, ["P_ss", "A_t"])
}

/// Reads a step response from a CSV with columns `t,theta_mes`.
pub fn read_step_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    read_pairs(path, ["t", "theta_mes"])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plant::Actuator;

    fn synth_points(q: &InflowPolynomial, gas: &GasParams, ps: &[f64]) -> Vec<(f64, f64)> {
        // area that balances the given inflow: P·A·1e-6/c* = ṁ
        ps.iter().map(|&p| (p, q.mass_flow(p) * gas.c_star() / (p * 1e-6))).collect()
    }

    #[test]
    fn recovers_known_cubic() {
        let gas = GasParams::nitrogen(0.04);
        let truth = InflowPolynomial {
            c3: -1.1e-20,
            c4: 2.0e-14,
            c5: -3.0e-8,
            c6: 1.05,
        };
        let ps: Vec<f64> = (0..9).map(|i| 1.0e6 + 2.5e5 * i as f64).collect();
        let fit = fit_inflow_polynomial(&synth_points(&truth, &gas, &ps), &gas).unwrap();
        assert_eq!(fit.degree, 3);
        assert!(fit.warning.is_none());
        for (a, b) in [(fit.inflow.c3, truth.c3), (fit.inflow.c4, truth.c4), (fit.inflow.c5, truth.c5), (fit.inflow.c6, truth.c6)] {
            assert!(((a - b) / b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn four_points_interpolate() {
        let gas = GasParams::nitrogen(0.04);
        let truth = InflowPolynomial::with_droop(1.0, 0.3, 3e6);
        let pts = synth_points(&truth, &gas, &[1.2e6, 1.8e6, 2.3e6, 2.9e6]);
        let fit = fit_inflow_polynomial(&pts, &gas).unwrap();
        for &(p, a) in &pts {
            let q = gas.outflow(p, a);
            assert!(((fit.inflow.mass_flow(p) - q) / q).abs() < 1e-9);
        }
    }

    #[test]
    fn flat_at_low_pressure() {
        let gas = GasParams::nitrogen(0.04);
        let q = 0.95;
        let pts: Vec<(f64, f64)> = [0.5e6, 0.8e6].iter().map(|&p| (p, q * gas.c_star() / (p * 1e-6))).collect();
        let fit = fit_inflow_polynomial(&pts, &gas).unwrap();
        assert_eq!(fit.degree, 1);
        assert!(fit.inflow.c5.abs() < 1e-18);
        assert!((fit.inflow.mass_flow(0.6e6) - q).abs() < 1e-12);
    }

    #[test]
    fn repeated_pressure_gives_constant_with_warning() {
        let gas = GasParams::nitrogen(0.04);
        let pts = vec![(2e6, 200.0), (2e6, 202.0), (2e6, 198.0)];
        let fit = fit_inflow_polynomial(&pts, &gas).unwrap();
        assert_eq!(fit.degree, 0);
        assert!(fit.warning.is_some());
        assert!((fit.inflow.c6 - gas.outflow(2e6, 200.0)).abs() < 1e-12);
    }

    fn step_trace(tau: f64, delay: f64, dt: f64, seconds: f64) -> Vec<(f64, f64)> {
        let mut act = Actuator::new(ActuatorModel { tau_act: tau, delay }, dt, 100.0).unwrap();
        let n = (seconds / dt) as usize;
        let mut trace = vec![(0.0, 100.0)];
        for k in 1..=n {
            trace.push((k as f64 * dt, act.step(5100.0)));
        }
        trace
    }

    #[test]
    fn recovers_noiseless_actuator() {
        let dt = 0.001;
        let fit = fit_first_order_delay(&step_trace(0.1, 0.3, dt, 1.5), 5000.0).unwrap();
        assert!((fit.model.tau_act - 0.1).abs() <= dt);
        assert!((fit.model.delay - 0.3).abs() <= dt);
        assert!(fit.residual_rms < 1e-3);
    }

    #[test]
    fn zero_delay() {
        let dt = 0.001;
        let fit = fit_first_order_delay(&step_trace(0.1, 0.0, dt, 1.0), 5000.0).unwrap();
        assert!(fit.model.delay <= dt);
    }

    #[test]
    fn unsettled_trace_rejected() {
        let trace = step_trace(0.5, 0.0, 0.001, 0.6);
        assert!(matches!(fit_first_order_delay(&trace, 5000.0), Err(Error::Calibration(_))));
    }
}
