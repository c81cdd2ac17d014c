//! Step-response metrics: steady-state error, rise time, settling time and
//! overshoot.

use serde::{Deserialize, Serialize};

use super::trace::SimTrace;
use crate::error::{Error, Result};

/// Band for the settling time, fraction of the step.
pub const SETTLING_BAND: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepMetrics {
    /// `|r_final − ȳ_final|` as % of the reference step, with `ȳ_final` the
    /// mean over the last 10 % of the window.
    pub steady_state_error: f64,
    /// 10–90 % rise time, s.
    pub rise_time: f64,
    /// Time from the step to the last entry into the ±5 % band, s.
    pub settling_time: f64,
    /// Peak beyond the final value, % of the response excursion.
    pub overshoot: f64,
    /// False when the response ends the window outside the band; the
    /// settling time is then the window length after the step.
    pub settled: bool,
}

/// Metrics of `y` over `[start, end]`, which must contain exactly one change
/// of `r`.
pub fn step_metrics(t: &[f64], r: &[f64], y: &[f64], window: [f64; 2]) -> Result<StepMetrics> {
    if t.len() != r.len() || t.len() != y.len() {
        return Err(Error::InvalidArgument("metric columns differ in length".into()));
    }
    let idx: Vec<usize> = (0..t.len()).filter(|&i| t[i] >= window[0] && t[i] <= window[1]).collect();
    if idx.len() < 4 {
        return Err(Error::InvalidArgument(format!("window {window:?} holds fewer than 4 samples")));
    }
    let changes: Vec<usize> = idx.windows(2).filter(|w| r[w[1]] != r[w[0]]).map(|w| w[1]).collect();
    if changes.len() != 1 {
        return Err(Error::InvalidArgument(format!(
            "window {window:?} must contain exactly one reference step, found {}",
            changes.len()
        )));
    }
    let k0 = changes[0];
    let (t0, r_before, r_after) = (t[k0], r[k0 - 1], r[k0]);
    let step = r_after - r_before;
    let last = *idx.last().unwrap();
    let tail = ((last + 1 - k0) / 10).max(1);
    let y_final = y[last + 1 - tail..=last].iter().sum::<f64>() / tail as f64;
    let y_start = y[k0 - 1];
    let excursion = y_final - y_start;

    let steady_state_error = 100.0 * (r_after - y_final).abs() / step.abs();

    // normalized response: 0 at the start level, 1 at the final value
    let s = |i: usize| if excursion == 0.0 { 1.0 } else { (y[i] - y_start) / excursion };
    let crossing = |level: f64| -> Option<f64> {
        if s(k0) >= level {
            return Some(t[k0]);
        }
        (k0 + 1..=last).find(|&i| s(i) >= level).map(|i| {
            let (a, b) = (s(i - 1), s(i));
            t[i - 1] + (t[i] - t[i - 1]) * (level - a) / (b - a)
        })
    };
    let rise_time = match (crossing(0.1), crossing(0.9)) {
        (Some(a), Some(b)) => b - a,
        _ => t[last] - t0,
    };

    let band = SETTLING_BAND * step.abs();
    let outside = |i: usize| (y[i] - y_final).abs() > band;
    let settled = !outside(last);
    let settling_time = if !settled {
        t[last] - t0
    } else {
        match (k0..=last).rev().find(|&i| outside(i)) {
            None => 0.0,
            Some(i) => {
                // interpolate the band entry between samples i and i + 1
                let (a, b) = ((y[i] - y_final).abs(), (y[i + 1] - y_final).abs());
                let frac = if a == b { 1.0 } else { (a - band) / (a - b) };
                t[i] + (t[i + 1] - t[i]) * frac - t0
            }
        }
    };

    let peak = (k0..=last).map(s).fold(f64::NEG_INFINITY, f64::max);
    let overshoot = if excursion == 0.0 { 0.0 } else { 100.0 * (peak - 1.0).max(0.0) };

    Ok(StepMetrics {
        steady_state_error,
        rise_time,
        settling_time,
        overshoot,
        settled,
    })
}

/// Metrics of the plant output column.
pub fn compute_metrics(trace: &SimTrace, window: [f64; 2]) -> Result<StepMetrics> {
    step_metrics(
        &trace.column(|r| r.t),
        &trace.column(|r| r.r),
        &trace.column(|r| r.y_p),
        window,
    )
}

/// Total variation `Σ|u_{k+1} − u_k|` of a signal.
pub fn total_variation(u: &[f64]) -> f64 {
    u.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first_order(tau: f64, dt: f64, len: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = (len / dt).round() as usize;
        let t: Vec<f64> = (0..=n).map(|k| k as f64 * dt).collect();
        let r: Vec<f64> = t.iter().map(|&t| if t >= 1.0 { 1.0 } else { 0.0 }).collect();
        let y = t
            .iter()
            .map(|&t| if t >= 1.0 { 1.0 - (-(t - 1.0) / tau).exp() } else { 0.0 })
            .collect();
        (t, r, y)
    }

    #[test]
    fn first_order_settling_and_rise() {
        let dt = 0.05;
        let (t, r, y) = first_order(0.5, dt, 15.0);
        let m = step_metrics(&t, &r, &y, [0.0, 15.0]).unwrap();
        assert!((m.settling_time - 1.498).abs() <= dt, "{m:?}");
        assert!((m.rise_time - 0.5 * 9f64.ln()).abs() <= dt);
        // the tail mean sits a hair below the last sample of a monotone rise
        assert!(m.overshoot < 1e-6);
        assert!(m.steady_state_error < 1e-6);
        assert!(m.settled);
    }

    #[test]
    fn ideal_tracking() {
        let t: Vec<f64> = (0..100).map(|k| k as f64 * 0.1).collect();
        let r: Vec<f64> = t.iter().map(|&t| if t >= 5.0 { 2.0 } else { 1.0 }).collect();
        let m = step_metrics(&t, &r, &r, [0.0, 10.0]).unwrap();
        assert_eq!(m.steady_state_error, 0.0);
        assert_eq!(m.rise_time, 0.0);
        assert_eq!(m.settling_time, 0.0);
        assert_eq!(m.overshoot, 0.0);
    }

    #[test]
    fn downward_step_with_overshoot() {
        // underdamped response to a step from 1 to 0
        let dt = 0.01;
        let t: Vec<f64> = (0..2000).map(|k| k as f64 * dt).collect();
        let r: Vec<f64> = t.iter().map(|&t| if t >= 1.0 { 0.0 } else { 1.0 }).collect();
        let (z, wn) = (0.5f64, 4.0f64);
        let wd = wn * (1.0 - z * z).sqrt();
        let y: Vec<f64> = t
            .iter()
            .map(|&t| {
                if t < 1.0 {
                    return 1.0;
                }
                let s = t - 1.0;
                (-z * wn * s).exp() * ((wd * s).cos() + z * wn / wd * (wd * s).sin())
            })
            .collect();
        let m = step_metrics(&t, &r, &y, [0.0, 19.99]).unwrap();
        let expected = 100.0 * (-z * std::f64::consts::PI / (1.0 - z * z).sqrt()).exp();
        assert!((m.overshoot - expected).abs() < 0.1, "{} vs {expected}", m.overshoot);
    }

    #[test]
    fn rejects_windows_without_one_step() {
        let (t, r, y) = first_order(0.5, 0.05, 5.0);
        assert!(step_metrics(&t, &r, &y, [2.0, 5.0]).is_err());
    }

    #[test]
    fn unsettled_window_is_flagged() {
        let (t, r, y) = first_order(5.0, 0.05, 3.0);
        let mut y = y;
        // end on a swing outside the band around the tail mean
        let n = y.len();
        y[n - 1] += 0.5;
        let m = step_metrics(&t, &r, &y, [0.0, 3.0]).unwrap();
        assert!(!m.settled);
        assert!((m.settling_time - 2.0).abs() < 1e-9);
    }

    #[test]
    fn variation() {
        assert_eq!(total_variation(&[0.0, 1.0, -1.0, -1.0]), 3.0);
    }
}
