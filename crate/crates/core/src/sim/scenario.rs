//! Reference profiles, disturbances, noise and timing of a closed-loop run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A piece of the reference profile. Holds `value` for `duration` seconds, or
/// ramps linearly from `value` to `ramp_to`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    /// s.
    pub duration: f64,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramp_to: Option<f64>,
}

impl Segment {
    pub fn hold(duration: f64, value: f64) -> Self {
        Segment {
            duration,
            value,
            ramp_to: None,
        }
    }

    fn end_value(&self) -> f64 {
        self.ramp_to.unwrap_or(self.value)
    }
}

/// A change of the additive input disturbance at `time`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceStep {
    /// s.
    pub time: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    /// Uniform on `[−amplitude, amplitude]`.
    Uniform,
    /// Normal with standard deviation `amplitude`.
    Gaussian,
}

/// Zero-mean measurement noise on the pressure reading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub kind: NoiseKind,
    /// Output units.
    pub amplitude: f64,
}

/// Seeded noise source; identical seeds give identical sequences.
#[derive(Debug, Clone)]
pub struct NoiseSource {
    cfg: Option<NoiseConfig>,
    rng: ChaCha8Rng,
}

impl NoiseSource {
    pub fn new(cfg: Option<NoiseConfig>, seed: u64) -> Self {
        NoiseSource {
            cfg,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn sample(&mut self) -> f64 {
        match self.cfg {
            None => 0.0,
            Some(c) if c.amplitude == 0.0 => 0.0,
            Some(NoiseConfig {
                kind: NoiseKind::Uniform,
                amplitude,
            }) => self.rng.random_range(-amplitude..=amplitude),
            Some(NoiseConfig {
                kind: NoiseKind::Gaussian,
                amplitude,
            }) => Normal::new(0.0, amplitude)
                .expect("validated amplitude")
                .sample(&mut self.rng),
        }
    }
}

/// Everything about a run except the plant and controller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    /// s.
    pub duration: f64,
    /// Plant integration step, s.
    pub dt_sim: f64,
    /// Controller period, s.
    pub dt_ctrl: f64,
    /// Reference profile in output units; the last value holds afterwards.
    pub reference: Vec<Segment>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub disturbance: Vec<DisturbanceStep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
    /// Noise seed; the command line `--seed` overrides it.
    #[serde(default)]
    pub seed: u64,
    /// Windows `[start, end]` (s) holding one reference step each, for metrics.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub windows: Vec<[f64; 2]>,
}

impl Scenario {
    /// Ratio `dt_ctrl/dt_sim` and the number of controller ticks.
    pub fn timing(&self) -> Result<(usize, usize)> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.dt_sim > 0.0 && self.dt_ctrl > 0.0 && self.duration > 0.0) {
            return bad("duration, dt_sim and dt_ctrl must be positive".into());
        }
        let sub = (self.dt_ctrl / self.dt_sim).round();
        if sub < 1.0 || (sub * self.dt_sim - self.dt_ctrl).abs() > 1e-9 * self.dt_ctrl {
            return bad(format!(
                "dt_ctrl = {} s is not an integer multiple of dt_sim = {} s",
                self.dt_ctrl, self.dt_sim
            ));
        }
        let ticks = (self.duration / self.dt_ctrl).round();
        if (ticks * self.dt_ctrl - self.duration).abs() > 1e-9 * self.duration {
            return bad(format!(
                "duration = {} s is not an integer multiple of dt_ctrl = {} s",
                self.duration, self.dt_ctrl
            ));
        }
        Ok((sub as usize, ticks as usize))
    }

    pub fn validate(&self) -> Result<()> {
        self.timing()?;
        if self.reference.is_empty() {
            return Err(Error::Config("reference profile is empty".into()));
        }
        if self.reference.iter().any(|s| !(s.duration >= 0.0) || !s.value.is_finite()) {
            return Err(Error::Config("reference segments need finite values and durations ≥ 0".into()));
        }
        if let Some(n) = self.noise {
            if !(n.amplitude >= 0.0 && n.amplitude.is_finite()) {
                return Err(Error::Config("noise amplitude must be finite and ≥ 0".into()));
            }
        }
        for w in &self.windows {
            if !(w[0] < w[1]) {
                return Err(Error::Config(format!("metric window {w:?} is empty")));
            }
        }
        Ok(())
    }

    /// Reference at time `t`.
    pub fn reference_at(&self, t: f64) -> f64 {
        let mut start = 0.0;
        for seg in &self.reference {
            let end = start + seg.duration;
            if t < end {
                return match seg.ramp_to {
                    None => seg.value,
                    Some(to) => seg.value + (to - seg.value) * (t - start) / seg.duration,
                };
            }
            start = end;
        }
        self.reference.last().map_or(0.0, Segment::end_value)
    }

    /// Disturbance at time `t`.
    pub fn disturbance_at(&self, t: f64) -> f64 {
        self.disturbance
            .iter()
            .filter(|d| d.time <= t)
            .max_by(|a, b| a.time.total_cmp(&b.time))
            .map_or(0.0, |d| d.value)
    }

    /// Largest reference excursion from `center`, the r̄ of the rate formula.
    pub fn max_amplitude(&self, center: f64) -> f64 {
        self.reference
            .iter()
            .flat_map(|s| [s.value, s.end_value()])
            .map(|v| (v - center).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario() -> Scenario {
        Scenario {
            name: "t".into(),
            duration: 10.0,
            dt_sim: 0.001,
            dt_ctrl: 0.05,
            reference: vec![
                Segment::hold(2.0, 0.5),
                Segment {
                    duration: 2.0,
                    value: 0.5,
                    ramp_to: Some(0.7),
                },
                Segment::hold(1.0, 0.6),
            ],
            disturbance: vec![DisturbanceStep { time: 3.0, value: 0.1 }],
            noise: None,
            seed: 0,
            windows: vec![],
        }
    }

    #[test]
    fn profile_lookup() {
        let s = scenario();
        assert_eq!(s.reference_at(0.0), 0.5);
        assert!((s.reference_at(3.0) - 0.6).abs() < 1e-12);
        assert_eq!(s.reference_at(4.5), 0.6);
        assert_eq!(s.reference_at(100.0), 0.6);
        assert_eq!(s.disturbance_at(2.99), 0.0);
        assert_eq!(s.disturbance_at(3.0), 0.1);
        assert!((s.max_amplitude(0.6) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn timing_checks() {
        let mut s = scenario();
        assert_eq!(s.timing().unwrap(), (50, 200));
        s.dt_ctrl = 0.0515;
        assert!(s.timing().is_err());
        s.dt_ctrl = 0.05;
        s.duration = 10.01;
        assert!(s.timing().is_err());
    }

    #[test]
    fn seeded_noise_repeats() {
        let cfg = Some(NoiseConfig {
            kind: NoiseKind::Uniform,
            amplitude: 0.01,
        });
        let a: Vec<f64> = {
            let mut n = NoiseSource::new(cfg, 7);
            (0..100).map(|_| n.sample()).collect()
        };
        let mut n = NoiseSource::new(cfg, 7);
        for v in &a {
            assert_eq!(v.to_bits(), n.sample().to_bits());
            assert!(v.abs() <= 0.01);
        }
        let mut g = NoiseSource::new(
            Some(NoiseConfig {
                kind: NoiseKind::Gaussian,
                amplitude: 0.5,
            }),
            1,
        );
        let mean = (0..20000).map(|_| g.sample()).sum::<f64>() / 20000.0;
        assert!(mean.abs() < 0.02);
    }
}
