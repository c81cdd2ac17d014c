//! Fixed-length sample history for delayed signals.

use serde::{Deserialize, Serialize};

/// Ring buffer of the last `capacity` samples of a signal sampled every `dt`.
///
/// `sample(j)` returns the value pushed `j` pushes ago (`1 ≤ j ≤ capacity`).
/// Slots never written read as the prefill value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayBuffer {
    dt: f64,
    ring: Vec<f64>,
    head: usize,
    filled: usize,
}

impl DelayBuffer {
    pub fn new(capacity: usize, dt: f64, prefill: f64) -> Self {
        DelayBuffer {
            dt,
            ring: vec![prefill; capacity],
            head: 0,
            filled: 0,
        }
    }

    /// Buffer covering `delay` seconds at interval `dt`; `None` when the delay is
    /// not an integer number of intervals (to 1e-9 relative).
    pub fn for_delay(delay: f64, dt: f64, prefill: f64) -> Option<Self> {
        steps_for(delay, dt).map(|m| DelayBuffer::new(m, dt, prefill))
    }

    pub fn capacity(&self) -> usize {
        self.ring.len()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of pushes so far, saturating at capacity.
    pub fn filled(&self) -> usize {
        self.filled
    }

    pub fn is_warm(&self) -> bool {
        self.filled == self.ring.len()
    }

    pub fn push(&mut self, value: f64) {
        if self.ring.is_empty() {
            return;
        }
        self.ring[self.head] = value;
        self.head = (self.head + 1) % self.ring.len();
        self.filled = (self.filled + 1).min(self.ring.len());
    }

    /// Value pushed `lag` pushes ago.
    ///
    /// # Panics
    /// If `lag` is zero or exceeds the capacity.
    pub fn sample(&self, lag: usize) -> f64 {
        let n = self.ring.len();
        assert!(
            lag >= 1 && lag <= n,
            "delay lag {lag} outside 1..={n}"
        );
        self.ring[(self.head + n - lag) % n]
    }

    /// `[sample(1), …, sample(capacity)]`.
    pub fn history(&self) -> Vec<f64> {
        (1..=self.ring.len()).map(|j| self.sample(j)).collect()
    }

    /// Overwrites every slot with `value` and marks the buffer cold.
    pub fn reset(&mut self, value: f64) {
        self.ring.iter_mut().for_each(|s| *s = value);
        self.head = 0;
        self.filled = 0;
    }
}

/// `delay / dt` as an integer when it divides exactly (to 1e-9 relative).
pub fn steps_for(delay: f64, dt: f64) -> Option<usize> {
    if !(dt > 0.0) || delay < 0.0 || !delay.is_finite() {
        return None;
    }
    let m = (delay / dt).round();
    if (m * dt - delay).abs() <= 1e-9 * delay.max(dt) {
        Some(m as usize)
    } else {
        None
    }
}
