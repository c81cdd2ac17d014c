//! SISO rational transfer functions and the strictly-positive-real check.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use crate::error::{Error, Result};

/// `gain · num(s) / den(s)` with monic `num` and `den`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalTransfer {
    gain: f64,
    num: Poly,
    den: Poly,
}

impl RationalTransfer {
    /// Builds from arbitrary (non-monic) coefficient vectors, factoring the
    /// leading coefficients into the gain.
    pub fn new(num: impl Into<Vec<f64>>, den: impl Into<Vec<f64>>) -> Result<Self> {
        Self::from_polys(1.0, Poly::new(num), Poly::new(den))
    }

    pub fn from_polys(gain: f64, num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        if num.is_zero() {
            return Err(Error::InvalidArgument("zero numerator".into()));
        }
        if num.degree() > den.degree() {
            return Err(Error::ImproperTransfer {
                num: num.degree(),
                den: den.degree(),
            });
        }
        let (kn, num) = num.split_monic();
        let (kd, den) = den.split_monic();
        Ok(RationalTransfer {
            gain: gain * kn / kd,
            num,
            den,
        })
    }

    /// `k / (s - pole)`.
    pub fn first_order(k: f64, pole: f64) -> Self {
        RationalTransfer {
            gain: k,
            num: Poly::one(),
            den: Poly::new(vec![1.0, -pole]),
        }
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn order(&self) -> usize {
        self.den.degree()
    }

    pub fn relative_degree(&self) -> usize {
        self.den.degree() - self.num.degree()
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.num.eval_complex(s) / self.den.eval_complex(s) * self.gain
    }

    pub fn poles(&self) -> Vec<Complex64> {
        self.den.roots()
    }

    pub fn zeros(&self) -> Vec<Complex64> {
        self.num.roots()
    }

    pub fn dc_gain(&self) -> f64 {
        self.gain * self.num.eval(0.0) / self.den.eval(0.0)
    }
}

impl fmt::Display for RationalTransfer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} · ({}) / ({})", self.gain, self.num, self.den)
    }
}

/// Why a transfer function failed the SPR test.
#[derive(Debug, Clone, PartialEq)]
pub enum SprViolation {
    /// A pole with non-negative real part.
    UnstablePole(Complex64),
    /// `Re{G(jω)} ≤ 0` at this grid frequency.
    NegativeRealPart { omega: f64, real: f64 },
    RelativeDegree(usize),
}

impl fmt::Display for SprViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SprViolation::UnstablePole(p) => write!(f, "pole {:.6}{:+.6}j not in the open left half plane", p.re, p.im),
            SprViolation::NegativeRealPart { omega, real } => {
                write!(f, "Re{{W(jω)}} = {real:.6e} ≤ 0 at ω = {omega:.6} rad/s")
            }
            SprViolation::RelativeDegree(r) => write!(f, "relative degree {r} exceeds 1"),
        }
    }
}

/// Outcome of [`spr_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct SprReport {
    pub violation: Option<SprViolation>,
    /// Smallest `Re{G(jω)}` seen on the grid.
    pub min_real: f64,
    /// Frequency at which the smallest real part occurred.
    pub omega_at_min: f64,
}

impl SprReport {
    pub fn is_spr(&self) -> bool {
        self.violation.is_none()
    }
}

/// `count` logarithmically spaced frequencies from `lo` to `hi` rad/s.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let (a, b) = (lo.log10(), hi.log10());
    (0..count)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64))
        .collect()
}

/// Default grid: 1000 points over 1e-3 … 1e3 rad/s.
pub fn default_spr_grid() -> Vec<f64> {
    log_grid(1e-3, 1e3, 1000)
}

/// Sampled SPR test: poles in the open left half plane, relative degree at most
/// one, and `Re{G(jω)} > 0` on every grid frequency.
///
/// Positivity is only checked at the sampled frequencies, so a pass is a
/// sampled sufficient check rather than a proof.
pub fn spr_check(tf: &RationalTransfer, freq_grid: &[f64]) -> Result<SprReport> {
    if freq_grid.is_empty() || freq_grid.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::InvalidArgument(
            "SPR frequency grid must be nonempty and positive".into(),
        ));
    }
    let mut min_real = f64::INFINITY;
    let mut omega_at_min = freq_grid[0];
    let mut first_negative = None;
    for &w in freq_grid {
        let re = tf.eval(Complex64::new(0.0, w)).re;
        if re < min_real {
            min_real = re;
            omega_at_min = w;
        }
        if first_negative.is_none() && !(re > 0.0) {
            first_negative = Some(SprViolation::NegativeRealPart { omega: w, real: re });
        }
    }
    let violation = if let Some(p) = tf.poles().into_iter().find(|p| !(p.re < 0.0)) {
        Some(SprViolation::UnstablePole(p))
    } else if tf.relative_degree() > 1 {
        Some(SprViolation::RelativeDegree(tf.relative_degree()))
    } else {
        first_negative
    };
    Ok(SprReport {
        violation,
        min_real,
        omega_at_min,
    })
}

/// Boolean form of [`spr_check`].
pub fn is_spr(tf: &RationalTransfer, freq_grid: &[f64]) -> Result<bool> {
    Ok(spr_check(tf, freq_grid)?.is_spr())
}
