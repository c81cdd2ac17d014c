//! Chamber gas properties and the supply inflow characteristic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Isothermal chamber gas.
///
/// `c1 = R·T/V` and `c2 = c1/c*` are always derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasParams {
    /// Specific gas constant, J/(kg·K).
    pub r_specific: f64,
    /// Chamber temperature, K.
    pub temperature: f64,
    /// Chamber volume, m³.
    pub volume: f64,
    /// Ratio of specific heats.
    pub gamma: f64,
    /// Characteristic velocity, m/s. Computed from the choked-flow relation
    /// when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_star: Option<f64>,
}

impl GasParams {
    /// Nitrogen at room temperature.
    pub fn nitrogen(volume: f64) -> Self {
        GasParams {
            r_specific: 296.8,
            temperature: 293.0,
            volume,
            gamma: 1.4,
            c_star: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("r_specific", self.r_specific),
            ("temperature", self.temperature),
            ("volume", self.volume),
            ("gamma", self.gamma - 1.0),
            ("c_star", self.c_star.unwrap_or(1.0)),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "gas parameter {name} must be positive and finite (gamma > 1)"
                )));
            }
        }
        Ok(())
    }

    /// `c*` with throat temperature `T* = 2T/(γ+1)`.
    pub fn c_star(&self) -> f64 {
        self.c_star.unwrap_or_else(|| choked_c_star(self.gamma, self.r_specific, self.temperature))
    }

    pub fn c1(&self) -> f64 {
        self.r_specific * self.temperature / self.volume
    }

    pub fn c2(&self) -> f64 {
        self.c1() / self.c_star()
    }

    /// Choked mass outflow in kg/s for pressure in Pa and throat area in mm².
    pub fn outflow(&self, pressure: f64, area_mm2: f64) -> f64 {
        pressure * area_mm2 * 1e-6 / self.c_star()
    }
}

/// `1/c* = (2/(γ+1))^{γ/(γ−1)} · sqrt(γ / (R·T*))`.
pub fn choked_c_star(gamma: f64, r_specific: f64, temperature: f64) -> f64 {
    let t_throat = 2.0 * temperature / (gamma + 1.0);
    let inv = (2.0 / (gamma + 1.0)).powf(gamma / (gamma - 1.0)) * (gamma / (r_specific * t_throat)).sqrt();
    1.0 / inv
}

/// Supply mass flow `ṁ_in(P) = c3·P³ + c4·P² + c5·P + c6` in kg/s, P in Pa.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InflowPolynomial {
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
}

impl InflowPolynomial {
    pub fn constant(mass_flow: f64) -> Self {
        InflowPolynomial {
            c3: 0.0,
            c4: 0.0,
            c5: 0.0,
            c6: mass_flow,
        }
    }

    /// Constant flow `q0` with cubic droop reaching `q0·(1 − droop)` at `p_ref`.
    pub fn with_droop(q0: f64, droop: f64, p_ref: f64) -> Self {
        InflowPolynomial {
            c3: -q0 * droop / p_ref.powi(3),
            c4: 0.0,
            c5: 0.0,
            c6: q0,
        }
    }

    pub fn mass_flow(&self, p: f64) -> f64 {
        ((self.c3 * p + self.c4) * p + self.c5) * p + self.c6
    }

    /// `dṁ_in/dP`.
    pub fn slope(&self, p: f64) -> f64 {
        (3.0 * self.c3 * p + 2.0 * self.c4) * p + self.c5
    }

    /// Checks positivity on `[p_lo, p_hi]` (endpoints plus a 200-point grid).
    pub fn validate_positive(&self, p_lo: f64, p_hi: f64) -> Result<()> {
        let n = 200;
        for i in 0..=n {
            let p = p_lo + (p_hi - p_lo) * i as f64 / n as f64;
            let q = self.mass_flow(p);
            if !(q > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "inflow {q:.4e} kg/s is not positive at P = {p:.4e} Pa"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nitrogen_c_star() {
        // independent evaluation of the choked relation
        let (g, r, t) = (1.4f64, 296.8f64, 293.0f64);
        let ts = 2.0 * t / 2.4;
        let expected = 1.0 / ((1.0f64 / 1.2).powf(3.5) * (g / (r * ts)).sqrt());
        let gas = GasParams::nitrogen(0.04);
        assert!((gas.c_star() - expected).abs() < 1e-9);
        assert!((gas.c_star() - 430.67).abs() < 0.01);
        assert!((gas.c1() - 296.8 * 293.0 / 0.04).abs() < 1e-6);
        assert!((gas.c2() - gas.c1() / gas.c_star()).abs() < 1e-9);
    }

    #[test]
    fn explicit_c_star_wins() {
        let mut gas = GasParams::nitrogen(0.04);
        gas.c_star = Some(500.0);
        assert_eq!(gas.c_star(), 500.0);
        assert!(gas.validate().is_ok());
        gas.volume = 0.0;
        assert!(gas.validate().is_err());
    }

    #[test]
    fn droop_profile() {
        let q = InflowPolynomial::with_droop(1.0, 0.3, 3e6);
        assert!((q.mass_flow(0.0) - 1.0).abs() < 1e-15);
        assert!((q.mass_flow(3e6) - 0.7).abs() < 1e-12);
        let h = 1.0;
        let fd = (q.mass_flow(2e6 + h) - q.mass_flow(2e6 - h)) / (2.0 * h);
        assert!((q.slope(2e6) - fd).abs() < 1e-12);
        assert!(q.validate_positive(1e5, 4e6).is_ok());
        assert!(q.validate_positive(1e5, 6e6).is_err());
    }
}
