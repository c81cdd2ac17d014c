//! State-space reference model with closed-loop (CRM) error feedback.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lintools::{default_spr_grid, spr_check, steps_for, DelayBuffer, Poly, RationalTransfer, StateSpaceSiso, ZohMap};

/// `W_m(s) = num/den` with the CRM gain vector `L` in controllable-canonical
/// coordinates and an optional reference delay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralRefConfig {
    /// Numerator coefficients, highest power first.
    pub num: Vec<f64>,
    /// Denominator coefficients, highest power first.
    pub den: Vec<f64>,
    /// CRM gain; empty means open loop.
    #[serde(default)]
    pub ell: Vec<f64>,
    #[serde(default)]
    pub delay: f64,
}

impl GeneralRefConfig {
    pub fn transfer(&self) -> Result<RationalTransfer> {
        RationalTransfer::new(self.num.clone(), self.den.clone())
    }

    pub fn realization(&self) -> Result<StateSpaceSiso> {
        let tf = self.transfer()?;
        if tf.relative_degree() != 1 {
            return Err(Error::Design(format!(
                "reference model must have relative degree 1, got {}",
                tf.relative_degree()
            )));
        }
        StateSpaceSiso::controllable_canonical(&tf)
    }

    /// `L` padded to the model order.
    pub fn gain_vector(&self) -> Result<DVector<f64>> {
        let n = self.transfer()?.order();
        match self.ell.len() {
            0 => Ok(DVector::zeros(n)),
            k if k == n => Ok(DVector::from_vec(self.ell.clone())),
            k => Err(Error::Design(format!("CRM gain has {k} entries, model order is {n}"))),
        }
    }

    /// `W_e(s) = hᵀ(sI − A_m + L hᵀ)^{-1} b_m`, the map from the parameter
    /// error signal to `e1`; reduces to `W_m/k_m·k_m` when `L = 0`.
    pub fn error_transfer(&self) -> Result<RationalTransfer> {
        let ss = self.realization()?;
        let l = self.gain_vector()?;
        let closed = StateSpaceSiso::new(&ss.a - &l * ss.h.transpose(), ss.b.clone(), ss.h.clone())?;
        closed.transfer()
    }

    /// Fails with [`Error::SprGate`] naming the violation when `W_e` (sign
    /// normalized) is not SPR.
    pub fn check_spr(&self) -> Result<()> {
        let we = self.error_transfer()?;
        let normalized = RationalTransfer::from_polys(we.gain().abs(), we.num().clone(), we.den().clone())?;
        let report = spr_check(&normalized, &default_spr_grid())?;
        match report.violation {
            None => Ok(()),
            Some(v) => Err(Error::SprGate(format!("W_e = {we} is not SPR: {v}"))),
        }
    }

    /// Slowest pole real part of `W_m`.
    pub fn slowest_pole(&self) -> Result<f64> {
        Ok(self
            .transfer()?
            .poles()
            .iter()
            .map(|p| p.re)
            .fold(f64::NEG_INFINITY, f64::max))
    }
}

/// The CRM gain `L` that makes `det(sI − A_m + L hᵀ)` equal `target`.
///
/// The characteristic polynomial is affine in `L`, so one probe per entry
/// gives the linear system.
pub fn crm_gain_for_poly(reference: &GeneralRefConfig, target: &Poly) -> Result<Vec<f64>> {
    let ss = reference.realization()?;
    let n = ss.order();
    let (_, target) = target.split_monic();
    if target.degree() != n {
        return Err(Error::Design(format!("target polynomial must have degree {n}")));
    }
    let base = crate::lintools::charpoly(&ss.a);
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = DVector::zeros(n);
        e[j] = 1.0;
        let col = crate::lintools::charpoly(&(&ss.a - &e * ss.h.transpose())).sub(&base);
        for i in 0..n {
            m[(i, j)] = col.coeff_of_power(n - 1 - i);
        }
    }
    let rhs = DVector::from_fn(n, |i, _| target.sub(&base).coeff_of_power(n - 1 - i));
    m.lu()
        .solve(&rhs)
        .map(|l| l.iter().copied().collect())
        .ok_or_else(|| Error::Design("CRM gain placement is singular".into()))
}

/// `ẋ_m = A_m x_m + b_m·r(t − τ) + L·(y_p − h_mᵀx_m)`, `y_m = h_mᵀx_m`,
/// advanced exactly with `r` and `y_p` held.
#[derive(Debug, Clone)]
pub struct GeneralRefModel {
    map: ZohMap,
    h: DVector<f64>,
    x: DVector<f64>,
    r_line: Option<DelayBuffer>,
    primed: bool,
}

impl GeneralRefModel {
    pub fn new(cfg: &GeneralRefConfig, dt: f64) -> Result<Self> {
        let ss = cfg.realization()?;
        let l = cfg.gain_vector()?;
        let n = ss.order();
        let a = &ss.a - &l * ss.h.transpose();
        let mut inputs = DMatrix::zeros(n, 2);
        inputs.set_column(0, &ss.b);
        inputs.set_column(1, &l);
        let r_line = match steps_for(cfg.delay, dt) {
            Some(0) => None,
            Some(m) => Some(DelayBuffer::new(m, dt, 0.0)),
            None => {
                return Err(Error::Design(format!(
                    "reference delay {} s is not a multiple of dt = {dt} s",
                    cfg.delay
                )))
            }
        };
        Ok(GeneralRefModel {
            map: ZohMap::new(&a, &inputs, dt),
            h: ss.h,
            x: DVector::zeros(n),
            r_line,
            primed: false,
        })
    }

    pub fn output(&self) -> f64 {
        self.h.dot(&self.x)
    }

    pub fn state(&self) -> &DVector<f64> {
        &self.x
    }

    pub fn advance(&mut self, r: f64, y_p: f64) {
        let r_used = match &mut self.r_line {
            None => r,
            Some(line) => {
                if !self.primed {
                    line.reset(r);
                }
                let past = line.sample(line.capacity());
                line.push(r);
                past
            }
        };
        self.primed = true;
        self.x = self.map.apply(&self.x, &DVector::from_vec(vec![r_used, y_p]));
    }
}
