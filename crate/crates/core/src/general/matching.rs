//! Nominal matching parameters for the general laws.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lintools::{Poly, RationalTransfer};

/// `(θ0, θ1, θ2, θr)` of `u = θ0·y_p + θ1ᵀω1 + θ2ᵀω2 + θr·r`.
#[derive(Debug, Clone, PartialEq)]
pub struct MracMatching {
    pub theta0: f64,
    pub theta1: Vec<f64>,
    pub theta2: Vec<f64>,
    pub theta_r: f64,
}

impl MracMatching {
    /// `[θ0, θ1…, θ2…, θr]`, the parameter layout of the general controller.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![self.theta0];
        v.extend(&self.theta1);
        v.extend(&self.theta2);
        v.push(self.theta_r);
        v
    }
}

/// Solves
/// `θ1ᵀα·R_p + k_p·(θ2ᵀα + θ0·Λ)·Z_p = Λ·R_p − Z_p·R_m`, `θr = k_m/k_p`
/// with the generator polynomial `Λ = Z_m` (monic, degree n − 1) and
/// `α(s) = [s^{n−2}, …, 1]`.
///
/// Both transfers must have relative degree one and equal order; `Z_p` must
/// be coprime with `R_p`.
pub fn mrac_matching(plant: &RationalTransfer, reference: &RationalTransfer) -> Result<MracMatching> {
    let n = plant.order();
    if plant.relative_degree() != 1 || reference.relative_degree() != 1 {
        return Err(Error::Design("matching needs relative degree one".into()));
    }
    if reference.order() != n {
        return Err(Error::Design(format!(
            "reference order {} differs from plant order {n}",
            reference.order()
        )));
    }
    let q = n - 1;
    let (kp, zp, rp) = (plant.gain(), plant.num(), plant.den());
    let (km, lambda, rm) = (reference.gain(), reference.num(), reference.den());
    let alpha = |i: usize| {
        let mut c = vec![0.0; q - i];
        c[0] = 1.0;
        Poly::new(c)
    };
    let mut columns = Vec::with_capacity(2 * q + 1);
    columns.push(lambda.mul(zp).scale(kp));
    for i in 0..q {
        columns.push(alpha(i).mul(rp));
    }
    for i in 0..q {
        columns.push(alpha(i).mul(zp).scale(kp));
    }
    let rhs = lambda.mul(rp).sub(&zp.mul(rm));
    let rows = 2 * n - 1;
    let m = DMatrix::from_fn(rows, rows, |i, j| columns[j].coeff_of_power(i));
    let b = DVector::from_fn(rows, |i, _| rhs.coeff_of_power(i));
    let x = m
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Design("matching equations are singular (common plant factors?)".into()))?;
    Ok(MracMatching {
        theta0: x[0],
        theta1: x.rows(1, q).iter().copied().collect(),
        theta2: x.rows(1 + q, q).iter().copied().collect(),
        theta_r: km / kp,
    })
}

/// `(c, d)` with `y = cᵀω1 + dᵀω2` for generators built from the monic
/// degree-n polynomial `Λ` in companion form, at zero initial conditions:
/// `dᵀα = Λ − R_p` and `cᵀα = k_p·Z_p`.
pub fn output_combination(plant: &RationalTransfer, lambda: &Poly) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = plant.order();
    let (_, lambda) = lambda.split_monic();
    if lambda.degree() != n {
        return Err(Error::Design(format!("generator polynomial must have degree {n}")));
    }
    let d_poly = lambda.sub(plant.den());
    let c_poly = plant.num().scale(plant.gain());
    let pick = |p: &Poly| (0..n).map(|i| p.coeff_of_power(n - 1 - i)).collect();
    Ok((pick(&c_poly), pick(&d_poly)))
}
