//! SISO state-space realizations.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::expm::zoh;
use super::poly::Poly;
use super::transfer::RationalTransfer;
use crate::error::{Error, Result};

/// `ẋ = A x + b u`, `y = hᵀ x`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceSiso {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub h: DVector<f64>,
}

impl StateSpaceSiso {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, h: DVector<f64>) -> Result<Self> {
        let n = a.nrows();
        if !a.is_square() || b.len() != n || h.len() != n {
            return Err(Error::InvalidArgument(format!(
                "inconsistent dimensions: A {}x{}, b {}, h {}",
                a.nrows(),
                a.ncols(),
                b.len(),
                h.len()
            )));
        }
        Ok(StateSpaceSiso { a, b, h })
    }

    /// Controllable canonical form of a strictly proper transfer function.
    ///
    /// State `i` carries `s^(n-1-i) / den(s) · u`.
    pub fn controllable_canonical(tf: &RationalTransfer) -> Result<Self> {
        let n = tf.order();
        if tf.relative_degree() == 0 {
            return Err(Error::InvalidArgument(
                "state-space realization needs a strictly proper transfer function".into(),
            ));
        }
        let a = companion(tf.den());
        let mut b = DVector::zeros(n);
        b[0] = 1.0;
        let h = DVector::from_fn(n, |i, _| tf.gain() * tf.num().coeff_of_power(n - 1 - i));
        Ok(StateSpaceSiso { a, b, h })
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    /// `hᵀ (sI − A)^{-1} b` as a rational transfer.
    pub fn transfer(&self) -> Result<RationalTransfer> {
        let den = charpoly(&self.a);
        // hᵀ adj(sI − A) b = det(sI − A + b hᵀ) − det(sI − A)
        let shifted = &self.a - &self.b * self.h.transpose();
        let num = charpoly(&shifted).sub(&den);
        RationalTransfer::from_polys(1.0, num, den)
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        let n = self.order();
        let m = DMatrix::<Complex64>::identity(n, n) * s - self.a.map(|x| Complex64::new(x, 0.0));
        let b = self.b.map(|x| Complex64::new(x, 0.0));
        match m.lu().solve(&b) {
            Some(x) => self.h.iter().zip(x.iter()).map(|(h, x)| x * *h).sum(),
            None => Complex64::new(f64::INFINITY, 0.0),
        }
    }

    pub fn poles(&self) -> Vec<Complex64> {
        self.a.complex_eigenvalues().iter().copied().collect()
    }
}

/// Top-row companion matrix of a monic polynomial of degree `n`.
///
/// `(sI − C)^{-1} e₀ = [s^(n-1), …, 1]ᵀ / p(s)`.
pub fn companion(p: &Poly) -> DMatrix<f64> {
    let n = p.degree();
    let lead = p.leading();
    let mut c = DMatrix::zeros(n, n);
    for j in 0..n {
        c[(0, j)] = -p.coeffs()[j + 1] / lead;
    }
    for i in 1..n {
        c[(i, i - 1)] = 1.0;
    }
    c
}

/// Characteristic polynomial `det(sI − A)` by Faddeev–LeVerrier.
pub fn charpoly(a: &DMatrix<f64>) -> Poly {
    let n = a.nrows();
    let mut coeffs = vec![1.0];
    let mut m = DMatrix::<f64>::zeros(n, n);
    let eye = DMatrix::<f64>::identity(n, n);
    let mut c_prev = 1.0;
    for k in 1..=n {
        m = a * &m + &eye * c_prev;
        let am = a * &m;
        let c = -am.trace() / k as f64;
        coeffs.push(c);
        c_prev = c;
    }
    Poly::new(coeffs)
}

/// Rank of the controllability matrix `[g, Fg, …, F^{n-1} g]`.
pub fn controllability_rank(f: &DMatrix<f64>, g: &DVector<f64>) -> usize {
    let n = f.nrows();
    if n == 0 {
        return 0;
    }
    let mut ctrb = DMatrix::zeros(n, n);
    let mut col = g.clone();
    for j in 0..n {
        ctrb.set_column(j, &col);
        col = f * col;
    }
    let scale = ctrb.amax().max(1.0);
    ctrb.rank(1e-10 * scale)
}

/// Exact one-step map of `ẋ = A x + B v` for inputs `v` held over `dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZohMap {
    pub phi: DMatrix<f64>,
    pub gamma: DMatrix<f64>,
}

impl ZohMap {
    pub fn new(a: &DMatrix<f64>, b: &DMatrix<f64>, dt: f64) -> Self {
        let (phi, gamma) = zoh(a, b, dt);
        ZohMap { phi, gamma }
    }

    pub fn apply(&self, x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        &self.phi * x + &self.gamma * v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lintools::transfer::{default_spr_grid, is_spr};
    use nalgebra::dmatrix;

    #[test]
    fn realization_round_trip() {
        let tf = RationalTransfer::new(vec![3.0, 15.0], vec![1.0, 5.0, 6.0]).unwrap();
        let ss = StateSpaceSiso::controllable_canonical(&tf).unwrap();
        let back = ss.transfer().unwrap();
        assert!((back.gain() - 3.0).abs() < 1e-12);
        for (a, b) in back.num().coeffs().iter().zip(tf.num().coeffs()) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in back.den().coeffs().iter().zip(tf.den().coeffs()) {
            assert!((a - b).abs() < 1e-12);
        }
        let s = Complex64::new(0.3, 2.0);
        assert!((ss.eval(s) - tf.eval(s)).norm() < 1e-12);
    }

    #[test]
    fn charpoly_of_triangular() {
        let a = dmatrix![-1.0, 4.0, 0.0; 0.0, -2.0, 1.0; 0.0, 0.0, -3.0];
        assert_eq!(charpoly(&a).coeffs(), &[1.0, 6.0, 11.0, 6.0]);
    }

    #[test]
    fn controllability() {
        let f = companion(&Poly::from_roots(&[-5.0, -6.0]));
        let g = DVector::from_vec(vec![1.0, 0.0]);
        assert_eq!(controllability_rank(&f, &g), 2);
        let diag = dmatrix![-1.0, 0.0; 0.0, -2.0];
        assert_eq!(controllability_rank(&diag, &DVector::from_vec(vec![1.0, 0.0])), 1);
    }

    #[test]
    fn spr_implies_hurwitz_denominator() {
        // (s+2)/(s²+3s+1): SPR; roots of den are negative
        let tf = RationalTransfer::new(vec![1.0, 2.0], vec![1.0, 3.0, 1.0]).unwrap();
        assert!(is_spr(&tf, &default_spr_grid()).unwrap());
        let ss = StateSpaceSiso::controllable_canonical(&tf).unwrap();
        assert!(ss.poles().iter().all(|p| p.re < 0.0));
    }
}
