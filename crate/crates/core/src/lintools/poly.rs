//! Real polynomials stored in descending-degree order.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A real polynomial `c[0]·s^n + c[1]·s^(n-1) + … + c[n]`.
///
/// Leading zeros are trimmed on construction, so `degree()` is always the
/// index of the first nonzero coefficient counted from the constant term.
/// The zero polynomial is stored as `[0.0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: impl Into<Vec<f64>>) -> Self {
        let mut coeffs: Vec<f64> = coeffs.into();
        let first = coeffs.iter().position(|c| *c != 0.0);
        match first {
            Some(i) => {
                coeffs.drain(..i);
            }
            None => coeffs = vec![0.0],
        }
        Poly { coeffs }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![1.0] }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![0.0] }
    }

    /// Monic polynomial with the given real roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        roots
            .iter()
            .fold(Poly::one(), |acc, r| acc.mul(&Poly::new(vec![1.0, -r])))
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[0]
    }

    /// Coefficient of `s^k`.
    pub fn coeff_of_power(&self, k: usize) -> f64 {
        let n = self.degree();
        if k > n {
            0.0
        } else {
            self.coeffs[n - k]
        }
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1.0
    }

    /// Returns `(leading, self / leading)`.
    pub fn split_monic(&self) -> (f64, Poly) {
        let lead = self.leading();
        let monic = Poly::new(self.coeffs.iter().map(|c| c / lead).collect::<Vec<_>>());
        (lead, monic)
    }

    pub fn scale(&self, k: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * k).collect::<Vec<_>>())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0.0; n];
        for (i, c) in self.coeffs.iter().rev().enumerate() {
            out[n - 1 - i] += c;
        }
        for (i, c) in other.coeffs.iter().rev().enumerate() {
            out[n - 1 - i] += c;
        }
        Poly::new(out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, c| acc * s + c)
    }

    pub fn eval_complex(&self, s: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * s + c)
    }

    /// Roots from the eigenvalues of the companion matrix.
    pub fn roots(&self) -> Vec<Complex64> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        let lead = self.leading();
        let mut c = DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            c[(0, j)] = -self.coeffs[j + 1] / lead;
        }
        for i in 1..n {
            c[(i, i - 1)] = 1.0;
        }
        c.complex_eigenvalues().iter().copied().collect()
    }

    /// All roots strictly in the open left half plane.
    pub fn is_hurwitz(&self) -> bool {
        self.roots().iter().all(|r| r.re < 0.0)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == 0.0 && n > 0 {
                continue;
            }
            let p = n - i;
            if !first {
                write!(f, " {} ", if *c < 0.0 { '-' } else { '+' })?;
            } else if *c < 0.0 {
                write!(f, "-")?;
            }
            let a = c.abs();
            match p {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a}s")?,
                _ => write!(f, "{a}s^{p}")?,
            }
            first = false;
        }
        Ok(())
    }
}
