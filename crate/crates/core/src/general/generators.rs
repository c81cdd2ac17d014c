//! Input and output filters for output-feedback adaptive control.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lintools::{companion, controllability_rank, rk4_step, Poly};

/// `ω̇1 = F ω1 + g·u(t − τ)`, `ω̇2 = F ω2 + g·y_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalGenerators {
    f: DMatrix<f64>,
    g: DVector<f64>,
    omega1: DVector<f64>,
    omega2: DVector<f64>,
}

impl SignalGenerators {
    /// Validates that `F` is Hurwitz and `(F, g)` controllable.
    pub fn new(f: DMatrix<f64>, g: DVector<f64>) -> Result<Self> {
        let q = f.nrows();
        if !f.is_square() || g.len() != q {
            return Err(Error::InvalidArgument(format!(
                "generator dimensions disagree: F {}x{}, g {}",
                f.nrows(),
                f.ncols(),
                g.len()
            )));
        }
        if q > 0 {
            if let Some(p) = f.complex_eigenvalues().iter().find(|p| !(p.re < 0.0)) {
                return Err(Error::InvalidArgument(format!(
                    "generator eigenvalue {:.4}{:+.4}j is not in the open left half plane",
                    p.re, p.im
                )));
            }
            let rank = controllability_rank(&f, &g);
            if rank < q {
                return Err(Error::InvalidArgument(format!(
                    "generator pair (F, g) has controllability rank {rank} < {q}"
                )));
            }
        }
        Ok(SignalGenerators {
            omega1: DVector::zeros(q),
            omega2: DVector::zeros(q),
            f,
            g,
        })
    }

    /// Companion realization of the monic polynomial `Λ(s)`, so each filter
    /// produces `[s^{q−1}, …, 1]ᵀ/Λ(s)` of its input.
    pub fn from_poly(lambda: &Poly) -> Result<Self> {
        let q = lambda.degree();
        let mut g = DVector::zeros(q);
        if q > 0 {
            g[0] = 1.0;
        }
        Self::new(companion(lambda), g)
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn f(&self) -> &DMatrix<f64> {
        &self.f
    }

    pub fn g(&self) -> &DVector<f64> {
        &self.g
    }

    pub fn omega1(&self) -> &DVector<f64> {
        &self.omega1
    }

    pub fn omega2(&self) -> &DVector<f64> {
        &self.omega2
    }

    pub fn set_state(&mut self, omega1: DVector<f64>, omega2: DVector<f64>) {
        assert_eq!(omega1.len(), self.dim());
        assert_eq!(omega2.len(), self.dim());
        self.omega1 = omega1;
        self.omega2 = omega2;
    }

    /// Slowest eigenvalue real part; `−∞` for empty generators.
    pub fn slowest_rate(&self) -> f64 {
        self.f
            .complex_eigenvalues()
            .iter()
            .map(|p| p.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// One RK4 step with both inputs held.
    pub fn step(&mut self, u_delayed: f64, y_p: f64, dt: f64) -> Result<()> {
        if self.dim() == 0 {
            return Ok(());
        }
        let (f, g) = (&self.f, &self.g);
        self.omega1 = rk4_step(|w: &DVector<f64>, u, _| f * w + g * u, &self.omega1, u_delayed, 0.0, dt)?;
        self.omega2 = rk4_step(|w: &DVector<f64>, y, _| f * w + g * y, &self.omega2, y_p, 0.0, dt)?;
        Ok(())
    }
}
