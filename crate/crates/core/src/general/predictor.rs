//! Prediction of the generator states one delay ahead.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lintools::{matrix_exp, steps_for, DelayBuffer};

/// `ż = A z + b u` for `z = [ω1; ω2]`, where the plant output is replaced by
/// the nominal combination `y = cᵀω1 + dᵀω2`:
/// `A = [[F, 0], [g cᵀ, F + g dᵀ]]`, `b = [g; 0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictorMatrices {
    a: DMatrix<f64>,
    b: DVector<f64>,
    tau: f64,
    dt: f64,
    transition: DMatrix<f64>,
    /// `dt·w_j·e^{A·j·dt}·b` for nodes `η = −j·dt`, `j = 0..=m`.
    kernel: Vec<DVector<f64>>,
}

/// Predicted generator states and whether the input history was still
/// partially prefilled.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub omega1: DVector<f64>,
    pub omega2: DVector<f64>,
    pub warm_up: bool,
}

impl PredictorMatrices {
    pub fn new(
        f: &DMatrix<f64>,
        g: &DVector<f64>,
        c: &DVector<f64>,
        d: &DVector<f64>,
        tau: f64,
        dt: f64,
    ) -> Result<Self> {
        let q = g.len();
        if f.nrows() != q || f.ncols() != q || c.len() != q || d.len() != q {
            return Err(Error::InvalidArgument("predictor dimensions disagree".into()));
        }
        let m = steps_for(tau, dt).ok_or_else(|| {
            Error::InvalidArgument(format!("delay {tau} s is not a multiple of dt = {dt} s"))
        })?;
        let mut a = DMatrix::zeros(2 * q, 2 * q);
        a.view_mut((0, 0), (q, q)).copy_from(f);
        a.view_mut((q, 0), (q, q)).copy_from(&(g * c.transpose()));
        a.view_mut((q, q), (q, q)).copy_from(&(f + g * d.transpose()));
        let mut b = DVector::zeros(2 * q);
        b.rows_mut(0, q).copy_from(g);
        let kernel = (0..=m)
            .map(|j| {
                let w = if m == 0 {
                    0.0
                } else if j == 0 || j == m {
                    0.5
                } else {
                    1.0
                };
                matrix_exp(&a, j as f64 * dt) * &b * (w * dt)
            })
            .collect();
        Ok(PredictorMatrices {
            transition: matrix_exp(&a, tau),
            a,
            b,
            tau,
            dt,
            kernel,
        })
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of quadrature nodes, `m + 1`.
    pub fn nodes(&self) -> usize {
        self.kernel.len()
    }

    /// `[ω̄1; ω̄2] = e^{Aτ}[ω1; ω2] + ∫_{−τ}^{0} e^{−Aη} b u(t + η) dη` by the
    /// trapezoid rule on the controller grid.
    ///
    /// `u_history.sample(1)` must be `u(t)` and `sample(j + 1)` `u(t − j·dt)`,
    /// so the buffer needs `m + 1` slots.
    pub fn predict(&self, omega1: &DVector<f64>, omega2: &DVector<f64>, u_history: &DelayBuffer) -> Result<Prediction> {
        let q = self.b.len() / 2;
        if omega1.len() != q || omega2.len() != q {
            return Err(Error::InvalidArgument("generator state dimension mismatch".into()));
        }
        if u_history.capacity() < self.nodes() {
            return Err(Error::InvalidArgument(format!(
                "input history holds {} samples, prediction needs {}",
                u_history.capacity(),
                self.nodes()
            )));
        }
        let mut z = DVector::zeros(2 * q);
        z.rows_mut(0, q).copy_from(omega1);
        z.rows_mut(q, q).copy_from(omega2);
        let mut out = &self.transition * z;
        for (j, k) in self.kernel.iter().enumerate() {
            out += k * u_history.sample(j + 1);
        }
        Ok(Prediction {
            omega1: out.rows(0, q).into_owned(),
            omega2: out.rows(q, q).into_owned(),
            warm_up: u_history.filled() < self.nodes(),
        })
    }
}
