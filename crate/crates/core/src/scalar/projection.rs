//! Parameter projection keeping an adaptive parameter vector bounded.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Convex bound `f(Θ) = (‖Θ‖² − Θ_max²)/(ε·Θ_max²)`.
///
/// Projection starts acting at `‖Θ‖ = Θ_max` and `f = 1` on the hard bound
/// `Θ_max·√(1+ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionConfig {
    pub theta_max: f64,
    pub epsilon: f64,
}

impl ProjectionConfig {
    pub fn new(theta_max: f64, epsilon: f64) -> Result<Self> {
        let cfg = ProjectionConfig { theta_max, epsilon };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Bound placed `percent` above the norm of the initial parameters.
    pub fn above_initial(theta0: &DVector<f64>, percent: f64, epsilon: f64) -> Result<Self> {
        let norm = theta0.norm();
        if !(norm > 0.0) {
            return Err(Error::Design(
                "projection bound needs nonzero initial parameters".into(),
            ));
        }
        Self::new(norm * (1.0 + percent / 100.0), epsilon)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta_max > 0.0 && self.epsilon > 0.0) || !self.theta_max.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "projection needs Θ_max > 0 and ε > 0 (got {}, {})",
                self.theta_max, self.epsilon
            )));
        }
        Ok(())
    }

    pub fn hard_bound(&self) -> f64 {
        self.theta_max * (1.0 + self.epsilon).sqrt()
    }

    pub fn f(&self, theta: &DVector<f64>) -> f64 {
        let m2 = self.theta_max * self.theta_max;
        (theta.norm_squared() - m2) / (self.epsilon * m2)
    }

    pub fn gradient(&self, theta: &DVector<f64>) -> DVector<f64> {
        theta * (2.0 / (self.epsilon * self.theta_max * self.theta_max))
    }

    /// `Proj(Θ, y)`: removes the outward component of `y` in proportion to
    /// `f(Θ)` once `‖Θ‖` exceeds `Θ_max`.
    pub fn project(&self, theta: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let grad = self.gradient(theta);
        let outward = y.dot(&grad);
        if theta.norm() > self.theta_max && outward > 0.0 {
            y - &grad * (outward * self.f(theta) / grad.norm_squared())
        } else {
            y.clone()
        }
    }

    /// Scales `theta` back onto the hard bound if a discrete update left it
    /// outside. Returns whether it acted.
    pub fn enforce(&self, theta: &mut DVector<f64>) -> bool {
        let bound = self.hard_bound();
        let norm = theta.norm();
        if norm > bound {
            *theta *= bound / norm;
            true
        } else {
            false
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;
    use proptest::prelude::*;

    fn cfg() -> ProjectionConfig {
        ProjectionConfig::new(1.0, 0.1).unwrap()
    }

    #[test]
    fn inside_bound_passes_through() {
        let y = dvector![0.3, -2.0];
        assert_eq!(cfg().project(&dvector![0.5, 0.5], &y), y);
    }

    #[test]
    fn on_hard_bound_outward_is_tangential() {
        let c = cfg();
        let r = c.hard_bound();
        let theta = dvector![r, 0.0];
        assert!((c.f(&theta) - 1.0).abs() < 1e-12);
        let out = c.project(&theta, &dvector![2.0, 1.0]);
        assert!(out[0].abs() < 1e-12);
        assert_eq!(out[1], 1.0);
    }

    #[test]
    fn between_bounds_hand_evaluated() {
        // k = 2, Θ = (0.6, 0.8)·1.02: ‖Θ‖ = 1.02, f = (1.0404 − 1)/0.1 = 0.404
        let c = cfg();
        let theta = dvector![0.612, 0.816];
        let f = (1.02f64.powi(2) - 1.0) / 0.1;
        assert!((c.f(&theta) - f).abs() < 1e-12);
        let y = dvector![1.0, 0.0];
        let n = dvector![0.6, 0.8];
        let radial = y.dot(&n);
        let expected = &y - &n * (radial * f);
        let out = c.project(&theta, &y);
        assert!((out - &expected).norm() < 1e-12);
        // the radial part is scaled by (1 − f), the tangential part untouched
        assert!((expected.dot(&n) - radial * (1.0 - f)).abs() < 1e-12);
    }

    #[test]
    fn inward_direction_unchanged() {
        let theta = dvector![1.02, 0.0];
        let y = dvector![-1.0, 0.5];
        assert_eq!(cfg().project(&theta, &y), y);
    }

    proptest! {
        #[test]
        fn projected_step_never_leaves_hard_bound(
            t0 in proptest::collection::vec(-1.0f64..1.0, 3),
            ys in proptest::collection::vec(proptest::collection::vec(-50.0f64..50.0, 3), 1..60),
            dt in 0.001f64..0.1,
        ) {
            let c = ProjectionConfig::new(1.5, 0.1).unwrap();
            let mut theta = DVector::from_vec(t0);
            for y in ys {
                let y = DVector::from_vec(y);
                theta += c.project(&theta, &y) * dt;
                c.enforce(&mut theta);
                prop_assert!(theta.norm() <= c.hard_bound() * (1.0 + 1e-12));
            }
        }

        #[test]
        fn continuous_across_activation(scale in 0.999f64..1.001, angle in 0.0f64..6.28) {
            // small changes in Θ around ‖Θ‖ = Θ_max give small changes in the output
            let c = cfg();
            let theta = dvector![angle.cos(), angle.sin()] * scale;
            let y = dvector![angle.cos(), angle.sin()];
            let out = c.project(&theta, &y);
            prop_assert!((out - &y).norm() <= 0.03);
        }
    }
}
