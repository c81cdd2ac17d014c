//! Pintle valve geometry and drive train: motor position to throat area.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Quadrature counts per motor revolution.
pub const COUNTS_PER_TURN: f64 = 4000.0;

/// Conical pintle in a circular throat, driven through a gearbox and spindle.
///
/// `A_t(θ) = π·(a1 + a2·θ + a3·θ²)` mm² with θ in quadrature counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValveGeometry {
    /// Throat radius, mm.
    pub r0: f64,
    /// Pintle cylinder radius, mm.
    pub y0: f64,
    /// Cone half angle, rad.
    pub alpha: f64,
    /// Gear reduction ratio.
    pub r1: f64,
    /// Spindle pitch, mm per turn.
    pub r2: f64,
    /// Upper end of mechanical travel, qc. Travel starts at 0.
    pub theta_max: f64,
}

impl ValveGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.y0 > 0.0 && self.y0 < self.r0) {
            return Err(Error::InvalidArgument(format!(
                "pintle radius y0 = {} mm must lie in (0, r0 = {} mm)",
                self.y0, self.r0
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < PI / 2.0) || !(self.r1 > 0.0) || !(self.r2 > 0.0) {
            return Err(Error::InvalidArgument(
                "valve needs 0 < alpha < π/2 and positive gear ratio and pitch".into(),
            ));
        }
        if !(self.theta_max > 0.0 && self.theta_max < self.theta_tip()) {
            return Err(Error::InvalidArgument(format!(
                "travel {} qc must be positive and stop before the cone tip at {:.0} qc",
                self.theta_max,
                self.theta_tip()
            )));
        }
        Ok(())
    }

    /// Pintle displacement per count, mm/qc.
    fn stroke_per_count(&self) -> f64 {
        self.r2 / (self.r1 * COUNTS_PER_TURN)
    }

    pub fn a1(&self) -> f64 {
        self.r0 * self.r0 - self.y0 * self.y0
    }

    pub fn a2(&self) -> f64 {
        2.0 * self.y0 * self.alpha.tan() * self.stroke_per_count()
    }

    pub fn a3(&self) -> f64 {
        let k = self.alpha.tan() * self.stroke_per_count();
        -k * k
    }

    /// Position at which the cone radius reaches zero.
    pub fn theta_tip(&self) -> f64 {
        self.y0 / (self.alpha.tan() * self.stroke_per_count())
    }

    /// Annulus area at θ = 0, the smallest open area.
    pub fn min_area(&self) -> f64 {
        self.a1() * PI
    }

    pub fn max_area(&self) -> f64 {
        self.area_unchecked(self.theta_max)
    }

    fn area_unchecked(&self, theta: f64) -> f64 {
        let area = (self.a1() + self.a2() * theta + self.a3() * theta * theta) * PI;
        area.max(self.min_area())
    }

    /// Open throat area in mm².
    pub fn throat_area(&self, theta: f64) -> Result<f64> {
        let slack = 1e-9 * self.theta_max;
        if !(theta >= -slack && theta <= self.theta_max + slack) {
            return Err(Error::OutOfTravel {
                theta,
                max: self.theta_max,
            });
        }
        Ok(self.area_unchecked(theta.clamp(0.0, self.theta_max)))
    }

    /// Area at `theta` clamped into travel (mechanical stops).
    pub fn throat_area_clamped(&self, theta: f64) -> f64 {
        self.area_unchecked(theta.clamp(0.0, self.theta_max))
    }

    /// Linear-valve inverse `θ = (A/π − a1)/a2`, clamped to travel.
    /// Returns the position and whether it saturated.
    pub fn area_to_theta(&self, area: f64) -> (f64, bool) {
        let theta = (area / PI - self.a1()) / self.a2();
        if theta < 0.0 {
            (0.0, true)
        } else if theta > self.theta_max {
            (self.theta_max, true)
        } else {
            (theta, false)
        }
    }

    /// Area the linear-valve model assigns to `theta`, the exact inverse of
    /// [`area_to_theta`](Self::area_to_theta) inside travel.
    pub fn linear_area(&self, theta: f64) -> f64 {
        (self.a1() + self.a2() * theta) * PI
    }

    /// Exact inverse of the quadratic area map on the rising branch.
    pub fn theta_for_area(&self, area: f64) -> Result<f64> {
        let q = area / PI - self.a1();
        let (a2, a3) = (self.a2(), self.a3());
        let disc = a2 * a2 + 4.0 * a3 * q;
        if q < 0.0 || disc < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "area {area} mm² is not reachable by the valve"
            )));
        }
        // stable form of (−a2 + sqrt(disc)) / (2 a3)
        let theta = 2.0 * q / (a2 + disc.sqrt());
        if theta > self.theta_max * (1.0 + 1e-12) {
            return Err(Error::OutOfTravel {
                theta,
                max: self.theta_max,
            });
        }
        Ok(theta)
    }
}
