//! Memory and per-cycle arithmetic of the sampled controllers, counted the
//! way an embedded implementation would store and evaluate them.

use serde::{Deserialize, Serialize};

use crate::controller::ControllerConfig;
use crate::error::Result;
use crate::scalar::AdaptiveMode;

/// Bytes per stored value (single precision).
pub const BYTES_PER_FLOAT: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceEstimate {
    pub floats: usize,
    pub bytes: usize,
    pub ops_per_cycle: usize,
    /// Operations per second at the controller rate.
    pub flops: usize,
}

/// Itemized counts for an adaptive law with `k` parameters.
///
/// Memory: `k` regressor states, `k` parameters, `k` products and the control
/// signal; `k` adaptation terms; the reference model (`a_m`, `b_m`, `y_m`,
/// plus `ℓ` for the closed-loop variants); the tracking error; `k` rates; and
/// for projection `Θ_max`, `ε`, `‖Θ‖`, `f` and the `k` entries of `∇f`.
///
/// Operations: `k` products and `k − 1` sums for the control signal; `2k`
/// products and `k` sums for the adaptive law; 4 sums and 3 products (one sum
/// and one product fewer without `ℓ`) for the reference model and error; and
/// for projection 2 comparisons, one logical operation, one square root,
/// `2k` sums and `4k + 7` products.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdaptiveBudget {
    pub params: usize,
    pub closed_loop_reference: bool,
}

impl AdaptiveBudget {
    pub fn floats(&self) -> usize {
        let k = self.params;
        let reference = if self.closed_loop_reference { 4 } else { 3 };
        3 * k + 1 + k + reference + 1 + k + 4 + k
    }

    pub fn ops(&self) -> usize {
        let k = self.params;
        let control = 2 * k - 1;
        let adaptation = 3 * k;
        let reference = if self.closed_loop_reference { 7 } else { 5 };
        let projection = 2 + 1 + 1 + 2 * k + 4 * k + 7;
        control + adaptation + reference + projection
    }
}

/// PI: error, previous error and integral states; `K_p`, `K_p/T_i`, `dt` and
/// the two limits; the output. Per cycle: one sum for the error, two sums and
/// a product for the trapezoid, two products and a sum for the output, two
/// comparisons for the limits.
pub const PI_FLOATS: usize = 9;
pub const PI_OPS: usize = 9;

fn finish(floats: usize, ops: usize, dt: f64) -> ResourceEstimate {
    ResourceEstimate {
        floats,
        bytes: floats * BYTES_PER_FLOAT,
        ops_per_cycle: ops,
        flops: (ops as f64 / dt).round() as usize,
    }
}

/// Resource footprint of a controller configuration.
///
/// The general-order laws add their generator filters: `2q` states, `q² + q`
/// for `(F, g)`, and per cycle two RK4 updates of `4(2q² + q) + 4q` operations
/// each.
pub fn resource_estimate(cfg: &ControllerConfig) -> Result<ResourceEstimate> {
    Ok(match cfg {
        ControllerConfig::Pi(c) => finish(PI_FLOATS, PI_OPS, c.dt),
        ControllerConfig::Adaptive(c) => {
            let budget = AdaptiveBudget {
                params: c.param_count()?,
                closed_loop_reference: c.mode != AdaptiveMode::Mrac,
            };
            finish(budget.floats(), budget.ops(), c.dt)
        }
        ControllerConfig::General(c) => {
            let q = c.generator_dim();
            let budget = AdaptiveBudget {
                params: c.param_count()?,
                closed_loop_reference: c.mode != AdaptiveMode::Mrac,
            };
            let floats = budget.floats() + 2 * q + q * q + q;
            let ops = budget.ops() + 2 * (4 * (2 * q * q + q) + 4 * q);
            finish(floats, ops, c.dt)
        }
    })
}
