//! Numerical substrate: polynomials, transfer functions, state-space
//! realizations, the SPR test, matrix exponentials, fixed-step integration and
//! delay buffers.

pub mod delay;
pub mod expm;
pub mod poly;
pub mod rk4;
pub mod statespace;
pub mod transfer;

pub use delay::{steps_for, DelayBuffer};
pub use expm::{matrix_exp, zoh};
pub use poly::Poly;
pub use rk4::{rk4_step, OdeState, Pair};
pub use statespace::{charpoly, companion, controllability_rank, StateSpaceSiso, ZohMap};
pub use transfer::{
    default_spr_grid, is_spr, log_grid, spr_check, RationalTransfer, SprReport, SprViolation,
};
