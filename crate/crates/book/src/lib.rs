//! The guide's chapters as modules, so `cargo test` runs every listing.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/plant.md")]
pub mod plant {}

#[doc = include_str!("../../../book/src/design.md")]
pub mod design {}

#[doc = include_str!("../../../book/src/scenarios.md")]
pub mod scenarios {}

#[doc = include_str!("../../../book/src/general.md")]
pub mod general {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../../book/src/choices.md")]
pub mod choices {}
