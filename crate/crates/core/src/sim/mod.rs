//! Closed-loop simulation: scenarios, the two-rate runner, traces, step
//! metrics, resource accounting and the shipped presets.

pub mod metrics;
pub mod presets;
pub mod resources;
pub mod runner;
pub mod scenario;
pub mod trace;

pub use metrics::{compute_metrics, step_metrics, total_variation, StepMetrics, SETTLING_BAND};
pub use presets::{preset, preset_with, PRESET_NAMES};
pub use resources::{resource_estimate, AdaptiveBudget, ResourceEstimate, BYTES_PER_FLOAT};
pub use runner::{run_closed_loop, Offsets, SimRun};
pub use scenario::{DisturbanceStep, NoiseConfig, NoiseKind, NoiseSource, Scenario, Segment};
pub use trace::{SimTrace, TraceRow};
