//! First-order controllers: PI, MRAC, CRM and DR-CRM with projection, plus
//! the design procedure.

pub mod adaptive;
pub mod design;
pub mod pi;
pub mod projection;
pub mod refmodel;

pub use adaptive::{AdaptiveMode, ScalarAdaptive, ScalarAdaptiveConfig};
pub use design::{
    adaptation_rate, check_spr_gate, continuous_matching, design_controller, design_pi, drcrm_matching,
    reference_time_constant, DesignMode, DesignOptions, NominalPlant, StepSpec,
};
pub use pi::{PiConfig, PiController};
pub use projection::ProjectionConfig;
pub use refmodel::{RefModelParams, ScalarRefModel};
