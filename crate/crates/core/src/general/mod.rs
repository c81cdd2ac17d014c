//! General-order output-feedback adaptive control: signal generators,
//! matching, the state-space reference model with CRM feedback, the MRAC/CRM
//! and delay-resistant laws, and the input-delay predictor.

pub mod adaptive;
pub mod generators;
pub mod matching;
pub mod predictor;
pub mod refmodel;

pub use adaptive::{GeneralAdaptive, GeneralAdaptiveConfig};
pub use generators::SignalGenerators;
pub use matching::{mrac_matching, output_combination, MracMatching};
pub use predictor::{Prediction, PredictorMatrices};
pub use refmodel::{crm_gain_for_poly, GeneralRefConfig, GeneralRefModel};
