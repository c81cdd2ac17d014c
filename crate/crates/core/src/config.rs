//! Run configuration: `[plant]`, `[controller]` and `[scenario]` sections in
//! TOML.

use serde::{Deserialize, Serialize};

use crate::controller::{Controller, ControllerConfig};
use crate::error::{Error, Result};
use crate::general::GeneralAdaptiveConfig;
use crate::lintools::{RationalTransfer, StateSpaceSiso};
use crate::plant::{CatsConfig, CatsPlant, LinearPlant, Plant};
use crate::scalar::{design_controller, DesignMode, DesignOptions, NominalPlant, PiConfig, ScalarAdaptiveConfig, StepSpec};
use crate::sim::{run_closed_loop, Offsets, Scenario, SimRun};

/// Linear plant in controller units, as a deviation model about the
/// operating point: `y − y0 = W(s)·u(t − τ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    /// Numerator, highest power first.
    pub num: Vec<f64>,
    /// Denominator, highest power first.
    pub den: Vec<f64>,
    /// Input delay, s.
    #[serde(default)]
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PlantModel {
    Cats(CatsConfig),
    Linear(LinearModel),
}

impl PlantModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            PlantModel::Cats(c) => c.validate(),
            PlantModel::Linear(l) => {
                let tf = RationalTransfer::new(l.num.clone(), l.den.clone())?;
                if tf.relative_degree() == 0 {
                    return Err(Error::Config("linear plant must be strictly proper".into()));
                }
                if !(l.tau >= 0.0) {
                    return Err(Error::Config("linear plant delay must be ≥ 0".into()));
                }
                Ok(())
            }
        }
    }

    /// Absolute input that holds the output at `y0`.
    pub fn input_at(&self, y0: f64) -> Result<f64> {
        match self {
            PlantModel::Cats(c) => {
                let op = c.operating_point(y0 * c.normalization.pressure)?;
                Ok(op.area_command / c.normalization.area)
            }
            PlantModel::Linear(_) => Ok(0.0),
        }
    }

    /// First-order design model at `y0`.
    pub fn nominal(&self, y0: f64) -> Result<NominalPlant> {
        match self {
            PlantModel::Cats(c) => {
                let op = c.operating_point(y0 * c.normalization.pressure)?;
                let lin = c.linearize_at(op.pressure, op.area);
                let (a_p, b_p) = lin.normalized(&c.normalization);
                Ok(NominalPlant { a_p, b_p, tau: lin.tau })
            }
            PlantModel::Linear(l) => {
                let tf = RationalTransfer::new(l.num.clone(), l.den.clone())?;
                if tf.order() != 1 || tf.relative_degree() != 1 {
                    return Err(Error::Design("first-order design needs a first-order plant".into()));
                }
                Ok(NominalPlant {
                    a_p: tf.poles()[0].re,
                    b_p: tf.gain(),
                    tau: l.tau,
                })
            }
        }
    }

    /// Reachable absolute input range, when the plant has one.
    pub fn input_range(&self) -> Option<(f64, f64)> {
        match self {
            PlantModel::Cats(c) => {
                let a = c.normalization.area;
                Some((c.valve.linear_area(0.0) / a, c.valve.linear_area(c.valve.theta_max) / a))
            }
            PlantModel::Linear(_) => None,
        }
    }
}

/// The plant to simulate and the operating point the controller is built
/// around.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantSpec {
    /// Output at which the plant starts at rest and about which the
    /// controller works, output units.
    pub operating_point: f64,
    pub model: PlantModel,
    /// Nominal model used for design and input offset when it differs from
    /// the simulated plant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design_model: Option<PlantModel>,
}

impl PlantSpec {
    pub fn design_model(&self) -> &PlantModel {
        self.design_model.as_ref().unwrap_or(&self.model)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if let Some(d) = &self.design_model {
            d.validate()?;
        }
        if !self.operating_point.is_finite() {
            return Err(Error::Config("operating point must be finite".into()));
        }
        Ok(())
    }

    pub fn offsets(&self) -> Result<Offsets> {
        Ok(Offsets {
            y0: self.operating_point,
            u0: self.design_model().input_at(self.operating_point)?,
        })
    }

    /// Plant at rest at the operating point, stepping at `dt`.
    pub fn build(&self, dt: f64) -> Result<Box<dyn Plant>> {
        let y0 = self.operating_point;
        Ok(match &self.model {
            PlantModel::Cats(c) => {
                let op = c.operating_point(y0 * c.normalization.pressure)?;
                Box::new(CatsPlant::at_rest(*c, &op, dt)?)
            }
            PlantModel::Linear(l) => {
                let tf = RationalTransfer::new(l.num.clone(), l.den.clone())?;
                let ss = StateSpaceSiso::controllable_canonical(&tf)?;
                let u0 = self.design_model().input_at(y0)?;
                Box::new(LinearPlant::new(&ss, l.tau, dt)?.with_offsets(y0, u0))
            }
        })
    }
}

/// Ask for a controller to be designed from the plant at load time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignRequest {
    pub mode: DesignMode,
    #[serde(default)]
    pub spec: StepSpec,
    #[serde(default)]
    pub options: DesignOptions,
}

/// The `[controller]` section: explicit parameters or a design request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ControllerSection {
    Pi(PiConfig),
    Adaptive(ScalarAdaptiveConfig),
    General(GeneralAdaptiveConfig),
    Design(DesignRequest),
}

impl From<ControllerConfig> for ControllerSection {
    fn from(c: ControllerConfig) -> Self {
        match c {
            ControllerConfig::Pi(c) => ControllerSection::Pi(c),
            ControllerConfig::Adaptive(c) => ControllerSection::Adaptive(c),
            ControllerConfig::General(c) => ControllerSection::General(c),
        }
    }
}

/// A complete run description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub plant: PlantSpec,
    pub controller: ControllerSection,
    pub scenario: Scenario,
}

/// `line L, column C: message` for a parse error in `source`.
fn anchored(source: &str, err: &toml::de::Error) -> Error {
    let msg = err.message().trim().to_string();
    match err.span() {
        Some(span) => {
            let before = &source[..span.start.min(source.len())];
            let line = before.matches('\n').count() + 1;
            let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            Error::Config(format!("line {line}, column {column}: {msg}"))
        }
        None => Error::Config(msg),
    }
}

impl Config {
    pub fn from_toml_str(source: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(source).map_err(|e| anchored(source, &e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("cannot serialize config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        self.plant.validate()?;
        self.scenario.validate()
    }

    /// Design options completed from the plant and scenario: the controller
    /// period, and output limits from the reachable input range.
    pub fn completed_options(&self, options: &DesignOptions) -> Result<DesignOptions> {
        let mut opts = options.clone();
        opts.dt = self.scenario.dt_ctrl;
        if let Some((lo, hi)) = self.plant.design_model().input_range() {
            let u0 = self.plant.offsets()?.u0;
            if opts.u_min == f64::NEG_INFINITY {
                opts.u_min = lo - u0;
            }
            if opts.u_max == f64::INFINITY {
                opts.u_max = hi - u0;
            }
        }
        Ok(opts)
    }

    /// Runs the design procedure for `request` on the nominal plant.
    pub fn design(&self, request: &DesignRequest) -> Result<ControllerConfig> {
        let nominal = self.plant.design_model().nominal(self.plant.operating_point)?;
        let opts = self.completed_options(&request.options)?;
        design_controller(&nominal, &request.spec, request.mode, &opts)
    }

    /// The controller this configuration describes, designed if requested.
    pub fn controller_config(&self) -> Result<ControllerConfig> {
        Ok(match &self.controller {
            ControllerSection::Pi(c) => ControllerConfig::Pi(*c),
            ControllerSection::Adaptive(c) => ControllerConfig::Adaptive(c.clone()),
            ControllerSection::General(c) => ControllerConfig::General(c.clone()),
            ControllerSection::Design(r) => self.design(r)?,
        })
    }

    /// Same plant and scenario with a designed controller of `mode`; keeps the
    /// spec and options of an existing design request.
    pub fn with_mode(&self, mode: DesignMode) -> Config {
        let request = match &self.controller {
            ControllerSection::Design(r) => DesignRequest { mode, ..r.clone() },
            _ => DesignRequest {
                mode,
                spec: StepSpec::default(),
                options: DesignOptions {
                    r_bar: self.scenario.max_amplitude(self.plant.operating_point).max(1e-6),
                    ..DesignOptions::default()
                },
            },
        };
        Config {
            controller: ControllerSection::Design(request),
            ..self.clone()
        }
    }

    /// Builds plant and controller and runs the scenario. `seed` overrides
    /// the scenario seed.
    pub fn simulate(&self, seed: Option<u64>) -> Result<SimRun> {
        let mut scenario = self.scenario.clone();
        if let Some(s) = seed {
            scenario.seed = s;
        }
        let mut plant = self.plant.build(scenario.dt_sim)?;
        let mut controller: Box<dyn Controller> = self.controller_config()?.build()?;
        run_closed_loop(plant.as_mut(), controller.as_mut(), self.plant.offsets()?, &scenario)
    }
}
