//! Shipped scenarios on the nominal cold-air plant.

use crate::config::{Config, ControllerSection, DesignRequest, PlantModel, PlantSpec};
use crate::plant::CatsConfig;
use crate::scalar::{DesignMode, DesignOptions, StepSpec};

use super::scenario::{NoiseConfig, NoiseKind, Scenario, Segment};

pub const PRESET_NAMES: [&str; 3] = ["three-operating-points", "demanding-trajectory", "long-duration"];

/// Nominal operating point: 2 MPa on the 3 MPa output base.
pub const NOMINAL_OUTPUT: f64 = 2.0 / 3.0;

/// Step between neighbouring reference levels.
pub const STEP: f64 = 0.05;

/// Measurement noise: uniform, ±0.5 % of the operating output.
pub fn default_noise() -> NoiseConfig {
    NoiseConfig {
        kind: NoiseKind::Uniform,
        amplitude: 0.005 * NOMINAL_OUTPUT,
    }
}

fn nominal_plant() -> PlantSpec {
    PlantSpec {
        operating_point: NOMINAL_OUTPUT,
        model: PlantModel::Cats(CatsConfig::nominal()),
        design_model: None,
    }
}

fn designed(mode: DesignMode, options: DesignOptions) -> ControllerSection {
    ControllerSection::Design(DesignRequest {
        mode,
        spec: StepSpec::table1(),
        options,
    })
}

fn base_options() -> DesignOptions {
    DesignOptions {
        r_bar: STEP,
        ..DesignOptions::default()
    }
}

/// Steps of `STEP` into a low, the nominal and a high level, each from a level
/// held for 10 s. Metric windows cover the three measured steps.
pub fn three_operating_points(mode: DesignMode) -> Config {
    let levels = [
        (2.0, NOMINAL_OUTPUT),
        (10.0, 0.50),
        (10.0, 0.55),
        (10.0, 0.62),
        (10.0, 0.67),
        (10.0, 0.75),
        (10.0, 0.80),
    ];
    Config {
        plant: nominal_plant(),
        controller: designed(mode, base_options()),
        scenario: Scenario {
            name: "three-operating-points".into(),
            duration: 62.0,
            dt_sim: 0.001,
            dt_ctrl: 0.05,
            reference: levels.iter().map(|&(d, v)| Segment::hold(d, v)).collect(),
            disturbance: vec![],
            noise: Some(default_noise()),
            seed: 0,
            windows: vec![[11.0, 21.95], [31.0, 41.95], [51.0, 61.95]],
        },
    }
}

/// Square wave of three times the usual step about the nominal point, with
/// the reference model twice as fast.
pub fn demanding_trajectory(mode: DesignMode) -> Config {
    let amp = 3.0 * STEP;
    let mut reference = vec![Segment::hold(2.0, NOMINAL_OUTPUT)];
    for _ in 0..4 {
        reference.push(Segment::hold(5.0, NOMINAL_OUTPUT + amp));
        reference.push(Segment::hold(5.0, NOMINAL_OUTPUT - amp));
    }
    Config {
        plant: nominal_plant(),
        controller: designed(
            mode,
            DesignOptions {
                r_bar: amp,
                tau_m_scale: 0.5,
                ..DesignOptions::default()
            },
        ),
        scenario: Scenario {
            name: "demanding-trajectory".into(),
            duration: 42.0,
            dt_sim: 0.001,
            dt_ctrl: 0.05,
            reference,
            disturbance: vec![],
            noise: Some(default_noise()),
            seed: 0,
            windows: vec![],
        },
    }
}

/// Ten minutes of steps across the operating range with measurement noise,
/// on a plant that differs from the design model: 20 % larger chamber, 5 %
/// lower characteristic velocity and 5 % more supply flow.
pub fn long_duration(mode: DesignMode) -> Config {
    let nominal = CatsConfig::nominal();
    let mut actual = nominal;
    actual.gas.volume *= 1.2;
    actual.gas.c_star = Some(0.95 * nominal.gas.c_star());
    actual.inflow.c3 *= 1.05;
    actual.inflow.c4 *= 1.05;
    actual.inflow.c5 *= 1.05;
    actual.inflow.c6 *= 1.05;
    let cycle = [0.60, 0.70, 0.65, 0.75, 0.58, 0.667];
    let reference = (0..40).map(|i| Segment::hold(15.0, cycle[i % cycle.len()])).collect();
    Config {
        plant: PlantSpec {
            operating_point: NOMINAL_OUTPUT,
            model: PlantModel::Cats(actual),
            design_model: Some(PlantModel::Cats(nominal)),
        },
        controller: designed(mode, base_options()),
        scenario: Scenario {
            name: "long-duration".into(),
            duration: 600.0,
            dt_sim: 0.001,
            dt_ctrl: 0.05,
            reference,
            disturbance: vec![],
            noise: Some(default_noise()),
            seed: 0,
            windows: vec![],
        },
    }
}

/// Preset by name, with a DR-CRM design request.
pub fn preset(name: &str) -> Option<Config> {
    preset_with(name, DesignMode::Drcrm)
}

pub fn preset_with(name: &str, mode: DesignMode) -> Option<Config> {
    match name {
        "three-operating-points" => Some(three_operating_points(mode)),
        "demanding-trajectory" => Some(demanding_trajectory(mode)),
        "long-duration" => Some(long_duration(mode)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_round_trip_through_toml() {
        for name in PRESET_NAMES {
            let cfg = preset(name).unwrap();
            cfg.validate().unwrap();
            let text = cfg.to_toml_string().unwrap();
            assert_eq!(Config::from_toml_str(&text).unwrap(), cfg, "{name}");
        }
        assert!(preset("nope").is_none());
    }
}
