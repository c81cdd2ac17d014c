use ggpress::config::{Config, ControllerSection, DesignRequest, LinearModel, PlantModel, PlantSpec};
use ggpress::plant::CatsConfig;
use ggpress::scalar::{DesignMode, DesignOptions, StepSpec};
use ggpress::sim::{presets, DisturbanceStep, Scenario, Segment};

fn linear_nominal(tau: bool) -> PlantSpec {
    let n = PlantModel::Cats(CatsConfig::nominal()).nominal(presets::NOMINAL_OUTPUT).unwrap();
    PlantSpec {
        operating_point: presets::NOMINAL_OUTPUT,
        model: PlantModel::Linear(LinearModel {
            num: vec![n.b_p],
            den: vec![1.0, -n.a_p],
            tau: if tau { n.tau } else { 0.0 },
        }),
        design_model: None,
    }
}

fn designed(mode: DesignMode) -> ControllerSection {
    ControllerSection::Design(DesignRequest {
        mode,
        spec: StepSpec::table1(),
        options: DesignOptions {
            r_bar: presets::STEP,
            ..DesignOptions::default()
        },
    })
}

fn flat(duration: f64, level: f64) -> Scenario {
    Scenario {
        name: "flat".into(),
        duration,
        dt_sim: 0.01,
        dt_ctrl: 0.05,
        reference: vec![Segment::hold(duration, level)],
        disturbance: vec![],
        noise: None,
        seed: 0,
        windows: vec![],
    }
}

#[test]
fn seeded_runs_are_byte_identical() {
    let cfg = presets::three_operating_points(DesignMode::Drcrm);
    let csv = |seed| {
        let run = cfg.simulate(Some(seed)).unwrap();
        let mut out = vec![];
        run.trace.write_csv(&mut out).unwrap();
        out
    };
    assert_eq!(csv(11), csv(11));
    assert_ne!(csv(11), csv(12));
}

#[test]
fn halving_the_plant_step_barely_moves_the_output() {
    let cfg = presets::three_operating_points(DesignMode::Drcrm);
    let mut fine = cfg.clone();
    fine.scenario.dt_sim /= 2.0;
    let (a, b) = (cfg.simulate(None).unwrap(), fine.simulate(None).unwrap());
    assert!(a.completed() && b.completed());
    let sup = a
        .trace
        .rows
        .iter()
        .zip(&b.trace.rows)
        .map(|(x, y)| ((x.y_p - y.y_p) / x.y_p).abs())
        .fold(0.0, f64::max);
    assert!(sup < 1e-3, "relative sup difference {sup}");
}

#[test]
fn mrac_converges_on_a_delay_free_plant() {
    let y0 = presets::NOMINAL_OUTPUT;
    let mut sc = flat(20.0, y0 + 0.05);
    sc.reference = vec![Segment::hold(1.0, y0), Segment::hold(19.0, y0 + 0.05)];
    let cfg = Config {
        plant: linear_nominal(false),
        controller: designed(DesignMode::Mrac),
        scenario: sc,
    };
    let run = cfg.simulate(None).unwrap();
    let last = run.trace.rows.last().unwrap();
    assert!(last.e1.abs() < 0.01 * 0.05, "e1 = {}", last.e1);
    assert!((last.y_p - last.r).abs() < 0.01 * 0.05);
}

#[test]
fn constant_disturbance_is_rejected_by_every_controller() {
    let y0 = presets::NOMINAL_OUTPUT;
    let d0 = 0.03;
    for mode in DesignMode::ALL {
        let mut sc = flat(60.0, y0);
        sc.disturbance = vec![DisturbanceStep { time: 10.0, value: d0 }];
        let cfg = Config {
            plant: linear_nominal(true),
            controller: designed(mode),
            scenario: sc,
        };
        let run = cfg.simulate(None).unwrap();
        let last = run.trace.rows.last().unwrap();
        // integral action and the θ3 bias both cancel a constant input offset
        assert!((last.y_p - y0).abs() < 0.005 * y0, "{}: y_p = {}", mode.name(), last.y_p);
        if mode != DesignMode::Pi {
            assert!(last.e1.abs() < 0.005 * y0, "{}: e1 = {}", mode.name(), last.e1);
        }
    }
}

#[test]
fn designed_pi_has_no_steady_state_error_on_the_nonlinear_plant() {
    let cfg = presets::three_operating_points(DesignMode::Pi);
    let mut quiet = cfg.clone();
    quiet.scenario.noise = None;
    let run = quiet.simulate(None).unwrap();
    for w in &cfg.scenario.windows {
        let m = ggpress::sim::compute_metrics(&run.trace, *w).unwrap();
        assert!(m.steady_state_error.abs() < 0.5, "{m:?}");
    }
}

#[test]
fn trace_records_noise_free_output() {
    let mut cfg = presets::three_operating_points(DesignMode::Mrac);
    cfg.scenario.duration = 5.0;
    cfg.scenario.reference = vec![Segment::hold(5.0, presets::NOMINAL_OUTPUT)];
    cfg.scenario.windows.clear();
    let run = cfg.simulate(None).unwrap();
    // the plant starts at rest; a noisy reading would be off the operating point
    assert!((run.trace.rows[0].y_p - presets::NOMINAL_OUTPUT).abs() < 1e-9);
}
