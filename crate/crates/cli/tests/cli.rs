use std::path::PathBuf;
use std::process::{Command, Output};

fn ggpress(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ggpress")).args(args).output().unwrap()
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn export(dir: &tempfile::TempDir, name: &str, mode: &str) -> String {
    let path = dir.path().join(format!("{name}-{mode}.toml")).display().to_string();
    let o = ggpress(&["presets", "export", name, "--mode", mode, "--out", &path]);
    assert!(o.status.success(), "{}", stderr(&o));
    path
}

#[test]
fn lists_the_three_presets() {
    let o = ggpress(&["presets", "list"]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o).lines().collect::<Vec<_>>(),
        ["three-operating-points", "demanding-trajectory", "long-duration"]
    );
}

#[test]
fn exported_presets_load_back_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    for name in ggpress::sim::PRESET_NAMES {
        let path = export(&dir, name, "drcrm");
        let loaded = ggpress::config::Config::load(std::path::Path::new(&path)).unwrap();
        assert_eq!(loaded, ggpress::sim::preset(name).unwrap(), "{name}");
    }
}

#[test]
fn resources_report_for_the_delay_resistant_preset() {
    let dir = tempfile::tempdir().unwrap();
    let path = export(&dir, "three-operating-points", "drcrm");
    let o = ggpress(&["resources", &path, "--kv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    for line in ["floats=64", "bytes=256", "ops_per_cycle=116", "flops=2320"] {
        assert!(out.lines().any(|l| l == line), "missing {line} in\n{out}");
    }
}

#[test]
fn compare_prints_four_by_three_table_and_traces() {
    let dir = tempfile::tempdir().unwrap();
    let path = export(&dir, "three-operating-points", "drcrm");
    let traces = dir.path().join("traces");
    let o = ggpress(&[
        "compare",
        &path,
        "--controllers",
        "pi,mrac,crm,drcrm",
        "--seed",
        "5",
        "--out-dir",
        traces.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<&str> = out
        .lines()
        .filter(|l| ["pi ", "mrac", "crm ", "drcrm"].iter().any(|p| l.starts_with(p)))
        .collect();
    assert_eq!(rows.len(), 4, "{out}");
    for row in rows {
        assert_eq!(row.matches(" / ").count(), 9, "{row}");
    }
    for name in ["pi", "mrac", "crm", "drcrm"] {
        assert!(traces.join(format!("{name}.csv")).exists());
    }
}

#[test]
fn compare_is_reproducible_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let path = export(&dir, "three-operating-points", "drcrm");
    let a = ggpress(&["compare", &path, "--controllers", "mrac,drcrm", "--seed", "9", "--kv"]);
    let b = ggpress(&["compare", &path, "--controllers", "mrac,drcrm", "--seed", "9", "--kv"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn designed_config_simulates_within_the_specification() {
    let dir = tempfile::tempdir().unwrap();
    let path = export(&dir, "three-operating-points", "pi");
    let designed = dir.path().join("designed.toml");
    let o = ggpress(&[
        "design",
        &path,
        "--mode",
        "drcrm",
        "--spec",
        "table1",
        "--out",
        designed.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&designed).unwrap();
    assert!(text.contains("kind = \"adaptive\""));
    let trace = dir.path().join("trace.csv");
    let o = ggpress(&["simulate", designed.to_str().unwrap(), "--out", trace.to_str().unwrap(), "--kv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(std::fs::read_to_string(&trace).unwrap().starts_with("t,r,y_m,y_p,u,e1"));
    // the step at the design point stays inside the overshoot target
    let out = stdout(&o);
    let value = |key: &str| -> f64 {
        out.split_whitespace()
            .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
            .unwrap_or_else(|| panic!("no {key} in {out}"))
            .parse()
            .unwrap()
    };
    assert!(value("w1.overshoot") <= 10.0, "{out}");
    assert!(value("w1.sse").abs() < 1.0, "{out}");
}

#[test]
fn malformed_config_exits_2_with_line() {
    let o = ggpress(&["simulate", &fixture("malformed.toml")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 12"), "{}", stderr(&o));
}

#[test]
fn non_spr_design_exits_3_naming_the_frequency() {
    let o = ggpress(&["simulate", &fixture("broken_spr.toml")]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(err.contains("ω = 10."), "{err}");
}

#[test]
fn diverging_run_exits_4() {
    let o = ggpress(&["simulate", &fixture("diverging.toml")]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("aborted"));
}

#[test]
fn calibrates_actuator_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("step.csv");
    let mut text = String::from("t,theta_mes\n");
    let (tau, delay, dt) = (0.1, 0.3, 0.001);
    for k in 0..=1500 {
        let t = k as f64 * dt;
        let y = if t > delay { 4000.0 * (1.0 - (-(t - delay) / tau).exp()) } else { 0.0 };
        text.push_str(&format!("{t},{y}\n"));
    }
    std::fs::write(&path, text).unwrap();
    let o = ggpress(&["calibrate", "actuator", path.to_str().unwrap(), "--kv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let get = |k: &str| -> f64 {
        out.lines().find_map(|l| l.strip_prefix(&format!("{k}="))).unwrap().parse().unwrap()
    };
    assert!((get("tau_act_s") - tau).abs() <= dt);
    assert!((get("delay_s") - delay).abs() <= dt);
}

#[test]
fn unknown_controller_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = export(&dir, "three-operating-points", "drcrm");
    let o = ggpress(&["compare", &path, "--controllers", "lqr"]);
    assert_eq!(o.status.code(), Some(2));
}
