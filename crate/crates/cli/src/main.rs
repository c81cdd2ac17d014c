//! `ggpress`: run, compare and design gas-generator pressure controllers.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};

use ggpress::calibration::{fit_first_order_delay, fit_inflow_polynomial, read_inflow_csv, read_step_csv};
use ggpress::config::{Config, ControllerSection, PlantModel};
use ggpress::plant::CatsConfig;
use ggpress::scalar::{DesignMode, StepSpec};
use ggpress::sim::{compute_metrics, presets, resource_estimate, total_variation, SimRun, StepMetrics};
use ggpress::Error;

#[derive(Parser)]
#[command(name = "ggpress", version, about = "Gas-generator pressure control simulator")]
struct Cli {
    /// Seed for measurement noise; overrides the scenario's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Print reports as `key=value` lines instead of aligned text.
    #[arg(long, global = true)]
    kv: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and report step metrics per scenario window.
    Simulate {
        config: PathBuf,
        /// Write the trace as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run several designed controllers on one scenario with a shared seed.
    Compare {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "pi,mrac,crm,drcrm")]
        controllers: Vec<String>,
        /// Directory for one `<controller>.csv` trace each.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Design a controller for the plant of a configuration and print the
    /// completed configuration.
    Design {
        config: PathBuf,
        #[arg(long)]
        mode: String,
        /// `table1` or a TOML file with the step specification.
        #[arg(long, default_value = "table1")]
        spec: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the supply characteristic or the actuator response from test data.
    Calibrate {
        what: CalibrationKind,
        data: PathBuf,
        /// Commanded step for actuator data, counts (sign check only).
        #[arg(long, default_value_t = 0.0)]
        step: f64,
    },
    /// Memory and operation count of a configuration's controller.
    Resources { config: PathBuf },
    /// Shipped scenarios.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CalibrationKind {
    Inflow,
    Actuator,
}

#[derive(Subcommand)]
enum PresetAction {
    List,
    Export {
        name: String,
        #[arg(long, default_value = "drcrm")]
        mode: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure carrying its exit status.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::SprGate(_) | Error::Design(_) => 3,
        Error::PlantAbort { .. } | Error::NonFinite(_) | Error::OutOfTravel { .. } => 4,
        Error::Calibration(_) => 1,
        _ => 2,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            error: e.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = error.downcast_ref::<Error>().map_or(1, exit_code);
        Failure { code, error }
    }
}

type Outcome = std::result::Result<(), Failure>;

fn load(path: &Path) -> Result<Config, Failure> {
    Config::load(path).map_err(|e| Failure {
        code: exit_code(&e),
        error: anyhow!("{}: {e}", path.display()),
    })
}

fn parse_mode(s: &str) -> Result<DesignMode, Failure> {
    DesignMode::parse(s).ok_or_else(|| Failure {
        code: 2,
        error: anyhow!("unknown controller `{s}` (expected pi, mrac, crm or drcrm)"),
    })
}

fn abort_failure(run: &SimRun) -> Option<Failure> {
    run.abort.as_ref().map(|e| Failure {
        code: 4,
        error: anyhow!("simulation aborted after {} ticks: {e}", run.trace.len()),
    })
}

fn write_trace(run: &SimRun, path: &Path) -> anyhow::Result<()> {
    let file = fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    run.trace.write_csv(file)?;
    Ok(())
}

fn metrics_cells(m: &StepMetrics) -> [String; 4] {
    [
        format!("{:.3}", m.steady_state_error),
        format!("{:.3}", m.rise_time),
        if m.settled { format!("{:.3}", m.settling_time) } else { "unsettled".into() },
        format!("{:.2}", m.overshoot),
    ]
}

fn window_label(w: [f64; 2]) -> String {
    format!("{}-{}s", w[0], w[1])
}

fn simulate(cli: &Cli, config: &Path, out: Option<&Path>) -> Outcome {
    let cfg = load(config)?;
    let run = cfg.simulate(cli.seed)?;
    if let Some(path) = out {
        write_trace(&run, path)?;
    }
    let u = run.trace.column(|r| r.u);
    let peak = run.trace.rows.iter().map(|r| r.e1.abs()).fold(0.0, f64::max);
    let sat = run.trace.rows.iter().filter(|r| r.sat).count();
    if cli.kv {
        println!("ticks={}", run.trace.len());
        println!("peak_abs_e1={peak:.6}");
        println!("control_tv={:.6}", total_variation(&u));
        println!("saturated_ticks={sat}");
    } else {
        println!("{:<16} {}", "ticks", run.trace.len());
        println!("{:<16} {peak:.6}", "peak |e1|");
        println!("{:<16} {:.6}", "control TV", total_variation(&u));
        println!("{:<16} {sat}", "saturated ticks");
    }
    if let Some(f) = abort_failure(&run) {
        return Err(f);
    }
    if !cfg.scenario.windows.is_empty() {
        if !cli.kv {
            println!();
            println!("{:<14} {:>9} {:>8} {:>10} {:>10}", "window", "sse[%]", "rise[s]", "settle[s]", "overshoot[%]");
        }
        for (i, w) in cfg.scenario.windows.iter().enumerate() {
            let c = metrics_cells(&compute_metrics(&run.trace, *w)?);
            if cli.kv {
                println!("w{i}.sse={} w{i}.rise={} w{i}.settling={} w{i}.overshoot={}", c[0], c[1], c[2], c[3]);
            } else {
                println!("{:<14} {:>9} {:>8} {:>10} {:>10}", window_label(*w), c[0], c[1], c[2], c[3]);
            }
        }
    }
    Ok(())
}

fn compare(cli: &Cli, config: &Path, controllers: &[String], out_dir: Option<&Path>) -> Outcome {
    let cfg = load(config)?;
    let modes = controllers.iter().map(|s| parse_mode(s)).collect::<Result<Vec<_>, _>>()?;
    // one seed for every controller so they see the same noise
    let seed = Some(cli.seed.unwrap_or(cfg.scenario.seed));
    let runs: Vec<ggpress::Result<SimRun>> = std::thread::scope(|s| {
        let handles: Vec<_> = modes
            .iter()
            .map(|m| {
                let c = cfg.with_mode(*m);
                s.spawn(move || c.simulate(seed))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("simulation thread panicked")).collect()
    });
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let windows = &cfg.scenario.windows;
    let mut table = vec![];
    for (mode, run) in modes.iter().zip(runs) {
        let run = run?;
        if let Some(f) = abort_failure(&run) {
            return Err(Failure {
                code: f.code,
                error: f.error.context(format!("controller {}", mode.name())),
            });
        }
        if let Some(dir) = out_dir {
            write_trace(&run, &dir.join(format!("{}.csv", mode.name())))?;
        }
        let cells = windows
            .iter()
            .map(|w| compute_metrics(&run.trace, *w).map(|m| metrics_cells(&m)))
            .collect::<ggpress::Result<Vec<_>>>()?;
        table.push((mode.name(), cells));
    }
    if cli.kv {
        for (name, cells) in &table {
            for (i, c) in cells.iter().enumerate() {
                println!("{name}.w{i}.sse={} {name}.w{i}.rise={} {name}.w{i}.settling={} {name}.w{i}.overshoot={}", c[0], c[1], c[2], c[3]);
            }
        }
        return Ok(());
    }
    println!("seed {}; cells are sse[%] / rise[s] / settling[s] / overshoot[%]", seed.unwrap_or_default());
    print!("{:<8}", "");
    for w in windows {
        print!(" {:>34}", window_label(*w));
    }
    println!();
    for (name, cells) in &table {
        print!("{name:<8}");
        for c in cells {
            print!(" {:>34}", format!("{} / {} / {} / {}", c[0], c[1], c[2], c[3]));
        }
        println!();
    }
    Ok(())
}

fn read_spec(spec: &str) -> Result<StepSpec, Failure> {
    if spec == "table1" {
        return Ok(StepSpec::table1());
    }
    let text = fs::read_to_string(spec).map_err(|e| Failure {
        code: 2,
        error: anyhow!("cannot read spec {spec}: {e}"),
    })?;
    toml::from_str(&text).map_err(|e| Failure {
        code: 2,
        error: anyhow!("{spec}: {}", e.message()),
    })
}

fn design(config: &Path, mode: &str, spec: &str, out: Option<&Path>) -> Outcome {
    let mut cfg = load(config)?;
    let mode = parse_mode(mode)?;
    let spec = read_spec(spec)?;
    let mut request = match cfg.with_mode(mode).controller {
        ControllerSection::Design(r) => r,
        _ => unreachable!("with_mode always yields a design request"),
    };
    request.spec = spec;
    cfg.controller = cfg.design(&request)?.into();
    let text = cfg.to_toml_string()?;
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn calibrate(cli: &Cli, what: CalibrationKind, data: &Path, step: f64) -> Outcome {
    match what {
        CalibrationKind::Inflow => {
            let gas = CatsConfig::nominal().gas;
            let fit = fit_inflow_polynomial(&read_inflow_csv(data)?, &gas)?;
            if let Some(w) = &fit.warning {
                eprintln!("warning: {w}");
            }
            let q = fit.inflow;
            let rows = [
                ("c3", q.c3),
                ("c4", q.c4),
                ("c5", q.c5),
                ("c6", q.c6),
                ("residual_rms", fit.residual_rms),
            ];
            for (k, v) in rows {
                if cli.kv {
                    println!("{k}={v:e}");
                } else {
                    println!("{k:<14} {v:.6e}");
                }
            }
        }
        CalibrationKind::Actuator => {
            let fit = fit_first_order_delay(&read_step_csv(data)?, step)?;
            let rows = [
                ("tau_act_s", fit.model.tau_act),
                ("delay_s", fit.model.delay),
                ("residual_rms", fit.residual_rms),
            ];
            for (k, v) in rows {
                if cli.kv {
                    println!("{k}={v}");
                } else {
                    println!("{k:<14} {v:.6}");
                }
            }
        }
    }
    Ok(())
}

fn resources(cli: &Cli, config: &Path) -> Outcome {
    let cfg = load(config)?;
    let controller = cfg.controller_config()?;
    let e = resource_estimate(&controller)?;
    let rows = [
        ("controller", controller.name().to_string()),
        ("floats", e.floats.to_string()),
        ("bytes", e.bytes.to_string()),
        ("ops_per_cycle", e.ops_per_cycle.to_string()),
        ("flops", e.flops.to_string()),
    ];
    for (k, v) in rows {
        if cli.kv {
            println!("{k}={v}");
        } else {
            println!("{k:<14} {v}");
        }
    }
    Ok(())
}

fn presets_cmd(action: &PresetAction) -> Outcome {
    match action {
        PresetAction::List => {
            for name in presets::PRESET_NAMES {
                println!("{name}");
            }
        }
        PresetAction::Export { name, mode, out } => {
            let mode = parse_mode(mode)?;
            let cfg = presets::preset_with(name, mode).ok_or_else(|| Failure {
                code: 2,
                error: anyhow!("unknown preset `{name}` (see `presets list`)"),
            })?;
            let text = annotate(&cfg)?;
            match out {
                Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

/// Units header for exported presets.
fn annotate(cfg: &Config) -> ggpress::Result<String> {
    let mut out = String::new();
    out.push_str(&format!("# scenario: {}\n", cfg.scenario.name));
    if let PlantModel::Cats(c) = &cfg.plant.model {
        out.push_str(&format!(
            "# outputs are pressure / {} Pa, commands are throat area / {} mm²\n",
            c.normalization.pressure, c.normalization.area
        ));
    }
    out.push_str("# times in s, rates in 1/s, plant SI units (Pa, m³, K, kg/s, qc)\n\n");
    out.push_str(&cfg.to_toml_string()?);
    Ok(out)
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Simulate { config, out } => simulate(cli, config, out.as_deref()),
        Command::Compare {
            config,
            controllers,
            out_dir,
        } => compare(cli, config, controllers, out_dir.as_deref()),
        Command::Design { config, mode, spec, out } => design(config, mode, spec, out.as_deref()),
        Command::Calibrate { what, data, step } => calibrate(cli, *what, data, *step),
        Command::Resources { config } => resources(cli, config),
        Command::Presets { action } => presets_cmd(action),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => {
            let _ = std::io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
