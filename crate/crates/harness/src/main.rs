use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rtqm_harness::config::parse_override;
use rtqm_harness::{calibration_report, Calibration, Format, HarnessError, Result, ScenarioConfig};
use toml::Value;

/// Warm-vapour EIT quantum memory simulator.
#[derive(Debug, Parser)]
#[command(name = "rtqm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output directory (overrides `output` in the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for sweeps (overrides `jobs`).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Output format: csv or json.
    #[arg(long, global = true, default_value = "csv")]
    format: Format,

    /// Dotted-path override, e.g. `atom.gamma12_hz=200` or `grid.step_hz=5e7`.
    #[arg(long = "override", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the scenario described by a config file.
    Run { config: PathBuf },
    /// Check a config file and its calibration without running anything.
    Validate { config: PathBuf },
    /// Report the storage efficiency of the calibrated operating point.
    Calibrate {
        /// Calibration file; the embedded default when absent.
        #[arg(long)]
        calibration: Option<PathBuf>,
    },
    /// Print code and calibration versions.
    Version,
}

fn overrides(cli: &Cli) -> Result<Vec<(String, Value)>> {
    let mut out: Vec<(String, Value)> = cli.overrides.iter().map(|o| parse_override(o)).collect::<Result<_>>()?;
    if let Some(dir) = &cli.out {
        out.push(("output".into(), Value::String(dir.display().to_string())));
    }
    if let Some(j) = cli.jobs {
        out.push(("jobs".into(), Value::Integer(j as i64)));
    }
    Ok(out)
}

fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run { config } => {
            let cfg = ScenarioConfig::load(config, &overrides(cli)?)?;
            let manifest = rtqm_harness::run(&cfg, &cfg.output, cli.format)?;
            println!(
                "{} complete in {:.1} s: {}",
                cfg.scenario,
                manifest.wall_clock_s,
                cfg.output.join(rtqm_harness::manifest::MANIFEST_FILE).display()
            );
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = ScenarioConfig::load(config, &overrides(cli)?)?;
            let cal = Calibration::load(cfg.calibration.as_deref(), &cfg.overrides)?;
            let points = match &cfg.grid {
                Some(g) => g.grid()?.count.to_string(),
                None => "no".into(),
            };
            println!(
                "{}: ok ({}, {points} grid points, calibration {} sha256 {})",
                config.display(),
                cfg.scenario,
                cal.version(),
                cal.sha256
            );
            Ok(())
        }
        Command::Calibrate { calibration } => {
            let mut map = BTreeMap::new();
            for o in &cli.overrides {
                let (k, v) = parse_override(o)?;
                map.insert(k, v);
            }
            let cal = Calibration::load(calibration.as_deref(), &map)?;
            let report = calibration_report(&cal)?;
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| HarnessError::Numeric(format!("cannot encode report: {e}")))?;
            println!("{text}");
            if let Some(dir) = &cli.out {
                std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
                let path = dir.join("calibration.json");
                std::fs::write(&path, text + "\n").map_err(|e| HarnessError::io(&path, e))?;
            }
            Ok(())
        }
        Command::Version => {
            let cal = Calibration::embedded()?;
            println!("{}", rtqm_harness::manifest::CODE_VERSION);
            println!("calibration {} sha256 {}", cal.version(), cal.sha256);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
