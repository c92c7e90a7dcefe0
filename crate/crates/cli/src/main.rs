#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod csv;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use commands::{CommandError, Report};
use config::{FileConfig, Overrides, RunConfig};

const EXIT_USAGE: u8 = 1;
const EXIT_CHECK: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "sbtube", version, about = "Tube-integral isometry experiments on complex-type symmetric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// TOML configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// CSV output path (stdout if absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Heat time t > 0
    #[arg(long, global = true, allow_negative_numbers = true)]
    t: Option<f64>,
    /// Spectral profile: heat:<s>, band:<a> or band:<a>*heat:<s>
    #[arg(long, global = true)]
    profile: Option<String>,
    /// Root system preset: h3, a1, a1xa1, a2
    #[arg(long, global = true)]
    space: Option<String>,
    /// Absolute and relative quadrature tolerance
    #[arg(long, global = true, allow_negative_numbers = true)]
    tol: Option<f64>,
    /// Add a generation time to the CSV metadata
    #[arg(long, global = true)]
    timestamps: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// G_F(R) along a radius grid for every route
    IsometryCurve,
    /// Base-point inversion integral along a radius grid
    InversionCurve,
    /// Shell integrand blow-up and its cancellation
    CancellationDemo,
    /// Shift-operator form of the isometry against the Plancherel norm
    KosCompare,
    /// Brute-force Euclidean transform on the line
    EuclidBaseline,
    /// No invariant density reproduces the Gaussian
    Impossibility,
    /// Run the fixed end-to-end checks
    Selftest,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::IsometryCurve => "isometry-curve",
            Command::InversionCurve => "inversion-curve",
            Command::CancellationDemo => "cancellation-demo",
            Command::KosCompare => "kos-compare",
            Command::EuclidBaseline => "euclid-baseline",
            Command::Impossibility => "impossibility",
            Command::Selftest => "selftest",
        }
    }
}

fn load(common: Common) -> Result<RunConfig, config::ConfigError> {
    let file = match &common.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let overrides = Overrides {
        out: common.out,
        t: common.t,
        profile: common.profile,
        space: common.space,
        tol: common.tol,
        timestamps: common.timestamps,
    };
    RunConfig::resolve(file, overrides)
}

fn run(command: Command, cfg: &RunConfig) -> Result<Report, CommandError> {
    match command {
        Command::IsometryCurve => commands::isometry_curve(cfg),
        Command::InversionCurve => commands::inversion_curve(cfg),
        Command::CancellationDemo => commands::cancellation_demo(cfg),
        Command::KosCompare => commands::kos_compare(cfg),
        Command::EuclidBaseline => commands::euclid_baseline(cfg),
        Command::Impossibility => commands::impossibility(cfg),
        Command::Selftest => commands::selftest(),
    }
}

fn emit(cfg: &RunConfig, report: &mut Report) -> std::io::Result<()> {
    if cfg.timestamps {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        report.table.meta("generated_unix_s", secs);
    }
    let text = report.table.render();
    match &cfg.output {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let command = cli.command;
    let cfg = match load(cli.common) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let mut report = match run(command, &cfg) {
        Ok(r) => r,
        Err(CommandError::Config(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(CommandError::Numerical(e)) => {
            eprintln!("numerical failure in {}: {e}", command.name());
            return ExitCode::from(EXIT_NUMERICAL);
        }
    };
    if let Err(e) = emit(&cfg, &mut report) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    for line in &report.summary {
        eprintln!("{line}");
    }
    if report.passed {
        eprintln!("{}: all checks passed", command.name());
        ExitCode::SUCCESS
    } else {
        eprintln!("{}: check failure", command.name());
        ExitCode::from(EXIT_CHECK)
    }
}
