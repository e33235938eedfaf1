use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pulseforge_cli::config::{check_threshold, RunConfig};
use pulseforge_cli::run::{load_config, run_selftest, run_synth, run_verify, CliError};

/// Local gates on two qubits with an always-on ZZ coupling.
///
/// Log level comes from PULSEFORGE_LOG (error, warn, info, debug, trace).
#[derive(Parser)]
#[command(name = "pulseforge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize pulses; writes the pulse CSV, plot CSV and report JSON.
    Synth {
        #[command(flatten)]
        run: RunArgs,
        /// Plot frequencies in Hz (ω/2π); pulse files stay in rad/s.
        #[arg(long)]
        display_hz: bool,
    },
    /// Re-simulate a pulse CSV against the configured target.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Pulse CSV to check.
        #[arg(long, value_name = "PATH")]
        pulses: PathBuf,
    },
    /// Run quick internal consistency checks.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Minimum fidelity for exit status 0; overrides the config.
    #[arg(long, value_name = "F", value_parser = parse_threshold)]
    threshold: Option<f64>,
    /// Integration steps per stage; overrides the config.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    steps: Option<u64>,
    /// Optimizer seed; overrides the config.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

fn parse_threshold(s: &str) -> Result<f64, String> {
    check_threshold(s.parse::<f64>().map_err(|e| e.to_string())?)
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut cfg = load_config(&self.config)?;
        if let Some(t) = self.threshold {
            cfg.threshold = t;
        }
        if let Some(s) = self.steps {
            cfg.steps = s as usize;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PULSEFORGE_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Synth { run, display_hz } => run.load().and_then(|cfg| run_synth(&cfg, &run.out, *display_hz)),
        Command::Verify { run, pulses } => run.load().and_then(|cfg| run_verify(&cfg, pulses, &run.out)),
        Command::Selftest { seed } => Ok(run_selftest(*seed)),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
