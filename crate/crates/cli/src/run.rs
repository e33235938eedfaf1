//! The three subcommands. Each returns the process exit status.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use pulseforge::synth::{
    synthesize_angles, synthesize_local, PulseProgram, PulseStage, StageParameters, Strategy, SynthConfig, Synthesis,
    Waveform,
};
use pulseforge::verify::{make_report, SynthesisReport};
use pulseforge::Error;

use crate::config::{ConfigError, RunConfig, Target};
use crate::pulses::{program_from_rows, read_pulses, sample_program, write_plot, write_pulses, PlotCurve, PulseError};

/// Fidelity at or above the threshold.
pub const EXIT_OK: u8 = 0;
/// Fidelity below the threshold, or an I/O failure.
pub const EXIT_BELOW_THRESHOLD: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_SYNTHESIS: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Config { path: PathBuf, source: ConfigError },
    #[error("{path}: {source}")]
    Pulses { path: PathBuf, source: PulseError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } | CliError::Pulses { .. } => EXIT_PARSE,
            _ => EXIT_BELOW_THRESHOLD,
        }
    }
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(io(path))?;
    crate::config::parse_config(&text).map_err(|source| CliError::Config { path: path.to_path_buf(), source })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    BelowThreshold,
    SynthesisFailure,
}

/// The report file. Field order is the key order.
#[derive(Debug, Serialize)]
pub struct RunDocument {
    pub schema: u32,
    pub command: &'static str,
    pub status: Status,
    pub threshold: f64,
    pub seed: u64,
    pub error: Option<String>,
    /// Best fidelity reached by a failed search.
    pub best_fidelity: Option<f64>,
    pub report: Option<SynthesisReport>,
}

impl RunDocument {
    fn exit_code(&self) -> u8 {
        match self.status {
            Status::Ok => EXIT_OK,
            Status::BelowThreshold => EXIT_BELOW_THRESHOLD,
            Status::SynthesisFailure => EXIT_SYNTHESIS,
        }
    }
}

fn best_fidelity(e: &Error) -> Option<f64> {
    match e {
        Error::SynthesisFailure { best_fidelity, .. } => Some(*best_fidelity),
        Error::OptimizationFailure { achieved, .. } => Some(*achieved),
        Error::Stage { source, .. } => best_fidelity(source),
        _ => None,
    }
}

fn synth_config(cfg: &RunConfig, strategy: Strategy) -> SynthConfig {
    SynthConfig {
        coupling: cfg.coupling,
        strategy,
        harmonics: cfg.harmonics,
        bounds: cfg.bounds,
        steps: cfg.steps,
        seed: cfg.seed,
    }
}

pub fn synthesize(cfg: &RunConfig, strategy: Strategy) -> pulseforge::Result<Synthesis> {
    let sc = synth_config(cfg, strategy);
    match &cfg.target {
        Target::Angles { gamma1, gamma2 } => synthesize_angles(*gamma1, *gamma2, &sc),
        Target::Local { first, second, .. } => synthesize_local(first, second, &sc),
    }
}

fn write_document(path: &Path, doc: &RunDocument) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    fs::write(path, text).map_err(io(path))
}

fn create(path: &Path) -> Result<BufWriter<fs::File>, CliError> {
    Ok(BufWriter::new(fs::File::create(path).map_err(io(path))?))
}

/// The shared-carrier sinusoid of each min-energy stage, as a program.
fn carrier_program(s: &Synthesis) -> Option<PulseProgram> {
    let mut stages = Vec::new();
    for (outcome, stage) in s.stages.iter().zip(&s.program.stages) {
        let StageParameters::MinEnergy { carrier, .. } = &outcome.parameters else {
            return None;
        };
        let wave = |a: f64| Waveform::Sinusoid { amplitude: a, frequency: carrier.frequency };
        let (w1, w2) = pulseforge::decouple::qubit_controls(carrier.amplitude_a, carrier.amplitude_b);
        stages.push(PulseStage { omega1: wave(w1), omega2: wave(w2), duration: carrier.duration, label: "carrier".into(), ..stage.clone() });
    }
    Some(PulseProgram { stages })
}

fn plot_name(s: Strategy) -> String {
    s.name().replace('-', "_")
}

/// The run's curve first, then the closed-form seed for comparison; a
/// min-energy run also plots its sinusoidal carrier and the difference.
fn plot_curves(cfg: &RunConfig, main: &Synthesis) -> (Vec<PlotCurve>, Vec<(usize, usize)>) {
    let mut curves = vec![PlotCurve { name: plot_name(main.strategy), program: main.program.clone() }];
    let mut differences = vec![];
    if main.strategy == Strategy::MinEnergy {
        if let Some(program) = carrier_program(main) {
            curves.push(PlotCurve { name: plot_name(Strategy::Optimized), program });
            differences.push((1, 0));
        }
    }
    if main.strategy != Strategy::Approximate {
        match synthesize(cfg, Strategy::Approximate) {
            Ok(s) => curves.push(PlotCurve { name: plot_name(Strategy::Approximate), program: s.program }),
            Err(e) => log::warn!("approximate comparison curve unavailable: {e}"),
        }
    }
    (curves, differences)
}

/// `synth`: write pulses, plot data and the report into `out`.
pub fn run_synth(cfg: &RunConfig, out: &Path, display_hz: bool) -> Result<u8, CliError> {
    fs::create_dir_all(out).map_err(io(out))?;
    let report_path = out.join(&cfg.report_json);
    let (first, second) = cfg.target.factors();
    let mut doc = RunDocument {
        schema: 1,
        command: "synth",
        status: Status::SynthesisFailure,
        threshold: cfg.threshold,
        seed: cfg.seed,
        error: None,
        best_fidelity: None,
        report: None,
    };
    log::info!("synthesizing {} with strategy {}", cfg.target.description(), cfg.strategy);
    let outcome = synthesize(cfg, cfg.strategy).and_then(|s| {
        let r = SynthesisReport::from_synthesis(&first, &second, cfg.target.description(), &s, cfg.coupling, cfg.steps)?;
        Ok((s, r))
    });
    let (synthesis, report) = match outcome {
        Ok(pair) => pair,
        Err(e) => {
            log::error!("{e}");
            doc.best_fidelity = best_fidelity(&e);
            doc.error = Some(e.to_string());
            write_document(&report_path, &doc)?;
            return Ok(doc.exit_code());
        }
    };
    write_pulses(create(&out.join(&cfg.pulse_csv))?, &sample_program(&synthesis.program, cfg.sample_rate))?;
    let (curves, differences) = plot_curves(cfg, &synthesis);
    write_plot(create(&out.join(&cfg.plot_csv))?, &curves, &differences, cfg.sample_rate, display_hz)?;
    doc.status = if report.fidelity >= cfg.threshold { Status::Ok } else { Status::BelowThreshold };
    log::info!("fidelity {} (threshold {})", report.fidelity, cfg.threshold);
    doc.report = Some(report);
    write_document(&report_path, &doc)?;
    Ok(doc.exit_code())
}

/// `verify`: re-simulate a pulse file against the configured target.
pub fn run_verify(cfg: &RunConfig, pulses: &Path, out: &Path) -> Result<u8, CliError> {
    let file = fs::File::open(pulses).map_err(io(pulses))?;
    let rows = read_pulses(file).map_err(|source| CliError::Pulses { path: pulses.to_path_buf(), source })?;
    let program = program_from_rows(&rows);
    let (first, second) = cfg.target.factors();
    fs::create_dir_all(out).map_err(io(out))?;
    let mut doc = RunDocument {
        schema: 1,
        command: "verify",
        status: Status::SynthesisFailure,
        threshold: cfg.threshold,
        seed: cfg.seed,
        error: None,
        best_fidelity: None,
        report: None,
    };
    match make_report(&first, &second, cfg.target.description(), &program, cfg.coupling, cfg.steps) {
        Ok(r) => {
            doc.status = if r.fidelity >= cfg.threshold { Status::Ok } else { Status::BelowThreshold };
            log::info!("verified fidelity {} over {} stage(s)", r.fidelity, program.stages.len());
            doc.report = Some(r);
        }
        Err(e) => doc.error = Some(e.to_string()),
    }
    write_document(&out.join(&cfg.report_json), &doc)?;
    Ok(doc.exit_code())
}

pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value <= self.tolerance
    }
}

/// `selftest`: fast structural checks, one line each.
pub fn selftest_checks(seed: u64) -> Vec<Check> {
    use pulseforge::algebra::{gate_fidelity, rx, Unitary2};
    use pulseforge::decouple::{build_epsilon_basis, compute_block_basis, stage_plan, xyx_compose};
    use pulseforge::elliptic::{jacobi_sn_cn_dn, EllipticModulus};
    use pulseforge::synth::approx_two_qubit;
    use pulseforge::verify::{locality_residual, simulate_program};

    let basis = build_epsilon_basis();
    let block = compute_block_basis(&basis).map(|_| 0.0).unwrap_or(1.0);
    let k = EllipticModulus::new(0.6).expect("valid modulus");
    let identity = (0..16)
        .map(|i| {
            let (sn, cn, dn) = jacobi_sn_cn_dn(0.37 * i as f64, k);
            (sn * sn + cn * cn - 1.0).abs().max((dn * dn + 0.36 * sn * sn - 1.0).abs())
        })
        .fold(0.0, f64::max);
    // A seeded, reproducible pseudo-random XYX target.
    let angle = |i: u64| ((seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407 * (i + 1))) >> 11) as f64 / (1u64 << 53) as f64 * std::f64::consts::TAU;
    let (a, b) = (xyx_compose(angle(0), angle(1), angle(2)), xyx_compose(angle(3), angle(4), angle(5)));
    let plan = stage_plan(&a, &b).compose();
    let approx = approx_two_qubit(std::f64::consts::FRAC_PI_2, 0.0, 200.0, 1)
        .and_then(|p| simulate_program(&p, 200.0, 1 << 12))
        .map(|u| locality_residual(&u).residual)
        .unwrap_or(1.0);
    vec![
        Check { name: "commutator table", value: basis.commutator_table_residual(), tolerance: 1e-12 },
        Check { name: "block basis", value: block, tolerance: 0.0 },
        Check { name: "jacobi identities", value: identity, tolerance: 1e-12 },
        Check { name: "stage plan recomposes target", value: 1.0 - gate_fidelity(&plan, &a.kron(&b)), tolerance: 1e-12 },
        Check { name: "rx(2π) = −I", value: rx(std::f64::consts::TAU).distance(&Unitary2::identity().with_phase(std::f64::consts::PI)), tolerance: 1e-12 },
        Check { name: "approximate pulse locality", value: approx, tolerance: 0.05 },
    ]
}

pub fn run_selftest(seed: u64) -> u8 {
    let checks = selftest_checks(seed);
    for c in &checks {
        println!("{}: {} ({:e} ≤ {:e})", c.name, if c.passed() { "PASS" } else { "FAIL" }, c.value, c.tolerance);
    }
    if checks.iter().all(Check::passed) {
        EXIT_OK
    } else {
        EXIT_BELOW_THRESHOLD
    }
}
