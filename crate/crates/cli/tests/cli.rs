use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pulseforge::synth::{Strategy, DEFAULT_STEPS};
use pulseforge_cli::config::{parse_config, Target, DEFAULT_THRESHOLD};
use pulseforge_cli::pulses::{program_from_rows, read_pulses, sample_program, PULSE_HEADER};

const QUARTER: &str = "J = 200\ngamma1 = 1.5707963267948966\ngamma2 = 0\n";

fn pulseforge(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pulseforge")).args(args).current_dir(dir).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.ini");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn minimal_config_fills_defaults() {
    let c = parse_config(QUARTER).unwrap();
    assert_eq!(c.harmonics, 1);
    assert_eq!(c.threshold, DEFAULT_THRESHOLD);
    assert_eq!(c.threshold, 0.999);
    assert_eq!(c.steps, DEFAULT_STEPS);
    assert_eq!(c.steps, 1 << 14);
    assert_eq!(c.strategy, Strategy::Approximate);
    assert_eq!(c.bounds, None);
}

#[test]
fn unknown_key_is_rejected_with_line() {
    let e = parse_config("J = 200\ngamma1 = 0\ngamma2 = 0\ncolour = red\n").unwrap_err();
    assert_eq!(e.line, Some(4));
    assert_eq!(e.field.as_deref(), Some("colour"));
}

#[test]
fn conflicting_target_forms() {
    let e = parse_config("J = 200\ngamma1 = 0\ngamma2 = 0\nfirst_euler = 0,0,0\nsecond_euler = 0,0,0\n").unwrap_err();
    assert_eq!(e.field.as_deref(), Some("target"));
    assert!(e.message.contains("conflicting"), "{e}");
}

#[test]
fn missing_target() {
    let e = parse_config("J = 200\n").unwrap_err();
    assert_eq!(e.field.as_deref(), Some("target"));
    let e = parse_config("J = 200\ngamma1 = 1\n").unwrap_err();
    assert_eq!(e.field.as_deref(), Some("gamma2"));
}

#[test]
fn malformed_number_names_field() {
    let e = parse_config("J = 200\ngamma1 = 1.5x\ngamma2 = 0\n").unwrap_err();
    assert_eq!((e.line, e.field.as_deref()), (Some(2), Some("gamma1")));
    let e = parse_config("J = 200\nfirst_euler = 1, nan, 0\nsecond_euler = 0,0,0\n").unwrap_err();
    assert_eq!(e.field.as_deref(), Some("first_euler"));
    let e = parse_config("J = 200\ngamma1 = 0\ngamma2 = 0\nsteps = -3\n").unwrap_err();
    assert_eq!(e.field.as_deref(), Some("steps"));
}

#[test]
fn duplicate_key_and_bad_values() {
    let e = parse_config("J = 200\nJ = 100\ngamma1 = 0\ngamma2 = 0\n").unwrap_err();
    assert_eq!(e.line, Some(2));
    assert!(parse_config("J = 0\ngamma1 = 0\ngamma2 = 0\n").is_err());
    assert!(parse_config("J = 1\ngamma1 = 0\ngamma2 = 0\nbounds = 5, -5\n").is_err());
    assert!(parse_config("J = 1\ngamma1 = 0\ngamma2 = 0\nthreshold = 1.5\n").is_err());
    assert!(parse_config("J = 1\ngamma1 = 0\ngamma2 = 0\nstrategy = fastest\n").is_err());
    assert!(parse_config("[run]\nJ = 1\n").is_err());
}

#[test]
fn full_config() {
    let c = parse_config(
        "J = 150\nstrategy = bang-bang\nfirst_euler = 0.1, 0.2, 0.3\nsecond_euler = 0, 1, 0\nn = 2\nbounds = -700, 900\n\
         sample_rate = 5e4\nsteps = 4096\nseed = 9\nthreshold = 0.99\npulse_csv = p.csv\nreport_json = r.json\nplot_csv = q.csv\n",
    )
    .unwrap();
    assert_eq!(c.strategy, Strategy::BangBang);
    assert!(matches!(c.target, Target::Local { .. }));
    assert_eq!((c.harmonics, c.bounds, c.sample_rate, c.steps, c.seed), (2, Some((-700.0, 900.0)), 5e4, 4096, 9));
    assert_eq!(c.pulse_csv.to_str(), Some("p.csv"));
}

#[test]
fn synth_writes_files_in_contract_formats() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), QUARTER);
    // The closed-form pulse sits just under the default threshold.
    let o = pulseforge(&["synth", "--config", &cfg, "--out", "out", "--threshold", "0.99"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let pulses = fs::read_to_string(dir.path().join("out/pulse.csv")).unwrap();
    assert!(!pulses.contains('\r'));
    assert_eq!(pulses.lines().next().unwrap(), PULSE_HEADER.join(","));
    assert_eq!(pulses.lines().next().unwrap(), "t_s,omega1_rad_s,omega2_rad_s,phi1_rad,phi2_rad");
    // 100 cos(200 t) on qubit 1 for a quarter turn.
    let second = pulses.lines().nth(2).unwrap();
    let v: Vec<f64> = second.split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(v[0], 1e-5);
    assert!((v[1] - 100.0 * (200.0f64 * 1e-5).cos()).abs() < 1e-12);
    let report = fs::read_to_string(dir.path().join("out/report.json")).unwrap();
    assert!(report.starts_with("{\n  \"schema\": 1,\n  \"command\": \"synth\",\n  \"status\": \"ok\""));
    let json: serde_json::Value = serde_json::from_str(&report).unwrap();
    let f = json["report"]["fidelity"].as_f64().unwrap();
    assert!(f > 0.998 && f < 0.999);
    let plot = fs::read_to_string(dir.path().join("out/plot.csv")).unwrap();
    assert_eq!(plot.lines().next().unwrap(), "t_s,approximate_omega1_rad_s,approximate_omega2_rad_s");
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{QUARTER}strategy = optimized\nseed = 3\n"));
    for out in ["a", "b"] {
        let o = pulseforge(&["synth", "--config", &cfg, "--out", out, "--steps", "2048"], dir.path());
        assert_eq!(o.status.code(), Some(0));
    }
    for f in ["pulse.csv", "report.json", "plot.csv"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        let b = fs::read(dir.path().join("b").join(f)).unwrap();
        assert!(a == b, "{f} differs");
    }
}

#[test]
fn below_threshold_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), QUARTER);
    let o = pulseforge(&["synth", "--config", &cfg, "--out", "o", "--threshold", "0.9999"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let json: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("o/report.json")).unwrap()).unwrap();
    assert_eq!(json["status"], "below-threshold");
}

#[test]
fn parse_error_exits_two_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "J = 200\ngamma1 = abc\ngamma2 = 0\n");
    let o = pulseforge(&["synth", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2") && err.contains("gamma1"), "{err}");
    // Argument errors share the code.
    let o = pulseforge(&["synth", "--config", &cfg, "--threshold", "2"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn synthesis_failure_exits_three_and_still_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{QUARTER}strategy = bang-bang\nbounds = -1, 1\n"));
    let o = pulseforge(&["synth", "--config", &cfg, "--out", "o"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let json: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("o/report.json")).unwrap()).unwrap();
    assert_eq!(json["schema"], 1);
    assert_eq!(json["status"], "synthesis-failure");
    assert!(json["error"].as_str().unwrap().contains("bang-bang"));
    assert!(json["report"].is_null());
}

#[test]
fn display_hz_rescales_plot_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), QUARTER);
    pulseforge(&["synth", "--config", &cfg, "--out", "r"], dir.path());
    pulseforge(&["synth", "--config", &cfg, "--out", "h", "--display-hz"], dir.path());
    let read = |p: &str| fs::read_to_string(dir.path().join(p)).unwrap();
    assert_eq!(read("r/pulse.csv"), read("h/pulse.csv"));
    let hz = read("h/plot.csv");
    assert!(hz.starts_with("t_s,approximate_omega1_hz,approximate_omega2_hz\n"));
    let first: f64 = hz.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((first - 100.0 / std::f64::consts::TAU).abs() < 1e-12);
}

#[test]
fn verify_accepts_bang_bang_pulses() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "J = 200\nstrategy = bang-bang\nfirst_euler = 0.4, 0.9, -0.3\nsecond_euler = 1.2, 0, 0\n");
    let o = pulseforge(&["synth", "--config", &cfg, "--out", "s"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    // Switches appear as repeated times.
    let rows = read_pulses(fs::File::open(dir.path().join("s/pulse.csv")).unwrap()).unwrap();
    assert!(rows.windows(2).any(|w| w[0].t == w[1].t));
    let o = pulseforge(&["verify", "--config", &cfg, "--pulses", "s/pulse.csv", "--out", "v"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("v/report.json")).unwrap()).unwrap();
    assert!(json["report"]["fidelity"].as_f64().unwrap() >= 0.999);
}

#[test]
fn verify_rejects_malformed_pulses() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), QUARTER);
    fs::write(dir.path().join("bad.csv"), "t_s,omega1_rad_s,omega2_rad_s,phi1_rad,phi2_rad\n0,1,0,0,0\n0.1,x,0,0,0\n").unwrap();
    let o = pulseforge(&["verify", "--config", &cfg, "--pulses", "bad.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3") && err.contains("omega1_rad_s"), "{err}");
}

#[test]
fn sampled_program_round_trips() {
    let c = parse_config(QUARTER).unwrap();
    let s = pulseforge_cli::run::synthesize(&c, Strategy::Approximate).unwrap();
    let rows = sample_program(&s.program, 1e5);
    let back = program_from_rows(&rows);
    assert_eq!(back.stages.len(), 1);
    assert!((back.duration() - s.program.duration()).abs() < 1e-15);
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = pulseforge(&["selftest"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.lines().count() >= 5 && !out.contains("FAIL"));
}

#[test]
fn worked_example_pulse_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{QUARTER}strategy = approximate\nn = 1\n"));
    pulseforge(&["synth", "--config", &cfg, "--out", "o"], dir.path());
    let rows = read_pulses(fs::File::open(dir.path().join("o/pulse.csv")).unwrap()).unwrap();
    for r in &rows {
        assert!((r.omega1 - 100.0 * (200.0 * r.t).cos()).abs() <= 1e-9, "t = {}", r.t);
        assert_eq!((r.omega2, r.phi1, r.phi2), (0.0, 0.0, 0.0));
    }
    assert!((rows.last().unwrap().t - 10.0 * std::f64::consts::PI * 1e-3).abs() < 1e-15);
}

#[test]
fn identity_target_is_empty_and_exact() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "J = 200\ngamma1 = 0\ngamma2 = 0\n");
    let o = pulseforge(&["synth", "--config", &cfg, "--out", "o"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("o/report.json")).unwrap()).unwrap();
    assert_eq!(json["report"]["fidelity"], 1.0);
    assert_eq!(json["report"]["duration"], 0.0);
    let pulses = fs::read_to_string(dir.path().join("o/pulse.csv")).unwrap();
    assert_eq!(pulses, format!("{}\n", PULSE_HEADER.join(",")));
}

#[test]
fn min_energy_plot_tracks_carrier() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{QUARTER}strategy = min-energy\n"));
    let o = pulseforge(&["synth", "--config", &cfg, "--out", "o"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let mut r = csv::Reader::from_path(dir.path().join("o/plot.csv")).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(str::to_string).collect();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap_or_else(|| panic!("missing {name}"));
    let (me, opt, diff) = (col("min_energy_omega1_rad_s"), col("optimized_omega1_rad_s"), col("optimized_minus_min_energy_omega1_rad_s"));
    let mut worst: f64 = 0.0;
    for rec in r.records() {
        let rec = rec.unwrap();
        let (a, b) = (rec[me].parse::<f64>(), rec[opt].parse::<f64>());
        if let (Ok(a), Ok(b)) = (a, b) {
            let d: f64 = rec[diff].parse().unwrap();
            assert!((d - (b - a)).abs() < 1e-9);
            worst = worst.max(d.abs());
        }
    }
    assert!(worst > 0.0 && worst <= 10.0, "max difference {worst}");
}

#[test]
fn sampling_error_within_derivative_bound() {
    // ω1 = 100 cos 200t: sup|ω̇| = 2·10⁴ rad/s².
    let c = parse_config(QUARTER).unwrap();
    let s = pulseforge_cli::run::synthesize(&c, Strategy::Approximate).unwrap();
    for rate in [1e3, 1e4, 1e5] {
        let back = program_from_rows(&sample_program(&s.program, rate));
        let exact = &s.program.stages[0].omega1;
        let approx = &back.stages[0].omega1;
        let t = s.program.duration();
        let err = (0..=20_000).map(|i| t * i as f64 / 20_000.0).map(|x| (exact.eval(x) - approx.eval(x)).abs()).fold(0.0, f64::max);
        assert!(err <= 2e4 / (2.0 * rate), "rate {rate}: {err}");
    }
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut count = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        parse_config(&fs::read_to_string(&path).unwrap()).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        count += 1;
    }
    assert!(count >= 3);
}
