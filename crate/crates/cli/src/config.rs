//! Run configuration: a flat `key = value` file.
//!
//! Blank lines and lines starting with `#` or `;` are ignored. Every key may
//! appear at most once and unknown keys are rejected. Exactly one target form
//! must be given:
//!
//! ```text
//! gamma1 = 1.5707963267948966      # single stage e^{-iγ1σx/2} ⊗ e^{-iγ2σx/2}
//! gamma2 = 0
//!
//! first_euler = 0.1, 0.2, 0.3      # XYX angles, rx(α)·ry(β)·rx(γ)
//! second_euler = 0, 0, 0
//!
//! first_matrix = 0, -1i; -1i, 0    # rows split by ';', entries by ','
//! second_matrix = 1, 0; 0, 1
//! ```

use std::fmt;
use std::path::PathBuf;

use pulseforge::algebra::{Matrix, Unitary, Unitary2, C64};
use pulseforge::decouple::xyx_compose;
use pulseforge::synth::{Strategy, DEFAULT_STEPS};

pub const DEFAULT_THRESHOLD: f64 = 0.999;
/// Samples per second in the pulse and plot files.
pub const DEFAULT_SAMPLE_RATE: f64 = 100_000.0;

const KEYS: [&str; 17] = [
    "J",
    "strategy",
    "gamma1",
    "gamma2",
    "first_euler",
    "second_euler",
    "first_matrix",
    "second_matrix",
    "n",
    "bounds",
    "sample_rate",
    "steps",
    "seed",
    "threshold",
    "pulse_csv",
    "report_json",
    "plot_csv",
];

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    /// 1-based line, when the error is tied to one.
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(field) = &self.field {
            write!(f, "field `{field}`: ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TargetForm {
    Angles,
    Euler,
    Matrix,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    Angles { gamma1: f64, gamma2: f64 },
    Local { first: Unitary2, second: Unitary2, form: TargetForm },
}

impl Target {
    /// The two single-qubit factors.
    pub fn factors(&self) -> (Unitary2, Unitary2) {
        match self {
            Target::Angles { gamma1, gamma2 } => {
                (pulseforge::algebra::rx(*gamma1), pulseforge::algebra::rx(*gamma2))
            }
            Target::Local { first, second, .. } => (*first, *second),
        }
    }

    pub fn description(&self) -> String {
        match self {
            Target::Angles { gamma1, gamma2 } => format!("rx({gamma1}) ⊗ rx({gamma2})"),
            Target::Local { form: TargetForm::Euler, .. } => "XYX Euler factors".into(),
            Target::Local { .. } => "matrix factors".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// `J` in rad/s.
    pub coupling: f64,
    pub strategy: Strategy,
    pub target: Target,
    pub harmonics: u32,
    pub bounds: Option<(f64, f64)>,
    pub sample_rate: f64,
    pub steps: usize,
    pub seed: u64,
    pub threshold: f64,
    pub pulse_csv: PathBuf,
    pub report_json: PathBuf,
    pub plot_csv: PathBuf,
}

struct Entry {
    line: usize,
    value: String,
}

fn err(line: Option<usize>, field: Option<&str>, message: impl Into<String>) -> ConfigError {
    ConfigError { line, field: field.map(str::to_string), message: message.into() }
}

fn number(line: usize, field: &str, text: &str) -> Result<f64, ConfigError> {
    match text.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(err(Some(line), Some(field), format!("malformed number {:?}", text.trim()))),
    }
}

fn list(line: usize, field: &str, text: &str, len: usize) -> Result<Vec<f64>, ConfigError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != len {
        return Err(err(Some(line), Some(field), format!("expected {len} comma-separated numbers, got {}", parts.len())));
    }
    parts.iter().map(|p| number(line, field, p)).collect()
}

fn complex(line: usize, field: &str, text: &str) -> Result<C64, ConfigError> {
    let t: String = text.split_whitespace().collect();
    match t.parse::<C64>() {
        Ok(z) if z.re.is_finite() && z.im.is_finite() => Ok(z),
        _ => Err(err(Some(line), Some(field), format!("malformed complex number {:?}", text.trim()))),
    }
}

fn matrix(line: usize, field: &str, text: &str) -> Result<Unitary2, ConfigError> {
    let rows: Vec<&str> = text.split(';').collect();
    if rows.len() != 2 {
        return Err(err(Some(line), Some(field), "expected two rows separated by ';'"));
    }
    let mut m = [[C64::new(0.0, 0.0); 2]; 2];
    for (i, row) in rows.iter().enumerate() {
        let entries: Vec<&str> = row.split(',').collect();
        if entries.len() != 2 {
            return Err(err(Some(line), Some(field), format!("row {} needs two entries", i + 1)));
        }
        for (j, e) in entries.iter().enumerate() {
            m[i][j] = complex(line, field, e)?;
        }
    }
    Unitary::new(Matrix(m)).map_err(|e| err(Some(line), Some(field), e.to_string()))
}

fn integer<T: std::str::FromStr>(line: usize, field: &str, text: &str) -> Result<T, ConfigError> {
    text.trim().parse::<T>().map_err(|_| err(Some(line), Some(field), format!("malformed integer {:?}", text.trim())))
}

fn path(line: usize, field: &str, text: &str) -> Result<PathBuf, ConfigError> {
    if text.is_empty() {
        return Err(err(Some(line), Some(field), "empty path"));
    }
    Ok(PathBuf::from(text))
}

/// Parse a configuration file's text.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut entries: Vec<(&'static str, Entry)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with(';') {
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(err(Some(line), None, format!("expected `key = value`, got {trimmed:?}")));
        };
        let key = key.trim();
        let Some(known) = KEYS.iter().find(|k| **k == key) else {
            return Err(err(Some(line), Some(key), "unknown key"));
        };
        if let Some((_, first)) = entries.iter().find(|(k, _)| k == known) {
            return Err(err(Some(line), Some(key), format!("duplicate key (first set on line {})", first.line)));
        }
        entries.push((known, Entry { line, value: value.trim().to_string() }));
    }
    let get = |key: &str| entries.iter().find(|(k, _)| *k == key).map(|(_, e)| e);

    let coupling = match get("J") {
        Some(e) => number(e.line, "J", &e.value)?,
        None => return Err(err(None, Some("J"), "missing required key")),
    };
    if !(coupling > 0.0) {
        return Err(err(get("J").map(|e| e.line), Some("J"), "coupling must be positive"));
    }

    let strategy = match get("strategy") {
        Some(e) => e.value.parse::<Strategy>().map_err(|_| {
            let names: Vec<&str> = Strategy::ALL.iter().map(|s| s.name()).collect();
            err(Some(e.line), Some("strategy"), format!("unknown strategy {:?}; expected one of {}", e.value, names.join(", ")))
        })?,
        None => Strategy::Approximate,
    };

    let forms: Vec<(TargetForm, [&str; 2])> = [
        (TargetForm::Angles, ["gamma1", "gamma2"]),
        (TargetForm::Euler, ["first_euler", "second_euler"]),
        (TargetForm::Matrix, ["first_matrix", "second_matrix"]),
    ]
    .into_iter()
    .filter(|(_, keys)| keys.iter().any(|k| get(k).is_some()))
    .collect();
    let target = match forms.as_slice() {
        [] => return Err(err(None, Some("target"), "missing target: give gamma1/gamma2, first_euler/second_euler or first_matrix/second_matrix")),
        [(form, keys)] => {
            let pick = |k: &str| get(k).ok_or_else(|| err(None, Some(k), format!("missing key; {} and {} go together", keys[0], keys[1])));
            let (e1, e2) = (pick(keys[0])?, pick(keys[1])?);
            match form {
                TargetForm::Angles => Target::Angles {
                    gamma1: number(e1.line, keys[0], &e1.value)?,
                    gamma2: number(e2.line, keys[1], &e2.value)?,
                },
                TargetForm::Euler => {
                    let a = list(e1.line, keys[0], &e1.value, 3)?;
                    let b = list(e2.line, keys[1], &e2.value, 3)?;
                    Target::Local { first: xyx_compose(a[0], a[1], a[2]), second: xyx_compose(b[0], b[1], b[2]), form: *form }
                }
                TargetForm::Matrix => Target::Local {
                    first: matrix(e1.line, keys[0], &e1.value)?,
                    second: matrix(e2.line, keys[1], &e2.value)?,
                    form: *form,
                },
            }
        }
        [(_, a), (_, b), ..] => {
            let line = get(b[0]).or(get(b[1])).map(|e| e.line);
            return Err(err(line, Some("target"), format!("conflicting target forms: {} and {}", a[0], b[0])));
        }
    };

    let harmonics = match get("n") {
        Some(e) => match integer::<u32>(e.line, "n", &e.value)? {
            0 => return Err(err(Some(e.line), Some("n"), "harmonic index must be ≥ 1")),
            n => n,
        },
        None => 1,
    };
    let bounds = match get("bounds") {
        Some(e) => {
            let v = list(e.line, "bounds", &e.value, 2)?;
            if !(v[0] < v[1]) {
                return Err(err(Some(e.line), Some("bounds"), "need min < max"));
            }
            Some((v[0], v[1]))
        }
        None => None,
    };
    let sample_rate = match get("sample_rate") {
        Some(e) => match number(e.line, "sample_rate", &e.value)? {
            r if r > 0.0 => r,
            _ => return Err(err(Some(e.line), Some("sample_rate"), "must be positive")),
        },
        None => DEFAULT_SAMPLE_RATE,
    };
    let steps = match get("steps") {
        Some(e) => match integer::<usize>(e.line, "steps", &e.value)? {
            0 => return Err(err(Some(e.line), Some("steps"), "must be ≥ 1")),
            s => s,
        },
        None => DEFAULT_STEPS,
    };
    let seed = match get("seed") {
        Some(e) => integer::<u64>(e.line, "seed", &e.value)?,
        None => 0,
    };
    let threshold = match get("threshold") {
        Some(e) => check_threshold(number(e.line, "threshold", &e.value)?).map_err(|m| err(Some(e.line), Some("threshold"), m))?,
        None => DEFAULT_THRESHOLD,
    };
    let output = |key: &str, default: &str| match get(key) {
        Some(e) => path(e.line, key, &e.value),
        None => Ok(PathBuf::from(default)),
    };
    Ok(RunConfig {
        coupling,
        strategy,
        target,
        harmonics,
        bounds,
        sample_rate,
        steps,
        seed,
        threshold,
        pulse_csv: output("pulse_csv", "pulse.csv")?,
        report_json: output("report_json", "report.json")?,
        plot_csv: output("plot_csv", "plot.csv")?,
    })
}

/// Thresholds live in `[0, 1]`.
pub fn check_threshold(t: f64) -> Result<f64, String> {
    if (0.0..=1.0).contains(&t) {
        Ok(t)
    } else {
        Err(format!("threshold must lie in [0, 1], got {t}"))
    }
}
