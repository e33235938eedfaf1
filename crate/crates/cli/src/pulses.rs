//! Pulse and plot files.
//!
//! A pulse file lists `t_s,omega1_rad_s,omega2_rad_s,phi1_rad,phi2_rad` on a
//! uniform per-stage grid. A jump (stage boundary or control switch) is
//! written as two rows with the same time: the left limit, then the right.

use std::io::{Read, Write};

use pulseforge::synth::{PulseProgram, PulseStage, Waveform};

pub const PULSE_HEADER: [&str; 5] = ["t_s", "omega1_rad_s", "omega2_rad_s", "phi1_rad", "phi2_rad"];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseRow {
    pub t: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub phi1: f64,
    pub phi2: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum PulseError {
    #[error("line {line}: field `{field}`: {message}")]
    Parse { line: u64, field: String, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn below(t: f64) -> f64 {
    if t > 0.0 {
        f64::from_bits(t.to_bits() - 1)
    } else {
        t
    }
}

/// Rows for `program` at `rate` samples per second.
pub fn sample_program(program: &PulseProgram, rate: f64) -> Vec<PulseRow> {
    let mut rows = Vec::new();
    let mut offset = 0.0;
    for stage in &program.stages {
        let d = stage.duration;
        let row = |t: f64, at: f64| PulseRow {
            t: offset + t,
            omega1: stage.omega1.eval(at),
            omega2: stage.omega2.eval(at),
            phi1: stage.phi1,
            phi2: stage.phi2,
        };
        let jumps: Vec<f64> = stage.breakpoints().into_iter().filter(|&b| b > 0.0 && b < d).collect();
        let n = (d * rate).floor() as usize;
        let mut grid = (0..=n).map(|i| i as f64 / rate).filter(|&t| t < d).peekable();
        let mut jumps = jumps.into_iter().peekable();
        loop {
            match (grid.peek().copied(), jumps.peek().copied()) {
                (Some(g), Some(j)) if j <= g => {
                    rows.push(row(j, below(j)));
                    rows.push(row(j, j));
                    jumps.next();
                    if j == g {
                        grid.next();
                    }
                }
                (Some(g), _) => {
                    rows.push(row(g, g));
                    grid.next();
                }
                (None, Some(j)) => {
                    rows.push(row(j, below(j)));
                    rows.push(row(j, j));
                    jumps.next();
                }
                (None, None) => break,
            }
        }
        rows.push(row(d, below(d).max(0.0)));
        offset += d;
    }
    rows
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

pub fn write_pulses<W: Write>(out: W, rows: &[PulseRow]) -> csv::Result<()> {
    let mut w = writer(out);
    w.write_record(PULSE_HEADER)?;
    for r in rows {
        w.write_record([r.t, r.omega1, r.omega2, r.phi1, r.phi2].map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_pulses<R: Read>(input: R) -> Result<Vec<PulseRow>, PulseError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(PULSE_HEADER) {
        return Err(PulseError::Parse {
            line: 1,
            field: "header".into(),
            message: format!("expected {:?}, got {:?}", PULSE_HEADER.join(","), header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let mut v = [0.0; 5];
        for (i, name) in PULSE_HEADER.iter().enumerate() {
            let text = record.get(i).unwrap_or("");
            v[i] = match text.trim().parse::<f64>() {
                Ok(x) if x.is_finite() => x,
                _ => return Err(PulseError::Parse { line, field: name.to_string(), message: format!("malformed number {text:?}") }),
            };
        }
        let row = PulseRow { t: v[0], omega1: v[1], omega2: v[2], phi1: v[3], phi2: v[4] };
        if let Some(prev) = rows.last().map(|p: &PulseRow| p.t) {
            if row.t < prev {
                return Err(PulseError::Parse { line, field: "t_s".into(), message: format!("time {} runs backwards from {prev}", row.t) });
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Piecewise-linear program through `rows`; a change of phases starts a
/// new stage.
pub fn program_from_rows(rows: &[PulseRow]) -> PulseProgram {
    let mut program = PulseProgram::default();
    let mut start = 0;
    while start < rows.len() {
        let (p1, p2) = (rows[start].phi1, rows[start].phi2);
        let end = rows[start..].iter().position(|r| (r.phi1, r.phi2) != (p1, p2)).map_or(rows.len(), |k| start + k);
        let chunk = &rows[start..end];
        let t0 = chunk[0].t;
        let times: Vec<f64> = chunk.iter().map(|r| r.t - t0).collect();
        let duration = *times.last().unwrap_or(&0.0);
        if duration > 0.0 {
            let channel = |f: fn(&PulseRow) -> f64| Waveform::Sampled { times: times.clone(), values: chunk.iter().map(f).collect() };
            program.stages.push(PulseStage {
                omega1: channel(|r| r.omega1),
                omega2: channel(|r| r.omega2),
                phi1: p1,
                phi2: p2,
                duration,
                label: format!("sampled stage {}", program.stages.len()),
            });
        }
        start = end;
    }
    program
}

pub struct PlotCurve {
    pub name: String,
    pub program: PulseProgram,
}

/// Both channels of `program` at global time `t`, right-continuous except
/// at the very end.
pub fn eval_program(program: &PulseProgram, t: f64) -> Option<(f64, f64)> {
    let mut offset = 0.0;
    let last = program.stages.len().checked_sub(1)?;
    for (i, stage) in program.stages.iter().enumerate() {
        let local = t - offset;
        if local < stage.duration || (i == last && local <= stage.duration) {
            let at = if local >= stage.duration { below(stage.duration) } else { local.max(0.0) };
            return Some((stage.omega1.eval(at), stage.omega2.eval(at)));
        }
        offset += stage.duration;
    }
    None
}

/// Two columns per curve and per `(a, b)` difference, sampled at `rate` up
/// to the longest duration; cells past a curve's end are empty.
pub fn write_plot<W: Write>(out: W, curves: &[PlotCurve], differences: &[(usize, usize)], rate: f64, display_hz: bool) -> csv::Result<()> {
    let unit = if display_hz { "hz" } else { "rad_s" };
    let scale = if display_hz { 1.0 / std::f64::consts::TAU } else { 1.0 };
    let mut header = vec!["t_s".to_string()];
    for c in curves {
        header.push(format!("{}_omega1_{unit}", c.name));
        header.push(format!("{}_omega2_{unit}", c.name));
    }
    for &(a, b) in differences {
        header.push(format!("{}_minus_{}_omega1_{unit}", curves[a].name, curves[b].name));
        header.push(format!("{}_minus_{}_omega2_{unit}", curves[a].name, curves[b].name));
    }
    let mut w = writer(out);
    w.write_record(&header)?;
    let span = curves.iter().map(|c| c.program.duration()).fold(0.0, f64::max);
    let n = (span * rate).ceil() as usize;
    for i in 0..=n {
        let t = (i as f64 / rate).min(span);
        let values: Vec<Option<(f64, f64)>> = curves.iter().map(|c| eval_program(&c.program, t)).collect();
        let mut record = vec![t.to_string()];
        let cell = |v: Option<f64>| v.map_or(String::new(), |x| (x * scale).to_string());
        for v in &values {
            record.push(cell(v.map(|p| p.0)));
            record.push(cell(v.map(|p| p.1)));
        }
        for &(a, b) in differences {
            let d = values[a].zip(values[b]).map(|(x, y)| (x.0 - y.0, x.1 - y.1));
            record.push(cell(d.map(|p| p.0)));
            record.push(cell(d.map(|p| p.1)));
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}
