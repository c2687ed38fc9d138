//! Published switching sequences for the six target gates on a uniform
//! four-level Heisenberg chain, K = 20.
//!
//! The CSV is column-per-gate: rows `error`, `duration`, `t_1` … `t_K`. The
//! same layout is used when exporting synthesis results.

use std::io::{Read, Write};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::chain::{heisenberg_spec, ChainSpec};
use crate::error::{Error, Result};
use crate::propagator::{half_frobenius_sq, SwitchPropagator, SwitchSequence};
use crate::synth::{build_target, GateName};

pub const BUNDLED_CSV: &str = include_str!("../data/table1.csv");
pub const BUNDLED_SHA256: &str = "6e6bdb6a3e3517d7fa86c11841d84c04819bb99771319c7e6ad087c05917b421";
pub const TIME_ROWS: usize = 20;
pub const SUM_TOL: f64 = 5e-4;
pub const MAX_PUBLISHED_ERROR: f64 = 6.03e-5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableColumn {
    pub label: String,
    pub error: f64,
    pub duration: f64,
    pub durations: Vec<f64>,
}

impl TableColumn {
    pub fn sum(&self) -> f64 {
        self.durations.iter().sum()
    }
}

/// Parse the column-per-gate layout. Every column must have the same number
/// of time rows.
pub fn read_table<R: Read>(reader: R) -> Result<Vec<TableColumn>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() < 2 {
        return Err(Error::Dataset(
            "table needs a row-label column and at least one gate".into(),
        ));
    }
    let labels: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let mut error: Option<Vec<f64>> = None;
    let mut duration: Option<Vec<f64>> = None;
    let mut times: Vec<Vec<f64>> = Vec::new();

    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let key = rec.get(0).unwrap_or_default().to_string();
        let values = rec
            .iter()
            .skip(1)
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::Dataset(format!("row `{key}`: cannot parse `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if values.len() != labels.len() {
            return Err(Error::Dataset(format!(
                "row `{key}` has {} values, expected {}",
                values.len(),
                labels.len()
            )));
        }
        match key.as_str() {
            "error" => error = Some(values),
            "duration" => duration = Some(values),
            _ => {
                let expected = format!("t_{}", times.len() + 1);
                if key != expected {
                    return Err(Error::Dataset(format!(
                        "line {}: expected row `{expected}`, found `{key}`",
                        line + 2
                    )));
                }
                times.push(values);
            }
        }
    }
    let error = error.ok_or_else(|| Error::Dataset("missing `error` row".into()))?;
    let duration = duration.ok_or_else(|| Error::Dataset("missing `duration` row".into()))?;
    if times.is_empty() {
        return Err(Error::Dataset("no t_k rows".into()));
    }
    Ok(labels
        .into_iter()
        .enumerate()
        .map(|(j, label)| TableColumn {
            label,
            error: error[j],
            duration: duration[j],
            durations: times.iter().map(|row| row[j]).collect(),
        })
        .collect())
}

/// Columns may differ in length; short columns leave trailing cells empty.
pub fn write_table<W: Write>(writer: W, columns: &[TableColumn]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["row".to_string()];
    header.extend(columns.iter().map(|c| c.label.clone()));
    w.write_record(&header)?;
    let fmt = |v: f64| format!("{v}");
    let mut row = vec!["error".to_string()];
    row.extend(columns.iter().map(|c| fmt(c.error)));
    w.write_record(&row)?;
    let mut row = vec!["duration".to_string()];
    row.extend(columns.iter().map(|c| fmt(c.duration)));
    w.write_record(&row)?;
    let k = columns.iter().map(|c| c.durations.len()).max().unwrap_or(0);
    for i in 0..k {
        let mut row = vec![format!("t_{}", i + 1)];
        row.extend(
            columns
                .iter()
                .map(|c| c.durations.get(i).map(|&v| fmt(v)).unwrap_or_default()),
        );
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Dataset {
    columns: Vec<(GateName, TableColumn)>,
}

impl Table1Dataset {
    /// The checked-in transcription, after a checksum check.
    pub fn bundled() -> Result<Self> {
        let digest = sha256_hex(BUNDLED_CSV.as_bytes());
        if digest != BUNDLED_SHA256 {
            return Err(Error::Dataset(format!(
                "bundled table checksum {digest} does not match"
            )));
        }
        Self::from_reader(BUNDLED_CSV.as_bytes())
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let columns = read_table(reader)?
            .into_iter()
            .map(|c| {
                let gate: GateName = c
                    .label
                    .parse()
                    .map_err(|_| Error::Dataset(format!("unknown gate column `{}`", c.label)))?;
                if c.durations.len() != TIME_ROWS {
                    return Err(Error::Dataset(format!(
                        "column {} has {} time rows, expected {TIME_ROWS}",
                        c.label,
                        c.durations.len()
                    )));
                }
                Ok((gate, c))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut names: Vec<_> = columns.iter().map(|(g, _)| *g).collect();
        names.sort();
        if names != GateName::ALL {
            return Err(Error::Dataset(
                "table must have exactly one column per named gate".into(),
            ));
        }
        Ok(Self { columns })
    }

    pub fn columns(&self) -> impl Iterator<Item = (GateName, &TableColumn)> {
        self.columns.iter().map(|(g, c)| (*g, c))
    }

    pub fn column(&self, gate: GateName) -> &TableColumn {
        &self
            .columns
            .iter()
            .find(|(g, _)| *g == gate)
            .expect("all gates present")
            .1
    }

    pub fn validate(&self) -> ValidationReport {
        let checks: Vec<ColumnCheck> = self
            .columns()
            .map(|(gate, c)| {
                let sum = c.sum();
                ColumnCheck {
                    gate: gate.as_str(),
                    sum,
                    duration: c.duration,
                    sum_defect: (sum - c.duration).abs(),
                    error: c.error,
                    ok: (sum - c.duration).abs() <= SUM_TOL && c.error <= MAX_PUBLISHED_ERROR,
                }
            })
            .collect();
        let worst = checks
            .iter()
            .max_by(|a, b| a.error.total_cmp(&b.error))
            .expect("six columns");
        ValidationReport {
            max_error: worst.error,
            max_error_gate: worst.gate,
            passed: checks.iter().all(|c| c.ok),
            columns: checks,
        }
    }

    /// Propagate each column under the given chain, in both slot orderings.
    pub fn replay(&self, spec: &ChainSpec) -> Result<Vec<ReplayRow>> {
        let forward = SwitchPropagator::for_chain(spec)?;
        let swapped = SwitchPropagator::for_chain(&spec.with_switch_levels(spec.f_on(), spec.f_off())?)?;
        self.columns()
            .map(|(gate, c)| {
                let seq = SwitchSequence::new(c.durations.clone())?;
                let target = build_target(gate);
                let e = |p: &SwitchPropagator| crate::propagator::gate_error(&p.propagate(&seq), target.matrix());
                Ok(ReplayRow {
                    gate: gate.as_str(),
                    published_error: c.error,
                    off_first: e(&forward)?,
                    on_first: e(&swapped)?,
                    off_first_half_frobenius_sq: half_frobenius_sq(&forward.propagate(&seq), target.matrix())?,
                })
            })
            .collect()
    }

    /// Grid search over uniform coupling `d` and `f_on` (with `f_off = 0`),
    /// ranking settings by the mean replay error over the six columns.
    pub fn scan(&self, couplings: &[f64], f_on: &[f64], actuator: usize) -> Result<Vec<ScanPoint>> {
        let mut points = Vec::with_capacity(couplings.len() * f_on.len());
        for &d in couplings {
            for &f in f_on {
                let spec = heisenberg_spec(4, vec![d; 3], actuator, 0.0, f)?;
                let rows = self.replay(&spec)?;
                let n = rows.len() as f64;
                let off: f64 = rows.iter().map(|r| r.off_first).sum::<f64>() / n;
                let on: f64 = rows.iter().map(|r| r.on_first).sum::<f64>() / n;
                points.push(ScanPoint {
                    coupling: d,
                    f_on: f,
                    mean_off_first: off,
                    mean_on_first: on,
                    best_mean: off.min(on),
                });
            }
        }
        points.sort_by(|a, b| a.best_mean.total_cmp(&b.best_mean));
        Ok(points)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ColumnCheck {
    pub gate: &'static str,
    pub sum: f64,
    pub duration: f64,
    pub sum_defect: f64,
    pub error: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub columns: Vec<ColumnCheck>,
    pub max_error: f64,
    pub max_error_gate: &'static str,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReplayRow {
    pub gate: &'static str,
    pub published_error: f64,
    /// Slot 1 under the `f_off` Hamiltonian.
    pub off_first: f64,
    /// Slot 1 under the `f_on` Hamiltonian.
    pub on_first: f64,
    /// Phase-sensitive `‖T − U‖_F² / 4N` for the `off_first` ordering.
    pub off_first_half_frobenius_sq: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanPoint {
    pub coupling: f64,
    pub f_on: f64,
    pub mean_off_first: f64,
    pub mean_on_first: f64,
    pub best_mean: f64,
}
