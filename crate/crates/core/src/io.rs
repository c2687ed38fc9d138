//! File formats: chain spec files, switching-sequence CSV with a JSON
//! sidecar, and JSON reports.
//!
//! A spec file holds `key = value` lines; `#` starts a comment.
//!
//! ```text
//! n = 4
//! couplings = 1, 1, 1
//! actuator = 1
//! # optional: energies (Heisenberg by default), f_off (0), f_on (-d_r)
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::chain::{heisenberg_energies, ChainSpec};
use crate::error::{Error, Result};
use crate::lie::{Convention, ProofTrace};
use crate::propagator::SwitchSequence;
use crate::synth::SynthesisResult;
use crate::table1::sha256_hex;

const SPEC_KEYS: [&str; 6] = ["n", "couplings", "energies", "actuator", "f_off", "f_on"];

fn parse_f64(key: &str, s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::parse(key, format!("`{}` is not a number", s.trim())))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::parse(key, "value must be finite"))
    }
}

fn parse_list(key: &str, s: &str) -> Result<Vec<f64>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| parse_f64(key, t))
        .collect()
}

fn parse_usize(key: &str, s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::parse(key, format!("`{}` is not a non-negative integer", s.trim())))
}

pub fn parse_spec(text: &str) -> Result<ChainSpec> {
    let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::parse(
                format!("line {}", lineno + 1),
                format!("expected `key = value`, got `{line}`"),
            )
        })?;
        let key = key.trim();
        let key = SPEC_KEYS
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| Error::parse(key, "unknown key"))?;
        if fields.insert(key, value.trim()).is_some() {
            return Err(Error::parse(*key, "duplicate key"));
        }
    }
    let required = |key: &str| fields.get(key).copied().ok_or_else(|| Error::parse(key, "missing"));

    let n = parse_usize("n", required("n")?)?;
    if n < 2 {
        return Err(Error::parse("n", format!("chain needs at least 2 states, got {n}")));
    }
    let couplings = parse_list("couplings", required("couplings")?)?;
    if couplings.len() != n - 1 {
        return Err(Error::parse(
            "couplings",
            format!("expected {} values, got {}", n - 1, couplings.len()),
        ));
    }
    let energies = match fields.get("energies") {
        Some(s) => {
            let e = parse_list("energies", s)?;
            if e.len() != n {
                return Err(Error::parse(
                    "energies",
                    format!("expected {n} values, got {}", e.len()),
                ));
            }
            e
        }
        None => heisenberg_energies(&couplings),
    };
    let actuator = parse_usize("actuator", required("actuator")?)?;
    if actuator < 1 || actuator >= n {
        return Err(Error::parse(
            "actuator",
            format!("must lie in 1..={}, got {actuator}", n - 1),
        ));
    }
    let f_off = fields
        .get("f_off")
        .map(|s| parse_f64("f_off", s))
        .transpose()?
        .unwrap_or(0.0);
    let f_on = fields
        .get("f_on")
        .map(|s| parse_f64("f_on", s))
        .transpose()?
        .unwrap_or(-couplings[actuator - 1]);
    ChainSpec::new(n, couplings, energies, actuator, f_off, f_on)
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(", ")
}

/// Canonical text form; every field is written explicitly.
pub fn serialize_spec(spec: &ChainSpec) -> String {
    format!(
        "n = {}\ncouplings = {}\nenergies = {}\nactuator = {}\nf_off = {}\nf_on = {}\n",
        spec.n(),
        join(spec.couplings()),
        join(spec.energies()),
        spec.actuator(),
        spec.f_off(),
        spec.f_on()
    )
}

/// SHA-256 of the canonical text form.
pub fn spec_hash(spec: &ChainSpec) -> String {
    sha256_hex(serialize_spec(spec).as_bytes())
}

pub fn read_spec(path: impl AsRef<Path>) -> Result<ChainSpec> {
    parse_spec(&fs::read_to_string(path)?)
}

pub fn write_spec(path: impl AsRef<Path>, spec: &ChainSpec) -> Result<()> {
    fs::write(path, serialize_spec(spec))?;
    Ok(())
}

/// Metadata stored next to a sequence CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceSidecar {
    pub spec_hash: String,
    pub f_off: f64,
    pub f_on: f64,
    /// Which Hamiltonian drives slot 1.
    pub ordering: String,
    pub target: Option<String>,
    pub error: Option<f64>,
}

pub const ORDERING_OFF_FIRST: &str = "off_first";

impl SequenceSidecar {
    pub fn for_spec(spec: &ChainSpec) -> Self {
        Self {
            spec_hash: spec_hash(spec),
            f_off: spec.f_off(),
            f_on: spec.f_on(),
            ordering: ORDERING_OFF_FIRST.into(),
            target: None,
            error: None,
        }
    }
}

/// `<stem>.json` next to `<stem>.csv`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

pub fn write_sequence_csv<W: Write>(writer: W, seq: &SwitchSequence) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["k", "t_k"])?;
    for (k, t) in seq.durations().iter().enumerate() {
        w.write_record([(k + 1).to_string(), format!("{t}")])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sequence_csv<R: Read>(reader: R) -> Result<SwitchSequence> {
    #[derive(Deserialize)]
    struct Row {
        k: usize,
        t_k: f64,
    }
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut durations = Vec::new();
    for row in rdr.deserialize() {
        let row: Row = row?;
        if row.k != durations.len() + 1 {
            return Err(Error::parse(
                "k",
                format!("expected slot {}, found {}", durations.len() + 1, row.k),
            ));
        }
        durations.push(row.t_k);
    }
    SwitchSequence::new(durations)
}

/// Writes the CSV and its sidecar.
pub fn save_sequence(path: &Path, seq: &SwitchSequence, sidecar: &SequenceSidecar) -> Result<()> {
    write_sequence_csv(fs::File::create(path)?, seq)?;
    fs::write(sidecar_path(path), serde_json::to_string_pretty(sidecar)?)?;
    Ok(())
}

/// Reads the CSV and, if present, its sidecar.
pub fn load_sequence(path: &Path) -> Result<(SwitchSequence, Option<SequenceSidecar>)> {
    let seq = read_sequence_csv(fs::File::open(path)?)?;
    let side = sidecar_path(path);
    let sidecar = if side.exists() {
        Some(serde_json::from_str(&fs::read_to_string(side)?)?)
    } else {
        None
    };
    Ok((seq, sidecar))
}

pub const KIND_SYNTHESIS: &str = "synthesis_result";
pub const KIND_PROOF: &str = "proof_report";

#[derive(Debug, Clone, Serialize)]
pub struct SynthesisReport<'a> {
    pub kind: &'static str,
    pub spec_hash: String,
    pub duration: f64,
    #[serde(flatten)]
    pub result: &'a SynthesisResult,
}

impl<'a> SynthesisReport<'a> {
    pub fn new(spec: &ChainSpec, result: &'a SynthesisResult) -> Self {
        Self {
            kind: KIND_SYNTHESIS,
            spec_hash: spec_hash(spec),
            duration: result.sequence.total_time(),
            result,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProofReport {
    pub kind: &'static str,
    pub spec_hash: String,
    pub theorem: crate::lie::Theorem,
    pub k: usize,
    pub reflected: bool,
    pub residuals: BTreeMap<String, f64>,
    /// Identities that use an amended form, with the amendment note.
    pub conventions: BTreeMap<String, String>,
    pub max_residual: f64,
    pub passed: bool,
    pub closure_dimension: usize,
    pub controllable: bool,
}

impl ProofReport {
    pub fn new(spec: &ChainSpec, trace: &ProofTrace, closure_dimension: usize) -> Self {
        let n = spec.n();
        Self {
            kind: KIND_PROOF,
            spec_hash: spec_hash(spec),
            theorem: trace.theorem,
            k: trace.k,
            reflected: trace.reflected,
            residuals: trace.residual_map(),
            conventions: trace
                .checks
                .iter()
                .filter_map(|c| match &c.convention {
                    Convention::Amended(note) => Some((c.name.clone(), note.to_string())),
                    Convention::Literal => None,
                })
                .collect(),
            max_residual: trace.max_residual(),
            passed: trace.passed(),
            closure_dimension,
            controllable: closure_dimension == n * n - 1,
        }
    }
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}
