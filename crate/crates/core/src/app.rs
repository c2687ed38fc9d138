//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 negative verdict
//! (not controllable, hypothesis fails, identity residual too large),
//! 3 synthesis or verification target not reached.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::chain::{heisenberg_spec, is_connected, ChainSpec};
use crate::error::{Error, Result};
use crate::io::{self, ProofReport, SequenceSidecar, SynthesisReport};
use crate::lie::{self, ConditionFailure, CLOSURE_TOL};
use crate::propagator::{phase_min_frobenius, SwitchPropagator};
use crate::synth::{self, build_target, GateName, SynthesisOptions, SynthesisResult};
use crate::table1::{self, Table1Dataset, TableColumn};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;
pub const EXIT_UNREACHED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "chainctl",
    version,
    about = "Controllability analysis and switching-gate synthesis for tridiagonal chains"
)]
pub struct Cli {
    /// Chain spec file (`key = value` lines).
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
    /// Output path: a report file, or a directory for `synth`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Master seed for randomized restarts.
    #[arg(long, global = true, default_value_t = 2024)]
    pub seed: u64,
    /// Print the JSON report on stdout instead of a summary.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Connectivity, theorem verdicts and Lie-closure dimension.
    Check,
    /// Re-derive every proof identity numerically and report residuals.
    Prooftrace,
    /// Search for switching sequences that implement target gates.
    Synth(SynthArgs),
    /// Re-evaluate a saved switching sequence against a gate.
    Verify(VerifyArgs),
    /// Work with the bundled published sequences.
    Table1 {
        #[command(subcommand)]
        action: Table1Action,
    },
    /// Render a result or proof report as SVG.
    Plot {
        /// Result or report JSON.
        input: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Gate name (II, HadI, TI, IHad, IT, CNOT) or `all`; repeatable.
    #[arg(long, required = true, num_args = 1..)]
    pub gate: Vec<String>,
    /// Number of switching slots.
    #[arg(long, default_value_t = 20)]
    pub k: usize,
    #[arg(long, default_value_t = 50)]
    pub restarts: usize,
    #[arg(long, default_value_t = synth::DEFAULT_TARGET_ERROR)]
    pub target_error: f64,
    #[arg(long, default_value_t = synth::DEFAULT_MAX_EVALS)]
    pub max_evals: usize,
    #[arg(long, default_value_t = synth::DEFAULT_T_MAX)]
    pub t_max: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Sequence CSV (`k,t_k`).
    #[arg(long)]
    pub sequence: PathBuf,
    #[arg(long)]
    pub gate: String,
    #[arg(long, default_value_t = synth::DEFAULT_TARGET_ERROR)]
    pub target_error: f64,
}

#[derive(Debug, Subcommand)]
pub enum Table1Action {
    /// Check Σt_k against the published durations and the error bound.
    Validate,
    /// Propagate each published sequence under a chosen chain.
    Replay(ReplayArgs),
    /// Grid search over uniform coupling and `f_on` for replay agreement.
    Scan(ScanArgs),
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Uniform coupling used when no `--spec` is given.
    #[arg(long, default_value_t = 1.0)]
    pub coupling: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub f_off: f64,
    /// Defaults to `-coupling`.
    #[arg(long, allow_negative_numbers = true)]
    pub f_on: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// `lo:hi:step`
    #[arg(long, default_value = "0.5:2:0.25")]
    pub couplings: String,
    /// `lo:hi:step`
    #[arg(long, default_value = "-2:2:0.25", allow_hyphen_values = true)]
    pub f_on: String,
    #[arg(long, default_value_t = 1)]
    pub actuator: usize,
    /// Rows to print.
    #[arg(long, default_value_t = 10)]
    pub top: usize,
}

/// Parse arguments and run; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Check => cmd_check(cli),
        Command::Prooftrace => cmd_prooftrace(cli),
        Command::Synth(a) => cmd_synth(cli, a),
        Command::Verify(a) => cmd_verify(cli, a),
        Command::Table1 { action } => cmd_table1(cli, action),
        Command::Plot { input } => cmd_plot(cli, input),
    }
}

fn load_spec(cli: &Cli) -> Result<ChainSpec> {
    let path = cli
        .spec
        .as_ref()
        .ok_or_else(|| Error::parse("--spec", "this command needs a chain spec file"))?;
    io::read_spec(path)
}

fn emit<T: Serialize>(cli: &Cli, report: &T, summary: impl FnOnce() -> String) -> Result<()> {
    if let Some(out) = &cli.out {
        io::write_json(out, report)?;
    }
    if cli.json {
        println!("{}", serde_json::to_string_pretty(report)?);
    } else {
        print!("{}", summary());
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct CheckReport {
    spec_hash: String,
    n: usize,
    actuator: usize,
    connected: bool,
    thm1: Verdict,
    thm2: Verdict,
    closure_dimension: usize,
    full_dimension: usize,
    controllable: bool,
}

#[derive(Debug, Serialize)]
struct Verdict {
    holds: bool,
    k: Option<usize>,
    failure: Option<ConditionFailure>,
    reason: Option<String>,
}

impl Verdict {
    fn from_result(r: std::result::Result<Option<usize>, ConditionFailure>) -> Self {
        match r {
            Ok(k) => Self {
                holds: true,
                k,
                failure: None,
                reason: None,
            },
            Err(f) => Self {
                holds: false,
                k: None,
                reason: Some(f.to_string()),
                failure: Some(f),
            },
        }
    }

    fn describe(&self) -> String {
        match (&self.reason, self.k) {
            (Some(r), _) => format!("fails ({r})"),
            (None, Some(k)) => format!("holds (k = {k})"),
            (None, None) => "holds".into(),
        }
    }
}

fn cmd_check(cli: &Cli) -> Result<i32> {
    let spec = load_spec(cli)?;
    let basis = lie::chain_closure(&spec, CLOSURE_TOL)?;
    let report = CheckReport {
        spec_hash: io::spec_hash(&spec),
        n: spec.n(),
        actuator: spec.actuator(),
        connected: is_connected(&spec),
        thm1: Verdict::from_result(lie::thm1_check(&spec).map(|_| None)),
        thm2: Verdict::from_result(lie::thm2_check(&spec).map(Some)),
        closure_dimension: basis.dimension(),
        full_dimension: spec.n() * spec.n() - 1,
        controllable: basis.is_full(),
    };
    emit(cli, &report, || {
        format!(
            "connected: {}\ntheorem 1: {}\ntheorem 2: {}\nclosure dimension: {} / {}\ncontrollable: {}\n",
            report.connected,
            report.thm1.describe(),
            report.thm2.describe(),
            report.closure_dimension,
            report.full_dimension,
            report.controllable
        )
    })?;
    Ok(if report.controllable { EXIT_OK } else { EXIT_NEGATIVE })
}

fn cmd_prooftrace(cli: &Cli) -> Result<i32> {
    let spec = load_spec(cli)?;
    let trace = match lie::proof_trace(&spec) {
        Ok(t) => t,
        Err(Error::Hypothesis(f)) => {
            eprintln!("hypothesis not satisfied: {f}");
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({ "kind": io::KIND_PROOF, "failure": f, "reason": f.to_string() })
                );
            }
            return Ok(EXIT_NEGATIVE);
        }
        Err(e) => return Err(e),
    };
    let dim = lie::chain_closure(&spec, CLOSURE_TOL)?.dimension();
    let report = ProofReport::new(&spec, &trace, dim);
    emit(cli, &report, || {
        let mut s = format!(
            "theorem {:?}, k = {}{}: {} identities, max residual {:.3e}\n",
            report.theorem,
            report.k,
            if report.reflected { " (mirrored chain)" } else { "" },
            report.residuals.len(),
            report.max_residual
        );
        for f in trace.failures(lie::IDENTITY_TOL) {
            s += &format!("  FAILED {}: {:.3e}\n", f.name, f.residual);
        }
        s += &format!("closure dimension {} / {}\n", dim, spec.n() * spec.n() - 1);
        s
    })?;
    Ok(if report.passed { EXIT_OK } else { EXIT_NEGATIVE })
}

fn parse_gates(names: &[String]) -> Result<Vec<GateName>> {
    let mut gates = Vec::new();
    for n in names.iter().flat_map(|s| s.split(',')) {
        if n.trim().eq_ignore_ascii_case("all") {
            gates.extend(GateName::ALL);
        } else {
            gates.push(n.parse()?);
        }
    }
    gates.dedup();
    Ok(gates)
}

fn table_column(r: &SynthesisResult) -> TableColumn {
    TableColumn {
        label: r.target.clone(),
        error: r.error,
        duration: r.sequence.total_time(),
        durations: r.sequence.durations().to_vec(),
    }
}

fn cmd_synth(cli: &Cli, a: &SynthArgs) -> Result<i32> {
    let spec = load_spec(cli)?;
    let gates = parse_gates(&a.gate)?;
    let opts = SynthesisOptions {
        target_error: a.target_error,
        t_max: a.t_max,
        max_evals: a.max_evals,
        ..SynthesisOptions::new(a.k, a.restarts, cli.seed)
    };
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;

    let mut results = Vec::new();
    for gate in gates {
        let res = synth::synthesize(&spec, &build_target(gate), &opts)?;
        let report = SynthesisReport::new(&spec, &res);
        io::write_json(dir.join(format!("{gate}.json")), &report)?;
        let sidecar = SequenceSidecar {
            target: Some(gate.to_string()),
            error: Some(res.error),
            ..SequenceSidecar::for_spec(&spec)
        };
        io::save_sequence(&dir.join(format!("{gate}.seq.csv")), &res.sequence, &sidecar)?;
        if cli.json {
            println!("{}", serde_json::to_string(&report)?);
        } else {
            println!(
                "{gate}: error {:.4e}, duration {:.4}, restarts {}, evaluations {}",
                res.error,
                res.sequence.total_time(),
                res.restarts_used,
                res.evaluations
            );
        }
        results.push(res);
    }
    let columns: Vec<TableColumn> = results.iter().map(table_column).collect();
    table1::write_table(fs::File::create(dir.join("table.csv"))?, &columns)?;
    Ok(if results.iter().all(|r| r.reached()) {
        EXIT_OK
    } else {
        EXIT_UNREACHED
    })
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    gate: String,
    spec_hash: String,
    sidecar_hash_matches: Option<bool>,
    error: f64,
    frobenius: f64,
    duration: f64,
    target_error: f64,
    reached: bool,
}

fn cmd_verify(cli: &Cli, a: &VerifyArgs) -> Result<i32> {
    let spec = load_spec(cli)?;
    let gate: GateName = a.gate.parse()?;
    let target = build_target(gate);
    let (seq, sidecar) = io::load_sequence(&a.sequence)?;
    let hash = io::spec_hash(&spec);
    let matches = sidecar.as_ref().map(|s| s.spec_hash == hash);
    if matches == Some(false) {
        log::warn!("sequence sidecar was written for a different chain spec");
    }
    let error = synth::verify_sequence(&spec, &seq, &target)?;
    let u = SwitchPropagator::for_chain(&spec)?.propagate(&seq);
    let report = VerifyReport {
        gate: gate.to_string(),
        spec_hash: hash,
        sidecar_hash_matches: matches,
        error,
        frobenius: phase_min_frobenius(&u, target.matrix())?,
        duration: seq.total_time(),
        target_error: a.target_error,
        reached: error <= a.target_error,
    };
    emit(cli, &report, || {
        format!(
            "{}: gate error {:.6e}, Frobenius distance {:.6e}, duration {:.4}\n",
            report.gate, report.error, report.frobenius, report.duration
        )
    })?;
    Ok(if report.reached { EXIT_OK } else { EXIT_UNREACHED })
}

fn parse_range(key: &str, s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| Error::parse(key, format!("`{t}` is not a number")))
    };
    match parts.as_slice() {
        [v] => Ok(vec![num(v)?]),
        [lo, hi, step] => {
            let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
            if step.is_nan() || step <= 0.0 || hi < lo {
                return Err(Error::parse(key, "expected lo:hi:step with lo <= hi and step > 0"));
            }
            let n = ((hi - lo) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| lo + step * i as f64).collect())
        }
        _ => Err(Error::parse(key, "expected a value or lo:hi:step")),
    }
}

fn cmd_table1(cli: &Cli, action: &Table1Action) -> Result<i32> {
    let data = Table1Dataset::bundled()?;
    match action {
        Table1Action::Validate => {
            let report = data.validate();
            emit(cli, &report, || {
                let mut s = String::new();
                for c in &report.columns {
                    s += &format!(
                        "{:<5} Σt = {:.4} duration = {:.4} |Δ| = {:.1e} error = {:.5e} {}\n",
                        c.gate,
                        c.sum,
                        c.duration,
                        c.sum_defect,
                        c.error,
                        if c.ok { "ok" } else { "FAIL" }
                    );
                }
                s += &format!(
                    "max published error {:.5e} ({})\n",
                    report.max_error, report.max_error_gate
                );
                s
            })?;
            Ok(if report.passed { EXIT_OK } else { EXIT_USAGE })
        }
        Table1Action::Replay(a) => {
            let spec = match &cli.spec {
                Some(p) => io::read_spec(p)?,
                None => heisenberg_spec(4, vec![a.coupling; 3], 1, a.f_off, a.f_on.unwrap_or(-a.coupling))?,
            };
            let rows = data.replay(&spec)?;
            emit(cli, &rows, || {
                let mut s = format!(
                    "{:<5} {:>12} {:>12} {:>12} {:>14}\n",
                    "gate", "published", "off_first", "on_first", "‖T−U‖²/4N"
                );
                for r in &rows {
                    s += &format!(
                        "{:<5} {:>12.4e} {:>12.4e} {:>12.4e} {:>14.5e}\n",
                        r.gate, r.published_error, r.off_first, r.on_first, r.off_first_half_frobenius_sq
                    );
                }
                s
            })?;
            Ok(EXIT_OK)
        }
        Table1Action::Scan(a) => {
            let couplings = parse_range("--couplings", &a.couplings)?;
            let f_on = parse_range("--f-on", &a.f_on)?;
            let mut points = data.scan(&couplings, &f_on, a.actuator)?;
            points.truncate(a.top);
            emit(cli, &points, || {
                let mut s = format!("{:>8} {:>8} {:>12} {:>12}\n", "d", "f_on", "off_first", "on_first");
                for p in &points {
                    s += &format!(
                        "{:>8.3} {:>8.3} {:>12.4e} {:>12.4e}\n",
                        p.coupling, p.f_on, p.mean_off_first, p.mean_on_first
                    );
                }
                s
            })?;
            Ok(EXIT_OK)
        }
    }
}

fn cmd_plot(cli: &Cli, input: &Path) -> Result<i32> {
    let out = cli
        .out
        .as_ref()
        .ok_or_else(|| Error::parse("--out", "plot needs an output SVG path"))?;
    let svg = crate::plot::render(&fs::read_to_string(input)?)?;
    fs::write(out, &svg)?;
    if !cli.json {
        println!("wrote {} ({} bytes)", out.display(), svg.len());
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("x", "0.5:1:0.25").unwrap(), vec![0.5, 0.75, 1.0]);
        assert_eq!(parse_range("x", "-1").unwrap(), vec![-1.0]);
        assert!(parse_range("x", "1:0:0.1").is_err());
        assert!(parse_range("x", "0:1").is_err());
    }

    #[test]
    fn gate_lists() {
        assert_eq!(parse_gates(&["all".into()]).unwrap().len(), 6);
        assert_eq!(
            parse_gates(&["CNOT,II".into()]).unwrap(),
            vec![GateName::Cnot, GateName::II]
        );
        assert!(parse_gates(&["SWAP".into()]).is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(main_with_args(["chainctl", "frobnicate"]), EXIT_USAGE);
        assert_eq!(main_with_args(["chainctl", "check"]), EXIT_USAGE);
    }
}
