//! Switching-sequence synthesis by multi-restart simplex search.

mod nelder_mead;
mod target;

pub use nelder_mead::{nelder_mead, NelderMeadOptions, NelderMeadResult, Termination};
pub use target::{build_target, target_by_name, GateName, GateTarget};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chain::ChainSpec;
use crate::error::{Error, Result};
use crate::propagator::{self, SwitchPropagator, SwitchSequence};

pub const DEFAULT_TARGET_ERROR: f64 = 1e-4;
pub const DEFAULT_T_MAX: f64 = 5.0;
pub const DEFAULT_SIMPLEX_SCALE: f64 = 0.5;
pub const DEFAULT_MAX_EVALS: usize = 2000;
/// Restarts run concurrently in fixed-size batches; the early stop is only
/// checked between batches, which keeps results independent of thread count.
pub const RESTART_BATCH: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthesisOptions {
    pub k_switches: usize,
    pub restarts: usize,
    pub seed: u64,
    pub target_error: f64,
    pub t_max: f64,
    pub simplex_scale: f64,
    pub max_evals: usize,
}

impl SynthesisOptions {
    pub fn new(k_switches: usize, restarts: usize, seed: u64) -> Self {
        Self {
            k_switches,
            restarts,
            seed,
            target_error: DEFAULT_TARGET_ERROR,
            t_max: DEFAULT_T_MAX,
            simplex_scale: DEFAULT_SIMPLEX_SCALE,
            max_evals: DEFAULT_MAX_EVALS,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k_switches == 0 {
            return Err(Error::Precondition("k_switches must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::Precondition("restarts must be at least 1".into()));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::Precondition(format!("t_max = {} must be positive", self.t_max)));
        }
        if !self.target_error.is_finite() || self.target_error < 0.0 {
            return Err(Error::Precondition(format!(
                "target error {} must be non-negative",
                self.target_error
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SynthesisResult {
    pub target: String,
    pub sequence: SwitchSequence,
    pub error: f64,
    pub frobenius: f64,
    pub evaluations: usize,
    pub restarts_used: usize,
    pub best_restart: usize,
    /// Final error of every restart that ran, by restart index.
    pub restart_errors: Vec<f64>,
    pub seed: u64,
    pub options: SynthesisOptions,
}

impl SynthesisResult {
    pub fn reached(&self) -> bool {
        self.error <= self.options.target_error
    }
}

struct Outcome {
    x: Vec<f64>,
    f: f64,
    evaluations: usize,
}

/// Restart `index` draws from stream `index` of the master seed.
fn restart_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn clamp_durations(x: &[f64]) -> Vec<f64> {
    x.iter().map(|t| t.max(0.0)).collect()
}

fn run_restart(prop: &SwitchPropagator, target: &GateTarget, opts: &SynthesisOptions, index: usize) -> Result<Outcome> {
    let mut rng = restart_rng(opts.seed, index);
    let x0: Vec<f64> = (0..opts.k_switches)
        .map(|_| rng.random_range(0.0..=opts.t_max))
        .collect();
    let t = target.matrix().matrix();
    let objective = |x: &[f64]| propagator::gate_error_raw(&prop.propagate_raw(&clamp_durations(x)), t);
    let nm = NelderMeadOptions {
        simplex_scale: opts.simplex_scale,
        max_evals: opts.max_evals,
        target_f: opts.target_error,
        f_tol: None,
    };
    let res = nelder_mead(objective, &x0, &nm)?;
    Ok(Outcome {
        x: clamp_durations(&res.x),
        f: res.f,
        evaluations: res.evaluations,
    })
}

pub fn synthesize(spec: &ChainSpec, target: &GateTarget, opts: &SynthesisOptions) -> Result<SynthesisResult> {
    opts.validate()?;
    if target.dim() != spec.n() {
        return Err(Error::Dimension {
            expected: spec.n(),
            found: target.dim(),
        });
    }
    let prop = SwitchPropagator::for_chain(spec)?;

    let mut outcomes: Vec<Outcome> = Vec::with_capacity(opts.restarts);
    let mut start = 0;
    while start < opts.restarts {
        let end = (start + RESTART_BATCH).min(opts.restarts);
        let batch: Vec<Outcome> = (start..end)
            .into_par_iter()
            .map(|i| run_restart(&prop, target, opts, i))
            .collect::<Result<_>>()?;
        outcomes.extend(batch);
        start = end;
        if outcomes.iter().any(|o| o.f <= opts.target_error) {
            break;
        }
    }

    // Strict `<` keeps the lowest index among ties.
    let best_restart = (0..outcomes.len())
        .reduce(|a, b| if outcomes[b].f < outcomes[a].f { b } else { a })
        .expect("at least one restart ran");
    let sequence = SwitchSequence::new(outcomes[best_restart].x.clone())?;
    let u = prop.propagate(&sequence);
    let error = propagator::gate_error(&u, target.matrix())?;
    let frobenius = propagator::phase_min_frobenius(&u, target.matrix())?;
    log::info!(
        "{}: error {error:.3e} from restart {best_restart} of {}",
        target.label(),
        outcomes.len()
    );

    Ok(SynthesisResult {
        target: target.label().to_string(),
        sequence,
        error,
        frobenius,
        evaluations: outcomes.iter().map(|o| o.evaluations).sum(),
        restarts_used: outcomes.len(),
        best_restart,
        restart_errors: outcomes.iter().map(|o| o.f).collect(),
        seed: opts.seed,
        options: opts.clone(),
    })
}

/// Defaults for everything except the listed knobs.
pub fn synthesize_gate(
    spec: &ChainSpec,
    target: &GateTarget,
    k_switches: usize,
    restarts: usize,
    seed: u64,
    target_error: f64,
) -> Result<SynthesisResult> {
    let opts = SynthesisOptions {
        target_error,
        ..SynthesisOptions::new(k_switches, restarts, seed)
    };
    synthesize(spec, target, &opts)
}

/// Re-evaluate a sequence against a target.
pub fn verify_sequence(spec: &ChainSpec, seq: &SwitchSequence, target: &GateTarget) -> Result<f64> {
    if target.dim() != spec.n() {
        return Err(Error::Dimension {
            expected: spec.n(),
            found: target.dim(),
        });
    }
    let u = SwitchPropagator::for_chain(spec)?.propagate(seq);
    let error = propagator::gate_error(&u, target.matrix())?;
    let frob = propagator::phase_min_frobenius(&u, target.matrix())?;
    log::info!(
        "{}: gate error {error:.6e}, phase-minimized Frobenius distance {frob:.6e}",
        target.label()
    );
    Ok(error)
}
