//! Downhill simplex minimizer.
//!
//! Standard coefficients: reflection 1, expansion 2, contraction 0.5, shrink
//! 0.5. The initial simplex is `x0` plus `x0 + scale·e_i` for each axis.

use crate::error::{Error, Result};

const ALPHA: f64 = 1.0;
const GAMMA: f64 = 2.0;
const RHO: f64 = 0.5;
const SIGMA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadOptions {
    pub simplex_scale: f64,
    pub max_evals: usize,
    /// Stop once the best value is at or below this.
    pub target_f: f64,
    /// Stop once `f_worst − f_best` falls to this spread, if set.
    pub f_tol: Option<f64>,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            simplex_scale: 0.5,
            max_evals: 2000,
            target_f: f64::NEG_INFINITY,
            f_tol: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    TargetReached,
    Converged,
    MaxEvaluations,
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub termination: Termination,
    /// Best vertex value after each iteration, starting with the initial simplex.
    pub history: Vec<f64>,
}

struct Counted<F> {
    f: F,
    evals: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        self.evals += 1;
        let v = (self.f)(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Optimization(format!(
                "objective returned {v} at evaluation {} for x = {x:?}",
                self.evals
            )))
        }
    }
}

fn affine(base: &[f64], toward: &[f64], t: f64) -> Vec<f64> {
    base.iter().zip(toward).map(|(b, p)| b + t * (p - b)).collect()
}

pub fn nelder_mead<F>(objective: F, x0: &[f64], opts: &NelderMeadOptions) -> Result<NelderMeadResult>
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    if dim == 0 {
        return Err(Error::Precondition("starting point has dimension 0".into()));
    }
    if !(opts.simplex_scale.is_finite() && opts.simplex_scale > 0.0) {
        return Err(Error::Precondition(format!(
            "simplex scale {} must be positive",
            opts.simplex_scale
        )));
    }
    if opts.max_evals < dim + 1 {
        return Err(Error::Precondition(format!(
            "max_evals = {} cannot cover the initial simplex of {} vertices",
            opts.max_evals,
            dim + 1
        )));
    }
    let mut obj = Counted { f: objective, evals: 0 };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), obj.eval(x0)?));
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += opts.simplex_scale;
        let fv = obj.eval(&v)?;
        simplex.push((v, fv));
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));

    let mut history = vec![simplex[0].1];
    let mut iterations = 0;
    let termination = loop {
        let best = simplex[0].1;
        if best <= opts.target_f {
            break Termination::TargetReached;
        }
        if let Some(tol) = opts.f_tol {
            if simplex[dim].1 - best <= tol {
                break Termination::Converged;
            }
        }
        // One iteration needs at most two evaluations before any shrink.
        if obj.evals + 2 > opts.max_evals {
            break Termination::MaxEvaluations;
        }

        let mut centroid = vec![0.0; dim];
        for (v, _) in &simplex[..dim] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / dim as f64;
            }
        }
        let (worst, f_worst) = simplex[dim].clone();
        let f_second = simplex[dim - 1].1;

        let xr = affine(&centroid, &worst, -ALPHA);
        let fr = obj.eval(&xr)?;

        let mut shrink = false;
        if fr < best {
            let xe = affine(&centroid, &xr, GAMMA);
            let fe = obj.eval(&xe)?;
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < f_second {
            simplex[dim] = (xr, fr);
        } else if fr < f_worst {
            let xc = affine(&centroid, &xr, RHO);
            let fc = obj.eval(&xc)?;
            if fc <= fr {
                simplex[dim] = (xc, fc);
            } else {
                shrink = true;
            }
        } else {
            let xc = affine(&centroid, &worst, RHO);
            let fc = obj.eval(&xc)?;
            if fc < f_worst {
                simplex[dim] = (xc, fc);
            } else {
                shrink = true;
            }
        }

        if shrink {
            if obj.evals + dim > opts.max_evals {
                break Termination::MaxEvaluations;
            }
            let anchor = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                let v = affine(&anchor, &vertex.0, SIGMA);
                let fv = obj.eval(&v)?;
                *vertex = (v, fv);
            }
        }

        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        iterations += 1;
        let new_best = simplex[0].1;
        debug_assert!(new_best <= *history.last().unwrap());
        history.push(new_best);
    };

    let (x, f) = simplex.swap_remove(0);
    Ok(NelderMeadResult {
        x,
        f,
        evaluations: obj.evals,
        iterations,
        termination,
        history,
    })
}
