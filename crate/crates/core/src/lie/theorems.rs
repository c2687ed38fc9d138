//! Explicit sufficient conditions for controllability of a tridiagonal chain
//! with one actuator on the `(r, r+1)` transition.

use std::fmt;

use serde::Serialize;

use crate::chain::{transition_frequency, ChainSpec, ZERO_THRESHOLD};

/// First hypothesis that fails, in the order the theorems list them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum ConditionFailure {
    /// Proof traces need at least four states.
    ChainTooShort {
        n: usize,
    },
    /// The controlled transition is degenerate.
    OmegaZero {
        r: usize,
    },
    ZeroCoupling {
        index: usize,
    },
    /// `d_{r-1}^2 = d_{r+1}^2`
    SymmetricNeighbours {
        r: usize,
    },
    /// `d_{r-k-1}^2 = d_{r+k+1}^2` for every k.
    FullySymmetric {
        r: usize,
    },
}

impl fmt::Display for ConditionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ChainTooShort { n } => write!(f, "N = {n} < 4 (trace needs two neighbours of the actuator)"),
            Self::OmegaZero { r } => write!(f, "ω_r = 0 (r = {r})"),
            Self::ZeroCoupling { index } => write!(f, "d_{index} = 0"),
            Self::SymmetricNeighbours { r } => write!(f, "d_(r-1)^2 = d_(r+1)^2 (r = {r})"),
            Self::FullySymmetric { r } => write!(f, "d_(r-k-1)^2 = d_(r+k+1)^2 for every k (r = {r})"),
        }
    }
}

fn common_hypotheses(spec: &ChainSpec) -> Result<(), ConditionFailure> {
    let r = spec.actuator();
    let omega = transition_frequency(spec, r, r + 1).expect("actuator index is in range");
    if omega.abs() <= ZERO_THRESHOLD {
        return Err(ConditionFailure::OmegaZero { r });
    }
    if let Some(pos) = spec.couplings().iter().position(|d| d.abs() <= ZERO_THRESHOLD) {
        return Err(ConditionFailure::ZeroCoupling { index: pos + 1 });
    }
    Ok(())
}

/// `d_{r-k-1}^2 ≠ d_{r+k+1}^2` (with `d_0 = d_N = 0`).
fn asymmetric_at(spec: &ChainSpec, k: usize) -> bool {
    let r = spec.actuator() as isize;
    let k = k as isize;
    let left = spec.coupling(r - k - 1);
    let right = spec.coupling(r + k + 1);
    (left * left - right * right).abs() > ZERO_THRESHOLD
}

/// Smallest k with an asymmetric pair, if any pair inside the chain is.
fn first_asymmetry(spec: &ChainSpec) -> Option<usize> {
    let r = spec.actuator();
    let n = spec.n();
    // Past both ends every pair reads (0, 0).
    (0..)
        .take_while(|&k| r > k + 1 || r + k + 1 < n)
        .find(|&k| asymmetric_at(spec, k))
}

pub fn thm1_check(spec: &ChainSpec) -> Result<(), ConditionFailure> {
    common_hypotheses(spec)?;
    if asymmetric_at(spec, 0) {
        Ok(())
    } else {
        Err(ConditionFailure::SymmetricNeighbours { r: spec.actuator() })
    }
}

/// `ω_r ≠ 0`, all `d_n ≠ 0` and `d_{r+1}^2 ≠ d_{r-1}^2`.
pub fn thm1_condition(spec: &ChainSpec) -> bool {
    thm1_check(spec).is_ok()
}

pub fn thm2_check(spec: &ChainSpec) -> Result<usize, ConditionFailure> {
    common_hypotheses(spec)?;
    first_asymmetry(spec).ok_or(ConditionFailure::FullySymmetric { r: spec.actuator() })
}

/// Smallest `k ≥ 0` with `d_{r-k-1}^2 ≠ d_{r+k+1}^2`, provided `ω_r ≠ 0` and
/// no coupling vanishes.
pub fn thm2_condition(spec: &ChainSpec) -> Option<usize> {
    thm2_check(spec).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::heisenberg_default;

    #[test]
    fn uniform_four_chain() {
        let end = heisenberg_default(vec![1.0; 3], 1).unwrap();
        assert!(thm1_condition(&end));
        assert_eq!(thm2_condition(&end), Some(0));

        let centre = heisenberg_default(vec![1.0; 3], 2).unwrap();
        assert!(!thm1_condition(&centre));
        assert_eq!(thm1_check(&centre), Err(ConditionFailure::OmegaZero { r: 2 }));
    }

    #[test]
    fn symmetric_neighbours_fail_through_omega() {
        let spec = heisenberg_default(vec![1.0, 2.0, 1.0], 2).unwrap();
        assert_eq!(thm1_check(&spec), Err(ConditionFailure::OmegaZero { r: 2 }));
    }

    #[test]
    fn thm2_none_cases() {
        let five = heisenberg_default(vec![1.0; 4], 2).unwrap();
        assert_eq!(thm2_condition(&five), None);
        let six = heisenberg_default(vec![1.0, 2.0, 3.0, 2.0, 1.0], 3).unwrap();
        assert_eq!(thm2_condition(&six), None);
    }

    #[test]
    fn thm2_finds_first_asymmetric_pair() {
        // d_2 = -d_4 keeps ω_3 = d_2 - d_4 nonzero while d_2^2 = d_4^2.
        let spec = heisenberg_default(vec![1.0, 2.0, 2.0, -2.0, 3.0], 3).unwrap();
        assert!(!thm1_condition(&spec));
        assert_eq!(thm1_check(&spec), Err(ConditionFailure::SymmetricNeighbours { r: 3 }));
        assert_eq!(thm2_condition(&spec), Some(1));
    }

    #[test]
    fn zero_coupling_reported() {
        let spec = ChainSpec::new(4, vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 3.0, 7.0], 1, 0.0, -1.0).unwrap();
        assert_eq!(thm1_check(&spec), Err(ConditionFailure::ZeroCoupling { index: 2 }));
    }

    #[test]
    fn fully_symmetric_even_chain() {
        // Mirror-symmetric couplings, centred actuator, but distinct energies
        // on the controlled pair.
        let spec = ChainSpec::new(4, vec![1.0, 0.5, -1.0], vec![0.0, 0.3, -0.2, 0.1], 2, 0.0, -0.5).unwrap();
        assert_eq!(thm2_check(&spec), Err(ConditionFailure::FullySymmetric { r: 2 }));
    }
}
