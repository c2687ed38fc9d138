//! Tridiagonal chain models: drift and actuator Hamiltonians for an N-state
//! chain with nearest-neighbour couplings and one locally modulated coupling.
//!
//! States are labelled `1..=N` on every public interface. Energies and times
//! are dimensionless (ħ = 1).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};

/// Couplings, energy gaps and similar quantities with magnitude at or below
/// this value count as zero in the connectivity and theorem predicates.
pub const ZERO_THRESHOLD: f64 = 1e-12;

/// Physical description of a chain with a single actuator on the
/// `(actuator, actuator + 1)` transition and a two-level switch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainSpec {
    n: usize,
    couplings: Vec<f64>,
    energies: Vec<f64>,
    actuator: usize,
    f_off: f64,
    f_on: f64,
}

impl ChainSpec {
    pub fn new(
        n: usize,
        couplings: Vec<f64>,
        energies: Vec<f64>,
        actuator: usize,
        f_off: f64,
        f_on: f64,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::Model(format!("chain needs at least 2 states, got {n}")));
        }
        if couplings.len() != n - 1 {
            return Err(Error::Model(format!(
                "expected {} couplings for n = {n}, got {}",
                n - 1,
                couplings.len()
            )));
        }
        if energies.len() != n {
            return Err(Error::Model(format!(
                "expected {n} energies for n = {n}, got {}",
                energies.len()
            )));
        }
        if actuator < 1 || actuator > n - 1 {
            return Err(Error::Index {
                index: actuator,
                lo: 1,
                hi: n - 1,
            });
        }
        let all_finite = couplings
            .iter()
            .chain(&energies)
            .chain([&f_off, &f_on])
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::Model("all chain parameters must be finite".into()));
        }
        Ok(Self {
            n,
            couplings,
            energies,
            actuator,
            f_off,
            f_on,
        })
    }

    /// Chain with explicit energies and the default switch levels
    /// `f_off = 0`, `f_on = -d_r` (the "on" state cancels the controlled coupling).
    pub fn with_default_switch(couplings: Vec<f64>, energies: Vec<f64>, actuator: usize) -> Result<Self> {
        let n = energies.len();
        let f_on = default_f_on(&couplings, actuator)?;
        Self::new(n, couplings, energies, actuator, 0.0, f_on)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn actuator(&self) -> usize {
        self.actuator
    }

    pub fn f_off(&self) -> f64 {
        self.f_off
    }

    pub fn f_on(&self) -> f64 {
        self.f_on
    }

    /// Coupling `d_k` with the boundary convention `d_0 = d_N = 0`; any
    /// index outside `1..N` reads as zero.
    pub fn coupling(&self, k: isize) -> f64 {
        if k >= 1 && (k as usize) < self.n {
            self.couplings[k as usize - 1]
        } else {
            0.0
        }
    }

    /// Energy `E_k` (1-based).
    pub fn energy(&self, k: usize) -> f64 {
        self.energies[k - 1]
    }

    /// Same chain with the switch levels replaced.
    pub fn with_switch_levels(&self, f_off: f64, f_on: f64) -> Result<Self> {
        Self::new(
            self.n,
            self.couplings.clone(),
            self.energies.clone(),
            self.actuator,
            f_off,
            f_on,
        )
    }

    /// Mirror image under `|k⟩ ↦ |N+1-k⟩`; the actuator moves to `N - r`.
    pub fn reflected(&self) -> Self {
        let mut couplings = self.couplings.clone();
        couplings.reverse();
        let mut energies = self.energies.clone();
        energies.reverse();
        Self {
            n: self.n,
            couplings,
            energies,
            actuator: self.n - self.actuator,
            f_off: self.f_off,
            f_on: self.f_on,
        }
    }
}

fn default_f_on(couplings: &[f64], actuator: usize) -> Result<f64> {
    match actuator.checked_sub(1).and_then(|i| couplings.get(i)) {
        Some(d) => Ok(-d),
        None => Err(Error::Index {
            index: actuator,
            lo: 1,
            hi: couplings.len(),
        }),
    }
}

/// Energies of the first-excitation subspace of an isotropic Heisenberg chain:
/// `E_n = ½ Σ_{ℓ ∉ {n-1, n}} d_ℓ − ½ (d_{n-1} + d_n)` with `d_0 = d_N = 0`.
pub fn heisenberg_energies(couplings: &[f64]) -> Vec<f64> {
    let n = couplings.len() + 1;
    let d = |k: usize| -> f64 {
        if k >= 1 && k < n {
            couplings[k - 1]
        } else {
            0.0
        }
    };
    (1..=n)
        .map(|level| {
            let outside: f64 = (1..n).filter(|&l| l + 1 != level && l != level).map(d).sum();
            0.5 * outside - 0.5 * (d(level - 1) + d(level))
        })
        .collect()
}

/// Chain spec for the first-excitation subspace of a Heisenberg spin chain.
pub fn heisenberg_spec(n: usize, couplings: Vec<f64>, actuator: usize, f_off: f64, f_on: f64) -> Result<ChainSpec> {
    if n < 2 || couplings.len() != n - 1 {
        return Err(Error::Model(format!(
            "expected {} couplings for n = {n}, got {}",
            n.saturating_sub(1),
            couplings.len()
        )));
    }
    let energies = heisenberg_energies(&couplings);
    ChainSpec::new(n, couplings, energies, actuator, f_off, f_on)
}

/// Heisenberg chain with the default switch levels (`f_off = 0`, `f_on = -d_r`).
pub fn heisenberg_default(couplings: Vec<f64>, actuator: usize) -> Result<ChainSpec> {
    let energies = heisenberg_energies(&couplings);
    ChainSpec::with_default_switch(couplings, energies, actuator)
}

/// Dense `N×N` Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOp(CMatrix);

impl HermitianOp {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let scale = linalg::max_abs(&m);
        if linalg::hermitian_defect(&m) > 1e-12 * scale {
            return Err(Error::Numeric("matrix is not Hermitian".into()));
        }
        Ok(Self(m))
    }

    pub(crate) fn from_matrix_unchecked(m: CMatrix) -> Self {
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }
}

/// Drift Hamiltonian `A_0`: energies on the diagonal, couplings on the
/// first off-diagonals.
pub fn build_drift(spec: &ChainSpec) -> HermitianOp {
    let n = spec.n();
    let mut m = linalg::zeros(n);
    for (k, &e) in spec.energies().iter().enumerate() {
        m[(k, k)] = c(e);
    }
    for (k, &d) in spec.couplings().iter().enumerate() {
        m[(k, k + 1)] = c(d);
        m[(k + 1, k)] = c(d);
    }
    HermitianOp(m)
}

/// Actuator Hamiltonian `A_r = |r⟩⟨r+1| + |r+1⟩⟨r|`.
pub fn build_actuator(spec: &ChainSpec) -> HermitianOp {
    actuator_at(spec.n(), spec.actuator()).expect("ChainSpec keeps the actuator in range")
}

/// `A_r` for an arbitrary site in an `n`-state chain.
pub fn actuator_at(n: usize, r: usize) -> Result<HermitianOp> {
    if r < 1 || r + 1 > n {
        return Err(Error::Index {
            index: r,
            lo: 1,
            hi: n.saturating_sub(1),
        });
    }
    let m = linalg::unit(n, r - 1, r) + linalg::unit(n, r, r - 1);
    Ok(HermitianOp(m))
}

/// Transition frequency `ω_{mn} = E_n − E_m`.
pub fn transition_frequency(spec: &ChainSpec, m: usize, n: usize) -> Result<f64> {
    for idx in [m, n] {
        if idx < 1 || idx > spec.n() {
            return Err(Error::Index {
                index: idx,
                lo: 1,
                hi: spec.n(),
            });
        }
    }
    Ok(spec.energy(n) - spec.energy(m))
}

/// The transition graph of a tridiagonal chain is a path exactly when no
/// coupling vanishes.
pub fn is_connected(spec: &ChainSpec) -> bool {
    spec.couplings().iter().all(|d| d.abs() > ZERO_THRESHOLD)
}
