//! Piecewise-constant evolution under two fixed Hamiltonians.
//!
//! A switching sequence `t = (t_1, …, t_K)` evolves as
//!
//! ```text
//! U(t) = U1(t_1) U2(t_2) U1(t_3) …        Um(τ) = exp(−iτ H^(m))
//! ```
//!
//! Odd slots use `H^(1)` (switch off), even slots `H^(2)` (switch on). The
//! product is written left to right, so the rightmost factor acts on a state
//! first.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::{build_actuator, build_drift, ChainSpec, HermitianOp};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};

/// Dense `N×N` unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOp(CMatrix);

impl UnitaryOp {
    pub const TOL: f64 = 1e-10;

    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let defect = linalg::unitarity_defect(&m);
        if defect > Self::TOL {
            return Err(Error::Numeric(format!("matrix is not unitary (defect {defect:.2e})")));
        }
        Ok(Self(m))
    }

    pub fn identity(n: usize) -> Self {
        Self(linalg::identity(n))
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

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn compose(&self, rhs: &UnitaryOp) -> Self {
        Self(&self.0 * &rhs.0)
    }

    /// Max-abs deviation of `U†U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        linalg::unitarity_defect(&self.0)
    }
}

/// Density operator: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOp(CMatrix);

impl DensityOp {
    pub const TOL: f64 = 1e-10;

    pub fn new(m: CMatrix) -> Result<Self> {
        let h = HermitianOp::new(m)?;
        let m = h.into_matrix();
        if (m.trace().re - 1.0).abs() > Self::TOL || m.trace().im.abs() > Self::TOL {
            return Err(Error::Numeric(format!("density trace is {}", m.trace())));
        }
        let min_eig = hermitian_eigenvalues(&m).into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < -Self::TOL {
            return Err(Error::Numeric(format!("density has negative eigenvalue {min_eig:.3e}")));
        }
        Ok(Self(m))
    }

    /// `|k⟩⟨k|` with 1-based `k`.
    pub fn pure_basis(n: usize, k: usize) -> Result<Self> {
        if k < 1 || k > n {
            return Err(Error::Index { index: k, lo: 1, hi: n });
        }
        Ok(Self(linalg::unit(n, k - 1, k - 1)))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self(linalg::identity(n) / c(n as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    /// Eigenvalues in ascending order.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut ev = hermitian_eigenvalues(&self.0);
        ev.sort_by(f64::total_cmp);
        ev
    }
}

fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect()
}

/// Non-negative durations; odd slots (1-based) under `H^(1)`, even under `H^(2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SwitchSequence(Vec<f64>);

impl TryFrom<Vec<f64>> for SwitchSequence {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SwitchSequence> for Vec<f64> {
    fn from(s: SwitchSequence) -> Self {
        s.0
    }
}

impl SwitchSequence {
    pub fn new(durations: Vec<f64>) -> Result<Self> {
        if durations.is_empty() {
            return Err(Error::Precondition("switch sequence needs at least one slot".into()));
        }
        if let Some((k, t)) = durations.iter().enumerate().find(|(_, t)| !t.is_finite() || **t < 0.0) {
            return Err(Error::Precondition(format!(
                "duration t_{} = {t} must be finite and non-negative",
                k + 1
            )));
        }
        Ok(Self(durations))
    }

    /// Negative entries clamp to zero; non-finite entries are rejected.
    pub fn clamped(raw: &[f64]) -> Result<Self> {
        Self::new(raw.iter().map(|t| t.max(0.0)).collect())
    }

    pub fn durations(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_time(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn concat(&self, other: &SwitchSequence) -> Self {
        Self(self.0.iter().chain(&other.0).copied().collect())
    }
}

/// `(A_0 + f_off A_r, A_0 + f_on A_r)`
pub fn switch_hamiltonians(spec: &ChainSpec) -> (HermitianOp, HermitianOp) {
    let a0 = build_drift(spec).into_matrix();
    let ar = build_actuator(spec).into_matrix();
    let off = &a0 + &ar * c(spec.f_off());
    let on = &a0 + &ar * c(spec.f_on());
    (
        HermitianOp::from_matrix_unchecked(off),
        HermitianOp::from_matrix_unchecked(on),
    )
}

/// Hermitian matrix held in diagonal form `H = Q Λ Q†`, so that
/// `exp(−itH) = Q exp(−itΛ) Q†` costs one matrix product per time.
#[derive(Debug, Clone)]
pub struct SpectralHamiltonian {
    eigenvalues: Vec<f64>,
    vectors: CMatrix,
    vectors_adj: CMatrix,
}

impl SpectralHamiltonian {
    pub fn new(h: &HermitianOp) -> Result<Self> {
        let m = h.matrix();
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numeric("Hamiltonian has non-finite entries".into()));
        }
        let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 0)
            .ok_or_else(|| Error::Numeric("Hermitian eigensolver did not converge".into()))?;
        let vectors = eig.eigenvectors;
        Ok(Self {
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            vectors_adj: vectors.adjoint(),
            vectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `exp(−itH)`
    pub fn evolve(&self, t: f64) -> UnitaryOp {
        if t == 0.0 {
            return UnitaryOp::identity(self.dim());
        }
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -lambda * t);
            for z in scaled.column_mut(j).iter_mut() {
                *z *= phase;
            }
        }
        UnitaryOp(scaled * &self.vectors_adj)
    }
}

/// `exp(−itH)` via Hermitian eigendecomposition.
pub fn expm_hermitian(h: &HermitianOp, t: f64) -> Result<UnitaryOp> {
    if !t.is_finite() {
        return Err(Error::Numeric(format!("evolution time {t} is not finite")));
    }
    Ok(SpectralHamiltonian::new(h)?.evolve(t))
}

/// Cached pair of diagonalized switch Hamiltonians.
#[derive(Debug, Clone)]
pub struct SwitchPropagator {
    off: SpectralHamiltonian,
    on: SpectralHamiltonian,
}

impl SwitchPropagator {
    pub fn new(h1: &HermitianOp, h2: &HermitianOp) -> Result<Self> {
        if h1.dim() != h2.dim() {
            return Err(Error::Dimension {
                expected: h1.dim(),
                found: h2.dim(),
            });
        }
        Ok(Self {
            off: SpectralHamiltonian::new(h1)?,
            on: SpectralHamiltonian::new(h2)?,
        })
    }

    pub fn for_chain(spec: &ChainSpec) -> Result<Self> {
        let (h1, h2) = switch_hamiltonians(spec);
        Self::new(&h1, &h2)
    }

    pub fn dim(&self) -> usize {
        self.off.dim()
    }

    /// Product over raw durations; the caller guarantees they are valid.
    pub(crate) fn propagate_raw(&self, durations: &[f64]) -> CMatrix {
        let mut u = linalg::identity(self.dim());
        for (k, &t) in durations.iter().enumerate() {
            let factor = if k % 2 == 0 { &self.off } else { &self.on };
            u *= factor.evolve(t).0;
        }
        u
    }

    pub fn propagate(&self, seq: &SwitchSequence) -> UnitaryOp {
        UnitaryOp(self.propagate_raw(seq.durations()))
    }
}

/// `U(t) = U1(t_1) U2(t_2) U1(t_3) …`
pub fn propagate(seq: &SwitchSequence, h1: &HermitianOp, h2: &HermitianOp) -> Result<UnitaryOp> {
    Ok(SwitchPropagator::new(h1, h2)?.propagate(seq))
}

/// `|Tr(target† u)| / N`
fn overlap(u: &CMatrix, target: &CMatrix) -> f64 {
    let n = u.nrows() as f64;
    let tr: Complex64 = target.iter().zip(u.iter()).map(|(t, v)| t.conj() * v).sum();
    tr.norm() / n
}

/// Gate error `1 − |Tr(target† u)| / N`, clamped to `[0, 1]`.
pub fn gate_error(u: &UnitaryOp, target: &UnitaryOp) -> Result<f64> {
    if u.dim() != target.dim() {
        return Err(Error::Dimension {
            expected: target.dim(),
            found: u.dim(),
        });
    }
    Ok(gate_error_raw(u.matrix(), target.matrix()))
}

pub(crate) fn gate_error_raw(u: &CMatrix, target: &CMatrix) -> f64 {
    (1.0 - overlap(u, target)).clamp(0.0, 1.0)
}

/// `min_φ ‖target − e^{iφ} u‖_F = sqrt(‖target‖² + ‖u‖² − 2|Tr(target† u)|)`
pub fn phase_min_frobenius(u: &UnitaryOp, target: &UnitaryOp) -> Result<f64> {
    if u.dim() != target.dim() {
        return Err(Error::Dimension {
            expected: target.dim(),
            found: u.dim(),
        });
    }
    let n = u.dim() as f64;
    let sq = linalg::hs_inner(u.matrix(), u.matrix()) + linalg::hs_inner(target.matrix(), target.matrix())
        - 2.0 * n * overlap(u.matrix(), target.matrix());
    Ok(sq.max(0.0).sqrt())
}

/// `‖target − u‖_F² / (4N) = (1 − Re Tr(target† u)/N) / 2`, phase-sensitive.
/// Equals half the gate error when the global phases agree.
pub fn half_frobenius_sq(u: &UnitaryOp, target: &UnitaryOp) -> Result<f64> {
    if u.dim() != target.dim() {
        return Err(Error::Dimension {
            expected: target.dim(),
            found: u.dim(),
        });
    }
    let n = u.dim() as f64;
    let d = target.matrix() - u.matrix();
    Ok(linalg::hs_inner(&d, &d) / (4.0 * n))
}

/// `U ρ U†`
pub fn evolve_density(rho: &DensityOp, u: &UnitaryOp) -> Result<DensityOp> {
    if rho.dim() != u.dim() {
        return Err(Error::Dimension {
            expected: rho.dim(),
            found: u.dim(),
        });
    }
    let m = u.matrix() * rho.matrix() * u.matrix().adjoint();
    // Restore exact Hermiticity lost to rounding.
    let m = (&m + m.adjoint()) * c(0.5);
    Ok(DensityOp(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::heisenberg_default;
    use crate::linalg::{max_abs_diff, I};
    use std::f64::consts::FRAC_PI_2;

    fn sigma_x() -> HermitianOp {
        HermitianOp::new(CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])).unwrap()
    }

    #[test]
    fn switch_pair_examples() {
        let spec = heisenberg_default(vec![1.0; 3], 1)
            .unwrap()
            .with_switch_levels(0.0, 0.0)
            .unwrap();
        let (h1, h2) = switch_hamiltonians(&spec);
        assert_eq!(h1.matrix(), build_drift(&spec).matrix());
        assert_eq!(h2.matrix(), build_drift(&spec).matrix());

        let spec = heisenberg_default(vec![0.8, 1.3, 0.9], 2).unwrap();
        let (_, h2) = switch_hamiltonians(&spec);
        assert_eq!(h2.matrix()[(1, 2)], c(0.0));
        assert_eq!(h2.matrix()[(2, 1)], c(0.0));

        let spec = ChainSpec::new(2, vec![1.0], vec![0.0, 0.0], 1, 0.0, 1.0).unwrap();
        let (_, h2) = switch_hamiltonians(&spec);
        assert_eq!(
            h2.matrix(),
            &CMatrix::from_row_slice(2, 2, &[c(0.0), c(2.0), c(2.0), c(0.0)])
        );
    }

    #[test]
    fn expm_examples() {
        let x = sigma_x();
        let u0 = expm_hermitian(&x, 0.0).unwrap();
        assert!(max_abs_diff(u0.matrix(), &linalg::identity(2)) < 1e-15);

        // exp(−iθσ_x) = cos θ I − i sin θ σ_x
        let u = expm_hermitian(&x, FRAC_PI_2).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[c(0.0), -I, -I, c(0.0)]);
        assert!(max_abs_diff(u.matrix(), &expected) < 1e-12);

        assert!(u.unitarity_defect() < 1e-12);
        assert!(expm_hermitian(&x, f64::NAN).is_err());
    }

    #[test]
    fn propagate_examples() {
        let spec = heisenberg_default(vec![1.0; 3], 1).unwrap();
        let (h1, h2) = switch_hamiltonians(&spec);

        let single = SwitchSequence::new(vec![1.7]).unwrap();
        let u = propagate(&single, &h1, &h2).unwrap();
        assert!(max_abs_diff(u.matrix(), expm_hermitian(&h1, 1.7).unwrap().matrix()) < 1e-13);

        let zeros = SwitchSequence::new(vec![0.0; 6]).unwrap();
        let u = propagate(&zeros, &h1, &h2).unwrap();
        assert!(max_abs_diff(u.matrix(), &linalg::identity(4)) < 1e-14);

        let seq = SwitchSequence::new(vec![0.3, 1.1, 2.0, 0.4, 0.9]).unwrap();
        let u = propagate(&seq, &h1, &h1).unwrap();
        let collapsed = expm_hermitian(&h1, seq.total_time()).unwrap();
        assert!(max_abs_diff(u.matrix(), collapsed.matrix()) < 1e-12);
    }

    #[test]
    fn ordering_is_leftmost_first_slot() {
        let spec = heisenberg_default(vec![1.0; 3], 1).unwrap();
        let (h1, h2) = switch_hamiltonians(&spec);
        let seq = SwitchSequence::new(vec![0.7, 1.9]).unwrap();
        let u = propagate(&seq, &h1, &h2).unwrap();
        let manual = expm_hermitian(&h1, 0.7)
            .unwrap()
            .compose(&expm_hermitian(&h2, 1.9).unwrap());
        assert!(max_abs_diff(u.matrix(), manual.matrix()) < 1e-13);
    }

    #[test]
    fn sequence_validation() {
        assert!(SwitchSequence::new(vec![]).is_err());
        assert!(SwitchSequence::new(vec![1.0, -0.1]).is_err());
        assert!(SwitchSequence::new(vec![f64::INFINITY]).is_err());
        assert_eq!(SwitchSequence::clamped(&[1.0, -0.5]).unwrap().durations(), &[1.0, 0.0]);
    }

    #[test]
    fn dimension_mismatch() {
        let spec = heisenberg_default(vec![1.0; 3], 1).unwrap();
        let (h1, _) = switch_hamiltonians(&spec);
        let seq = SwitchSequence::new(vec![1.0]).unwrap();
        assert!(matches!(propagate(&seq, &h1, &sigma_x()), Err(Error::Dimension { .. })));
        assert!(gate_error(&UnitaryOp::identity(2), &UnitaryOp::identity(4)).is_err());
    }

    #[test]
    fn gate_error_examples() {
        let spec = heisenberg_default(vec![1.0; 3], 1).unwrap();
        let (h1, _) = switch_hamiltonians(&spec);
        let target = expm_hermitian(&h1, 2.3).unwrap();
        assert!(gate_error(&target, &target).unwrap() < 1e-14);

        let phased = UnitaryOp(target.matrix() * Complex64::from_polar(1.0, 0.77));
        assert!(gate_error(&phased, &target).unwrap() < 1e-14);
        assert!(phase_min_frobenius(&phased, &target).unwrap() < 1e-7);

        assert!(half_frobenius_sq(&target, &target).unwrap() < 1e-15);
        let minus = UnitaryOp(-target.matrix());
        assert!((half_frobenius_sq(&minus, &target).unwrap() - 1.0).abs() < 1e-14);

        let sx = UnitaryOp::new(sigma_x().into_matrix()).unwrap();
        assert_eq!(gate_error(&UnitaryOp::identity(2), &sx).unwrap(), 1.0);
        assert!((phase_min_frobenius(&UnitaryOp::identity(2), &sx).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn density_examples() {
        let spec = heisenberg_default(vec![1.0; 3], 1).unwrap();
        let (h1, _) = switch_hamiltonians(&spec);
        let u = expm_hermitian(&h1, 0.9).unwrap();

        let rho = DensityOp::pure_basis(4, 2).unwrap();
        let same = evolve_density(&rho, &UnitaryOp::identity(4)).unwrap();
        assert!(max_abs_diff(same.matrix(), rho.matrix()) < 1e-15);

        let mixed = DensityOp::maximally_mixed(4);
        let out = evolve_density(&mixed, &u).unwrap();
        assert!(max_abs_diff(out.matrix(), mixed.matrix()) < 1e-14);

        let sx = UnitaryOp::new(sigma_x().into_matrix()).unwrap();
        let flipped = evolve_density(&DensityOp::pure_basis(2, 1).unwrap(), &sx).unwrap();
        assert!(max_abs_diff(flipped.matrix(), DensityOp::pure_basis(2, 2).unwrap().matrix()) < 1e-15);
    }

    #[test]
    fn density_validation() {
        assert!(DensityOp::new(linalg::identity(2)).is_err());
        let neg = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.5), c(-0.5)]));
        assert!(DensityOp::new(neg).is_err());
        assert!(DensityOp::pure_basis(3, 4).is_err());
    }
}
