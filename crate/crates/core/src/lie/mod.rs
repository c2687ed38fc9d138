//! Dynamical Lie algebra of a drift/actuator pair.
//!
//! Elements live in su(N) (anti-Hermitian, traceless) and are orthonormalized
//! under the Hilbert–Schmidt product `⟨A, B⟩ = Re Tr(A†B)`.

mod proof;
mod theorems;

pub use proof::{
    proof_trace, proof_trace_thm1, proof_trace_thm2, Convention, IdentityCheck, ProofTrace, Theorem, IDENTITY_TOL,
};
pub use theorems::{thm1_check, thm1_condition, thm2_check, thm2_condition, ConditionFailure};

use crate::chain::{build_actuator, build_drift, ChainSpec, HermitianOp};
use crate::error::{Error, Result};
use crate::linalg::{self, c, hs_inner, hs_norm, CMatrix, I};

/// Residual threshold for adding a commutator to the closure basis,
/// relative to the candidate's norm.
pub const CLOSURE_TOL: f64 = 1e-10;

/// Traceless anti-Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SuElement(CMatrix);

impl SuElement {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let tol = 1e-12 * linalg::max_abs(&m).max(1.0);
        if linalg::anti_hermitian_defect(&m) > tol {
            return Err(Error::Numeric("element is not anti-Hermitian".into()));
        }
        if m.trace().norm() > tol {
            return Err(Error::Numeric("element is not traceless".into()));
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self(&self.0 * c(a))
    }

    pub fn commutator(&self, other: &SuElement) -> SuElement {
        SuElement(linalg::commutator(&self.0, &other.0))
    }
}

/// Orthonormal basis of a real Lie subalgebra of su(N).
#[derive(Debug, Clone)]
pub struct LieBasisSet {
    dim: usize,
    elements: Vec<SuElement>,
}

impl LieBasisSet {
    /// Matrix size N.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the algebra (number of basis elements).
    pub fn dimension(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[SuElement] {
        &self.elements
    }

    pub fn is_full(&self) -> bool {
        self.dimension() == self.dim * self.dim - 1
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn gram_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.elements.iter().enumerate() {
            for (j, b) in self.elements.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((hs_inner(a.matrix(), b.matrix()) - target).abs());
            }
        }
        worst
    }
}

/// `i (H − Tr(H)/N · I)`
pub fn traceless_part(h: &HermitianOp) -> SuElement {
    let n = h.dim();
    let shift = h.matrix().trace() / c(n as f64);
    let m = (h.matrix() - linalg::identity(n) * shift) * I;
    SuElement(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    X,
    Y,
    H,
}

/// Standard su(N) generators on the pair `(m, n)`, `1 ≤ m < n ≤ dim`:
///
/// * `x_{mn} = |n⟩⟨m| − |m⟩⟨n|`
/// * `y_{mn} = i(|n⟩⟨m| + |m⟩⟨n|)`
/// * `h_{mn} = ½[x_{mn}, y_{mn}] = −i(|m⟩⟨m| − |n⟩⟨n|)`
///
/// `h_{n,n+1}` is the anti-Hermitian image of the diagonal generator
/// `|n⟩⟨n| − |n+1⟩⟨n+1|`, normalized so that `[x, y] = 2h`.
pub fn su_basis_element(kind: BasisKind, m: usize, n: usize, dim: usize) -> Result<SuElement> {
    if m < 1 || m >= n || n > dim {
        return Err(Error::Index {
            index: if m < 1 || m >= n { m } else { n },
            lo: 1,
            hi: dim,
        });
    }
    let (m0, n0) = (m - 1, n - 1);
    let mat = match kind {
        BasisKind::X => linalg::unit(dim, n0, m0) - linalg::unit(dim, m0, n0),
        BasisKind::Y => (linalg::unit(dim, n0, m0) + linalg::unit(dim, m0, n0)) * I,
        BasisKind::H => (linalg::unit(dim, m0, m0) - linalg::unit(dim, n0, n0)) * (-I),
    };
    Ok(SuElement(mat))
}

struct ClosureBuilder {
    dim: usize,
    tol: f64,
    elements: Vec<SuElement>,
}

impl ClosureBuilder {
    fn max_dimension(&self) -> usize {
        self.dim * self.dim - 1
    }

    /// Orthogonalize `candidate` against the basis (two Gram–Schmidt passes)
    /// and append it when the residual is significant.
    fn offer(&mut self, candidate: CMatrix, absolute_floor: f64) -> Result<bool> {
        let norm = hs_norm(&candidate);
        if norm <= absolute_floor || self.elements.len() >= self.max_dimension() {
            return Ok(false);
        }
        let mut residual = candidate;
        for _ in 0..2 {
            for b in &self.elements {
                let coeff = hs_inner(b.matrix(), &residual);
                residual -= b.matrix() * c(coeff);
            }
        }
        let rnorm = hs_norm(&residual);
        if rnorm <= self.tol * norm {
            return Ok(false);
        }
        residual /= c(rnorm);
        // Remove drift out of su(N) so it cannot compound across sweeps.
        let defect = linalg::anti_hermitian_defect(&residual).max(residual.trace().norm());
        if defect > 1e-6 {
            return Err(Error::Numeric(format!(
                "closure element left su(N) (defect {defect:.2e})"
            )));
        }
        let residual = project_su(&residual);
        self.elements.push(SuElement(residual));
        Ok(true)
    }
}

/// Orthogonal projection onto traceless anti-Hermitian matrices, renormalized.
fn project_su(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let mut p = (m - m.adjoint()) * c(0.5);
    let shift = p.trace() / c(n as f64);
    for k in 0..n {
        p[(k, k)] -= shift;
    }
    let norm = hs_norm(&p);
    p / c(norm)
}

/// Basis of the smallest real Lie algebra containing `generators`.
///
/// Breadth-first: each sweep commutes every existing element with every
/// element added in the previous sweep. Stops when a sweep adds nothing or
/// the dimension reaches `N² − 1`.
pub fn lie_closure(generators: &[SuElement], tol: f64) -> Result<LieBasisSet> {
    let first = generators
        .first()
        .ok_or_else(|| Error::Precondition("lie_closure needs at least one generator".into()))?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Precondition(format!(
            "closure tolerance must be positive, got {tol}"
        )));
    }
    let dim = first.dim();
    if let Some(bad) = generators.iter().find(|g| g.dim() != dim) {
        return Err(Error::Dimension {
            expected: dim,
            found: bad.dim(),
        });
    }

    let mut builder = ClosureBuilder {
        dim,
        tol,
        elements: Vec::with_capacity(dim * dim - 1),
    };
    for g in generators {
        builder.offer(g.matrix().clone(), 0.0)?;
    }

    let mut frontier = 0;
    while frontier < builder.elements.len() && builder.elements.len() < builder.max_dimension() {
        let end = builder.elements.len();
        for j in frontier..end {
            for i in 0..j {
                let comm = linalg::commutator(builder.elements[i].matrix(), builder.elements[j].matrix());
                builder.offer(comm, tol)?;
                if builder.elements.len() == builder.max_dimension() {
                    break;
                }
            }
        }
        if builder.elements.len() == end {
            log::debug!("closure stalled at dimension {end} (su({dim}) has {})", dim * dim - 1);
            break;
        }
        frontier = end;
    }

    Ok(LieBasisSet {
        dim,
        elements: builder.elements,
    })
}

/// Closure of `{i Ã_0, i Ã_r}` for a chain.
pub fn chain_closure(spec: &ChainSpec, tol: f64) -> Result<LieBasisSet> {
    let drift = traceless_part(&build_drift(spec));
    let actuator = traceless_part(&build_actuator(spec));
    lie_closure(&[drift, actuator], tol)
}

/// Controllable iff the dynamical Lie algebra is all of su(N).
pub fn is_controllable(spec: &ChainSpec, tol: f64) -> Result<bool> {
    Ok(chain_closure(spec, tol)?.is_full())
}
