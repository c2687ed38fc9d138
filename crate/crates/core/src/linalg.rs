//! Small dense complex matrix helpers shared by the algebra and propagator code.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn zeros(n: usize) -> CMatrix {
    CMatrix::zeros(n, n)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// `[a, b] = ab - ba`
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Hilbert–Schmidt inner product `Re Tr(a† b)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

pub fn hs_norm(a: &CMatrix) -> f64 {
    hs_inner(a, a).sqrt()
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Max-abs deviation from Hermiticity.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    max_abs_diff(a, &a.adjoint())
}

/// Max-abs deviation of `a + a†` from zero.
pub fn anti_hermitian_defect(a: &CMatrix) -> f64 {
    max_abs(&(a + a.adjoint()))
}

/// Max-abs deviation of `u† u` from the identity.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    max_abs_diff(&(u.adjoint() * u), &identity(u.nrows()))
}

/// `|e_row⟩⟨e_col|` with 0-based indices.
pub fn unit(n: usize, row: usize, col: usize) -> CMatrix {
    let mut m = zeros(n);
    m[(row, col)] = c(1.0);
    m
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hs_inner_matches_trace_definition() {
        let a = CMatrix::from_row_slice(2, 2, &[c(1.0), I, c(2.0), c(-1.0)]);
        let b = CMatrix::from_row_slice(2, 2, &[I, c(3.0), c(0.5), Complex64::new(1.0, 1.0)]);
        let direct = (a.adjoint() * &b).trace().re;
        assert!((hs_inner(&a, &b) - direct).abs() < 1e-14);
    }

    #[test]
    fn commutator_is_antisymmetric() {
        let a = unit(3, 0, 1) + unit(3, 1, 0);
        let b = unit(3, 1, 2) * I;
        let ab = commutator(&a, &b);
        let ba = commutator(&b, &a);
        assert!(max_abs(&(ab + ba)) < 1e-15);
    }
}
