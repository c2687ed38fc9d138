//! Two-qubit target gates on the 4-level chain.
//!
//! Levels map to qubit pairs as |0⟩=|00⟩, |1⟩=|01⟩, |2⟩=|10⟩, |3⟩=|11⟩, so
//! `A ⊗ B` is the ordinary Kronecker product with `A` on the first qubit.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, identity, kron, CMatrix};
use crate::propagator::UnitaryOp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateName {
    II,
    HadI,
    TI,
    IHad,
    IT,
    Cnot,
}

impl GateName {
    pub const ALL: [GateName; 6] = [Self::II, Self::HadI, Self::TI, Self::IHad, Self::IT, Self::Cnot];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::II => "II",
            Self::HadI => "HadI",
            Self::TI => "TI",
            Self::IHad => "IHad",
            Self::IT => "IT",
            Self::Cnot => "CNOT",
        }
    }

    /// Tensor-product label, e.g. `Had⊗I`.
    pub fn tensor_label(self) -> &'static str {
        match self {
            Self::II => "I⊗I",
            Self::HadI => "Had⊗I",
            Self::TI => "T⊗I",
            Self::IHad => "I⊗Had",
            Self::IT => "I⊗T",
            Self::Cnot => "CNOT",
        }
    }

    pub fn is_entangling(self) -> bool {
        self == Self::Cnot
    }
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GateName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim();
        Self::ALL
            .into_iter()
            .find(|g| g.as_str().eq_ignore_ascii_case(key) || g.tensor_label() == key)
            .ok_or_else(|| {
                let known: Vec<_> = Self::ALL.iter().map(|g| g.as_str()).collect();
                Error::parse("gate", format!("unknown gate `{key}` (known: {})", known.join(", ")))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateTarget {
    label: String,
    name: Option<GateName>,
    matrix: UnitaryOp,
}

impl GateTarget {
    pub fn custom(label: impl Into<String>, matrix: UnitaryOp) -> Self {
        Self {
            label: label.into(),
            name: None,
            matrix,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn name(&self) -> Option<GateName> {
        self.name
    }

    pub fn matrix(&self) -> &UnitaryOp {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

fn t_gate() -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        Complex64::from_polar(1.0, -FRAC_PI_8),
        Complex64::from_polar(1.0, FRAC_PI_8),
    ]))
}

fn hadamard() -> CMatrix {
    let h = c(FRAC_1_SQRT_2);
    CMatrix::from_row_slice(2, 2, &[h, -h, h, h])
}

pub fn build_target(name: GateName) -> GateTarget {
    let id2 = identity(2);
    let m = match name {
        GateName::II => identity(4),
        GateName::HadI => kron(&hadamard(), &id2),
        GateName::TI => kron(&t_gate(), &id2),
        GateName::IHad => kron(&id2, &hadamard()),
        GateName::IT => kron(&id2, &t_gate()),
        GateName::Cnot => {
            let mut m = crate::linalg::zeros(4);
            m[(0, 0)] = c(1.0);
            m[(1, 1)] = c(1.0);
            m[(2, 3)] = c(1.0);
            m[(3, 2)] = c(1.0);
            m * Complex64::from_polar(1.0, -FRAC_PI_4)
        }
    };
    GateTarget {
        label: name.as_str().to_string(),
        name: Some(name),
        matrix: UnitaryOp::new(m).expect("closed-form gates are unitary"),
    }
}

/// Look up a gate by its short or tensor label.
pub fn target_by_name(name: &str) -> Result<GateTarget> {
    Ok(build_target(name.parse()?))
}
