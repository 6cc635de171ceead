use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::random::unit_hermitian;
use crate::operator::{DenseOperator, JointSpace, Matrix, Pauli, PauliString};

/// Span of `P_g ⊗ B_g` over a list of system Pauli patterns with free bath slots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorSubspace {
    pub name: String,
    pub n_qubits: usize,
    pub patterns: Vec<PauliString>,
}

impl ErrorSubspace {
    pub fn custom(name: &str, n_qubits: usize, patterns: Vec<PauliString>) -> Result<Self> {
        if patterns.iter().any(|p| p.n_qubits() != n_qubits) {
            return Err(Error::DimensionMismatch("pattern register".into()));
        }
        Ok(ErrorSubspace { name: name.to_string(), n_qubits, patterns })
    }

    /// All single-qubit operators on every qubit.
    pub fn linear(n: usize) -> Self {
        let patterns = (0..n)
            .flat_map(|q| Pauli::NONTRIVIAL.into_iter().map(move |p| PauliString::single(n, q, p)))
            .collect();
        ErrorSubspace { name: "linear".into(), n_qubits: n, patterns }
    }

    /// Z on every qubit.
    pub fn dephasing(n: usize) -> Self {
        let patterns = (0..n).map(|q| PauliString::single(n, q, Pauli::Z)).collect();
        ErrorSubspace { name: "dephasing".into(), n_qubits: n, patterns }
    }

    /// Single-qubit terms plus every nearest-neighbour bilinear `S_α^{(i)} S_β^{(i+1)}`.
    pub fn nearest_neighbor(n: usize) -> Self {
        let mut patterns = ErrorSubspace::linear(n).patterns;
        for i in 0..n.saturating_sub(1) {
            for a in Pauli::NONTRIVIAL {
                for b in Pauli::NONTRIVIAL {
                    let mut labels = vec![Pauli::I; n];
                    labels[i] = a;
                    labels[i + 1] = b;
                    patterns.push(PauliString::new(labels, num_complex::Complex64::new(1.0, 0.0)));
                }
            }
        }
        ErrorSubspace { name: "nearest_neighbor".into(), n_qubits: n, patterns }
    }

    pub fn by_name(name: &str, n: usize) -> Result<Self> {
        match name {
            "linear" => Ok(ErrorSubspace::linear(n)),
            "dephasing" => Ok(ErrorSubspace::dephasing(n)),
            "nearest_neighbor" => Ok(ErrorSubspace::nearest_neighbor(n)),
            other => Err(Error::InvalidArgument(format!("unknown error subspace {other:?}"))),
        }
    }

    /// `Σ_g P_g ⊗ B_g` for explicit bath operators.
    pub fn member(&self, space: JointSpace, baths: &[Matrix]) -> Result<DenseOperator> {
        if baths.len() != self.patterns.len() {
            return Err(Error::DimensionMismatch("one bath operator per pattern required".into()));
        }
        let mut out = DenseOperator::zeros(space);
        for (p, b) in self.patterns.iter().zip(baths) {
            out = out.add(&DenseOperator::from_parts(space, &p.matrix(), b)?);
        }
        Ok(out)
    }

    /// Random member with unit-norm GUE bath operators.
    pub fn sample<R: Rng + ?Sized>(&self, space: JointSpace, rng: &mut R) -> Result<DenseOperator> {
        if space.n_system_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch("subspace register".into()));
        }
        let baths: Vec<Matrix> =
            self.patterns.iter().map(|_| unit_hermitian(rng, space.bath_dimension())).collect();
        self.member(space, &baths)
    }
}
