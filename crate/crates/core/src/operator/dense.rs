use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Matrix, PauliString, C64};
use crate::error::{Error, Result};

/// Factored Hilbert space H_S ⊗ H_B with `n_system_qubits` qubits and a bath
/// of arbitrary dimension. Joint basis index is `s * bath_dimension + b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JointSpace {
    n_system_qubits: usize,
    bath_dimension: usize,
}

impl JointSpace {
    pub fn new(n_system_qubits: usize, bath_dimension: usize) -> Result<Self> {
        if bath_dimension == 0 {
            return Err(Error::InvalidArgument("bath dimension must be at least 1".into()));
        }
        if n_system_qubits >= usize::BITS as usize / 2 {
            return Err(Error::InvalidArgument(format!("{n_system_qubits} system qubits")));
        }
        Ok(JointSpace { n_system_qubits, bath_dimension })
    }

    pub fn system_only(n_system_qubits: usize) -> Result<Self> {
        JointSpace::new(n_system_qubits, 1)
    }

    pub fn n_system_qubits(&self) -> usize {
        self.n_system_qubits
    }

    pub fn bath_dimension(&self) -> usize {
        self.bath_dimension
    }

    pub fn system_dimension(&self) -> usize {
        1 << self.n_system_qubits
    }

    pub fn total_dimension(&self) -> usize {
        self.system_dimension() * self.bath_dimension
    }

    pub fn check_cap(&self, cap: usize) -> Result<()> {
        if self.total_dimension() > cap {
            return Err(Error::DimensionCap { dimension: self.total_dimension(), cap });
        }
        Ok(())
    }
}

/// Largest absolute entry of `m - m†`.
pub fn hermiticity_residual(m: &Matrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Tolerance-scaled Hermiticity test used across the crate.
pub fn is_hermitian(m: &Matrix, tol: f64) -> bool {
    m.is_square() && hermiticity_residual(m) <= tol * max_abs(m).max(1.0)
}

pub fn spectral_norm(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    matrix: Matrix,
    space: JointSpace,
}

impl DenseOperator {
    pub fn new(space: JointSpace, matrix: Matrix) -> Result<Self> {
        let d = space.total_dimension();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix on a space of dimension {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(DenseOperator { matrix, space })
    }

    pub fn zeros(space: JointSpace) -> Self {
        let d = space.total_dimension();
        DenseOperator { matrix: Matrix::zeros(d, d), space }
    }

    pub fn identity(space: JointSpace) -> Self {
        let d = space.total_dimension();
        DenseOperator { matrix: Matrix::identity(d, d), space }
    }

    /// `system ⊗ bath`.
    pub fn from_parts(space: JointSpace, system: &Matrix, bath: &Matrix) -> Result<Self> {
        let (ds, db) = (space.system_dimension(), space.bath_dimension());
        if system.shape() != (ds, ds) || bath.shape() != (db, db) {
            return Err(Error::DimensionMismatch(format!(
                "factors {:?} and {:?} on space {ds}x{db}",
                system.shape(),
                bath.shape()
            )));
        }
        Ok(DenseOperator { matrix: system.kronecker(bath), space })
    }

    /// `system ⊗ I_B`.
    pub fn lift_system(space: JointSpace, system: &Matrix) -> Result<Self> {
        let db = space.bath_dimension();
        DenseOperator::from_parts(space, system, &Matrix::identity(db, db))
    }

    /// `I_S ⊗ bath`.
    pub fn lift_bath(space: JointSpace, bath: &Matrix) -> Result<Self> {
        let ds = space.system_dimension();
        DenseOperator::from_parts(space, &Matrix::identity(ds, ds), bath)
    }

    /// Pauli string embedded as `P ⊗ I_B`.
    pub fn pauli(space: JointSpace, p: &PauliString) -> Result<Self> {
        if p.n_qubits() != space.n_system_qubits() {
            return Err(Error::DimensionMismatch(format!(
                "{}-qubit Pauli string on {} system qubits",
                p.n_qubits(),
                space.n_system_qubits()
            )));
        }
        DenseOperator::lift_system(space, &p.matrix())
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn space(&self) -> JointSpace {
        self.space
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    fn same_space(&self, other: &DenseOperator) {
        assert_eq!(self.space, other.space, "operators live on different joint spaces");
    }

    pub fn adjoint(&self) -> DenseOperator {
        DenseOperator { matrix: self.matrix.adjoint(), space: self.space }
    }

    pub fn mul(&self, other: &DenseOperator) -> DenseOperator {
        self.same_space(other);
        DenseOperator { matrix: &self.matrix * &other.matrix, space: self.space }
    }

    pub fn add(&self, other: &DenseOperator) -> DenseOperator {
        self.same_space(other);
        DenseOperator { matrix: &self.matrix + &other.matrix, space: self.space }
    }

    pub fn sub(&self, other: &DenseOperator) -> DenseOperator {
        self.same_space(other);
        DenseOperator { matrix: &self.matrix - &other.matrix, space: self.space }
    }

    pub fn scale(&self, c: C64) -> DenseOperator {
        DenseOperator { matrix: &self.matrix * c, space: self.space }
    }

    pub fn scale_real(&self, c: f64) -> DenseOperator {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn commutator(&self, other: &DenseOperator) -> DenseOperator {
        self.same_space(other);
        DenseOperator {
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
            space: self.space,
        }
    }

    /// `u† self u`.
    pub fn conjugate_by(&self, u: &DenseOperator) -> DenseOperator {
        self.same_space(u);
        DenseOperator { matrix: u.matrix.adjoint() * &self.matrix * &u.matrix, space: self.space }
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        hermiticity_residual(&self.matrix)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        is_hermitian(&self.matrix, tol)
    }

    pub fn hermitian_part(&self) -> DenseOperator {
        let m = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        DenseOperator { matrix: m, space: self.space }
    }

    /// `‖U†U − I‖` in spectral norm.
    pub fn unitarity_residual(&self) -> f64 {
        let d = self.dimension();
        spectral_norm(&(self.matrix.adjoint() * &self.matrix - Matrix::identity(d, d)))
    }

    pub fn operator_norm(&self) -> f64 {
        spectral_norm(&self.matrix)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// `Tr_S O`, an operator on the bath.
    pub fn partial_trace_system(&self) -> Matrix {
        let (ds, db) = (self.space.system_dimension(), self.space.bath_dimension());
        let mut out = Matrix::zeros(db, db);
        for s in 0..ds {
            out += self.matrix.view((s * db, s * db), (db, db));
        }
        out
    }

    /// `Tr_B O`, an operator on the system.
    pub fn partial_trace_bath(&self) -> Matrix {
        let (ds, db) = (self.space.system_dimension(), self.space.bath_dimension());
        Matrix::from_fn(ds, ds, |r, c| self.matrix.view((r * db, c * db), (db, db)).trace())
    }

    pub fn mod_b_reduce(&self) -> DenseOperator {
        let ds = self.space.system_dimension() as f64;
        let bath = self.partial_trace_system() / Complex64::new(ds, 0.0);
        let pure = DenseOperator::lift_bath(self.space, &bath).expect("bath factor has matching size");
        self.sub(&pure)
    }
}

/// One term of a joint Hamiltonian: `weight * system ⊗ bath` (bath defaults to I_B).
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianTerm {
    pub system: PauliString,
    pub bath: Option<Matrix>,
    pub weight: f64,
}

impl HamiltonianTerm {
    pub fn is_pure_bath(&self) -> bool {
        self.system.is_identity() && self.bath.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct HamiltonianSpec {
    pub terms: Vec<HamiltonianTerm>,
}

impl HamiltonianSpec {
    pub fn new() -> Self {
        HamiltonianSpec::default()
    }

    pub fn push(&mut self, weight: f64, system: PauliString, bath: Option<Matrix>) {
        self.terms.push(HamiltonianTerm { system, bath, weight });
    }

    pub fn pure_bath_terms(&self) -> impl Iterator<Item = &HamiltonianTerm> {
        self.terms.iter().filter(|t| t.is_pure_bath())
    }
}

pub fn assemble(spec: &HamiltonianSpec, space: JointSpace) -> Result<DenseOperator> {
    let db = space.bath_dimension();
    let mut out = DenseOperator::zeros(space);
    for term in &spec.terms {
        if term.system.n_qubits() != space.n_system_qubits() {
            return Err(Error::DimensionMismatch(format!(
                "term {} on {} system qubits",
                term.system,
                space.n_system_qubits()
            )));
        }
        let c = term.system.coefficient();
        if c.im.abs() > 1e-12 * c.norm().max(1.0) {
            return Err(Error::NotHermitian { residual: c.im.abs() });
        }
        let sys = term.system.matrix();
        let joint = match &term.bath {
            Some(b) => {
                if b.shape() != (db, db) {
                    return Err(Error::DimensionMismatch(format!(
                        "bath operator {:?} for bath dimension {db}",
                        b.shape()
                    )));
                }
                if !is_hermitian(b, 1e-12) {
                    return Err(Error::NotHermitian { residual: hermiticity_residual(b) });
                }
                DenseOperator::from_parts(space, &sys, b)?
            }
            None => DenseOperator::lift_system(space, &sys)?,
        };
        out = out.add(&joint.scale_real(term.weight));
    }
    Ok(out.hermitian_part())
}

pub fn mod_b_reduce(o: &DenseOperator) -> DenseOperator {
    o.mod_b_reduce()
}

pub fn operator_norm(o: &DenseOperator) -> f64 {
    o.operator_norm()
}

/// Partial trace over the bath of a joint density operator.
pub fn reduce_to_system(rho_joint: &DenseOperator) -> Matrix {
    rho_joint.partial_trace_bath()
}
