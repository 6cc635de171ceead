use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ErrorSubspace;
use crate::error::{Error, Result};
use crate::operator::random::unit_hermitian;
use crate::operator::{DenseOperator, JointSpace, Matrix};

pub const NOGO_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoGoCase {
    pub label: String,
    /// `‖mod_b Σ P_{i−1}† X P_{i−1}‖ / ‖X‖` (error before each gate).
    pub e1_residual: f64,
    /// `‖mod_b Σ P_i† X P_i‖ / ‖X‖` (error after each gate).
    pub e2_residual: f64,
    /// `‖mod_b(A† X A − X)‖ / ‖X‖` with `A = P_N`.
    pub action_residual: f64,
}

impl NoGoCase {
    pub fn both_vanish(&self) -> bool {
        self.e1_residual < NOGO_TOL && self.e2_residual < NOGO_TOL
    }

    /// The theorem: both sums vanishing forces `A†XA = X` mod B.
    pub fn consistent(&self) -> bool {
        !self.both_vanish() || self.action_residual < NOGO_TOL
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoGoReport {
    pub cases: Vec<NoGoCase>,
    pub all_vanish: bool,
    pub consistent: bool,
}

pub fn nogo_case(sequence: &[Matrix], x: &DenseOperator, label: &str) -> Result<NoGoCase> {
    if sequence.is_empty() {
        return Err(Error::InvalidArgument("empty gate sequence".into()));
    }
    let space = x.space();
    let ds = space.system_dimension();
    let mut partial = Matrix::identity(ds, ds);
    let mut e1 = DenseOperator::zeros(space);
    let mut e2 = DenseOperator::zeros(space);
    for q in sequence {
        if q.shape() != (ds, ds) {
            return Err(Error::DimensionMismatch("gate register".into()));
        }
        e1 = e1.add(&x.conjugate_by(&DenseOperator::lift_system(space, &partial)?));
        partial = q * partial;
        e2 = e2.add(&x.conjugate_by(&DenseOperator::lift_system(space, &partial)?));
    }
    let a = DenseOperator::lift_system(space, &partial)?;
    let norm = x.operator_norm().max(f64::MIN_POSITIVE);
    Ok(NoGoCase {
        label: label.to_string(),
        e1_residual: e1.mod_b_reduce().operator_norm() / norm,
        e2_residual: e2.mod_b_reduce().operator_norm() / norm,
        action_residual: x.conjugate_by(&a).sub(x).mod_b_reduce().operator_norm() / norm,
    })
}

/// Evaluates both black-box error models for every pattern of the subspace,
/// `baths_per_pattern` random bath operators each.
pub fn nogo_witness<R: Rng + ?Sized>(
    sequence: &[Matrix],
    subspace: &ErrorSubspace,
    space: JointSpace,
    baths_per_pattern: usize,
    rng: &mut R,
) -> Result<NoGoReport> {
    let mut cases = Vec::new();
    for p in &subspace.patterns {
        for k in 0..baths_per_pattern {
            let b = unit_hermitian(rng, space.bath_dimension());
            let x = DenseOperator::from_parts(space, &p.matrix(), &b)?;
            cases.push(nogo_case(sequence, &x, &format!("{}#{k}", p.label_string()))?);
        }
    }
    let all_vanish = cases.iter().all(NoGoCase::both_vanish);
    let consistent = cases.iter().all(NoGoCase::consistent);
    Ok(NoGoReport { cases, all_vanish, consistent })
}
