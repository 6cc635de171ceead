use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{first_order_magnus, ErrorSubspace};
use crate::error::{Error, Result};
use crate::operator::{DenseOperator, JointSpace};
use crate::schedule::ControlSchedule;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CancellationReport {
    pub schedule_id: String,
    pub subspace: String,
    pub samples: usize,
    pub worst_residual: f64,
    pub pass: bool,
}

/// `‖mod_b(Φ^{[1]})‖ / (‖H_e‖ T)`.
pub fn cancellation_residual(schedule: &ControlSchedule, h_e: &DenseOperator) -> Result<f64> {
    let phi = first_order_magnus(schedule, h_e)?;
    let scale = h_e.operator_norm() * schedule.duration();
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok(phi.phi.mod_b_reduce().operator_norm() / scale)
}

/// Draws `samples` random members of `subspace` (plus `extra`, when given) and
/// checks the normalized first-order residual against `tol`.
pub fn verify_first_order_cancellation_with(
    schedule: &ControlSchedule,
    subspace: &ErrorSubspace,
    space: JointSpace,
    samples: usize,
    tol: f64,
    seed: u64,
    extra: Option<&DenseOperator>,
) -> Result<CancellationReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("at least one sample required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let mut h_e = subspace.sample(space, &mut rng)?;
        if let Some(x) = extra {
            h_e = h_e.add(x);
        }
        worst = worst.max(cancellation_residual(schedule, &h_e)?);
    }
    Ok(CancellationReport {
        schedule_id: schedule.id.clone(),
        subspace: subspace.name.clone(),
        samples,
        worst_residual: worst,
        pass: worst < tol,
    })
}

pub fn verify_first_order_cancellation(
    schedule: &ControlSchedule,
    subspace: &ErrorSubspace,
    space: JointSpace,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<CancellationReport> {
    verify_first_order_cancellation_with(schedule, subspace, space, samples, tol, seed, None)
}
