use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::PauliSum;
use crate::schedule::ControlSchedule;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ControlErrorModel {
    None,
    /// Every control Hamiltonian scaled by `1 + ε`.
    FixedSystematic { epsilon: f64 },
    /// `ε·H_dev` added to every segment.
    ScaledSystematic { epsilon: f64, h_dev: PauliSum },
    /// Independent per-segment scale `1 + ε + width·u`, `u` uniform in [−1, 1].
    RandomOverrotation { epsilon: f64, width: f64, seed: u64 },
}

impl ControlErrorModel {
    pub fn epsilon(&self) -> f64 {
        match self {
            ControlErrorModel::None => 0.0,
            ControlErrorModel::FixedSystematic { epsilon }
            | ControlErrorModel::ScaledSystematic { epsilon, .. }
            | ControlErrorModel::RandomOverrotation { epsilon, .. } => *epsilon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let eps = self.epsilon();
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::InvalidArgument(format!("epsilon must be >= 0, got {eps}")));
        }
        if let ControlErrorModel::RandomOverrotation { width, .. } = self {
            if !(*width >= 0.0 && width.is_finite()) {
                return Err(Error::InvalidArgument(format!("width must be >= 0, got {width}")));
            }
        }
        Ok(())
    }

    /// Same kind with a different strength.
    pub fn with_epsilon(&self, epsilon: f64) -> ControlErrorModel {
        match self.clone() {
            ControlErrorModel::None if epsilon == 0.0 => ControlErrorModel::None,
            ControlErrorModel::None | ControlErrorModel::FixedSystematic { .. } => {
                ControlErrorModel::FixedSystematic { epsilon }
            }
            ControlErrorModel::ScaledSystematic { h_dev, .. } => ControlErrorModel::ScaledSystematic { epsilon, h_dev },
            ControlErrorModel::RandomOverrotation { width, seed, .. } => {
                ControlErrorModel::RandomOverrotation { epsilon, width, seed }
            }
        }
    }
}

pub fn apply_control_error(schedule: &ControlSchedule, model: &ControlErrorModel) -> Result<ControlSchedule> {
    model.validate()?;
    let mut out = schedule.clone();
    match model {
        ControlErrorModel::None => {}
        ControlErrorModel::FixedSystematic { epsilon } => {
            for s in &mut out.segments {
                s.hamiltonian = s.hamiltonian.scaled(1.0 + epsilon);
            }
        }
        ControlErrorModel::ScaledSystematic { epsilon, h_dev } => {
            if h_dev.n_qubits() != schedule.n_qubits {
                return Err(Error::DimensionMismatch("H_dev register".into()));
            }
            let dev = h_dev.scaled(*epsilon);
            for s in &mut out.segments {
                s.hamiltonian = s.hamiltonian.plus(&dev)?;
            }
        }
        ControlErrorModel::RandomOverrotation { epsilon, width, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for s in &mut out.segments {
                let u = 2.0 * rng.random::<f64>() - 1.0;
                s.hamiltonian = s.hamiltonian.scaled(1.0 + epsilon + width * u);
            }
        }
    }
    Ok(out)
}
