use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::balance::ControlProfile;
use crate::error::{Error, Result};
use crate::group::{dephasing_group, linear_decoupling_group, synthesize_dcg, synthesize_edd, DecouplingGroup, GroupRepresentation, Role};
use crate::operator::{Matrix, Pauli, PauliString, PauliSum, SpectralCache};
use crate::schedule::ControlSchedule;

/// Target gates `exp(−iθC)` with σ-normalized generators. Qubits are 0-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GateSpec {
    Rotation { qubit: usize, axis: Pauli, theta: f64 },
    /// `C = XX + YY + ZZ` on the pair; `θ = π/8` gives √SWAP.
    Heisenberg { qubits: (usize, usize), theta: f64 },
    Custom { generator: PauliSum, theta: f64, label: String },
}

impl GateSpec {
    pub fn sqrt_swap(i: usize, j: usize) -> Self {
        GateSpec::Heisenberg { qubits: (i, j), theta: PI / 8.0 }
    }

    pub fn theta(&self) -> f64 {
        match self {
            GateSpec::Rotation { theta, .. } | GateSpec::Heisenberg { theta, .. } | GateSpec::Custom { theta, .. } => *theta,
        }
    }

    pub fn label(&self) -> String {
        match self {
            GateSpec::Rotation { qubit, axis, theta } => format!("R{}{}({theta})", axis.symbol(), qubit + 1),
            GateSpec::Heisenberg { qubits: (i, j), theta } => format!("W{}{}({theta})", i + 1, j + 1),
            GateSpec::Custom { label, .. } => label.clone(),
        }
    }

    pub fn generator(&self, n: usize) -> Result<PauliSum> {
        let check = |q: usize| {
            if q >= n {
                Err(Error::InvalidArgument(format!("qubit index {} outside a {n}-qubit register", q + 1)))
            } else {
                Ok(())
            }
        };
        match self {
            GateSpec::Rotation { qubit, axis, .. } => {
                check(*qubit)?;
                if *axis == Pauli::I {
                    return Err(Error::InvalidArgument("rotation axis must be X, Y or Z".into()));
                }
                Ok(PauliSum::term(1.0, PauliString::single(n, *qubit, *axis)))
            }
            GateSpec::Heisenberg { qubits: (i, j), .. } => {
                check(*i)?;
                check(*j)?;
                if i == j {
                    return Err(Error::InvalidArgument("Heisenberg pair needs two distinct qubits".into()));
                }
                let terms = Pauli::NONTRIVIAL.into_iter().map(|p| (1.0, PauliString::on(n, &[*i, *j], p))).collect();
                PauliSum::from_terms(n, terms)
            }
            GateSpec::Custom { generator, .. } => {
                if generator.n_qubits() != n {
                    return Err(Error::DimensionMismatch("custom generator register".into()));
                }
                Ok(generator.clone())
            }
        }
    }

    pub fn target_unitary(&self, n: usize) -> Result<Matrix> {
        SpectralCache::new().propagator(&self.generator(n)?.matrix(), self.theta())
    }

    /// Rectangular profile realizing the gate in one interval `tau`.
    pub fn profile(&self, n: usize, tau: f64) -> Result<ControlProfile> {
        ControlProfile::rotation(self.generator(n)?, self.theta(), tau, self.label())
    }
}

/// Error models addressed by the pre-packaged decoupling groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecouplingModel {
    /// ℤ₂⊗ℤ₂, collective X and Y.
    Linear,
    /// ℤ₂, collective X.
    Dephasing,
}

impl DecouplingModel {
    pub fn group(self, n: usize) -> Result<(DecouplingGroup, GroupRepresentation)> {
        match self {
            DecouplingModel::Linear => linear_decoupling_group(n),
            DecouplingModel::Dephasing => dephasing_group(n),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DecouplingModel::Linear => "linear",
            DecouplingModel::Dephasing => "dephasing",
        }
    }
}

pub fn dcg_schedule(model: DecouplingModel, gate: &GateSpec, n: usize, tau: f64) -> Result<ControlSchedule> {
    let (group, rep) = model.group(n)?;
    let seq = synthesize_dcg(&group, &rep, "Q")?;
    let profile = gate.profile(n, tau)?;
    let id = format!("dcg_{}_{}", model.name(), gate.label());
    let sched = ControlSchedule::from_sequence(id, &seq, &group, &rep, Some(&profile), tau, 1)?;
    sched.check_divided_control()?;
    Ok(sched)
}

pub fn edd_schedule(model: DecouplingModel, n: usize, tau: f64) -> Result<ControlSchedule> {
    let (group, rep) = model.group(n)?;
    let seq = synthesize_edd(&group, &rep)?;
    ControlSchedule::from_sequence(format!("edd_{}", model.name()), &seq, &group, &rep, None, tau, 1)
}

/// The 16-segment DCG over ℤ₂⊗ℤ₂ with collective X/Y pulses.
pub fn dcg_schedule_for(gate: &GateSpec, n: usize, tau: f64) -> Result<ControlSchedule> {
    dcg_schedule(DecouplingModel::Linear, gate, n, tau)
}

/// Uncorrected gate: one interval of length `tau`.
pub fn primitive_schedule(gate: &GateSpec, n: usize, tau: f64) -> Result<ControlSchedule> {
    let mut s = ControlSchedule::new(format!("primitive_{}", gate.label()), n, tau)?;
    s.push(Role::Q, "Q", 1, 1.0, gate.generator(n)?.scaled(gate.theta() / tau));
    s.check_divided_control()?;
    Ok(s)
}
