use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::control_error::{apply_control_error, ControlErrorModel};
use super::gates::{dcg_schedule_for, primitive_schedule, GateSpec};
use super::model::{build_internal_hamiltonian, sample_bath_model, SpinBathModel};
use crate::error::{Error, Result};
use crate::operator::{pure_state_fidelity, JointSpace, Matrix, SpectralCache, C64};
use crate::schedule::ControlSchedule;

/// Infidelities below this are indistinguishable from roundoff.
pub const INFIDELITY_FLOOR: f64 = 1e-13;

/// Per-run abort threshold on propagator unitarity.
pub const UNITARITY_TOL: f64 = 1e-9;

/// `(|0…00⟩ + |0…01⟩)/√2`.
pub fn default_input_state(n: usize) -> Vec<C64> {
    let mut psi = vec![Complex64::new(0.0, 0.0); 1 << n];
    psi[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    psi[1] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    psi
}

/// Exact piecewise-constant propagation of `|ψ⟩⟨ψ| ⊗ I/d_B` under
/// `H_gate ⊗ I_B + H_int`. Owns its eigendecomposition cache.
pub struct SpinBathSimulator {
    space: JointSpace,
    h_int: Matrix,
    psi_in: Vec<C64>,
    cache: SpectralCache,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evolution {
    pub rho_system: Matrix,
    /// Largest `‖V†V − I‖_F` over the eigenbases used.
    pub unitarity_residual: f64,
}

impl SpinBathSimulator {
    pub fn new(model: &SpinBathModel) -> Result<Self> {
        let (hb, hsb) = build_internal_hamiltonian(model)?;
        Ok(SpinBathSimulator {
            space: model.space(),
            h_int: hb.matrix() + hsb.matrix(),
            psi_in: default_input_state(model.n),
            cache: SpectralCache::new(),
        })
    }

    pub fn with_input_state(mut self, psi: Vec<C64>) -> Result<Self> {
        if psi.len() != self.space.system_dimension() {
            return Err(Error::DimensionMismatch("input state length".into()));
        }
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("input state norm {norm}")));
        }
        self.psi_in = psi;
        Ok(self)
    }

    pub fn space(&self) -> JointSpace {
        self.space
    }

    pub fn input_state(&self) -> &[C64] {
        &self.psi_in
    }

    pub fn evolve(&self, schedule: &ControlSchedule) -> Result<Evolution> {
        schedule.validate()?;
        if schedule.n_qubits != self.space.n_system_qubits() {
            return Err(Error::DimensionMismatch("schedule register".into()));
        }
        let db = self.space.bath_dimension();
        let d = self.space.total_dimension();
        // columns |ψ⟩ ⊗ |b⟩
        let mut states = Matrix::zeros(d, db);
        for (s, amp) in self.psi_in.iter().enumerate() {
            for b in 0..db {
                states[(s * db + b, b)] = *amp;
            }
        }
        let mut residual: f64 = 0.0;
        let eye = Matrix::identity(d, d);
        for iv in schedule.intervals() {
            let hg = iv.hamiltonian.matrix();
            let h = if db == 1 { hg } else { hg.kronecker(&Matrix::identity(db, db)) } + &self.h_int;
            let spec = self.cache.spectrum(&h)?;
            let v = &spec.eigenvectors;
            residual = residual.max((v.adjoint() * v - &eye).norm());
            if residual > UNITARITY_TOL {
                return Err(Error::Numerical(format!("propagator unitarity residual {residual:.3e}")));
            }
            let mut coeffs = v.adjoint() * &states;
            for (j, mut row) in coeffs.row_iter_mut().enumerate() {
                row *= Complex64::from_polar(1.0, -spec.eigenvalues[j] * iv.duration);
            }
            states = v * coeffs;
        }
        let ds = self.space.system_dimension();
        let scale = Complex64::new(1.0 / db as f64, 0.0);
        let rho = Matrix::from_fn(ds, ds, |r, c| {
            let mut acc = Complex64::new(0.0, 0.0);
            for col in 0..db {
                for b in 0..db {
                    acc += states[(r * db + b, col)] * states[(c * db + b, col)].conj();
                }
            }
            acc * scale
        });
        Ok(Evolution { rho_system: rho, unitarity_residual: residual })
    }
}

/// Final reduced system state of `schedule` (after control errors) on the bath `model`.
pub fn simulate(schedule: &ControlSchedule, model: &SpinBathModel, errmodel: &ControlErrorModel) -> Result<Matrix> {
    let perturbed = apply_control_error(schedule, errmodel)?;
    Ok(SpinBathSimulator::new(model)?.evolve(&perturbed)?.rho_system)
}

/// Fidelity of `rho_s` with the ideal output `Q|ψ_in⟩`.
pub fn gate_fidelity(rho_s: &Matrix, target: &Matrix, psi_in: &[C64]) -> Result<f64> {
    if target.ncols() != psi_in.len() {
        return Err(Error::DimensionMismatch("target gate and input state".into()));
    }
    let psi = nalgebra::DVector::from_column_slice(psi_in);
    let ideal = target * psi;
    pure_state_fidelity(rho_s, ideal.as_slice())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub r: f64,
    pub saturated: bool,
}

/// `(1 − f_prim)/(1 − f_dcg)`, flagged saturated when either infidelity is
/// below [`INFIDELITY_FLOOR`].
pub fn improvement_ratio(f_prim: f64, f_dcg: f64) -> Result<Ratio> {
    for f in [f_prim, f_dcg] {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::InvalidArgument(format!("fidelity {f} outside [0, 1]")));
        }
    }
    let (ip, id) = (1.0 - f_prim, 1.0 - f_dcg);
    let saturated = ip <= INFIDELITY_FLOOR || id <= INFIDELITY_FLOOR;
    let r = if ip == id { 1.0 } else { ip / id };
    Ok(Ratio { r, saturated })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub tau: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "Gamma")]
    pub gamma: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub f_prim: f64,
    pub f_dcg: f64,
    pub r: f64,
    pub saturated: bool,
    pub unitarity_residual: f64,
}

impl SimulationResult {
    pub fn dcg_infidelity(&self) -> f64 {
        1.0 - self.f_dcg
    }
}

/// Primitive-vs-DCG comparison at one grid point.
pub fn run_point(
    model: &SpinBathModel,
    gate: &GateSpec,
    tau: f64,
    errmodel: &ControlErrorModel,
) -> Result<SimulationResult> {
    let sim = SpinBathSimulator::new(model)?;
    let target = gate.target_unitary(model.n)?;
    let prim = apply_control_error(&primitive_schedule(gate, model.n, tau)?, errmodel)?;
    let dcg = apply_control_error(&dcg_schedule_for(gate, model.n, tau)?, errmodel)?;
    let ep = sim.evolve(&prim)?;
    let ed = sim.evolve(&dcg)?;
    let f_prim = gate_fidelity(&ep.rho_system, &target, sim.input_state())?;
    let f_dcg = gate_fidelity(&ed.rho_system, &target, sim.input_state())?;
    let ratio = improvement_ratio(f_prim, f_dcg)?;
    Ok(SimulationResult {
        tau,
        a: model.a,
        gamma: model.gamma,
        epsilon: errmodel.epsilon(),
        seed: model.seed,
        f_prim,
        f_dcg,
        r: ratio.r,
        saturated: ratio.saturated,
        unitarity_residual: ep.unitarity_residual.max(ed.unitarity_residual),
    })
}

/// Convenience wrapper sampling the bath first.
pub fn run_point_sampled(
    n: usize,
    n_b: usize,
    gamma: f64,
    a: f64,
    seed: u64,
    gate: &GateSpec,
    tau: f64,
    errmodel: &ControlErrorModel,
    dimension_cap: usize,
) -> Result<SimulationResult> {
    let model = sample_bath_model(n, n_b, gamma, a, seed, dimension_cap)?;
    run_point(&model, gate, tau, errmodel)
}
