use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{unitary_log, DenseOperator, Matrix, SpectralCache, C64};
use crate::schedule::ControlSchedule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderTag {
    Total,
    FirstOrder,
    Residual,
}

/// Which norm enters the Magnus convergence check.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceCriterion {
    /// `‖H_e‖ T < π`.
    #[default]
    Conservative,
    /// `‖mod_b(H_e)‖ T < π`, bath evolution removed by a toggling frame.
    BathToggled,
}

impl ConvergenceCriterion {
    pub fn check(self, h_e: &DenseOperator, t: f64) -> Option<String> {
        let norm = match self {
            ConvergenceCriterion::Conservative => h_e.operator_norm(),
            ConvergenceCriterion::BathToggled => h_e.mod_b_reduce().operator_norm(),
        };
        (norm * t >= PI).then(|| format!("Magnus convergence not guaranteed: norm*T = {:.6} >= pi", norm * t))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorAction {
    pub phi: DenseOperator,
    pub order: OrderTag,
    pub warnings: Vec<String>,
}

impl ErrorAction {
    pub fn norm(&self) -> f64 {
        self.phi.operator_norm()
    }

    /// `total − first_order`, tagged as the residual.
    pub fn residual(total: &ErrorAction, first: &ErrorAction) -> ErrorAction {
        let mut warnings = total.warnings.clone();
        warnings.extend(first.warnings.iter().cloned());
        ErrorAction { phi: total.phi.sub(&first.phi), order: OrderTag::Residual, warnings }
    }
}

fn check_register(schedule: &ControlSchedule, h_e: &DenseOperator) -> Result<()> {
    schedule.validate()?;
    if schedule.n_qubits != h_e.space().n_system_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "schedule on {} qubits, error Hamiltonian on {}",
            schedule.n_qubits,
            h_e.space().n_system_qubits()
        )));
    }
    Ok(())
}

fn lift(m: &Matrix, bath_dim: usize) -> Matrix {
    if bath_dim == 1 {
        m.clone()
    } else {
        m.kronecker(&Matrix::identity(bath_dim, bath_dim))
    }
}

/// `∫_0^τ e^{i ω s} ds`.
fn phase_integral(omega: f64, tau: f64) -> C64 {
    let x = omega * tau;
    if x.abs() < 1e-6 {
        Complex64::new(tau * (1.0 - x * x / 6.0), tau * (x / 2.0 - x * x * x / 24.0))
    } else {
        (Complex64::from_polar(1.0, x) - 1.0) / Complex64::new(0.0, omega)
    }
}

/// Exact `Φ` with `U(T) = U_gate(T) e^{−iΦ}`.
pub fn exact_error_action(schedule: &ControlSchedule, h_e: &DenseOperator) -> Result<ErrorAction> {
    exact_error_action_with(schedule, h_e, ConvergenceCriterion::Conservative)
}

pub fn exact_error_action_with(
    schedule: &ControlSchedule,
    h_e: &DenseOperator,
    criterion: ConvergenceCriterion,
) -> Result<ErrorAction> {
    check_register(schedule, h_e)?;
    let db = h_e.space().bath_dimension();
    let cache = SpectralCache::new();
    let d = h_e.dimension();
    let ds = 1usize << schedule.n_qubits;
    let mut u = Matrix::identity(d, d);
    let mut ug = Matrix::identity(ds, ds);
    for iv in schedule.intervals() {
        let hg = iv.hamiltonian.matrix();
        let total = lift(&hg, db) + h_e.matrix();
        u = cache.propagator(&total, iv.duration)? * u;
        ug = cache.propagator(&hg, iv.duration)? * ug;
    }
    let w = lift(&ug, db).adjoint() * u;
    let phi = DenseOperator::new(h_e.space(), unitary_log(&w)?)?;
    let warnings = criterion.check(h_e, schedule.duration()).into_iter().collect();
    Ok(ErrorAction { phi, order: OrderTag::Total, warnings })
}

/// `Φ^{[1]} = ∫ U_gate†(t) H_e U_gate(t) dt`, integrated exactly per interval in
/// the eigenbasis of that interval's gating Hamiltonian.
pub fn first_order_magnus(schedule: &ControlSchedule, h_e: &DenseOperator) -> Result<ErrorAction> {
    check_register(schedule, h_e)?;
    let db = h_e.space().bath_dimension();
    let ds = 1usize << schedule.n_qubits;
    let d = h_e.dimension();
    let cache = SpectralCache::new();
    let mut prior = Matrix::identity(ds, ds);
    let mut acc = Matrix::zeros(d, d);
    for iv in schedule.intervals() {
        let spec = cache.spectrum(&iv.hamiltonian.matrix())?;
        let v = lift(&spec.eigenvectors, db);
        let mut m = v.adjoint() * h_e.matrix() * &v;
        for j in 0..d {
            for k in 0..d {
                let omega = spec.eigenvalues[j / db] - spec.eigenvalues[k / db];
                m[(j, k)] *= phase_integral(omega, iv.duration);
            }
        }
        let w = lift(&(spec.eigenvectors.adjoint() * &prior), db);
        acc += w.adjoint() * m * w;
        prior = spec.propagator(iv.duration) * prior;
    }
    let phi = DenseOperator::new(h_e.space(), acc)?.hermitian_part();
    let warnings = ConvergenceCriterion::Conservative.check(h_e, schedule.duration()).into_iter().collect();
    Ok(ErrorAction { phi, order: OrderTag::FirstOrder, warnings })
}

/// `Σ_i P_{i−1}† Φ_i P_{i−1}` with `P_0 = I` and `P_i = Q_i ⋯ Q_1`.
///
/// Gate unitaries act on the system register and are lifted to the joint space.
pub fn compose_gate_errors(gates: &[(Matrix, ErrorAction)]) -> Result<ErrorAction> {
    let Some((_, first)) = gates.first() else {
        return Err(Error::InvalidArgument("no gates to compose".into()));
    };
    let space = first.phi.space();
    let ds = space.system_dimension();
    let mut prior = Matrix::identity(ds, ds);
    let mut acc = DenseOperator::zeros(space);
    let mut max_norm: f64 = 0.0;
    for (q, action) in gates {
        if q.shape() != (ds, ds) || action.phi.space() != space {
            return Err(Error::DimensionMismatch("gate list on inconsistent spaces".into()));
        }
        let p = DenseOperator::lift_system(space, &prior)?;
        acc = acc.add(&action.phi.conjugate_by(&p));
        max_norm = max_norm.max(action.norm());
        prior = q * prior;
    }
    let mut warnings = Vec::new();
    let n = gates.len() as f64;
    if n * max_norm >= PI {
        warnings.push(format!("discrete Magnus convergence not guaranteed: N*max|Phi_i| = {:.6} >= pi", n * max_norm));
    }
    Ok(ErrorAction { phi: acc.hermitian_part(), order: OrderTag::FirstOrder, warnings })
}

/// `(T²/4)(2‖H_B‖‖H_SB‖ + ‖H_SB‖²)`.
pub fn second_order_bound(h_sb_norm: f64, h_b_norm: f64, t: f64) -> f64 {
    t * t / 4.0 * (2.0 * h_b_norm * h_sb_norm + h_sb_norm * h_sb_norm)
}
