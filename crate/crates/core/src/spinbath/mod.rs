//! Spin-bath case study: random dipolar bath, DCG vs. primitive gates,
//! control errors, rotating frame and parameter sweeps.

pub mod control_error;
pub mod gates;
pub mod model;
pub mod rotating;
pub mod simulate;
pub mod sweep;

pub use control_error::{apply_control_error, ControlErrorModel};
pub use gates::{dcg_schedule, dcg_schedule_for, edd_schedule, primitive_schedule, DecouplingModel, GateSpec};
pub use model::{build_internal_hamiltonian, sample_bath_model, SpinBathModel, DEFAULT_DIMENSION_CAP};
pub use rotating::{rotating_frame_transform, time_average_over_period};
pub use simulate::{
    default_input_state, gate_fidelity, improvement_ratio, run_point, simulate, Ratio, SimulationResult,
    SpinBathSimulator, INFIDELITY_FLOOR,
};
pub use sweep::{fit_slope, run_sweep, tau_star, to_csv, FitWindowPolicy, SweepConfig, SweepOutput, SweepSummary};
