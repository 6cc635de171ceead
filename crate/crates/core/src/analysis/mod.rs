//! Toggling-frame error actions, Magnus sums, bounds and cancellation checks.

pub mod magnus;
pub mod nogo;
pub mod subspace;
pub mod verify;

pub use magnus::{
    compose_gate_errors, exact_error_action, exact_error_action_with, first_order_magnus,
    second_order_bound, ConvergenceCriterion, ErrorAction, OrderTag,
};
pub use nogo::{nogo_case, nogo_witness, NoGoCase, NoGoReport};
pub use subspace::ErrorSubspace;
pub use verify::{
    cancellation_residual, verify_first_order_cancellation, verify_first_order_cancellation_with,
    CancellationReport,
};
