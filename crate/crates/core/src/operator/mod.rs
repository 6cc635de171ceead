//! Dense operator algebra on a factored system ⊗ bath space.

pub mod dense;
pub mod fidelity;
pub mod pauli;
pub mod random;
pub mod spectral;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Matrix = DMatrix<C64>;

pub use dense::{
    assemble, mod_b_reduce, operator_norm, reduce_to_system, spectral_norm, DenseOperator,
    HamiltonianSpec, HamiltonianTerm, JointSpace,
};
pub use fidelity::{pure_state_fidelity, uhlmann_fidelity};
pub use pauli::{Pauli, PauliString, PauliSum};
pub use spectral::{unitary_exponential, unitary_log, HermitianSpectrum, SpectralCache};

/// Spectral distance between two unitaries after removing the best global phase.
pub fn phase_insensitive_distance(a: &Matrix, b: &Matrix) -> f64 {
    let overlap = (b.adjoint() * a).trace();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
    spectral_norm(&(a - b * phase))
}

pub fn c(re: f64) -> C64 {
    Complex64::new(re, 0.0)
}
