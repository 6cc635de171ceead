use num_complex::Complex64;

use super::dense::is_hermitian;
use super::spectral::HermitianSpectrum;
use super::{Matrix, C64};
use crate::error::{Error, Result};

pub const STATE_TOL: f64 = 1e-10;

fn check_density(rho: &Matrix) -> Result<HermitianSpectrum> {
    if !rho.is_square() {
        return Err(Error::InvalidState(format!("non-square {:?}", rho.shape())));
    }
    if !is_hermitian(rho, STATE_TOL) {
        return Err(Error::InvalidState("not Hermitian".into()));
    }
    let tr = rho.trace();
    if (tr - Complex64::new(1.0, 0.0)).norm() > STATE_TOL {
        return Err(Error::InvalidState(format!("trace {tr}")));
    }
    let spec = HermitianSpectrum::of(rho)?;
    let min = spec.eigenvalues.min();
    if min < -STATE_TOL {
        return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
    }
    Ok(spec)
}

/// `Tr √(√ρ₁ ρ₂ √ρ₁)`, clamped to [0, 1].
pub fn uhlmann_fidelity(rho1: &Matrix, rho2: &Matrix) -> Result<f64> {
    if rho1.shape() != rho2.shape() {
        return Err(Error::DimensionMismatch(format!(
            "states of shape {:?} and {:?}",
            rho1.shape(),
            rho2.shape()
        )));
    }
    let s1 = check_density(rho1)?;
    check_density(rho2)?;
    let sqrt1 = s1.apply(|l| Complex64::new(l.max(0.0).sqrt(), 0.0));
    let inner = &sqrt1 * rho2 * &sqrt1;
    let inner = (&inner + inner.adjoint()) * Complex64::new(0.5, 0.0);
    let f: f64 = inner.symmetric_eigenvalues().iter().map(|l| l.max(0.0).sqrt()).sum();
    Ok(f.clamp(0.0, 1.0))
}

/// Fidelity of `rho` with the pure state `psi`: `√⟨ψ|ρ|ψ⟩`.
///
/// Equal to [`uhlmann_fidelity`] against `|ψ⟩⟨ψ|` but avoids the matrix
/// square root, which loses digits near unit fidelity.
pub fn pure_state_fidelity(rho: &Matrix, psi: &[C64]) -> Result<f64> {
    if rho.nrows() != psi.len() || !rho.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "state of shape {:?} against vector of length {}",
            rho.shape(),
            psi.len()
        )));
    }
    check_density(rho)?;
    let mut overlap = Complex64::new(0.0, 0.0);
    for i in 0..psi.len() {
        for j in 0..psi.len() {
            overlap += psi[i].conj() * rho[(i, j)] * psi[j];
        }
    }
    Ok(overlap.re.max(0.0).sqrt().min(1.0))
}

pub fn projector(psi: &[C64]) -> Matrix {
    let n = psi.len();
    Matrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj())
}
