//! Seeded random operators used by samplers and tests.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::dense::spectral_norm;
use super::Matrix;

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Matrix {
    Matrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// GUE-like Hermitian matrix normalized to unit spectral norm.
pub fn unit_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Matrix {
    let g = ginibre(rng, dim);
    let h = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    let norm = spectral_norm(&h);
    if norm == 0.0 {
        return Matrix::identity(dim, dim);
    }
    h / Complex64::new(norm, 0.0)
}

/// Haar-distributed unitary via QR of a Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Matrix {
    let qr = ginibre(rng, dim).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Random density operator of full rank.
pub fn density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Matrix {
    let g = ginibre(rng, dim);
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}
