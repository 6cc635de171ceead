use std::collections::HashMap;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::{Arc, RwLock};

use nalgebra::DVector;
use num_complex::Complex64;

use super::dense::{hermiticity_residual, is_hermitian};
use super::{DenseOperator, Matrix, C64};
use crate::error::{Error, Result};

/// Relative Hermiticity tolerance applied before eigendecomposition.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Margin below π at which a logarithm eigenphase is considered ambiguous.
pub const BRANCH_MARGIN: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct HermitianSpectrum {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: Matrix,
}

impl HermitianSpectrum {
    pub fn of(h: &Matrix) -> Result<Self> {
        if !is_hermitian(h, HERMITIAN_TOL) {
            return Err(Error::NotHermitian { residual: hermiticity_residual(h) });
        }
        let sym = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = sym.symmetric_eigen();
        Ok(HermitianSpectrum { eigenvalues: eig.eigenvalues, eigenvectors: eig.eigenvectors })
    }

    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V diag(f(λ)) V†`.
    pub fn apply<F: Fn(f64) -> C64>(&self, f: F) -> Matrix {
        let mut scaled = self.eigenvectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= f(self.eigenvalues[j]);
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// `exp(−iHt)`.
    pub fn propagator(&self, t: f64) -> Matrix {
        self.apply(|l| Complex64::from_polar(1.0, -l * t))
    }
}

pub fn unitary_exponential(h: &DenseOperator, t: f64) -> Result<DenseOperator> {
    let spec = HermitianSpectrum::of(h.matrix())?;
    DenseOperator::new(h.space(), spec.propagator(t))
}

/// Hash of a matrix's shape and entry bit patterns, for cache keys.
pub fn matrix_key(m: &Matrix) -> u64 {
    let mut h = DefaultHasher::new();
    m.shape().hash(&mut h);
    for z in m.iter() {
        z.re.to_bits().hash(&mut h);
        z.im.to_bits().hash(&mut h);
    }
    h.finish()
}

/// Concurrent cache of Hermitian eigendecompositions keyed by Hamiltonian.
#[derive(Default)]
pub struct SpectralCache {
    entries: RwLock<HashMap<u64, Vec<(Matrix, Arc<HermitianSpectrum>)>>>,
}

impl SpectralCache {
    pub fn new() -> Self {
        SpectralCache::default()
    }

    pub fn spectrum(&self, h: &Matrix) -> Result<Arc<HermitianSpectrum>> {
        let key = matrix_key(h);
        {
            let read = self.entries.read().expect("spectral cache poisoned");
            if let Some(bucket) = read.get(&key) {
                if let Some((_, s)) = bucket.iter().find(|(m, _)| m == h) {
                    return Ok(Arc::clone(s));
                }
            }
        }
        let spec = Arc::new(HermitianSpectrum::of(h)?);
        let mut write = self.entries.write().expect("spectral cache poisoned");
        let bucket = write.entry(key).or_default();
        if let Some((_, s)) = bucket.iter().find(|(m, _)| m == h) {
            return Ok(Arc::clone(s));
        }
        bucket.push((h.clone(), Arc::clone(&spec)));
        Ok(spec)
    }

    pub fn propagator(&self, h: &Matrix, t: f64) -> Result<Matrix> {
        Ok(self.spectrum(h)?.propagator(t))
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("spectral cache poisoned").values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Hermitian `Φ` with `u = exp(−iΦ)`, eigenphases on the principal branch.
///
/// Fails when an eigenphase of `u` lies within [`BRANCH_MARGIN`] of ±π.
pub fn unitary_log(u: &Matrix) -> Result<Matrix> {
    let n = u.nrows();
    if n == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    let (q, t) = u.clone().schur().unpack();
    let mut phases = Vec::with_capacity(n);
    for j in 0..n {
        let z = t[(j, j)];
        if (z.norm() - 1.0).abs() > 1e-8 {
            return Err(Error::Numerical(format!("eigenvalue {z} of a supposed unitary")));
        }
        let phase = z.arg();
        if phase.abs() > std::f64::consts::PI - BRANCH_MARGIN {
            return Err(Error::BranchAmbiguity { phase });
        }
        phases.push(phase);
    }
    let mut scaled = q.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= Complex64::new(-phases[j], 0.0);
    }
    let phi = scaled * q.adjoint();
    Ok((&phi + phi.adjoint()) * Complex64::new(0.5, 0.0))
}
