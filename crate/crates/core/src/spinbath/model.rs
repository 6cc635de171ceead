use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{assemble, DenseOperator, HamiltonianSpec, JointSpace, Pauli, PauliString};

pub const DEFAULT_DIMENSION_CAP: usize = 1024;

/// Random dipolar bath of `n_b` spins hyperfine-coupled to `n` qubits.
///
/// Spin vectors use `S = σ/2` and `I = σ/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinBathModel {
    pub n: usize,
    pub n_b: usize,
    pub gamma: f64,
    pub a: f64,
    pub seed: u64,
    /// `gamma_couplings[i][j]` for `i < j`; other entries are zero.
    pub gamma_couplings: Vec<Vec<f64>>,
    /// `hyperfine_couplings[i][k]` couples qubit `i` to bath spin `k`.
    pub hyperfine_couplings: Vec<Vec<f64>>,
}

fn uniform<R: Rng>(rng: &mut R, scale: f64) -> f64 {
    scale * (2.0 * rng.random::<f64>() - 1.0)
}

pub fn sample_bath_model(n: usize, n_b: usize, gamma: f64, a: f64, seed: u64, dimension_cap: usize) -> Result<SpinBathModel> {
    if n == 0 || n_b == 0 {
        return Err(Error::InvalidArgument(format!("need n >= 1 and n_B >= 1, got {n} and {n_b}")));
    }
    if !(gamma >= 0.0 && gamma.is_finite() && a >= 0.0 && a.is_finite()) {
        return Err(Error::InvalidArgument(format!("coupling scales must be finite and >= 0, got Gamma={gamma} A={a}")));
    }
    if n + n_b >= usize::BITS as usize / 2 {
        return Err(Error::DimensionCap { dimension: usize::MAX, cap: dimension_cap });
    }
    JointSpace::new(n, 1 << n_b)?.check_cap(dimension_cap)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gamma_couplings = vec![vec![0.0; n_b]; n_b];
    for i in 0..n_b {
        for j in i + 1..n_b {
            gamma_couplings[i][j] = uniform(&mut rng, gamma);
        }
    }
    let hyperfine_couplings = (0..n).map(|_| (0..n_b).map(|_| uniform(&mut rng, a)).collect()).collect();
    Ok(SpinBathModel { n, n_b, gamma, a, seed, gamma_couplings, hyperfine_couplings })
}

impl SpinBathModel {
    pub fn space(&self) -> JointSpace {
        JointSpace::new(self.n, 1 << self.n_b).expect("validated at sampling")
    }
}

fn bath_pair(n_b: usize, k: usize, l: usize, p: Pauli) -> nalgebra::DMatrix<num_complex::Complex64> {
    PauliString::on(n_b, &[k, l], p).matrix()
}

/// `(H_B, H_SB)` on the joint space.
pub fn build_internal_hamiltonian(model: &SpinBathModel) -> Result<(DenseOperator, DenseOperator)> {
    let space = model.space();
    let (n, n_b) = (model.n, model.n_b);
    let mut hb = HamiltonianSpec::new();
    for i in 0..n_b {
        for j in i + 1..n_b {
            let g = model.gamma_couplings[i][j];
            if g == 0.0 {
                continue;
            }
            // Γ (I_i·I_j − 3 I_z I_z) with I = σ/2
            hb.push(g / 4.0, PauliString::identity(n), Some(bath_pair(n_b, i, j, Pauli::X)));
            hb.push(g / 4.0, PauliString::identity(n), Some(bath_pair(n_b, i, j, Pauli::Y)));
            hb.push(-2.0 * g / 4.0, PauliString::identity(n), Some(bath_pair(n_b, i, j, Pauli::Z)));
        }
    }
    let mut hsb = HamiltonianSpec::new();
    for i in 0..n {
        for k in 0..n_b {
            let a = model.hyperfine_couplings[i][k];
            if a == 0.0 {
                continue;
            }
            for p in Pauli::NONTRIVIAL {
                hsb.push(a / 4.0, PauliString::single(n, i, p), Some(PauliString::single(n_b, k, p).matrix()));
            }
        }
    }
    Ok((assemble(&hb, space)?, assemble(&hsb, space)?))
}
