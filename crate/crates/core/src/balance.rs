//! Balance pairs: the composite identity Q′Q and the stretched gate Q_{1/2}.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{Matrix, PauliSum, SpectralCache};

/// One rectangular segment: Hamiltonian `amplitude * generator` for `duration`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSegment {
    pub generator: PauliSum,
    pub amplitude: f64,
    pub duration: f64,
}

impl ProfileSegment {
    pub fn hamiltonian(&self) -> PauliSum {
        self.generator.scaled(self.amplitude)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlProfile {
    pub segments: Vec<ProfileSegment>,
    pub target: String,
}

impl ControlProfile {
    pub fn new(segments: Vec<ProfileSegment>, target: impl Into<String>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidArgument("a profile needs at least one segment".into()));
        }
        let n = segments[0].generator.n_qubits();
        for s in &segments {
            if !(s.duration > 0.0 && s.duration.is_finite()) {
                return Err(Error::InvalidArgument(format!("segment duration {}", s.duration)));
            }
            if !s.amplitude.is_finite() {
                return Err(Error::InvalidArgument(format!("segment amplitude {}", s.amplitude)));
            }
            if s.generator.n_qubits() != n {
                return Err(Error::DimensionMismatch("profile segments on different registers".into()));
            }
        }
        Ok(ControlProfile { segments, target: target.into() })
    }

    /// Single segment implementing `exp(−iθC)` in time `tau`.
    pub fn rotation(generator: PauliSum, theta: f64, tau: f64, target: impl Into<String>) -> Result<Self> {
        ControlProfile::new(vec![ProfileSegment { generator, amplitude: theta / tau, duration: tau }], target)
    }

    pub fn n_qubits(&self) -> usize {
        self.segments[0].generator.n_qubits()
    }

    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Closed-system propagator, first segment applied first.
    pub fn unitary(&self) -> Result<Matrix> {
        let cache = SpectralCache::new();
        let d = 1usize << self.n_qubits();
        let mut u = Matrix::identity(d, d);
        for s in &self.segments {
            u = cache.propagator(&s.hamiltonian().matrix(), s.duration)? * u;
        }
        Ok(u)
    }
}

pub fn reverse_conjugate_profile(p: &ControlProfile) -> ControlProfile {
    let segments = p
        .segments
        .iter()
        .rev()
        .map(|s| ProfileSegment { generator: s.generator.clone(), amplitude: -s.amplitude, duration: s.duration })
        .collect();
    ControlProfile { segments, target: format!("{}'", p.target) }
}

pub fn stretch_profile(p: &ControlProfile, factor: f64) -> Result<ControlProfile> {
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(Error::InvalidArgument(format!("stretch factor {factor}")));
    }
    let segments = p
        .segments
        .iter()
        .map(|s| ProfileSegment {
            generator: s.generator.clone(),
            amplitude: s.amplitude / factor,
            duration: s.duration * factor,
        })
        .collect();
    Ok(ControlProfile { segments, target: p.target.clone() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalancePair {
    pub identity_profile: ControlProfile,
    pub gate_profile: ControlProfile,
}

pub fn make_balance_pair(p: &ControlProfile) -> Result<BalancePair> {
    let mut identity = p.segments.clone();
    identity.extend(reverse_conjugate_profile(p).segments);
    Ok(BalancePair {
        identity_profile: ControlProfile::new(identity, "I")?,
        gate_profile: stretch_profile(p, 2.0)?,
    })
}
