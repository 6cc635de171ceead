//! Piecewise-constant control schedules with role tags and parallel layers.
//!
//! Segment Hamiltonians are in absolute energy units; a segment lasts
//! `duration_multiplier * tau`. Segments of one layer run back to back from
//! t = 0 and layers run in parallel. The gating drift is an always-on system
//! Hamiltonian that belongs to the nominal gate.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::balance::{reverse_conjugate_profile, stretch_profile, ControlProfile};
use crate::error::{Error, Result};
use crate::group::{DecouplingGroup, GroupRepresentation, Role, SequenceSpec};
use crate::operator::{Matrix, Pauli, PauliString, PauliSum, SpectralCache};

const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub role: Role,
    pub token: String,
    pub layer: u8,
    pub duration_multiplier: f64,
    pub hamiltonian: PauliSum,
}

/// Maximal time window over which no layer switches.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub start: f64,
    pub duration: f64,
    /// Sum of the active segment Hamiltonians and the gating drift.
    pub hamiltonian: PauliSum,
    pub segments: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlSchedule {
    pub id: String,
    pub n_qubits: usize,
    pub tau: f64,
    pub gating_drift: PauliSum,
    pub segments: Vec<Segment>,
}

/// Collective π-pulse realizing a Pauli generator: `(π/2τ) Σ_{i∈supp} P_i`.
pub fn generator_pulse(p: &PauliString, tau: f64) -> PauliSum {
    let n = p.n_qubits();
    let mut sum = PauliSum::zero(n);
    for (q, label) in p.labels().iter().enumerate() {
        if *label != Pauli::I {
            sum.push(FRAC_PI_2 / tau, &PauliString::single(n, q, *label)).expect("same register");
        }
    }
    sum
}

impl ControlSchedule {
    pub fn new(id: impl Into<String>, n_qubits: usize, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidArgument(format!("tau must be positive, got {tau}")));
        }
        Ok(ControlSchedule {
            id: id.into(),
            n_qubits,
            tau,
            gating_drift: PauliSum::zero(n_qubits),
            segments: Vec::new(),
        })
    }

    pub fn push(&mut self, role: Role, token: &str, layer: u8, duration_multiplier: f64, hamiltonian: PauliSum) {
        self.segments.push(Segment { role, token: token.to_string(), layer, duration_multiplier, hamiltonian });
    }

    /// Profile segments lasting an integer number of τ are digitized into
    /// unit-τ pieces, so a stretched Q_half occupies two τ slots.
    fn push_profile(&mut self, role: Role, token: &str, layer: u8, profile: &ControlProfile) {
        for s in &profile.segments {
            let m = s.duration / self.tau;
            let whole = m.round();
            if whole >= 2.0 && (m - whole).abs() < 1e-9 * m {
                for _ in 0..whole as usize {
                    self.push(role, token, layer, 1.0, s.hamiltonian());
                }
            } else {
                self.push(role, token, layer, m, s.hamiltonian());
            }
        }
    }

    /// Expands a symbolic sequence. `q` realizes the Q, I_Q and Q_half tokens.
    pub fn from_sequence(
        id: impl Into<String>,
        seq: &SequenceSpec,
        group: &DecouplingGroup,
        rep: &GroupRepresentation,
        q: Option<&ControlProfile>,
        tau: f64,
        layer: u8,
    ) -> Result<Self> {
        let mut out = ControlSchedule::new(id, rep.n_qubits(), tau)?;
        let need_q = || q.ok_or_else(|| Error::InvalidArgument("sequence uses Q but no profile given".into()));
        for t in &seq.tokens {
            match t.role {
                Role::Generator => {
                    let j = group
                        .generator_index(&t.token)
                        .ok_or_else(|| Error::InvalidArgument(format!("unknown generator {:?}", t.token)))?;
                    let p = rep.element(group.generators()[j]);
                    out.push(Role::Generator, &t.token, layer, t.duration_multiplier as f64, generator_pulse(p, tau));
                }
                Role::IdentityArm => {
                    let q = need_q()?;
                    out.push_profile(Role::IdentityArm, "Q", layer, q);
                    out.push_profile(Role::IdentityArm, "Q'", layer, &reverse_conjugate_profile(q));
                }
                Role::QHalf => out.push_profile(Role::QHalf, "Q_half", layer, &stretch_profile(need_q()?, 2.0)?),
                Role::Q => out.push_profile(Role::Q, "Q", layer, need_q()?),
                Role::Free => {
                    out.push(Role::Free, &t.token, layer, t.duration_multiplier as f64, PauliSum::zero(rep.n_qubits()))
                }
            }
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidArgument(format!("tau must be positive, got {}", self.tau)));
        }
        if self.gating_drift.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch("gating drift register".into()));
        }
        for (i, s) in self.segments.iter().enumerate() {
            if !(s.duration_multiplier > 0.0 && s.duration_multiplier.is_finite()) {
                return Err(Error::InvalidArgument(format!("segment {i} has multiplier {}", s.duration_multiplier)));
            }
            if s.hamiltonian.n_qubits() != self.n_qubits {
                return Err(Error::DimensionMismatch(format!("segment {i} register")));
            }
        }
        Ok(())
    }

    pub fn layers(&self) -> Vec<u8> {
        let mut layers: Vec<u8> = self.segments.iter().map(|s| s.layer).collect();
        layers.sort_unstable();
        layers.dedup();
        layers
    }

    fn layer_multiplier(&self, layer: u8) -> f64 {
        self.segments.iter().filter(|s| s.layer == layer).map(|s| s.duration_multiplier).sum()
    }

    pub fn total_multiplier(&self) -> f64 {
        self.layers().into_iter().map(|l| self.layer_multiplier(l)).fold(0.0, f64::max)
    }

    pub fn duration(&self) -> f64 {
        self.total_multiplier() * self.tau
    }

    pub fn segment_duration(&self, i: usize) -> f64 {
        self.segments[i].duration_multiplier * self.tau
    }

    /// Piecewise-constant decomposition of the combined layers.
    pub fn intervals(&self) -> Vec<Interval> {
        let layers = self.layers();
        if layers.len() <= 1 {
            let mut start = 0.0;
            return self
                .segments
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let iv = Interval {
                        start: start * self.tau,
                        duration: s.duration_multiplier * self.tau,
                        hamiltonian: s.hamiltonian.plus(&self.gating_drift).expect("validated register"),
                        segments: vec![i],
                    };
                    start += s.duration_multiplier;
                    iv
                })
                .collect();
        }
        // (start, end, index) per layer, in multiplier units
        let mut spans: Vec<Vec<(f64, f64, usize)>> = Vec::new();
        let mut bounds = vec![0.0];
        for &l in &layers {
            let mut t = 0.0;
            let mut v = Vec::new();
            for (i, s) in self.segments.iter().enumerate().filter(|(_, s)| s.layer == l) {
                v.push((t, t + s.duration_multiplier, i));
                t += s.duration_multiplier;
                bounds.push(t);
            }
            spans.push(v);
        }
        bounds.sort_by(|a, b| a.partial_cmp(b).expect("finite multipliers"));
        bounds.dedup_by(|a, b| (*a - *b).abs() < BOUNDARY_TOL);
        let mut out = Vec::new();
        for w in bounds.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let mut h = self.gating_drift.clone();
            let mut active = Vec::new();
            for layer in &spans {
                if let Some(&(_, _, i)) = layer.iter().find(|(a, b, _)| *a <= mid && mid < *b) {
                    h = h.plus(&self.segments[i].hamiltonian).expect("validated register");
                    active.push(i);
                }
            }
            out.push(Interval { start: w[0] * self.tau, duration: (w[1] - w[0]) * self.tau, hamiltonian: h, segments: active });
        }
        out
    }

    /// Closed-system propagator including the gating drift.
    pub fn gate_unitary(&self) -> Result<Matrix> {
        self.validate()?;
        let cache = SpectralCache::new();
        let d = 1usize << self.n_qubits;
        let mut u = Matrix::identity(d, d);
        for iv in self.intervals() {
            u = cache.propagator(&iv.hamiltonian.matrix(), iv.duration)? * u;
        }
        Ok(u)
    }

    /// Propagators of the individual intervals, in application order.
    pub fn interval_unitaries(&self) -> Result<Vec<Matrix>> {
        self.validate()?;
        let cache = SpectralCache::new();
        self.intervals().iter().map(|iv| cache.propagator(&iv.hamiltonian.matrix(), iv.duration)).collect()
    }

    pub fn without_segment(&self, i: usize) -> ControlSchedule {
        let mut out = self.clone();
        out.segments.remove(i);
        out.id = format!("{}-minus-{i}", self.id);
        out
    }

    /// Single- and multi-qubit terms of one gate segment must touch disjoint qubits.
    pub fn check_divided_control(&self) -> Result<()> {
        for (i, s) in self.segments.iter().enumerate() {
            if s.role == Role::Generator || s.role == Role::Free {
                continue;
            }
            let (single, multi) = s.hamiltonian.support_by_arity();
            let overlap: Vec<usize> = single.iter().copied().filter(|q| multi.contains(q)).collect();
            if !overlap.is_empty() {
                return Err(Error::DividedControl { segment: i, qubits: overlap });
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("# role:token:duration_multiplier:layer:hamiltonian\n");
        out.push_str(&format!("id={}\n", self.id));
        out.push_str(&format!("n_qubits={}\n", self.n_qubits));
        out.push_str(&format!("tau={:?}\n", self.tau));
        out.push_str(&format!("drift={}\n", self.gating_drift.to_text()));
        for s in &self.segments {
            out.push_str(&format!(
                "{}:{}:{:?}:{}:{}\n",
                s.role,
                s.token,
                s.duration_multiplier,
                s.layer,
                s.hamiltonian.to_text()
            ));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut id = None;
        let mut n_qubits = None;
        let mut tau = None;
        let mut drift_text = None;
        let mut rows = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let err = |message: String| Error::Parse { line: i + 1, message };
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some((key, value)) = line.split_once('=') {
                if !key.contains(':') {
                    match key.trim() {
                        "id" => id = Some(value.trim().to_string()),
                        "n_qubits" => n_qubits = Some(value.trim().parse::<usize>().map_err(|e| err(e.to_string()))?),
                        "tau" => tau = Some(value.trim().parse::<f64>().map_err(|e| err(e.to_string()))?),
                        "drift" => drift_text = Some((i + 1, value.to_string())),
                        other => return Err(err(format!("unknown header key {other:?}"))),
                    }
                    continue;
                }
            }
            let parts: Vec<&str> = line.splitn(5, ':').collect();
            if parts.len() != 5 {
                return Err(err(format!("expected role:token:duration_multiplier:layer:hamiltonian, got {line:?}")));
            }
            rows.push((i + 1, parts.iter().map(|s| s.to_string()).collect::<Vec<_>>()));
        }
        let missing = |k: &str| Error::Parse { line: 0, message: format!("missing header {k}") };
        let n = n_qubits.ok_or_else(|| missing("n_qubits"))?;
        let tau = tau.ok_or_else(|| missing("tau"))?;
        let mut sched = ControlSchedule::new(id.unwrap_or_else(|| "schedule".into()), n, tau)
            .map_err(|e| Error::Parse { line: 0, message: e.to_string() })?;
        if let Some((line, t)) = drift_text {
            sched.gating_drift = PauliSum::parse(n, &t).map_err(|e| Error::Parse { line, message: e.to_string() })?;
        }
        for (line, p) in rows {
            let err = |e: String| Error::Parse { line, message: e };
            let role: Role = p[0].parse().map_err(|e: Error| err(e.to_string()))?;
            let mult: f64 = p[2].parse().map_err(|_| err(format!("bad multiplier {:?}", p[2])))?;
            let layer: u8 = p[3].parse().map_err(|_| err(format!("bad layer {:?}", p[3])))?;
            let h = PauliSum::parse(n, &p[4]).map_err(|e| err(e.to_string()))?;
            sched.push(role, &p[1], layer, mult, h);
        }
        sched.validate().map_err(|e| Error::Parse { line: 0, message: e.to_string() })?;
        Ok(sched)
    }
}
