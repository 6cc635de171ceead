//! Experiment configuration files (TOML or JSON) and the compact gate and
//! angle syntax used on the command line. Qubits are 1-based here.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{Pauli, PauliSum};
use crate::spinbath::{ControlErrorModel, FitWindowPolicy, GateSpec, SweepConfig, DEFAULT_DIMENSION_CAP, INFIDELITY_FLOOR};

/// A scalar or a list of scalars.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(xs) => xs.clone(),
        }
    }
}

/// An angle given as a number or as text such as `pi/4`, `3pi/8`, `-pi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Radians(f64),
    Text(String),
}

impl Angle {
    pub fn radians(&self) -> Result<f64> {
        match self {
            Angle::Radians(x) => Ok(*x),
            Angle::Text(s) => parse_angle(s),
        }
    }
}

/// Parses `[coef][*]pi[/den]` or a plain number with an optional `/den`.
pub fn parse_angle(text: &str) -> Result<f64> {
    let bad = || Error::InvalidArgument(format!("cannot read angle {text:?}"));
    let s: String = text.trim().to_ascii_lowercase().chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(bad());
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (s.as_str(), 1.0),
    };
    let value = match num.strip_suffix("pi").or_else(|| num.strip_suffix('π')) {
        Some(coef) => {
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let c = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            c * PI
        }
        None => num.parse::<f64>().map_err(|_| bad())?,
    };
    let out = value / den;
    if !out.is_finite() {
        return Err(bad());
    }
    Ok(out)
}

/// Gate selection: `kind` is `x`, `y`, `z`, `heisenberg` or `sqrt_swap`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateConfig {
    pub kind: String,
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Angle>,
}

impl GateConfig {
    /// Reads `kind:qubits[:theta]`, e.g. `x:1:pi/4` or `heisenberg:1,2:pi/8`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidArgument(format!("gate {spec:?}: {why}"));
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() < 2 || parts.len() > 3 {
            return Err(bad("expected kind:qubits[:theta]"));
        }
        let qubits = parts[1]
            .split(',')
            .map(|q| q.trim().parse::<usize>().map_err(|_| bad("qubits are 1-based integers")))
            .collect::<Result<Vec<_>>>()?;
        let theta = parts.get(2).map(|t| Angle::Text(t.to_string()));
        let out = GateConfig { kind: parts[0].trim().to_ascii_lowercase(), qubits, theta };
        out.to_gate()?;
        Ok(out)
    }

    pub fn to_gate(&self) -> Result<GateSpec> {
        let bad = |why: String| Error::InvalidArgument(format!("gate {}: {why}", self.kind));
        if self.qubits.contains(&0) {
            return Err(bad("qubits are numbered from 1".into()));
        }
        let theta = self.theta.as_ref().map(Angle::radians).transpose()?;
        let one = |q: &[usize]| match q {
            [q] => Ok(q - 1),
            _ => Err(bad(format!("needs exactly one qubit, got {}", q.len()))),
        };
        let two = |q: &[usize]| match q {
            [i, j] if i != j => Ok((i - 1, j - 1)),
            _ => Err(bad("needs two distinct qubits".into())),
        };
        let need_theta = || theta.ok_or_else(|| bad("missing angle".into()));
        match self.kind.as_str() {
            "x" | "y" | "z" => {
                let axis = match self.kind.as_str() {
                    "x" => Pauli::X,
                    "y" => Pauli::Y,
                    _ => Pauli::Z,
                };
                Ok(GateSpec::Rotation { qubit: one(&self.qubits)?, axis, theta: need_theta()? })
            }
            "heisenberg" => Ok(GateSpec::Heisenberg { qubits: two(&self.qubits)?, theta: need_theta()? }),
            "sqrt_swap" => {
                let (i, j) = two(&self.qubits)?;
                let g = GateSpec::sqrt_swap(i, j);
                match theta {
                    Some(t) if (t - g.theta()).abs() > 1e-15 => Err(bad("sqrt_swap has a fixed angle".into())),
                    _ => Ok(g),
                }
            }
            other => Err(bad(format!("unknown gate kind {other:?}"))),
        }
    }

    /// Smallest register holding the gate.
    pub fn min_qubits(&self) -> usize {
        self.qubits.iter().copied().max().unwrap_or(1)
    }
}

/// τ grid: an explicit list or `points` log-spaced values in `[min, max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TauGrid {
    List(Vec<f64>),
    LogSpaced { min: f64, max: f64, points: usize },
}

impl TauGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        match *self {
            TauGrid::List(ref v) => Ok(v.clone()),
            TauGrid::LogSpaced { min, max, points } => {
                if !(min > 0.0 && max >= min && min.is_finite() && max.is_finite()) {
                    return Err(Error::InvalidArgument(format!("log-spaced grid needs 0 < min <= max, got [{min}, {max}]")));
                }
                Ok(match points {
                    0 => Vec::new(),
                    1 => vec![min],
                    p => {
                        let (a, b) = (min.ln(), max.ln());
                        (0..p).map(|i| (a + (b - a) * i as f64 / (p - 1) as f64).exp()).collect()
                    }
                })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorModelConfig {
    /// `none`, `fixed_systematic`, `scaled_systematic` or `random_overrotation`.
    pub kind: String,
    #[serde(default = "zero_list")]
    pub epsilon: OneOrMany<f64>,
    /// Deviation Hamiltonian in PauliSum text form, e.g. `1*XI + 0.5*IZ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_dev: Option<String>,
    #[serde(default)]
    pub width: f64,
    #[serde(default)]
    pub seed: u64,
}

fn zero_list() -> OneOrMany<f64> {
    OneOrMany::Many(vec![0.0])
}

impl Default for ErrorModelConfig {
    fn default() -> Self {
        ErrorModelConfig { kind: "none".into(), epsilon: zero_list(), h_dev: None, width: 0.0, seed: 0 }
    }
}

impl ErrorModelConfig {
    pub fn to_model(&self, n: usize) -> Result<ControlErrorModel> {
        let eps = self.epsilon.to_vec().first().copied().unwrap_or(0.0);
        let model = match self.kind.as_str() {
            "none" => ControlErrorModel::None,
            "fixed_systematic" => ControlErrorModel::FixedSystematic { epsilon: eps },
            "scaled_systematic" => {
                let text = self
                    .h_dev
                    .as_deref()
                    .ok_or_else(|| Error::InvalidArgument("scaled_systematic needs h_dev".into()))?;
                let h_dev = PauliSum::parse(n, text)?;
                ControlErrorModel::ScaledSystematic { epsilon: eps, h_dev }
            }
            "random_overrotation" => ControlErrorModel::RandomOverrotation { epsilon: eps, width: self.width, seed: self.seed },
            other => return Err(Error::InvalidArgument(format!("unknown error model {other:?}"))),
        };
        model.validate()?;
        Ok(model)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    /// Points with DCG infidelity below this are left out of slope fits.
    #[serde(default = "default_min_infidelity")]
    pub min_infidelity: f64,
}

fn default_min_infidelity() -> f64 {
    INFIDELITY_FLOOR
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { min_infidelity: INFIDELITY_FLOOR }
    }
}

fn default_cap() -> usize {
    DEFAULT_DIMENSION_CAP
}

fn unit() -> OneOrMany<f64> {
    OneOrMany::One(1.0)
}

/// Spin-bath experiment description shared by `sweep` and `simulate`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_cap")]
    pub dimension_cap: usize,
    #[serde(default)]
    pub thresholds: Thresholds,
    pub n: usize,
    #[serde(rename = "n_B")]
    pub n_b: usize,
    #[serde(rename = "Gamma", default = "unit")]
    pub gamma: OneOrMany<f64>,
    #[serde(rename = "A", default = "unit")]
    pub a: OneOrMany<f64>,
    pub tau_grid: TauGrid,
    pub gate: GateConfig,
    #[serde(default)]
    pub error_model: ErrorModelConfig,
    #[serde(default)]
    pub fit_window_policy: FitWindowPolicy,
}

impl ExperimentConfig {
    /// Reads JSON when the extension is `.json`, TOML otherwise.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            serde_json::from_str(&text).map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| text[..s.start.min(text.len())].lines().count().max(1)).unwrap_or(0);
            Error::Parse { line, message: e.message().to_string() }
        })
    }

    /// Snapshot written beside every output.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn to_sweep(&self) -> Result<SweepConfig> {
        let gate = self.gate.to_gate()?;
        gate.generator(self.n)?;
        if self.seeds.is_empty() {
            return Err(Error::InvalidArgument("at least one explicit seed is required".into()));
        }
        let mut cfg = SweepConfig::new(self.n, self.n_b, gate, self.tau_grid.values()?, self.seeds.clone());
        cfg.gamma = self.gamma.to_vec();
        cfg.a = self.a.to_vec();
        cfg.error_model = self.error_model.to_model(self.n)?;
        cfg.epsilons = self.error_model.epsilon.to_vec();
        cfg.fit_window_policy = self.fit_window_policy.clone();
        cfg.dimension_cap = self.dimension_cap;
        cfg.min_infidelity = self.thresholds.min_infidelity;
        cfg.validate()?;
        Ok(cfg)
    }
}
