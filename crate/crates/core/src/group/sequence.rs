use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::cayley::{build_cayley_graph, find_eulerian_cycle, CayleyGraph, EdgeLabel};
use super::{DecouplingGroup, GroupRepresentation};
use crate::error::{Error, Result};
use crate::operator::{DenseOperator, PauliString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    #[serde(rename = "generator")]
    Generator,
    #[serde(rename = "I_Q")]
    IdentityArm,
    #[serde(rename = "Q_half")]
    QHalf,
    #[serde(rename = "Q")]
    Q,
    #[serde(rename = "free")]
    Free,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Generator => "generator",
            Role::IdentityArm => "I_Q",
            Role::QHalf => "Q_half",
            Role::Q => "Q",
            Role::Free => "free",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "generator" => Ok(Role::Generator),
            "I_Q" => Ok(Role::IdentityArm),
            "Q_half" => Ok(Role::QHalf),
            "Q" => Ok(Role::Q),
            "free" => Ok(Role::Free),
            other => Err(Error::InvalidArgument(format!("unknown role {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceToken {
    pub role: Role,
    pub token: String,
    pub duration_multiplier: u32,
}

impl SequenceToken {
    pub fn generator(name: &str) -> Self {
        SequenceToken { role: Role::Generator, token: name.to_string(), duration_multiplier: 1 }
    }

    pub fn identity_arm(q: &str) -> Self {
        SequenceToken { role: Role::IdentityArm, token: q.to_string(), duration_multiplier: 2 }
    }

    pub fn q_half(q: &str) -> Self {
        SequenceToken { role: Role::QHalf, token: q.to_string(), duration_multiplier: 2 }
    }

    /// Symbol used in the right-to-left written form.
    pub fn symbol(&self) -> &str {
        match self.role {
            Role::IdentityArm => "I_Q",
            Role::QHalf => "Q_half",
            _ => &self.token,
        }
    }
}

/// Symbolic gate sequence in application order (first token acts first).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub tokens: Vec<SequenceToken>,
}

impl SequenceSpec {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn total_duration_multiplier(&self) -> u32 {
        self.tokens.iter().map(|t| t.duration_multiplier).sum()
    }

    pub fn application_order(&self) -> Vec<&str> {
        self.tokens.iter().map(SequenceToken::symbol).collect()
    }

    /// Operator-product form, rightmost factor applied first.
    pub fn written_form(&self) -> String {
        let mut symbols = self.application_order();
        symbols.reverse();
        symbols.join(" ")
    }

    pub fn count(&self, role: Role, token: &str) -> usize {
        self.tokens.iter().filter(|t| t.role == role && t.token == token).count()
    }

    /// One `role:token:duration_multiplier` line per token.
    pub fn to_text(&self) -> String {
        self.tokens
            .iter()
            .map(|t| format!("{}:{}:{}\n", t.role, t.token, t.duration_multiplier))
            .collect()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut tokens = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse { line: i + 1, message };
            let parts: Vec<&str> = line.split(':').collect();
            if parts.len() != 3 {
                return Err(parse_err(format!("expected role:token:duration_multiplier, got {line:?}")));
            }
            let role: Role = parts[0].parse().map_err(|e: Error| parse_err(e.to_string()))?;
            if parts[1].is_empty() {
                return Err(parse_err("empty token".into()));
            }
            let duration_multiplier =
                parts[2].parse().map_err(|_| parse_err(format!("bad multiplier {:?}", parts[2])))?;
            tokens.push(SequenceToken { role, token: parts[1].to_string(), duration_multiplier });
        }
        Ok(SequenceSpec { tokens })
    }
}

fn generator_tokens(group: &DecouplingGroup, graph: &CayleyGraph, cycle: &[usize]) -> Vec<(SequenceToken, usize)> {
    cycle
        .iter()
        .map(|&e| {
            let edge = graph.edges()[e];
            let EdgeLabel::Generator(j) = edge.label else {
                unreachable!("plain Cayley graphs carry only generator edges")
            };
            (SequenceToken::generator(&group.generator_names()[j]), edge.to)
        })
        .collect()
}

pub fn synthesize_edd(group: &DecouplingGroup, rep: &GroupRepresentation) -> Result<SequenceSpec> {
    check_rep(group, rep)?;
    let graph = build_cayley_graph(group)?;
    let cycle = find_eulerian_cycle(&graph)?;
    Ok(SequenceSpec { tokens: generator_tokens(group, &graph, &cycle).into_iter().map(|(t, _)| t).collect() })
}

pub fn synthesize_dcg(group: &DecouplingGroup, rep: &GroupRepresentation, q: &str) -> Result<SequenceSpec> {
    check_rep(group, rep)?;
    let graph = build_cayley_graph(group)?;
    let cycle = find_eulerian_cycle(&graph)?;
    synthesize_dcg_from_cycle(group, &graph, &cycle, q)
}

/// Inserts an I_Q arm on first arrival at every non-identity vertex of the
/// given Eulerian cycle and closes with Q_half at the identity.
pub fn synthesize_dcg_from_cycle(
    group: &DecouplingGroup,
    graph: &CayleyGraph,
    cycle: &[usize],
    q: &str,
) -> Result<SequenceSpec> {
    if q.trim().is_empty() || q.contains(':') {
        return Err(Error::InvalidArgument(format!("undefined target token {q:?}")));
    }
    let mut visited = vec![false; group.order()];
    visited[graph.identity()] = true;
    let mut tokens = Vec::new();
    for (t, to) in generator_tokens(group, graph, cycle) {
        tokens.push(t);
        if !visited[to] {
            visited[to] = true;
            tokens.push(SequenceToken::identity_arm(q));
        }
    }
    if visited.iter().any(|v| !v) {
        return Err(Error::Group("cycle does not visit every vertex".into()));
    }
    tokens.push(SequenceToken::q_half(q));
    Ok(SequenceSpec { tokens })
}

fn check_rep(group: &DecouplingGroup, rep: &GroupRepresentation) -> Result<()> {
    if rep.elements().len() != group.order() {
        return Err(Error::Group("representation does not match group order".into()));
    }
    Ok(())
}

/// `Σ_i G_i† E G_i` with every `G_i` embedded as `G_i ⊗ I_B`.
pub fn projection_superop(rep: &GroupRepresentation, e: &DenseOperator) -> Result<DenseOperator> {
    let space = e.space();
    if rep.n_qubits() != space.n_system_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "{}-qubit representation on {} system qubits",
            rep.n_qubits(),
            space.n_system_qubits()
        )));
    }
    let mut out = DenseOperator::zeros(space);
    for g in rep.elements() {
        let unit = PauliString::new(g.labels().to_vec(), num_complex::Complex64::new(1.0, 0.0));
        let gj = DenseOperator::pauli(space, &unit)?;
        out = out.add(&e.conjugate_by(&gj));
    }
    Ok(out)
}
