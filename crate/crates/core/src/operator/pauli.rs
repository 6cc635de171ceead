//! Single-qubit Pauli symbols, multi-qubit Pauli strings and real-weighted
//! Pauli sums. Qubit 0 is the most significant tensor factor.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Matrix, C64};
use crate::error::{Error, Result};

const ZERO: C64 = Complex64::new(0.0, 0.0);
const ONE: C64 = Complex64::new(1.0, 0.0);
const IM: C64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    pub const NONTRIVIAL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' | 'i' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn matrix(self) -> Matrix {
        let entries = match self {
            Pauli::I => [ONE, ZERO, ZERO, ONE],
            Pauli::X => [ZERO, ONE, ONE, ZERO],
            Pauli::Y => [ZERO, -IM, IM, ZERO],
            Pauli::Z => [ONE, ZERO, ZERO, -ONE],
        };
        Matrix::from_row_slice(2, 2, &entries)
    }

    /// Product `self * other` as `(phase, pauli)`.
    pub fn mul(self, other: Pauli) -> (C64, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (ONE, p),
            (a, b) if a == b => (ONE, I),
            (X, Y) => (IM, Z),
            (Y, X) => (-IM, Z),
            (Y, Z) => (IM, X),
            (Z, Y) => (-IM, X),
            (Z, X) => (IM, Y),
            (X, Z) => (-IM, Y),
            _ => unreachable!(),
        }
    }

    pub fn commutes_with(self, other: Pauli) -> bool {
        self == Pauli::I || other == Pauli::I || self == other
    }

    /// Action on a computational basis bit: returns (phase, flipped).
    fn act(self, bit: bool) -> (C64, bool) {
        match self {
            Pauli::I => (ONE, false),
            Pauli::X => (ONE, true),
            Pauli::Y => (if bit { -IM } else { IM }, true),
            Pauli::Z => (if bit { -ONE } else { ONE }, false),
        }
    }
}

/// Tensor product of single-qubit Paulis with a complex coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliString {
    labels: Vec<Pauli>,
    coefficient: C64,
}

impl PauliString {
    pub fn new(labels: Vec<Pauli>, coefficient: C64) -> Self {
        PauliString { labels, coefficient }
    }

    pub fn identity(n: usize) -> Self {
        PauliString::new(vec![Pauli::I; n], ONE)
    }

    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        let mut labels = vec![Pauli::I; n];
        labels[qubit] = p;
        PauliString::new(labels, ONE)
    }

    /// Pauli string with `p` on every listed qubit.
    pub fn on(n: usize, qubits: &[usize], p: Pauli) -> Self {
        let mut labels = vec![Pauli::I; n];
        for &q in qubits {
            labels[q] = p;
        }
        PauliString::new(labels, ONE)
    }

    pub fn uniform(n: usize, p: Pauli) -> Self {
        PauliString::new(vec![p; n], ONE)
    }

    pub fn labels(&self) -> &[Pauli] {
        &self.labels
    }

    pub fn coefficient(&self) -> C64 {
        self.coefficient
    }

    pub fn n_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn with_coefficient(mut self, c: C64) -> Self {
        self.coefficient = c;
        self
    }

    pub fn support(&self) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != Pauli::I)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn weight(&self) -> usize {
        self.labels.iter().filter(|p| **p != Pauli::I).count()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    /// Same Pauli operator up to the coefficient.
    pub fn same_operator(&self, other: &PauliString) -> bool {
        self.labels == other.labels
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .labels
            .iter()
            .zip(&other.labels)
            .filter(|(a, b)| !a.commutes_with(**b))
            .count();
        anti % 2 == 0
    }

    pub fn try_mul(&self, other: &PauliString) -> Result<PauliString> {
        if self.n_qubits() != other.n_qubits() {
            return Err(Error::DimensionMismatch(format!(
                "Pauli strings on {} and {} qubits",
                self.n_qubits(),
                other.n_qubits()
            )));
        }
        let mut phase = self.coefficient * other.coefficient;
        let labels = self
            .labels
            .iter()
            .zip(&other.labels)
            .map(|(a, b)| {
                let (ph, p) = a.mul(*b);
                phase *= ph;
                p
            })
            .collect();
        Ok(PauliString::new(labels, phase))
    }

    pub fn adjoint(&self) -> PauliString {
        PauliString::new(self.labels.clone(), self.coefficient.conj())
    }

    /// Dense 2^n × 2^n matrix including the coefficient.
    pub fn matrix(&self) -> Matrix {
        let n = self.n_qubits();
        let dim = 1usize << n;
        let mut m = Matrix::zeros(dim, dim);
        for col in 0..dim {
            let mut phase = self.coefficient;
            let mut row = col;
            for (q, p) in self.labels.iter().enumerate() {
                let shift = n - 1 - q;
                let bit = (col >> shift) & 1 == 1;
                let (ph, flip) = p.act(bit);
                phase *= ph;
                if flip {
                    row ^= 1 << shift;
                }
            }
            m[(row, col)] = phase;
        }
        m
    }

    pub fn label_string(&self) -> String {
        self.labels.iter().map(|p| p.symbol()).collect()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficient != ONE {
            write!(f, "({})*", self.coefficient)?;
        }
        f.write_str(&self.label_string())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::InvalidArgument("empty Pauli string".into()));
        }
        let labels = s
            .chars()
            .map(|c| {
                Pauli::from_char(c)
                    .ok_or_else(|| Error::InvalidArgument(format!("invalid Pauli symbol {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::new(labels, ONE))
    }
}

/// Real-weighted sum of Hermitian Pauli strings on the system register.
///
/// Text form: `w1*XI + w2*IZ`; the empty sum is written `0`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<(f64, Vec<Pauli>)>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        PauliSum { n_qubits, terms: Vec::new() }
    }

    pub fn from_terms(n_qubits: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        let mut sum = PauliSum::zero(n_qubits);
        for (w, p) in terms {
            sum.push(w, &p)?;
        }
        Ok(sum)
    }

    pub fn term(weight: f64, p: PauliString) -> Self {
        PauliSum { n_qubits: p.n_qubits(), terms: vec![(weight, p.labels)] }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> impl Iterator<Item = (f64, PauliString)> + '_ {
        self.terms.iter().map(|(w, l)| (*w, PauliString::new(l.clone(), ONE)))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.iter().all(|(w, _)| *w == 0.0)
    }

    /// Adds `weight * p`; the coefficient of `p` must be ±1.
    pub fn push(&mut self, weight: f64, p: &PauliString) -> Result<()> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "term on {} qubits added to a {}-qubit sum",
                p.n_qubits(),
                self.n_qubits
            )));
        }
        let c = p.coefficient();
        if c.im != 0.0 || c.re.abs() != 1.0 {
            return Err(Error::InvalidArgument(format!(
                "Pauli sum terms need a real unit coefficient, got {c}"
            )));
        }
        let w = weight * c.re;
        if let Some(t) = self.terms.iter_mut().find(|(_, l)| l.as_slice() == p.labels()) {
            t.0 += w;
        } else {
            self.terms.push((w, p.labels().to_vec()));
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> PauliSum {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(w, l)| (w * factor, l.clone())).collect(),
        }
    }

    pub fn plus(&self, other: &PauliSum) -> Result<PauliSum> {
        let mut out = self.clone();
        for (w, p) in other.terms() {
            out.push(w, &p)?;
        }
        Ok(out)
    }

    pub fn matrix(&self) -> Matrix {
        let dim = 1usize << self.n_qubits;
        let mut m = Matrix::zeros(dim, dim);
        for (w, p) in self.terms() {
            if w != 0.0 {
                m += p.matrix() * C64::new(w, 0.0);
            }
        }
        m
    }

    /// Qubits touched by weight-1 terms and by weight ≥ 2 terms.
    pub fn support_by_arity(&self) -> (Vec<usize>, Vec<usize>) {
        let mut single = Vec::new();
        let mut multi = Vec::new();
        for (w, labels) in &self.terms {
            if *w == 0.0 {
                continue;
            }
            let p = PauliString::new(labels.clone(), ONE);
            let supp = p.support();
            let target = if supp.len() == 1 { &mut single } else { &mut multi };
            for q in supp {
                if !target.contains(&q) {
                    target.push(q);
                }
            }
        }
        single.sort_unstable();
        multi.sort_unstable();
        (single, multi)
    }

    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self
            .terms
            .iter()
            .filter(|(w, _)| *w != 0.0)
            .map(|(w, l)| format!("{:?}*{}", w, l.iter().map(|p| p.symbol()).collect::<String>()))
            .collect();
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }

    pub fn parse(n_qubits: usize, text: &str) -> Result<PauliSum> {
        let mut sum = PauliSum::zero(n_qubits);
        let text = text.trim();
        if text == "0" || text.is_empty() {
            return Ok(sum);
        }
        for part in text.split(" + ") {
            let (w, labels) = part.trim().split_once('*').ok_or_else(|| {
                Error::InvalidArgument(format!("Pauli term {part:?} is not weight*LABELS"))
            })?;
            let w: f64 = w
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad weight {w:?}")))?;
            let p: PauliString = labels.parse()?;
            sum.push(w, &p)?;
        }
        Ok(sum)
    }
}

impl Serialize for PauliSum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            n_qubits: usize,
            terms: &'a str,
        }
        Repr { n_qubits: self.n_qubits, terms: &self.to_text() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PauliSum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            n_qubits: usize,
            terms: String,
        }
        let r = Repr::deserialize(d)?;
        PauliSum::parse(r.n_qubits, &r.terms).map_err(serde::de::Error::custom)
    }
}
