use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::operator::{Pauli, PauliString};

/// Finite group given by its multiplication table; element 0 is the identity.
/// `table[a][b]` is the index of `a·b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecouplingGroup {
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
    generators: Vec<usize>,
    generator_names: Vec<String>,
}

impl DecouplingGroup {
    pub fn new(
        labels: Vec<String>,
        table: Vec<Vec<usize>>,
        generators: Vec<usize>,
        generator_names: Vec<String>,
    ) -> Result<Self> {
        let d = labels.len();
        if d == 0 {
            return Err(Error::Group("a group needs at least the identity".into()));
        }
        if table.len() != d || table.iter().any(|row| row.len() != d) {
            return Err(Error::Group("multiplication table is not d x d".into()));
        }
        if generators.len() != generator_names.len() {
            return Err(Error::Group("one name per generator required".into()));
        }
        for a in 0..d {
            if table[0][a] != a || table[a][0] != a {
                return Err(Error::Group("element 0 is not the identity".into()));
            }
            let mut seen = vec![false; d];
            for &x in &table[a] {
                if x >= d || seen[x] {
                    return Err(Error::Group(format!("row {a} is not a permutation")));
                }
                seen[x] = true;
            }
        }
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::Group(format!("not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        if let Some(g) = generators.iter().find(|&&g| g >= d) {
            return Err(Error::Group(format!("generator index {g} out of range")));
        }
        Ok(DecouplingGroup { labels, table, generators, generator_names })
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generator_names.iter().position(|n| n == name)
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.table[a].iter().position(|&x| x == 0).expect("rows are permutations")
    }
}

/// Projective representation by Pauli strings: element `i` ↦ `G_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupRepresentation {
    elements: Vec<PauliString>,
}

impl GroupRepresentation {
    pub fn new(group: &DecouplingGroup, elements: Vec<PauliString>) -> Result<Self> {
        if elements.len() != group.order() {
            return Err(Error::Group(format!(
                "{} representatives for a group of order {}",
                elements.len(),
                group.order()
            )));
        }
        let n = elements[0].n_qubits();
        if !elements[0].is_identity() || elements.iter().any(|e| e.n_qubits() != n) {
            return Err(Error::Group("G_1 must be the identity on a common register".into()));
        }
        for a in 0..group.order() {
            for b in 0..group.order() {
                let prod = elements[a].try_mul(&elements[b])?;
                if !prod.same_operator(&elements[group.mul(a, b)]) {
                    return Err(Error::Group(format!(
                        "G_{a} G_{b} is not proportional to G_{}",
                        group.mul(a, b)
                    )));
                }
            }
        }
        Ok(GroupRepresentation { elements })
    }

    pub fn n_qubits(&self) -> usize {
        self.elements[0].n_qubits()
    }

    pub fn elements(&self) -> &[PauliString] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &PauliString {
        &self.elements[i]
    }
}

/// Closes a set of Pauli generators under multiplication modulo phase.
///
/// Elements are numbered in breadth-first order from the identity, applying
/// generators on the left in list order.
pub fn pauli_group(
    n_qubits: usize,
    generators: &[(&str, PauliString)],
) -> Result<(DecouplingGroup, GroupRepresentation)> {
    let strip = |p: &PauliString| PauliString::new(p.labels().to_vec(), num_complex::Complex64::new(1.0, 0.0));
    let mut elements = vec![PauliString::identity(n_qubits)];
    let mut queue = VecDeque::from([0usize]);
    let find = |els: &[PauliString], p: &PauliString| els.iter().position(|e| e.same_operator(p));
    while let Some(i) = queue.pop_front() {
        for (_, h) in generators {
            let next = strip(&h.try_mul(&elements[i])?);
            if find(&elements, &next).is_none() {
                elements.push(next);
                queue.push_back(elements.len() - 1);
            }
        }
    }
    let d = elements.len();
    let mut table = vec![vec![0; d]; d];
    for a in 0..d {
        for b in 0..d {
            let prod = elements[a].try_mul(&elements[b])?;
            table[a][b] = find(&elements, &prod).expect("closed under multiplication");
        }
    }
    let gens = generators
        .iter()
        .map(|(_, h)| find(&elements, h).expect("generator is an element"))
        .collect();
    let names = generators.iter().map(|(n, _)| n.to_string()).collect();
    let labels = elements.iter().map(PauliString::label_string).collect();
    let group = DecouplingGroup::new(labels, table, gens, names)?;
    let rep = GroupRepresentation::new(&group, elements)?;
    Ok((group, rep))
}

/// Abstract ℤ₂^m with one independent generator per entry; element `b` (a
/// bitmask over generators) is represented by the ordered product of the
/// selected generators. The representation need not be faithful, so two
/// elements may share an operator.
pub fn elementary_abelian_group(
    n_qubits: usize,
    generators: &[(&str, PauliString)],
) -> Result<(DecouplingGroup, GroupRepresentation)> {
    let m = generators.len();
    if m > 16 {
        return Err(Error::Group(format!("{m} generators is too many for an explicit table")));
    }
    if let Some((name, _)) = generators.iter().find(|(_, h)| h.n_qubits() != n_qubits) {
        return Err(Error::Group(format!("generator {name} is not on {n_qubits} qubits")));
    }
    let d = 1usize << m;
    let mut elements = Vec::with_capacity(d);
    let mut labels = Vec::with_capacity(d);
    for b in 0..d {
        let mut op = PauliString::identity(n_qubits);
        let mut names = Vec::new();
        for (j, (name, h)) in generators.iter().enumerate() {
            if b >> j & 1 == 1 {
                op = op.try_mul(h)?;
                names.push(*name);
            }
        }
        elements.push(PauliString::new(op.labels().to_vec(), num_complex::Complex64::new(1.0, 0.0)));
        labels.push(if names.is_empty() { "e".to_string() } else { names.join(".") });
    }
    let table = (0..d).map(|a| (0..d).map(|b| a ^ b).collect()).collect();
    let gens = (0..m).map(|j| 1usize << j).collect();
    let names = generators.iter().map(|(n, _)| n.to_string()).collect();
    let group = DecouplingGroup::new(labels, table, gens, names)?;
    let rep = GroupRepresentation::new(&group, elements)?;
    Ok((group, rep))
}

/// ℤ₂⊗ℤ₂ represented by {I, X^(all), Y^(all), Z^(all)}, generators X, Y.
pub fn linear_decoupling_group(n: usize) -> Result<(DecouplingGroup, GroupRepresentation)> {
    pauli_group(
        n,
        &[("X", PauliString::uniform(n, Pauli::X)), ("Y", PauliString::uniform(n, Pauli::Y))],
    )
}

/// ℤ₂ represented by {I, X^(all)}, generator X.
pub fn dephasing_group(n: usize) -> Result<(DecouplingGroup, GroupRepresentation)> {
    pauli_group(n, &[("X", PauliString::uniform(n, Pauli::X))])
}

pub fn trivial_group(n: usize) -> Result<(DecouplingGroup, GroupRepresentation)> {
    pauli_group(n, &[])
}
