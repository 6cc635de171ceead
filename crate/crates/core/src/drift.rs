//! Qubit chains with always-on nearest-neighbour Heisenberg drift: the ℤ₂⁴
//! decoupling group, the 64τ entangling block and the 96τ single-qubit block.
//!
//! Qubits are 0-based; "odd" and "even" sublattices follow 1-based numbering,
//! so qubit 0 is odd.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::balance::ControlProfile;
use crate::error::{Error, Result};
use crate::group::{
    build_cayley_graph, find_eulerian_cycle, elementary_abelian_group, linear_decoupling_group, synthesize_dcg_from_cycle,
    synthesize_edd, CayleyGraph, DecouplingGroup, EdgeLabel, GroupRepresentation, Role, SequenceSpec, SequenceToken,
};
use crate::operator::{phase_insensitive_distance, spectral_norm, DenseOperator, JointSpace, Matrix, Pauli, PauliString, PauliSum, SpectralCache};
use crate::schedule::ControlSchedule;

pub const LAYER_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainModel {
    pub n: usize,
    pub lambda: f64,
}

impl ChainModel {
    pub fn new(n: usize, lambda: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("a chain needs two qubits, got {n}")));
        }
        if !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!("coupling {lambda}")));
        }
        Ok(ChainModel { n, lambda })
    }

    /// `λ S^(i)·S^(i+1)` with `S = σ/2`.
    pub fn bond(&self, i: usize) -> PauliSum {
        let terms = Pauli::NONTRIVIAL.into_iter().map(|p| (self.lambda / 4.0, PauliString::on(self.n, &[i, i + 1], p))).collect();
        PauliSum::from_terms(self.n, terms).expect("bond on the chain register")
    }

    pub fn drift(&self) -> PauliSum {
        self.drift_without(None)
    }

    /// All bonds except `(k, k+1)` when given.
    pub fn drift_without(&self, k: Option<usize>) -> PauliSum {
        let mut sum = PauliSum::zero(self.n);
        for i in (0..self.n - 1).filter(|i| Some(*i) != k) {
            sum = sum.plus(&self.bond(i)).expect("same register");
        }
        sum
    }

    fn check_pair(&self, k: usize) -> Result<()> {
        if k + 1 >= self.n {
            return Err(Error::InvalidArgument(format!("pair ({}, {}) outside a {}-qubit chain", k + 1, k + 2, self.n)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GnnVariant {
    /// Qubits `k`, `k+1` excluded.
    Pair { k: usize },
    AllQubits,
}

/// Which four Pauli products represent the ℤ₂⁴ generators.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GnnRepresentation {
    /// `X^o X^e, X^o Y^e, Y^o X^e, Y^o Y^e`. The product of all four is the
    /// identity up to phase, so the image has only eight operators and
    /// `Z^o Z^e` commutes with every generator: ZZ bilinears are not
    /// decoupled.
    Symmetric,
    /// `X^a X^b, X^a Y^b, Y^a X^b, Y^a` where `a` is the sublattice next to
    /// the pair (odd for the single-qubit variant). Faithful, so every
    /// nearest-neighbour bilinear is decoupled, and every generator still
    /// acts with X or Y on sublattice `a`.
    #[default]
    Faithful,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GnnGroup {
    pub group: DecouplingGroup,
    pub rep: GroupRepresentation,
    pub odd: Vec<usize>,
    pub even: Vec<usize>,
    /// Sublattice whose projection of every generator is X or Y.
    pub aligned: Vec<usize>,
    /// Projection of each generator onto `aligned`.
    pub aligned_paulis: [Pauli; 4],
}

/// Generator pairs `(A, B)`: `A` on the aligned sublattice, `B` on the other.
pub fn gnn_generator_pairs(repr: GnnRepresentation) -> [(Pauli, Pauli); 4] {
    use Pauli::*;
    match repr {
        GnnRepresentation::Symmetric => [(X, X), (X, Y), (Y, X), (Y, Y)],
        GnnRepresentation::Faithful => [(X, X), (X, Y), (Y, X), (Y, I)],
    }
}

pub fn gnn_group(n: usize, variant: GnnVariant) -> Result<GnnGroup> {
    gnn_group_with(n, variant, GnnRepresentation::default())
}

pub fn gnn_group_with(n: usize, variant: GnnVariant, repr: GnnRepresentation) -> Result<GnnGroup> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("the nearest-neighbour group needs n >= 3, got {n}")));
    }
    let excluded: Vec<usize> = match variant {
        GnnVariant::Pair { k } => {
            if k + 1 >= n {
                return Err(Error::InvalidArgument(format!("invalid pair index {}", k + 1)));
            }
            vec![k, k + 1]
        }
        GnnVariant::AllQubits => Vec::new(),
    };
    let kept = (0..n).filter(|q| !excluded.contains(q));
    let (odd, even): (Vec<usize>, Vec<usize>) = kept.partition(|q| q % 2 == 0);
    if odd.is_empty() || even.is_empty() {
        return Err(Error::InvalidArgument(format!("pair index {} leaves an empty sublattice on {n} qubits", match variant {
            GnnVariant::Pair { k } => k + 1,
            GnnVariant::AllQubits => 0,
        })));
    }
    // align the sublattice holding the right-hand neighbour of the pair
    let aligned_is_odd = match variant {
        GnnVariant::Pair { k } if k + 2 < n => odd.contains(&(k + 2)),
        GnnVariant::Pair { k } => odd.contains(&(k - 1)),
        GnnVariant::AllQubits => true,
    };
    let (aligned, other) = if aligned_is_odd { (&odd, &even) } else { (&even, &odd) };
    let pairs = gnn_generator_pairs(repr);
    let gens: Vec<(String, PauliString)> = pairs
        .iter()
        .map(|&(a, b)| {
            let mut labels = vec![Pauli::I; n];
            aligned.iter().for_each(|&q| labels[q] = a);
            other.iter().for_each(|&q| labels[q] = b);
            let (o, e) = if aligned_is_odd { (a, b) } else { (b, a) };
            (format!("{}{}", o.symbol(), e.symbol()), PauliString::new(labels, num_complex::Complex64::new(1.0, 0.0)))
        })
        .collect();
    let refs: Vec<(&str, PauliString)> = gens.iter().map(|(s, p)| (s.as_str(), p.clone())).collect();
    let (group, rep) = elementary_abelian_group(n, &refs)?;
    let aligned_paulis = pairs.map(|(a, _)| a);
    Ok(GnnGroup { group, rep, aligned: aligned.clone(), odd, even, aligned_paulis })
}

/// A drift-compensating block: the merged schedule plus the drift left over
/// as error and the nominal target.
#[derive(Clone, Debug, PartialEq)]
pub struct DriftSchedule {
    pub schedule: ControlSchedule,
    pub error_drift: PauliSum,
    pub target: Matrix,
    /// Qubits addressed by layer 1 and layer 2.
    pub layer_qubits: [Vec<usize>; 2],
}

impl DriftSchedule {
    /// `‖U − target‖` after removing the global phase.
    pub fn closed_system_residual(&self) -> Result<f64> {
        Ok(phase_insensitive_distance(&self.schedule.gate_unitary()?, &self.target))
    }

    /// Error bonds with one end in each layer.
    pub fn boundary_bonds(&self, chain: &ChainModel) -> Vec<usize> {
        let [l1, l2] = &self.layer_qubits;
        (0..chain.n - 1)
            .filter(|&i| (l1.contains(&i) && l2.contains(&(i + 1))) || (l2.contains(&i) && l1.contains(&(i + 1))))
            .collect()
    }
}

/// Layer-1 Eulerian cycle choice for the entangling block.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerOneOrdering {
    /// The generic canonical cycle. Leaves the bond between the pair and its
    /// layer-1 neighbour uncorrected at first order.
    Canonical,
    /// Cycle whose aligned-sublattice projection repeats the ℤ₂⊗ℤ₂ Eulerian
    /// pattern in every 8τ block (see [`block_aligned_cycle`]).
    #[default]
    BlockAligned,
}

fn pulse(n: usize, qubits: &[usize], p: Pauli, amplitude: f64) -> PauliSum {
    let terms = qubits.iter().map(|&q| (amplitude, PauliString::single(n, q, p))).collect();
    PauliSum::from_terms(n, terms).expect("same register")
}

/// Layer-1 sequence over the pair variant of the nearest-neighbour group.
pub fn layer_one_cycle(gnn: &GnnGroup, ordering: LayerOneOrdering) -> Result<(CayleyGraph, Vec<usize>)> {
    let graph = build_cayley_graph(&gnn.group)?;
    let cycle = match ordering {
        LayerOneOrdering::Canonical => find_eulerian_cycle(&graph)?,
        LayerOneOrdering::BlockAligned => block_aligned_cycle(gnn, &graph)?,
    };
    Ok((graph, cycle))
}

/// Searches for an Eulerian cycle whose aligned-sublattice generator
/// sequence is the ℤ₂⊗ℤ₂ pattern X,Y,X,Y,Y,X,Y,X repeated in each of the
/// eight blocks. The neighbour of the pair then completes a decoupling cycle
/// inside every layer-2 block, which cancels the boundary bond.
pub fn block_aligned_cycle(gnn: &GnnGroup, graph: &CayleyGraph) -> Result<Vec<usize>> {
    let (ld, ld_rep) = linear_decoupling_group(1)?;
    let pattern: Vec<Pauli> = synthesize_edd(&ld, &ld_rep)?
        .tokens
        .iter()
        .map(|t| if t.token == "X" { Pauli::X } else { Pauli::Y })
        .collect();
    let projection: Vec<Pauli> = graph
        .edges()
        .iter()
        .map(|e| match e.label {
            EdgeLabel::Generator(j) => gnn.aligned_paulis[j],
            EdgeLabel::SelfLoop => Pauli::I,
        })
        .collect();
    struct Search<'a> {
        graph: &'a CayleyGraph,
        pattern: &'a [Pauli],
        projection: &'a [Pauli],
        used: Vec<bool>,
        path: Vec<usize>,
        budget: u64,
    }
    impl Search<'_> {
        fn run(&mut self, v: usize) -> bool {
            if self.path.len() == self.graph.edge_count() {
                return v == self.graph.identity();
            }
            if self.budget == 0 {
                return false;
            }
            self.budget -= 1;
            let want = self.pattern[self.path.len() % self.pattern.len()];
            for e in 0..self.graph.edge_count() {
                let edge = self.graph.edges()[e];
                if edge.from != v || self.used[e] || self.projection[e] != want {
                    continue;
                }
                self.used[e] = true;
                self.path.push(e);
                if self.run(edge.to) {
                    return true;
                }
                self.path.pop();
                self.used[e] = false;
            }
            false
        }
    }
    let mut search = Search {
        graph,
        pattern: &pattern,
        projection: &projection,
        used: vec![false; graph.edge_count()],
        path: Vec::with_capacity(graph.edge_count()),
        budget: 50_000_000,
    };
    if search.run(graph.identity()) {
        Ok(search.path)
    } else {
        Err(Error::Group("no block-aligned Eulerian cycle found".into()))
    }
}

fn cycle_tokens(gnn: &GnnGroup, graph: &CayleyGraph, cycle: &[usize]) -> SequenceSpec {
    let tokens = cycle
        .iter()
        .map(|&e| match graph.edges()[e].label {
            EdgeLabel::Generator(j) => SequenceToken::generator(&gnn.group.generator_names()[j]),
            EdgeLabel::SelfLoop => unreachable!("plain Cayley graph"),
        })
        .collect();
    SequenceSpec { tokens }
}

/// The 64τ block implementing `exp(−64iτλ S^(k)·S^(k+1))`, with the faithful
/// representation and the block-aligned layer-1 cycle. When the pair has
/// layer-1 neighbours on both sides only the right-hand boundary bond is
/// aligned; the left one keeps a first-order residual.
pub fn two_qubit_drift_dcg(chain: &ChainModel, k: usize, tau: f64) -> Result<DriftSchedule> {
    two_qubit_drift_dcg_with(chain, k, tau, GnnRepresentation::default(), LayerOneOrdering::default())
}

/// Block with an explicit representation and layer-1 ordering.
pub fn two_qubit_drift_dcg_with(
    chain: &ChainModel,
    k: usize,
    tau: f64,
    repr: GnnRepresentation,
    ordering: LayerOneOrdering,
) -> Result<DriftSchedule> {
    let n = chain.n;
    if n < 4 {
        return Err(Error::InvalidArgument(format!("the entangling block needs n >= 4, got {n}")));
    }
    chain.check_pair(k)?;
    let gnn = gnn_group_with(n, GnnVariant::Pair { k }, repr)?;
    let (graph, cycle) = layer_one_cycle(&gnn, ordering)?;
    let layer1 = cycle_tokens(&gnn, &graph, &cycle);
    let mut sched = ControlSchedule::from_sequence(format!("drift_two_qubit_{}", k + 1), &layer1, &gnn.group, &gnn.rep, None, tau, 1)?;

    // layer 2: ℤ₂⊗ℤ₂ pattern on the pair, each generator stretched to 8τ
    let (ld, ld_rep) = linear_decoupling_group(1)?;
    let pair = [k, k + 1];
    for t in synthesize_edd(&ld, &ld_rep)?.tokens {
        let p = if t.token == "X" { Pauli::X } else { Pauli::Y };
        sched.push(Role::Generator, &format!("{}{}", t.token, t.token), 2, 8.0, pulse(n, &pair, p, FRAC_PI_2 / (8.0 * tau)));
    }
    sched.gating_drift = chain.bond(k);
    let target = SpectralCache::new().propagator(&chain.bond(k).matrix(), 64.0 * tau)?;
    let mut layer_one: Vec<usize> = gnn.odd.iter().chain(&gnn.even).copied().collect();
    layer_one.sort_unstable();
    let out = DriftSchedule { schedule: sched, error_drift: chain.drift_without(Some(k)), target, layer_qubits: [layer_one, pair.to_vec()] };
    let report = control_layer_commutation(&out)?;
    if report.max_layer_commutator > LAYER_TOL || report.max_pair_commutator > LAYER_TOL {
        return Err(Error::LayerCommutation(format!("{report:?}")));
    }
    Ok(out)
}

/// The 96τ single-qubit DCG for `exp(−iθC)`, `C ∈ {X^(k), Y^(k)}`, with all
/// drift treated as error.
pub fn single_qubit_drift_dcg(chain: &ChainModel, k: usize, theta: f64, axis: Pauli, tau: f64) -> Result<DriftSchedule> {
    let n = chain.n;
    if k >= n {
        return Err(Error::InvalidArgument(format!("qubit {} outside a {n}-qubit chain", k + 1)));
    }
    if !matches!(axis, Pauli::X | Pauli::Y) {
        return Err(Error::InvalidArgument("single-qubit drift gates rotate about X or Y".into()));
    }
    let gnn = gnn_group(n, GnnVariant::AllQubits)?;
    let graph = build_cayley_graph(&gnn.group)?;
    let cycle = find_eulerian_cycle(&graph)?;
    let seq = synthesize_dcg_from_cycle(&gnn.group, &graph, &cycle, "Q")?;
    let c = PauliSum::term(1.0, PauliString::single(n, k, axis));
    let profile = ControlProfile::rotation(c.clone(), theta, tau, format!("R{}{}", axis.symbol(), k + 1))?;
    let sched = ControlSchedule::from_sequence(format!("drift_single_qubit_{}", k + 1), &seq, &gnn.group, &gnn.rep, Some(&profile), tau, 1)?;
    sched.check_divided_control()?;
    let target = SpectralCache::new().propagator(&c.matrix(), theta)?;
    Ok(DriftSchedule { schedule: sched, error_drift: chain.drift(), target, layer_qubits: [(0..n).collect(), Vec::new()] })
}

/// `τ = θ/(64λ)` for the entangling block; warns when below `tau_min`.
pub fn tau_for_angle(theta: f64, lambda: f64, tau_min: f64) -> Result<(f64, Option<String>)> {
    if lambda == 0.0 || !(theta / lambda).is_finite() {
        return Err(Error::InvalidArgument("need a nonzero coupling".into()));
    }
    let tau = theta / (64.0 * lambda);
    if tau <= 0.0 {
        return Err(Error::InvalidArgument(format!("theta/lambda must be positive, got tau = {tau}")));
    }
    let warning = (tau < tau_min).then(|| format!("tau = {tau:e} is below tau_min = {tau_min:e}"));
    Ok((tau, warning))
}

fn layer_hamiltonian(sched: &ControlSchedule, layer: u8, with_drift: bool, iv_segments: &[usize]) -> PauliSum {
    let mut h = if with_drift { sched.gating_drift.clone() } else { PauliSum::zero(sched.n_qubits) };
    for &i in iv_segments {
        if sched.segments[i].layer == layer {
            h = h.plus(&sched.segments[i].hamiltonian).expect("same register");
        }
    }
    h
}

/// System propagators `U_{g,1}(t)`, `U_{g,2}(t)` at every interval boundary.
/// Layer 2 carries the gating drift.
pub fn layer_propagators(drift: &DriftSchedule) -> Result<Vec<(f64, Matrix, Matrix)>> {
    let sched = &drift.schedule;
    let cache = SpectralCache::new();
    let d = 1usize << sched.n_qubits;
    let (mut u1, mut u2) = (Matrix::identity(d, d), Matrix::identity(d, d));
    let mut out = Vec::new();
    for iv in sched.intervals() {
        let h1 = layer_hamiltonian(sched, 1, false, &iv.segments);
        let h2 = layer_hamiltonian(sched, 2, true, &iv.segments);
        u1 = cache.propagator(&h1.matrix(), iv.duration)? * u1;
        u2 = cache.propagator(&h2.matrix(), iv.duration)? * u2;
        out.push((iv.start + iv.duration, u1.clone(), u2.clone()));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlCommutationReport {
    /// `max_t ‖[U_{g,1}(t), U_{g,2}(t)]‖`.
    pub max_layer_commutator: f64,
    /// `max_t ‖[H_g(t), S^(k)·S^(k+1)]‖` over intervals.
    pub max_pair_commutator: f64,
}

pub fn control_layer_commutation(drift: &DriftSchedule) -> Result<ControlCommutationReport> {
    let sched = &drift.schedule;
    let mut max_layer: f64 = 0.0;
    for (_, u1, u2) in layer_propagators(drift)? {
        max_layer = max_layer.max(spectral_norm(&(&u1 * &u2 - &u2 * &u1)));
    }
    let mut max_pair: f64 = 0.0;
    let bond = sched.gating_drift.matrix();
    for iv in sched.intervals() {
        let h = iv.hamiltonian.matrix();
        max_pair = max_pair.max(spectral_norm(&(&h * &bond - &bond * &h)));
    }
    Ok(ControlCommutationReport { max_layer_commutator: max_layer, max_pair_commutator: max_pair })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorSplitReport {
    /// `max_t ‖[U_{g,1}(t), H_{e,2}]‖`.
    pub u1_with_e2: f64,
    /// `max_t ‖[U_{g,2}(t), H_{e,1}]‖`.
    pub u2_with_e1: f64,
    /// `max_t ‖[U_{g,2}(t), H_∂]‖` for the boundary bonds. Nonzero by
    /// construction: these bonds touch both layers and fit neither part.
    pub u2_with_boundary: f64,
}

/// Error Hamiltonian of the entangling block in three parts. `e1` holds the
/// drift and couplings local to layer 1 plus the pure-bath term, `e2` the
/// couplings of the pair, and `boundary` the bonds joining the pair to its
/// layer-1 neighbours.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorSplit {
    pub e1: DenseOperator,
    pub e2: DenseOperator,
    pub boundary: DenseOperator,
}

impl ErrorSplit {
    pub fn total(&self) -> DenseOperator {
        self.e1.add(&self.e2).add(&self.boundary)
    }
}

/// Commutators of each layer's propagator with the other layer's error part.
pub fn error_split_commutation(drift: &DriftSchedule, split: &ErrorSplit) -> Result<ErrorSplitReport> {
    let space = split.e1.space();
    let (mut a, mut b, mut c): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (_, u1, u2) in layer_propagators(drift)? {
        let u1 = DenseOperator::lift_system(space, &u1)?;
        let u2 = DenseOperator::lift_system(space, &u2)?;
        a = a.max(u1.commutator(&split.e2).operator_norm());
        b = b.max(u2.commutator(&split.e1).operator_norm());
        c = c.max(u2.commutator(&split.boundary).operator_norm());
    }
    Ok(ErrorSplitReport { u1_with_e2: a, u2_with_e1: b, u2_with_boundary: c })
}

/// Splits the error of an entangling block on `chain`. `couplings[q]` holds
/// `(B_X, B_Y, B_Z)` for qubit `q`.
pub fn split_error_hamiltonian(
    drift: &DriftSchedule,
    chain: &ChainModel,
    space: JointSpace,
    couplings: &[[Matrix; 3]],
    h_b: &Matrix,
) -> Result<ErrorSplit> {
    let n = drift.schedule.n_qubits;
    if couplings.len() != n || chain.n != n {
        return Err(Error::DimensionMismatch("one coupling triple per chain qubit".into()));
    }
    let boundary_bonds = drift.boundary_bonds(chain);
    let mut local = drift.error_drift.clone();
    let mut boundary = PauliSum::zero(n);
    for &i in &boundary_bonds {
        boundary = boundary.plus(&chain.bond(i))?;
        local = local.plus(&chain.bond(i).scaled(-1.0))?;
    }
    let mut e1 = DenseOperator::lift_system(space, &local.matrix())?.add(&DenseOperator::lift_bath(space, h_b)?);
    let mut e2 = DenseOperator::zeros(space);
    for (q, triple) in couplings.iter().enumerate() {
        for (p, b) in Pauli::NONTRIVIAL.into_iter().zip(triple) {
            let term = DenseOperator::from_parts(space, &PauliString::single(n, q, p).matrix(), b)?;
            if drift.layer_qubits[1].contains(&q) {
                e2 = e2.add(&term);
            } else {
                e1 = e1.add(&term);
            }
        }
    }
    let boundary = DenseOperator::lift_system(space, &boundary.matrix())?;
    Ok(ErrorSplit { e1, e2, boundary })
}
