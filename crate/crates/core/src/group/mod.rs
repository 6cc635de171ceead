//! Decoupling groups, Cayley graphs, Eulerian cycles and EDD/DCG sequences.

pub mod cayley;
pub mod decoupling;
pub mod sequence;

pub use cayley::{
    build_cayley_graph, find_eulerian_cycle, find_eulerian_cycle_with, find_random_eulerian_cycle,
    is_eulerian_cycle, CayleyEdge, CayleyGraph, EdgeLabel,
};
pub use decoupling::{
    dephasing_group, elementary_abelian_group, linear_decoupling_group, pauli_group, trivial_group, DecouplingGroup,
    GroupRepresentation,
};
pub use sequence::{
    projection_superop, synthesize_dcg, synthesize_dcg_from_cycle, synthesize_edd, Role,
    SequenceSpec, SequenceToken,
};
