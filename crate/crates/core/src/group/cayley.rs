use std::collections::VecDeque;

use rand::Rng;

use super::DecouplingGroup;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeLabel {
    /// Index into the group's generator list.
    Generator(usize),
    /// The I_Q arm attached to a vertex.
    SelfLoop,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CayleyEdge {
    pub from: usize,
    pub to: usize,
    pub label: EdgeLabel,
}

/// Directed multigraph with edges `g → h·g` for every generator `h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyGraph {
    vertex_count: usize,
    identity: usize,
    edges: Vec<CayleyEdge>,
}

impl CayleyGraph {
    pub fn from_edges(vertex_count: usize, identity: usize, edges: Vec<CayleyEdge>) -> Result<Self> {
        if identity >= vertex_count || edges.iter().any(|e| e.from >= vertex_count || e.to >= vertex_count) {
            return Err(Error::Group("edge endpoint out of range".into()));
        }
        Ok(CayleyGraph { vertex_count, identity, edges })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn edges(&self) -> &[CayleyEdge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Copy with one `SelfLoop` edge appended per vertex.
    pub fn with_self_loops(&self) -> CayleyGraph {
        let mut edges = self.edges.clone();
        edges.extend((0..self.vertex_count).map(|v| CayleyEdge { from: v, to: v, label: EdgeLabel::SelfLoop }));
        CayleyGraph { vertex_count: self.vertex_count, identity: self.identity, edges }
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.from == v).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.to == v).count()
    }

    fn reachable_from_identity(&self) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count];
        seen[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(v) = queue.pop_front() {
            for e in self.edges.iter().filter(|e| e.from == v) {
                if !seen[e.to] {
                    seen[e.to] = true;
                    queue.push_back(e.to);
                }
            }
        }
        seen
    }
}

pub fn build_cayley_graph(group: &DecouplingGroup) -> Result<CayleyGraph> {
    let d = group.order();
    let mut edges = Vec::with_capacity(d * group.generators().len());
    for g in 0..d {
        for (j, &h) in group.generators().iter().enumerate() {
            edges.push(CayleyEdge { from: g, to: group.mul(h, g), label: EdgeLabel::Generator(j) });
        }
    }
    let graph = CayleyGraph { vertex_count: d, identity: 0, edges };
    let seen = graph.reachable_from_identity();
    let unreachable: Vec<&str> =
        (0..d).filter(|&v| !seen[v]).map(|v| group.labels()[v].as_str()).collect();
    if !unreachable.is_empty() {
        return Err(Error::Group(format!("generators do not reach {unreachable:?}")));
    }
    Ok(graph)
}

fn check_eulerian(graph: &CayleyGraph) -> Result<()> {
    for v in 0..graph.vertex_count {
        let (i, o) = (graph.in_degree(v), graph.out_degree(v));
        if i != o {
            return Err(Error::Group(format!("vertex {v} has in-degree {i} and out-degree {o}")));
        }
    }
    let seen = graph.reachable_from_identity();
    if let Some(v) = (0..graph.vertex_count).find(|&v| !seen[v] && graph.out_degree(v) > 0) {
        return Err(Error::Group(format!("vertex {v} is disconnected from the identity")));
    }
    Ok(())
}

/// Hierholzer traversal from the identity. `choose` picks one of the unused
/// out-edges (given as edge indices) of the current vertex, knowing the label
/// of the edge just traversed.
pub fn find_eulerian_cycle_with<F>(graph: &CayleyGraph, mut choose: F) -> Result<Vec<usize>>
where
    F: FnMut(usize, Option<EdgeLabel>, &[usize]) -> usize,
{
    check_eulerian(graph)?;
    let mut used = vec![false; graph.edges.len()];
    let mut stack: Vec<(usize, Option<usize>)> = vec![(graph.identity, None)];
    let mut circuit = Vec::with_capacity(graph.edges.len());
    while let Some(&(v, incoming)) = stack.last() {
        let candidates: Vec<usize> = graph
            .edges
            .iter()
            .enumerate()
            .filter(|(i, e)| e.from == v && !used[*i])
            .map(|(i, _)| i)
            .collect();
        if candidates.is_empty() {
            stack.pop();
            if let Some(e) = incoming {
                circuit.push(e);
            }
            continue;
        }
        let previous = incoming.map(|e| graph.edges[e].label);
        let pick = choose(v, previous, &candidates);
        if !candidates.contains(&pick) {
            return Err(Error::Group(format!("chooser returned edge {pick} not leaving vertex {v}")));
        }
        used[pick] = true;
        stack.push((graph.edges[pick].to, Some(pick)));
    }
    circuit.reverse();
    Ok(circuit)
}

/// Canonical cycle: prefer a generator different from the one just applied,
/// then the lowest generator index; self-loops come last.
pub fn find_eulerian_cycle(graph: &CayleyGraph) -> Result<Vec<usize>> {
    find_eulerian_cycle_with(graph, |_, previous, candidates| {
        *candidates
            .iter()
            .min_by_key(|&&e| {
                let label = graph.edges[e].label;
                (Some(label) == previous, label == EdgeLabel::SelfLoop, label, e)
            })
            .expect("non-empty candidate list")
    })
}

/// Uniformly random choice at every step; any result is a valid cycle.
pub fn find_random_eulerian_cycle<R: Rng + ?Sized>(graph: &CayleyGraph, rng: &mut R) -> Result<Vec<usize>> {
    find_eulerian_cycle_with(graph, |_, _, candidates| candidates[rng.random_range(0..candidates.len())])
}

/// Every edge exactly once, consecutive edges chained, start = end = identity.
pub fn is_eulerian_cycle(graph: &CayleyGraph, cycle: &[usize]) -> bool {
    let mut sorted = cycle.to_vec();
    sorted.sort_unstable();
    if sorted != (0..graph.edges.len()).collect::<Vec<_>>() {
        return false;
    }
    if cycle.is_empty() {
        return true;
    }
    let edges = &graph.edges;
    edges[cycle[0]].from == graph.identity
        && edges[*cycle.last().unwrap()].to == graph.identity
        && cycle.windows(2).all(|w| edges[w[0]].to == edges[w[1]].from)
}
