//! Multigraph with 0/1 edge costs and the structural queries built on it.

mod structure;

pub(crate) use structure::lowpoint;

pub use structure::{
    block_decomposition, bridges, label_components, Block, NONE, connected_components, contract, cut_nodes,
    induced_subinstance, is_two_edge_connected, two_ec_v_blocks, two_edge_disjoint_paths_exist,
    BlockDecomposition, ContractionResult, NodeColor, SizeClass,
};

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub cost: u8,
}

impl Edge {
    pub fn new(u: NodeId, v: NodeId, cost: u8) -> Self {
        Edge { u, v, cost }
    }

    /// The endpoint opposite to `x`. Panics if `x` is not an endpoint.
    pub fn other(&self, x: NodeId) -> NodeId {
        if x == self.u {
            self.v
        } else {
            assert_eq!(x, self.v, "node {x} is not an endpoint");
            self.u
        }
    }

    pub fn touches(&self, x: NodeId) -> bool {
        self.u == x || self.v == x
    }

    pub fn is_zero(&self) -> bool {
        self.cost == 0
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge {edge} has endpoint {node} outside 0..{n}")]
    EndpointOutOfRange { edge: EdgeId, node: NodeId, n: usize },
    #[error("edge {edge} has cost {cost}, expected 0 or 1")]
    BadCost { edge: EdgeId, cost: u8 },
    #[error("node set is empty, disconnected, or covers every node")]
    BadContractionSet,
    #[error("node {0} is not a cut node")]
    NotACutNode(NodeId),
}

/// A loop-free multigraph on nodes `0..n` whose edges carry costs in {0, 1}.
///
/// Edge ids are positions in the edge list and never change. Adjacency lists are
/// sorted by (neighbour, edge id) so every traversal is deterministic.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "RawInstance", into = "RawInstance")]
pub struct MapInstance {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(NodeId, EdgeId)>>,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    n: usize,
    edges: Vec<Edge>,
}

impl From<RawInstance> for MapInstance {
    fn from(raw: RawInstance) -> Self {
        MapInstance::build(raw.n, raw.edges)
    }
}

impl From<MapInstance> for RawInstance {
    fn from(inst: MapInstance) -> Self {
        RawInstance { n: inst.n, edges: inst.edges }
    }
}

impl fmt::Debug for MapInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MapInstance(n={}, edges=[", self.n)?;
        for (i, e) in self.edges.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}-{}:{}", e.u, e.v, e.cost)?;
        }
        write!(f, "])")
    }
}

impl MapInstance {
    /// Builds an instance after checking endpoint ranges and costs.
    /// Loops and matching violations are accepted here and reported by
    /// [`validate_instance`].
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        for (id, e) in edges.iter().enumerate() {
            for x in [e.u, e.v] {
                if x >= n {
                    return Err(GraphError::EndpointOutOfRange { edge: id, node: x, n });
                }
            }
            if e.cost > 1 {
                return Err(GraphError::BadCost { edge: id, cost: e.cost });
            }
        }
        Ok(Self::build(n, edges))
    }

    /// Convenience constructor from `(u, v, cost)` triples; panics on bad input.
    pub fn from_triples(n: usize, triples: &[(NodeId, NodeId, u8)]) -> Self {
        let edges = triples.iter().map(|&(u, v, c)| Edge::new(u, v, c)).collect();
        Self::new(n, edges).expect("invalid triples")
    }

    fn build(n: usize, edges: Vec<Edge>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (id, e) in edges.iter().enumerate() {
            if e.u < n && e.v < n {
                adj[e.u].push((e.v, id));
                if e.u != e.v {
                    adj[e.v].push((e.u, id));
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        MapInstance { n, edges, adj }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Edge {
        self.edges[id]
    }

    /// `(neighbour, edge id)` pairs incident to `v`, sorted.
    pub fn neighbors(&self, v: NodeId) -> &[(NodeId, EdgeId)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v].len()
    }

    pub fn cost_of<I: IntoIterator<Item = EdgeId>>(&self, ids: I) -> u64 {
        ids.into_iter().map(|id| self.edges[id].cost as u64).sum()
    }

    pub fn zero_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).filter(|&i| self.edges[i].cost == 0)
    }

    pub fn unit_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).filter(|&i| self.edges[i].cost == 1)
    }

    /// The zero-edge at `v`, if any (the first one when the matching is violated).
    pub fn zero_partner(&self, v: NodeId) -> Option<(NodeId, EdgeId)> {
        self.adj[v].iter().copied().find(|&(_, id)| self.edges[id].cost == 0)
    }

    /// Lowest-id edge between `a` and `b`.
    pub fn edge_between(&self, a: NodeId, b: NodeId) -> Option<EdgeId> {
        let list = &self.adj[a];
        let i = list.partition_point(|&(w, _)| w < b);
        list.get(i).filter(|&&(w, _)| w == b).map(|&(_, id)| id)
    }

    pub fn adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.edge_between(a, b).is_some()
    }

    /// Number of edges between `a` and `b`.
    pub fn multiplicity(&self, a: NodeId, b: NodeId) -> usize {
        self.adj[a].iter().filter(|&&(w, _)| w == b).count()
    }

    pub fn full(&self) -> EdgeSubgraph {
        EdgeSubgraph::full(self)
    }
}

/// Named structural failures found by [`validate_instance`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValidationFailure {
    TooFewNodes(usize),
    SelfLoop { edge: EdgeId, node: NodeId },
    MatchingViolated { node: NodeId, edges: Vec<EdgeId> },
    NotTwoEdgeConnected,
}

impl fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationFailure::TooFewNodes(n) => write!(f, "need at least 2 nodes, got {n}"),
            ValidationFailure::SelfLoop { edge, node } => {
                write!(f, "edge {edge} is a loop at node {node}")
            }
            ValidationFailure::MatchingViolated { node, edges } => {
                write!(f, "matching violated at node {node} (zero-edges {edges:?})")
            }
            ValidationFailure::NotTwoEdgeConnected => write!(f, "graph is not 2-edge-connected"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub failures: Vec<ValidationFailure>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the MAP preconditions: n ≥ 2, no loops, zero-edges form a matching,
/// and (when `require_2ec`) the whole graph is 2-edge-connected.
pub fn validate_instance(inst: &MapInstance, require_2ec: bool) -> ValidationReport {
    let mut failures = Vec::new();
    if inst.n < 2 {
        failures.push(ValidationFailure::TooFewNodes(inst.n));
    }
    let mut zero_at: Vec<Vec<EdgeId>> = vec![Vec::new(); inst.n];
    for (id, e) in inst.edges.iter().enumerate() {
        if e.u == e.v {
            failures.push(ValidationFailure::SelfLoop { edge: id, node: e.u });
            continue;
        }
        if e.cost == 0 {
            zero_at[e.u].push(id);
            zero_at[e.v].push(id);
        }
    }
    for (node, edges) in zero_at.into_iter().enumerate() {
        if edges.len() > 1 {
            failures.push(ValidationFailure::MatchingViolated { node, edges });
        }
    }
    let has_loop = failures.iter().any(|f| matches!(f, ValidationFailure::SelfLoop { .. }));
    if require_2ec && inst.n >= 2 && !has_loop && !is_two_edge_connected(inst, &inst.full(), true) {
        failures.push(ValidationFailure::NotTwoEdgeConnected);
    }
    ValidationReport { failures }
}

/// A set of edges of some instance together with its cost.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSubgraph {
    member: Vec<bool>,
    len: usize,
    cost: u64,
}

impl fmt::Debug for EdgeSubgraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EdgeSubgraph")
            .field("cost", &self.cost)
            .field("edges", &self.ids())
            .finish()
    }
}

impl EdgeSubgraph {
    pub fn empty(inst: &MapInstance) -> Self {
        EdgeSubgraph { member: vec![false; inst.edge_count()], len: 0, cost: 0 }
    }

    pub fn full(inst: &MapInstance) -> Self {
        Self::from_ids(inst, 0..inst.edge_count())
    }

    /// Panics on an out-of-range edge id; duplicates are ignored.
    pub fn from_ids<I: IntoIterator<Item = EdgeId>>(inst: &MapInstance, ids: I) -> Self {
        let mut s = Self::empty(inst);
        for id in ids {
            s.insert(inst, id);
        }
        s
    }

    pub fn insert(&mut self, inst: &MapInstance, id: EdgeId) -> bool {
        if self.member[id] {
            return false;
        }
        self.member[id] = true;
        self.len += 1;
        self.cost += inst.edge(id).cost as u64;
        true
    }

    pub fn remove(&mut self, inst: &MapInstance, id: EdgeId) -> bool {
        if !self.member[id] {
            return false;
        }
        self.member[id] = false;
        self.len -= 1;
        self.cost -= inst.edge(id).cost as u64;
        true
    }

    pub fn contains(&self, id: EdgeId) -> bool {
        self.member.get(id).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn cost(&self) -> u64 {
        self.cost
    }

    /// Number of edges of the parent instance this subgraph was built for.
    pub fn universe(&self) -> usize {
        self.member.len()
    }

    pub fn mask(&self) -> &[bool] {
        &self.member
    }

    pub fn ids(&self) -> Vec<EdgeId> {
        self.iter().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.member.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn union(&self, inst: &MapInstance, other: &EdgeSubgraph) -> EdgeSubgraph {
        let mut s = self.clone();
        for id in other.iter() {
            s.insert(inst, id);
        }
        s
    }

    /// Degree of `v` counting only member edges.
    pub fn degree(&self, inst: &MapInstance, v: NodeId) -> usize {
        inst.neighbors(v).iter().filter(|&&(_, id)| self.member[id]).count()
    }
}

/// A sub-instance carved out of a parent, with maps back to parent ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubInstance {
    pub inst: MapInstance,
    /// local node -> parent node (the contracted node maps to `None`).
    pub nodes: Vec<Option<NodeId>>,
    /// local edge -> parent edge.
    pub edges: Vec<EdgeId>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4() -> MapInstance {
        MapInstance::from_triples(4, &[(0, 1, 0), (1, 2, 1), (2, 3, 0), (3, 0, 1)])
    }

    #[test]
    fn c4_validates() {
        assert!(validate_instance(&c4(), true).passed());
    }

    #[test]
    fn shared_zero_endpoint_is_reported() {
        let g = MapInstance::from_triples(4, &[(0, 1, 0), (1, 2, 0), (2, 3, 1), (3, 0, 1)]);
        let r = validate_instance(&g, true);
        assert_eq!(
            r.failures,
            vec![ValidationFailure::MatchingViolated { node: 1, edges: vec![0, 1] }]
        );
        assert_eq!(r.failures[0].to_string(), "matching violated at node 1 (zero-edges [0, 1])");
    }

    #[test]
    fn loops_and_small_graphs_fail() {
        let g = MapInstance::from_triples(1, &[(0, 0, 1)]);
        let r = validate_instance(&g, true);
        assert!(r.failures.contains(&ValidationFailure::TooFewNodes(1)));
        assert!(r.failures.contains(&ValidationFailure::SelfLoop { edge: 0, node: 0 }));
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(MapInstance::new(2, vec![Edge::new(0, 2, 1)]).is_err());
        assert!(MapInstance::new(2, vec![Edge::new(0, 1, 2)]).is_err());
    }

    #[test]
    fn subgraph_bookkeeping() {
        let g = c4();
        let mut s = EdgeSubgraph::empty(&g);
        assert!(s.insert(&g, 1));
        assert!(!s.insert(&g, 1));
        s.insert(&g, 0);
        assert_eq!((s.len(), s.cost()), (2, 1));
        s.remove(&g, 1);
        assert_eq!((s.len(), s.cost()), (1, 0));
        assert_eq!(EdgeSubgraph::full(&g).cost(), 2);
    }

    #[test]
    fn serde_round_trip_rebuilds_adjacency() {
        let g = c4();
        let json = serde_json_like(&g);
        assert_eq!(json.node_count(), 4);
        assert_eq!(json.neighbors(0), g.neighbors(0));
    }

    fn serde_json_like(g: &MapInstance) -> MapInstance {
        let raw: RawInstance = g.clone().into();
        raw.into()
    }
}
