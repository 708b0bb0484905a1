//! Detectors for the seven local obstructions and the well-structured predicate.

use crate::graph::{EdgeId, NodeId};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ObstructionKind {
    CutNode,
    ParallelEdges,
    UnitS2,
    ZeroS2,
    S34,
    R4,
    R8,
}

impl ObstructionKind {
    /// All kinds in detection priority order.
    pub const ALL: [ObstructionKind; 7] = [
        ObstructionKind::CutNode,
        ObstructionKind::ParallelEdges,
        ObstructionKind::UnitS2,
        ObstructionKind::ZeroS2,
        ObstructionKind::S34,
        ObstructionKind::R4,
        ObstructionKind::R8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ObstructionKind::CutNode => "cut-node",
            ObstructionKind::ParallelEdges => "parallel-edges",
            ObstructionKind::UnitS2 => "unit-cost-S2",
            ObstructionKind::ZeroS2 => "zero-cost-S2",
            ObstructionKind::S34 => "S34",
            ObstructionKind::R4 => "R4",
            ObstructionKind::R8 => "R8",
        }
    }
}

impl fmt::Display for ObstructionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown obstruction kind `{0}`")]
pub struct UnknownKind(pub String);

impl FromStr for ObstructionKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        let kind = match lower.as_str() {
            "cut-node" | "cutnode" => ObstructionKind::CutNode,
            "parallel-edges" | "parallel" => ObstructionKind::ParallelEdges,
            "unit-cost-s2" | "unit-s2" => ObstructionKind::UnitS2,
            "zero-cost-s2" | "zero-s2" => ObstructionKind::ZeroS2,
            "s34" => ObstructionKind::S34,
            "r4" => ObstructionKind::R4,
            "r8" => ObstructionKind::R8,
            _ => return Err(UnknownKind(s.to_string())),
        };
        Ok(kind)
    }
}

/// Node and edge ids an obstruction lives on, both sorted ascending. Ordering is
/// lexicographic (nodes first), which fixes tie-breaking among candidates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Carrier {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
}

impl Carrier {
    pub fn new(mut nodes: Vec<NodeId>, mut edges: Vec<EdgeId>) -> Self {
        nodes.sort_unstable();
        nodes.dedup();
        edges.sort_unstable();
        edges.dedup();
        Carrier { nodes, edges }
    }

    pub fn nodes(nodes: Vec<NodeId>) -> Self {
        Carrier::new(nodes, Vec::new())
    }

    pub fn edges(edges: Vec<EdgeId>) -> Self {
        Carrier::new(Vec::new(), edges)
    }
}

/// Evidence backing a detection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    /// Number of components left after deleting the carrier nodes.
    Components(usize),
    /// Node sets (parent ids, contracted node omitted) of the 2ec-v̂-blocks of
    /// the quotient that have opt ≥ 3.
    StrongBlocks(Vec<Vec<NodeId>>),
    /// A spanning cost-two cycle of the carrier plus the strong v̂-blocks.
    CycleAndBlocks { cycle: Vec<EdgeId>, blocks: Vec<Vec<NodeId>> },
    /// A cost-two 4-cycle and two nonadjacent nodes of degree two.
    RedundantCycle { cycle: Vec<EdgeId>, pair: (NodeId, NodeId) },
    /// The two cost-two 4-cycles and their attachments.
    TwoCycles { c1: Vec<EdgeId>, c2: Vec<EdgeId>, attachments: (NodeId, NodeId) },
    /// Two parallel copies.
    Parallel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obstruction {
    pub kind: ObstructionKind,
    pub carrier: Carrier,
    pub certificate: Certificate,
}

mod detectors;

pub use detectors::{
    detect, detector, detectors, is_r4, is_r8, is_s34, is_unit_cost_s2, is_well_structured,
    is_zero_cost_s2, scan_all, ObstructionDetector,
};
