//! Decomposition into well-structured or small sub-instances, and the reverse
//! replay that lifts their solutions back to the input.

use crate::graph::{
    contract, cut_nodes, induced_subinstance, is_two_edge_connected, two_ec_v_blocks, EdgeId,
    EdgeSubgraph, MapInstance, NodeId, SubInstance,
};
use crate::obstructions::{detect, is_well_structured, Carrier, Certificate, Obstruction, ObstructionKind};
use crate::oracle::{opt_at_least, spanning_cycles_of_cost_two, OracleBudget};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use thiserror::Error;

/// Sub-instances with fewer nodes are solved exactly.
pub const SMALL_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ApproxConfig {
    pub alpha: Ratio<i64>,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        ApproxConfig { alpha: Ratio::new(5, 3) }
    }
}

impl ApproxConfig {
    pub fn new(alpha: Ratio<i64>) -> Result<Self, PreprocessError> {
        if alpha < Ratio::new(5, 3) {
            return Err(PreprocessError::AlphaTooSmall(alpha.to_string()));
        }
        Ok(ApproxConfig { alpha })
    }

    /// max(opt, α·opt − 2), exactly.
    pub fn bound(&self, opt: u64) -> Ratio<i64> {
        let o = Ratio::from_integer(opt as i64);
        o.max(self.alpha * o - Ratio::from_integer(2))
    }

    pub fn within_bound(&self, cost: u64, opt: u64) -> bool {
        Ratio::from_integer(cost as i64) <= self.bound(opt)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PreprocessError {
    #[error("alpha = {0} is below 5/3")]
    AlphaTooSmall(String),
    #[error("potential did not decrease at step {step}: {before} -> {after}")]
    PotentialStalled { step: usize, before: usize, after: usize },
    #[error("sub-instance {member} emitted by step {step} is not 2-edge-connected")]
    ChildNotTwoEdgeConnected { step: usize, member: usize },
    #[error("step {step} ({kind}): {reason}")]
    StepFailed { step: usize, kind: ObstructionKind, reason: String },
    #[error("solution for sub-instance {member} is not a 2-ECSS of it")]
    BadSolution { member: usize },
    #[error("no solution supplied for leaf {0}")]
    MissingLeaf(usize),
}

/// A sub-instance on the list. `sub.nodes` and `sub.edges` map local ids to
/// the root instance; contracted nodes map to `None`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Member {
    pub id: usize,
    pub parent: Option<usize>,
    pub sub: SubInstance,
}

impl Member {
    pub fn inst(&self) -> &MapInstance {
        &self.sub.inst
    }

    fn local_edges(&self) -> HashMap<EdgeId, EdgeId> {
        self.sub.edges.iter().enumerate().map(|(l, &r)| (r, l)).collect()
    }

    /// Whether the root edge set `sol` is exactly a 2-ECSS of this member.
    pub fn accepts(&self, sol: &BTreeSet<EdgeId>) -> bool {
        let local = self.local_edges();
        let mut ids = Vec::with_capacity(sol.len());
        for r in sol {
            match local.get(r) {
                Some(&l) => ids.push(l),
                None => return false,
            }
        }
        is_two_edge_connected(self.inst(), &EdgeSubgraph::from_ids(self.inst(), ids), true)
    }
}

/// Per-child repair edges (root ids) from each end of the contracted edge into
/// the child's non-contracted nodes, lowest id first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Repair {
    pub from_u: Option<EdgeId>,
    pub from_v: Option<EdgeId>,
}

/// What each step needs to lift child solutions back to its parent; every
/// edge id is a root id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum UndoData {
    CutNode,
    Parallel { discarded: EdgeId },
    ZeroS2 { edge: EdgeId, ends: (NodeId, NodeId), cheap_cycles: Vec<Option<Vec<EdgeId>>>, repairs: Vec<Repair> },
    UnitS2 { edge: EdgeId, ends: (NodeId, NodeId), repairs: Vec<Repair> },
    S34 { cycle: Vec<EdgeId> },
    R4 { cycle: Vec<EdgeId> },
    R8 { f: Vec<EdgeId> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub kind: ObstructionKind,
    /// Carrier in the parent's local ids.
    pub carrier: Carrier,
    pub parent: usize,
    pub children: Vec<usize>,
    pub undo: UndoData,
    pub phi_before: usize,
    pub phi_after: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionTrace {
    pub members: Vec<Member>,
    pub steps: Vec<Step>,
    pub leaves: Vec<usize>,
}

fn potential(inst: &MapInstance) -> usize {
    inst.edge_count() + cut_nodes(inst, &inst.full()).len()
}

fn compose(parent: &Member, child: SubInstance) -> SubInstance {
    SubInstance {
        nodes: child.nodes.iter().map(|x| x.and_then(|l| parent.sub.nodes[l])).collect(),
        edges: child.edges.iter().map(|&l| parent.sub.edges[l]).collect(),
        inst: child.inst,
    }
}

fn needs_work(m: &Member) -> bool {
    m.inst().node_count() >= SMALL_LIMIT && !is_well_structured(m.inst())
}

struct Decomposer {
    members: Vec<Member>,
    steps: Vec<Step>,
    alive: Vec<bool>,
}

impl Decomposer {
    fn fail(&self, kind: ObstructionKind, reason: impl Into<String>) -> PreprocessError {
        PreprocessError::StepFailed { step: self.steps.len(), kind, reason: reason.into() }
    }

    fn root_edges(&self, p: usize, local: &[EdgeId]) -> Vec<EdgeId> {
        let mut v: Vec<EdgeId> = local.iter().map(|&l| self.members[p].sub.edges[l]).collect();
        v.sort_unstable();
        v
    }

    /// Splits member `p` by contracting `s` and taking the v̂-blocks.
    fn split(&self, p: usize, s: &[NodeId], kind: ObstructionKind) -> Result<Vec<SubInstance>, PreprocessError> {
        let parent = &self.members[p];
        let cr = contract(parent.inst(), s).map_err(|e| self.fail(kind, e.to_string()))?;
        let blocks = cr.hat_blocks().map_err(|e| self.fail(kind, e.to_string()))?;
        Ok(blocks
            .into_iter()
            .map(|b| {
                // hat_blocks maps into the parent's local ids
                compose(parent, b)
            })
            .collect())
    }

    /// Repair edges from each end of `edge` into every child.
    fn repairs(&self, p: usize, ends: (NodeId, NodeId), children: &[SubInstance]) -> Vec<Repair> {
        let parent = &self.members[p];
        let local = parent.local_edges();
        let inst = parent.inst();
        children
            .iter()
            .map(|c| {
                let mut from_u = None;
                let mut from_v = None;
                for &r in &c.edges {
                    let e = inst.edge(local[&r]);
                    if e.touches(ends.0) && from_u.is_none_or(|x| r < x) {
                        from_u = Some(r);
                    }
                    if e.touches(ends.1) && from_v.is_none_or(|x| r < x) {
                        from_v = Some(r);
                    }
                }
                Repair { from_u, from_v }
            })
            .collect()
    }

    fn apply(&mut self, p: usize, ob: Obstruction) -> Result<(), PreprocessError> {
        let kind = ob.kind;
        let parent = self.members[p].clone();
        let inst = parent.inst();
        let (children, undo): (Vec<SubInstance>, UndoData) = match kind {
            ObstructionKind::CutNode => {
                let v = ob.carrier.nodes[0];
                let blocks = two_ec_v_blocks(inst, v).map_err(|e| self.fail(kind, e.to_string()))?;
                (blocks.into_iter().map(|b| compose(&parent, b)).collect(), UndoData::CutNode)
            }
            ObstructionKind::ParallelEdges => {
                let (a, b) = (ob.carrier.edges[0], ob.carrier.edges[1]);
                let drop = if inst.edge(b).is_zero() { a } else { b };
                let keep: Vec<NodeId> = (0..inst.node_count()).collect();
                let mut sub = induced_subinstance(inst, &keep);
                let pos = sub.edges.iter().position(|&x| x == drop).unwrap();
                let mut edges = sub.inst.edges().to_vec();
                edges.remove(pos);
                sub.edges.remove(pos);
                sub.inst = MapInstance::new(sub.inst.node_count(), edges).expect("subset of valid edges");
                let discarded = parent.sub.edges[drop];
                (vec![compose(&parent, sub)], UndoData::Parallel { discarded })
            }
            ObstructionKind::ZeroS2 | ObstructionKind::UnitS2 => {
                let e = ob.carrier.edges[0];
                let edge = inst.edge(e);
                let children = self.split(p, &[edge.u, edge.v], kind)?;
                let repairs = self.repairs(p, (edge.u, edge.v), &children);
                let root_e = parent.sub.edges[e];
                if kind == ObstructionKind::UnitS2 {
                    (children, UndoData::UnitS2 { edge: root_e, ends: (edge.u, edge.v), repairs })
                } else {
                    let mut cheap = Vec::new();
                    for c in &children {
                        let opt_is_two = !opt_at_least(&c.inst, 3, &OracleBudget::default())
                            .map_err(|err| self.fail(kind, err.to_string()))?;
                        if !opt_is_two {
                            cheap.push(None);
                            continue;
                        }
                        let local = parent.local_edges();
                        let mut nodes = vec![edge.u, edge.v];
                        for &r in &c.edges {
                            let le = inst.edge(local[&r]);
                            for x in [le.u, le.v] {
                                if x != edge.u && x != edge.v && !nodes.contains(&x) {
                                    nodes.push(x);
                                }
                            }
                        }
                        let cyc = spanning_cycles_of_cost_two(inst, &nodes)
                            .into_iter()
                            .find(|c| c.contains(&e))
                            .ok_or_else(|| self.fail(kind, "no cost-two cycle through the zero-edge"))?;
                        cheap.push(Some(self.root_edges(p, &cyc)));
                    }
                    (children, UndoData::ZeroS2 { edge: root_e, ends: (edge.u, edge.v), cheap_cycles: cheap, repairs })
                }
            }
            ObstructionKind::S34 => {
                let cycle = match &ob.certificate {
                    Certificate::CycleAndBlocks { cycle, .. } => cycle.clone(),
                    _ => return Err(self.fail(kind, "missing cycle certificate")),
                };
                let children = self.split(p, &ob.carrier.nodes, kind)?;
                (children, UndoData::S34 { cycle: self.root_edges(p, &cycle) })
            }
            ObstructionKind::R4 | ObstructionKind::R8 => {
                let cr = contract(inst, &ob.carrier.nodes).map_err(|e| self.fail(kind, e.to_string()))?;
                let child = compose(&parent, cr.as_subinstance());
                let undo = match (&ob.certificate, kind) {
                    (Certificate::RedundantCycle { cycle, .. }, ObstructionKind::R4) => {
                        UndoData::R4 { cycle: self.root_edges(p, cycle) }
                    }
                    (Certificate::TwoCycles { c1, c2, attachments }, ObstructionKind::R8) => {
                        let f = r8_cover(inst, c1, c2, attachments.0)
                            .ok_or_else(|| self.fail(kind, "no edges f1, f2 from the unit-edge of C1 - a1"))?;
                        UndoData::R8 { f: self.root_edges(p, &f) }
                    }
                    _ => return Err(self.fail(kind, "certificate does not match kind")),
                };
                (vec![child], undo)
            }
        };
        let phi_before: usize = self.phi();
        let mut ids = Vec::new();
        for sub in children {
            let id = self.members.len();
            if !is_two_edge_connected(&sub.inst, &sub.inst.full(), true) {
                return Err(PreprocessError::ChildNotTwoEdgeConnected { step: self.steps.len(), member: id });
            }
            self.members.push(Member { id, parent: Some(p), sub });
            self.alive.push(true);
            ids.push(id);
        }
        self.alive[p] = false;
        let phi_after = self.phi();
        if phi_after >= phi_before {
            return Err(PreprocessError::PotentialStalled { step: self.steps.len(), before: phi_before, after: phi_after });
        }
        self.steps.push(Step { kind, carrier: ob.carrier, parent: p, children: ids, undo, phi_before, phi_after });
        Ok(())
    }

    fn phi(&self) -> usize {
        self.members.iter().filter(|m| self.alive[m.id]).map(|m| potential(m.inst())).sum()
    }
}

/// F = E(C1) ∪ E(C2) ∪ {f1, f2} − {e}, where e is the unit-edge of C1 − a1 and
/// f1, f2 join its ends to C2 (lowest ids). Local ids.
fn r8_cover(inst: &MapInstance, c1: &[EdgeId], c2: &[EdgeId], a1: NodeId) -> Option<Vec<EdgeId>> {
    let e = *c1.iter().find(|&&id| !inst.edge(id).touches(a1) && !inst.edge(id).is_zero())?;
    let c2_nodes: BTreeSet<NodeId> = c2.iter().flat_map(|&id| [inst.edge(id).u, inst.edge(id).v]).collect();
    let link = |x: NodeId| {
        inst.neighbors(x).iter().filter(|&&(y, _)| c2_nodes.contains(&y)).map(|&(_, id)| id).min()
    };
    let ed = inst.edge(e);
    let (f1, f2) = (link(ed.u)?, link(ed.v)?);
    let mut f: Vec<EdgeId> = c1.iter().copied().filter(|&id| id != e).collect();
    f.extend_from_slice(c2);
    f.push(f1);
    f.push(f2);
    f.sort_unstable();
    Some(f)
}

/// Runs the decomposition loop: while some listed sub-instance has ≥ 12 nodes
/// and is not well-structured, remove its first obstruction.
pub fn decompose(inst: &MapInstance) -> Result<DecompositionTrace, PreprocessError> {
    let root = Member {
        id: 0,
        parent: None,
        sub: SubInstance {
            inst: inst.clone(),
            nodes: (0..inst.node_count()).map(Some).collect(),
            edges: (0..inst.edge_count()).collect(),
        },
    };
    let mut d = Decomposer { members: vec![root], steps: Vec::new(), alive: vec![true] };
    let limit = inst.edge_count() + inst.node_count() + 1;
    while let Some(p) = (0..d.members.len()).find(|&i| d.alive[i] && needs_work(&d.members[i])) {
        assert!(d.steps.len() < limit, "decomposition exceeded m + n steps");
        let ob = detect(d.members[p].inst()).ok_or_else(|| PreprocessError::StepFailed {
            step: d.steps.len(),
            kind: ObstructionKind::CutNode,
            reason: "member is not well-structured but has no obstruction".into(),
        })?;
        d.apply(p, ob)?;
    }
    let leaves = (0..d.members.len()).filter(|&i| d.alive[i]).collect();
    Ok(DecompositionTrace { members: d.members, steps: d.steps, leaves })
}

type Solution = BTreeSet<EdgeId>;

fn union(children: &[&Solution]) -> Solution {
    children.iter().flat_map(|s| s.iter().copied()).collect()
}

pub fn undo_cut_node(children: &[&Solution]) -> Solution {
    union(children)
}

pub fn undo_parallel_edge(child: &Solution) -> Solution {
    child.clone()
}

/// Adds e to the union; when that leaves e as a bridge, adds the first repair
/// edge that makes the parent 2EC.
fn add_edge_with_repair(parent: &Member, edge: EdgeId, repairs: &[Repair], children: &[&Solution]) -> Option<Solution> {
    let mut sol = union(children);
    sol.insert(edge);
    if parent.accepts(&sol) {
        return Some(sol);
    }
    for (rep, child) in repairs.iter().zip(children) {
        for f in [rep.from_u, rep.from_v].into_iter().flatten() {
            if child.contains(&f) {
                continue;
            }
            let mut trial = sol.clone();
            trial.insert(f);
            if parent.accepts(&trial) {
                return Some(trial);
            }
        }
    }
    None
}

pub fn undo_zero_s2(
    parent: &Member,
    edge: EdgeId,
    cheap_cycles: &[Option<Vec<EdgeId>>],
    repairs: &[Repair],
    children: &[&Solution],
) -> Option<Solution> {
    if let Some(i) = cheap_cycles.iter().position(Option::is_some) {
        let mut parts: Vec<&Solution> = Vec::new();
        for (j, c) in children.iter().enumerate() {
            if j != i {
                parts.push(c);
            }
        }
        let mut sol = union(&parts);
        sol.extend(cheap_cycles[i].as_ref().unwrap().iter().copied());
        return parent.accepts(&sol).then_some(sol);
    }
    add_edge_with_repair(parent, edge, repairs, children)
}

pub fn undo_unit_s2(parent: &Member, edge: EdgeId, repairs: &[Repair], children: &[&Solution]) -> Option<Solution> {
    add_edge_with_repair(parent, edge, repairs, children)
}

pub fn undo_s34(cycle: &[EdgeId], children: &[&Solution]) -> Solution {
    let mut sol = union(children);
    sol.extend(cycle.iter().copied());
    sol
}

pub fn undo_r4(cycle: &[EdgeId], child: &Solution) -> Solution {
    let mut sol = child.clone();
    sol.extend(cycle.iter().copied());
    sol
}

pub fn undo_r8(f: &[EdgeId], child: &Solution) -> Solution {
    let mut sol = child.clone();
    sol.extend(f.iter().copied());
    sol
}

/// Replays the trace backwards from leaf solutions (root edge ids) and
/// returns a 2-ECSS of the root. Every lifted solution is re-verified.
pub fn recombine(
    trace: &DecompositionTrace,
    leaf_solutions: &HashMap<usize, Solution>,
) -> Result<Solution, PreprocessError> {
    let mut sols: HashMap<usize, Solution> = HashMap::new();
    for &leaf in &trace.leaves {
        let s = leaf_solutions.get(&leaf).ok_or(PreprocessError::MissingLeaf(leaf))?;
        if !trace.members[leaf].accepts(s) {
            return Err(PreprocessError::BadSolution { member: leaf });
        }
        sols.insert(leaf, s.clone());
    }
    for (i, step) in trace.steps.iter().enumerate().rev() {
        let parent = &trace.members[step.parent];
        let kids: Vec<Solution> = step.children.iter().map(|c| sols.remove(c).expect("children are solved first")).collect();
        let refs: Vec<&Solution> = kids.iter().collect();
        let lifted = match &step.undo {
            UndoData::CutNode => Some(undo_cut_node(&refs)),
            UndoData::Parallel { .. } => Some(undo_parallel_edge(refs[0])),
            UndoData::ZeroS2 { edge, cheap_cycles, repairs, .. } => {
                undo_zero_s2(parent, *edge, cheap_cycles, repairs, &refs)
            }
            UndoData::UnitS2 { edge, repairs, .. } => undo_unit_s2(parent, *edge, repairs, &refs),
            UndoData::S34 { cycle } => Some(undo_s34(cycle, &refs)),
            UndoData::R4 { cycle } => Some(undo_r4(cycle, refs[0])),
            UndoData::R8 { f } => Some(undo_r8(f, refs[0])),
        };
        let lifted = lifted.filter(|s| parent.accepts(s)).ok_or_else(|| PreprocessError::StepFailed {
            step: i,
            kind: step.kind,
            reason: "lifted solution is not a 2-ECSS of the parent".into(),
        })?;
        sols.insert(step.parent, lifted);
    }
    sols.remove(&0).ok_or(PreprocessError::MissingLeaf(0))
}

impl DecompositionTrace {
    /// One line per step (kind, parent-local carrier, children) then one per leaf.
    pub fn log(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.steps.iter().enumerate() {
            let _ = writeln!(
                out,
                "step {i} {} parent={} children={:?} nodes={:?} edges={:?} phi={}->{}",
                s.kind, s.parent, s.children, s.carrier.nodes, s.carrier.edges, s.phi_before, s.phi_after
            );
        }
        for &l in &self.leaves {
            let inst = self.members[l].inst();
            let tag = if inst.node_count() < SMALL_LIMIT { "small" } else { "well-structured" };
            let _ = writeln!(out, "leaf {l} n={} m={} {tag}", inst.node_count(), inst.edge_count());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_g1, gen_tight_s3};

    #[test]
    fn alpha_below_five_thirds_is_rejected() {
        assert!(ApproxConfig::new(Ratio::new(3, 2)).is_err());
        let c = ApproxConfig::default();
        assert!(c.within_bound(13, 9));
        assert!(!c.within_bound(14, 9));
        assert!(c.within_bound(2, 2));
    }

    #[test]
    fn well_structured_input_has_no_steps() {
        let t = decompose(&gen_tight_s3(1).unwrap()).unwrap();
        assert!(t.steps.is_empty());
        assert_eq!(t.leaves, vec![0]);
    }

    #[test]
    fn g1_contracts_the_s34() {
        let t = decompose(&gen_g1()).unwrap();
        assert_eq!(t.steps[0].kind, ObstructionKind::S34);
        assert_eq!(t.steps[0].carrier.nodes, vec![4, 5, 6, 7]);
        for &l in &t.leaves {
            assert!(t.members[l].inst().node_count() < SMALL_LIMIT);
        }
    }
}
