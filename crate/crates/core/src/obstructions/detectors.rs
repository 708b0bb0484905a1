use super::{Carrier, Certificate, Obstruction, ObstructionKind};
use crate::graph::{
    contract, cut_nodes, induced_subinstance, label_components, validate_instance, EdgeId,
    MapInstance, NodeId, SubInstance,
};
use crate::oracle::{opt_at_least, OracleBudget};
use std::collections::{BTreeSet, HashMap};

/// One obstruction kind's candidate generator and checker.
pub trait ObstructionDetector: Send + Sync {
    fn kind(&self) -> ObstructionKind;

    /// Every occurrence, sorted by carrier.
    fn scan(&self, inst: &MapInstance) -> Vec<Obstruction>;

    /// The occurrence with the least carrier.
    fn first(&self, inst: &MapInstance) -> Option<Obstruction> {
        self.scan(inst).into_iter().next()
    }
}

fn finish(mut found: Vec<Obstruction>) -> Vec<Obstruction> {
    found.sort_by(|a, b| a.carrier.cmp(&b.carrier));
    found.dedup_by(|a, b| a.carrier == b.carrier);
    found
}

fn components_without(inst: &MapInstance, removed: &[NodeId]) -> usize {
    label_components(inst, |_| true, |x| !removed.contains(&x)).1
}

fn opt_at_least_three(b: &SubInstance) -> bool {
    // Blocks with ≥ 6 nodes pass without search; smaller ones are tiny.
    opt_at_least(&b.inst, 3, &OracleBudget::default()).expect("v̂-blocks below six nodes fit the oracle")
}

fn parent_nodes(b: &SubInstance) -> Vec<NodeId> {
    b.nodes.iter().flatten().copied().collect()
}

fn zero_at_hat(b: &SubInstance) -> bool {
    b.nodes
        .iter()
        .position(|x| x.is_none())
        .is_some_and(|h| b.inst.neighbors(h).iter().any(|&(_, id)| b.inst.edge(id).is_zero()))
}

/// Node sets of the 2ec-v̂-blocks of inst / s with opt ≥ 3 among those
/// passing `keep`.
fn strong_blocks(inst: &MapInstance, s: &[NodeId], keep: impl Fn(&SubInstance) -> bool) -> Vec<Vec<NodeId>> {
    let Ok(cr) = contract(inst, s) else { return Vec::new() };
    let Ok(blocks) = cr.hat_blocks() else { return Vec::new() };
    blocks.iter().filter(|b| keep(b) && opt_at_least_three(b)).map(parent_nodes).collect()
}

fn unit_between(inst: &MapInstance, a: NodeId, b: NodeId) -> Option<EdgeId> {
    inst.neighbors(a).iter().filter(|&&(y, id)| y == b && !inst.edge(id).is_zero()).map(|&(_, id)| id).min()
}

/// Cost-two cycles on three or four nodes: a zero-edge ab with an unmatched
/// common neighbour c, or zero-edges ab, cd closed by unit-edges bc and da.
/// Each entry is (sorted node set, cycle edge ids).
fn cheap_cycles(inst: &MapInstance) -> Vec<(Vec<NodeId>, Vec<EdgeId>)> {
    let mut out = BTreeSet::new();
    for ab in inst.zero_edges() {
        let e = inst.edge(ab);
        for (a, b) in [(e.u, e.v), (e.v, e.u)] {
            let mut seen = BTreeSet::new();
            for &(c, _) in inst.neighbors(b) {
                if c == a || !seen.insert(c) {
                    continue;
                }
                let Some(bc) = unit_between(inst, b, c) else { continue };
                match inst.zero_partner(c) {
                    None => {
                        if let Some(ca) = unit_between(inst, c, a) {
                            let mut nodes = vec![a, b, c];
                            nodes.sort_unstable();
                            let mut cyc = vec![ab, bc, ca];
                            cyc.sort_unstable();
                            out.insert((nodes, cyc));
                        }
                    }
                    Some((d, cd)) => {
                        if d == a || d == b {
                            continue;
                        }
                        if let Some(da) = unit_between(inst, d, a) {
                            let mut nodes = vec![a, b, c, d];
                            nodes.sort_unstable();
                            let mut cyc = vec![ab, bc, cd, da];
                            cyc.sort_unstable();
                            out.insert((nodes, cyc));
                        }
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

fn induced_two_node_connected(inst: &MapInstance, s: &[NodeId]) -> bool {
    if s.len() < 3 {
        return false;
    }
    let sub = induced_subinstance(inst, s);
    let full = sub.inst.full();
    label_components(&sub.inst, |_| true, |_| true).1 == 1 && cut_nodes(&sub.inst, &full).is_empty()
}

fn sorted(s: &[NodeId]) -> Vec<NodeId> {
    let mut v = s.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

fn cycles_on(inst: &MapInstance, s: &[NodeId]) -> Vec<Vec<EdgeId>> {
    let s = sorted(s);
    let mut out = Vec::new();
    for &ab in inst.zero_edges().collect::<Vec<_>>().iter() {
        let e = inst.edge(ab);
        if !(s.contains(&e.u) && s.contains(&e.v)) {
            continue;
        }
        for (a, b) in [(e.u, e.v), (e.v, e.u)] {
            for &c in &s {
                if c == a || c == b {
                    continue;
                }
                let Some(bc) = unit_between(inst, b, c) else { continue };
                if s.len() == 3 {
                    if inst.zero_partner(c).is_none() {
                        if let Some(ca) = unit_between(inst, c, a) {
                            out.push(vec![ab, bc, ca]);
                        }
                    }
                } else if let Some((d, cd)) = inst.zero_partner(c) {
                    if d != a && d != b && s.contains(&d) {
                        if let Some(da) = unit_between(inst, d, a) {
                            out.push(vec![ab, bc, cd, da]);
                        }
                    }
                }
            }
        }
    }
    for c in out.iter_mut() {
        c.sort_unstable();
    }
    out.sort();
    out.dedup();
    out
}

/// Zero-edge e = uv with G − {u, v} disconnected.
pub fn is_zero_cost_s2(inst: &MapInstance, e: EdgeId) -> Option<Obstruction> {
    let edge = inst.edge(e);
    if !edge.is_zero() {
        return None;
    }
    let k = components_without(inst, &[edge.u, edge.v]);
    (k >= 2).then(|| Obstruction {
        kind: ObstructionKind::ZeroS2,
        carrier: Carrier::edges(vec![e]),
        certificate: Certificate::Components(k),
    })
}

/// Unit-edge e = uv with G − {u, v} disconnected and two v̂-blocks of G/{u,v},
/// each with opt ≥ 3 and a zero-edge at v̂.
pub fn is_unit_cost_s2(inst: &MapInstance, e: EdgeId) -> Option<Obstruction> {
    let edge = inst.edge(e);
    if edge.is_zero() {
        return None;
    }
    let (u, v) = (edge.u, edge.v);
    let matched_out = |x: NodeId| inst.zero_partner(x).is_some_and(|(p, _)| p != u && p != v);
    if !(matched_out(u) && matched_out(v)) || components_without(inst, &[u, v]) < 2 {
        return None;
    }
    let blocks = strong_blocks(inst, &[u, v], zero_at_hat);
    (blocks.len() >= 2).then(|| Obstruction {
        kind: ObstructionKind::UnitS2,
        carrier: Carrier::edges(vec![e]),
        certificate: Certificate::StrongBlocks(blocks),
    })
}

pub fn is_s34(inst: &MapInstance, s: &[NodeId]) -> Option<Obstruction> {
    let s = sorted(s);
    if !(3..=4).contains(&s.len()) || components_without(inst, &s) < 2 {
        return None;
    }
    let cycle = cycles_on(inst, &s).into_iter().next()?;
    let zero_in_cut =
        inst.edges().iter().any(|e| e.is_zero() && s.contains(&e.u) != s.contains(&e.v));
    if zero_in_cut || !induced_two_node_connected(inst, &s) {
        return None;
    }
    let blocks = strong_blocks(inst, &s, |_| true);
    (blocks.len() >= 2).then(|| Obstruction {
        kind: ObstructionKind::S34,
        carrier: Carrier::nodes(s),
        certificate: Certificate::CycleAndBlocks { cycle, blocks },
    })
}

pub fn is_r4(inst: &MapInstance, s: &[NodeId]) -> Option<Obstruction> {
    let s = sorted(s);
    if s.len() != 4 || inst.node_count() == 4 {
        return None;
    }
    let cycle = cycles_on(inst, &s).into_iter().next()?;
    for i in 0..4 {
        for j in i + 1..4 {
            let (a, b) = (s[i], s[j]);
            if !inst.adjacent(a, b) && inst.degree(a) == 2 && inst.degree(b) == 2 {
                return Some(Obstruction {
                    kind: ObstructionKind::R4,
                    carrier: Carrier::nodes(s),
                    certificate: Certificate::RedundantCycle { cycle, pair: (a, b) },
                });
            }
        }
    }
    None
}

/// The unit-edge of the 4-cycle `cycle` that avoids `a`, when both its ends
/// have a neighbour in `other`.
fn unit_edge_reaches(inst: &MapInstance, cycle: &[EdgeId], a: NodeId, other: &[NodeId]) -> bool {
    let far: Vec<EdgeId> =
        cycle.iter().copied().filter(|&id| !inst.edge(id).touches(a) && !inst.edge(id).is_zero()).collect();
    if far.len() != 1 {
        return false;
    }
    let e = inst.edge(far[0]);
    let reaches = |x: NodeId| inst.neighbors(x).iter().any(|&(y, _)| other.contains(&y));
    reaches(e.u) && reaches(e.v)
}

pub fn is_r8(inst: &MapInstance, s: &[NodeId]) -> Option<Obstruction> {
    let s = sorted(s);
    if s.len() != 8 || inst.node_count() == 8 {
        return None;
    }
    let att: Vec<NodeId> = s
        .iter()
        .copied()
        .filter(|&x| inst.neighbors(x).iter().any(|&(y, _)| !s.contains(&y)))
        .collect();
    if att.len() != 2 {
        return None;
    }
    let quads: Vec<(Vec<NodeId>, Vec<EdgeId>)> = cheap_cycles_within(inst, &s);
    for (n1, c1) in &quads {
        if !n1.contains(&att[0]) || n1.contains(&att[1]) {
            continue;
        }
        let rest: Vec<NodeId> = s.iter().copied().filter(|x| !n1.contains(x)).collect();
        for (n2, c2) in quads.iter().filter(|(n2, _)| *n2 == rest) {
            if unit_edge_reaches(inst, c1, att[0], n2) && unit_edge_reaches(inst, c2, att[1], n1) {
                return Some(Obstruction {
                    kind: ObstructionKind::R8,
                    carrier: Carrier::nodes(s.clone()),
                    certificate: Certificate::TwoCycles {
                        c1: c1.clone(),
                        c2: c2.clone(),
                        attachments: (att[0], att[1]),
                    },
                });
            }
        }
    }
    None
}

fn cheap_cycles_within(inst: &MapInstance, s: &[NodeId]) -> Vec<(Vec<NodeId>, Vec<EdgeId>)> {
    let mut out = Vec::new();
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            for k in j + 1..s.len() {
                for l in k + 1..s.len() {
                    let q = [s[i], s[j], s[k], s[l]];
                    for c in cycles_on(inst, &q) {
                        out.push((q.to_vec(), c));
                    }
                }
            }
        }
    }
    out
}

struct CutNodeDetector;
struct ParallelDetector;
struct UnitS2Detector;
struct ZeroS2Detector;
struct S34Detector;
struct R4Detector;
struct R8Detector;

impl ObstructionDetector for CutNodeDetector {
    fn kind(&self) -> ObstructionKind {
        ObstructionKind::CutNode
    }

    fn scan(&self, inst: &MapInstance) -> Vec<Obstruction> {
        let connected = label_components(inst, |_| true, |_| true).1 == 1;
        let nodes: Vec<NodeId> = if connected {
            cut_nodes(inst, &inst.full())
        } else {
            (0..inst.node_count()).filter(|&v| components_without(inst, &[v]) >= 2).collect()
        };
        finish(
            nodes
                .into_iter()
                .map(|v| Obstruction {
                    kind: ObstructionKind::CutNode,
                    carrier: Carrier::nodes(vec![v]),
                    certificate: Certificate::Components(components_without(inst, &[v])),
                })
                .collect(),
        )
    }
}

impl ObstructionDetector for ParallelDetector {
    fn kind(&self) -> ObstructionKind {
        ObstructionKind::ParallelEdges
    }

    fn scan(&self, inst: &MapInstance) -> Vec<Obstruction> {
        let mut by_pair: HashMap<(NodeId, NodeId), Vec<EdgeId>> = HashMap::new();
        for (id, e) in inst.edges().iter().enumerate() {
            by_pair.entry((e.u.min(e.v), e.u.max(e.v))).or_default().push(id);
        }
        let mut out = Vec::new();
        for ids in by_pair.values() {
            for i in 0..ids.len() {
                for j in i + 1..ids.len() {
                    out.push(Obstruction {
                        kind: ObstructionKind::ParallelEdges,
                        carrier: Carrier::edges(vec![ids[i], ids[j]]),
                        certificate: Certificate::Parallel,
                    });
                }
            }
        }
        finish(out)
    }
}

impl ObstructionDetector for UnitS2Detector {
    fn kind(&self) -> ObstructionKind {
        ObstructionKind::UnitS2
    }

    fn scan(&self, inst: &MapInstance) -> Vec<Obstruction> {
        finish(inst.unit_edges().filter_map(|e| is_unit_cost_s2(inst, e)).collect())
    }
}

impl ObstructionDetector for ZeroS2Detector {
    fn kind(&self) -> ObstructionKind {
        ObstructionKind::ZeroS2
    }

    fn scan(&self, inst: &MapInstance) -> Vec<Obstruction> {
        finish(inst.zero_edges().filter_map(|e| is_zero_cost_s2(inst, e)).collect())
    }
}

fn distinct_cycle_sets(inst: &MapInstance) -> Vec<Vec<NodeId>> {
    let sets: BTreeSet<Vec<NodeId>> = cheap_cycles(inst).into_iter().map(|(n, _)| n).collect();
    sets.into_iter().collect()
}

impl ObstructionDetector for S34Detector {
    fn kind(&self) -> ObstructionKind {
        ObstructionKind::S34
    }

    fn scan(&self, inst: &MapInstance) -> Vec<Obstruction> {
        finish(distinct_cycle_sets(inst).iter().filter_map(|s| is_s34(inst, s)).collect())
    }
}

impl ObstructionDetector for R4Detector {
    fn kind(&self) -> ObstructionKind {
        ObstructionKind::R4
    }

    fn scan(&self, inst: &MapInstance) -> Vec<Obstruction> {
        finish(
            distinct_cycle_sets(inst)
                .iter()
                .filter(|s| s.len() == 4)
                .filter_map(|s| is_r4(inst, s))
                .collect(),
        )
    }
}

impl ObstructionDetector for R8Detector {
    fn kind(&self) -> ObstructionKind {
        ObstructionKind::R8
    }

    fn scan(&self, inst: &MapInstance) -> Vec<Obstruction> {
        let quads: Vec<Vec<NodeId>> = distinct_cycle_sets(inst).into_iter().filter(|s| s.len() == 4).collect();
        let mut by_node: HashMap<NodeId, Vec<usize>> = HashMap::new();
        for (i, q) in quads.iter().enumerate() {
            for &x in q {
                by_node.entry(x).or_default().push(i);
            }
        }
        let mut candidates = BTreeSet::new();
        for q1 in &quads {
            for &x in q1 {
                for &(y, _) in inst.neighbors(x) {
                    if q1.contains(&y) {
                        continue;
                    }
                    for &j in by_node.get(&y).map(Vec::as_slice).unwrap_or(&[]) {
                        let q2 = &quads[j];
                        if q2.iter().any(|z| q1.contains(z)) {
                            continue;
                        }
                        candidates.insert(sorted(&[q1.as_slice(), q2.as_slice()].concat()));
                    }
                }
            }
        }
        finish(candidates.iter().filter_map(|s| is_r8(inst, s)).collect())
    }
}

/// All detectors, in detection priority order.
pub fn detectors() -> Vec<Box<dyn ObstructionDetector>> {
    ObstructionKind::ALL.iter().map(|&k| detector(k)).collect()
}

pub fn detector(kind: ObstructionKind) -> Box<dyn ObstructionDetector> {
    match kind {
        ObstructionKind::CutNode => Box::new(CutNodeDetector),
        ObstructionKind::ParallelEdges => Box::new(ParallelDetector),
        ObstructionKind::UnitS2 => Box::new(UnitS2Detector),
        ObstructionKind::ZeroS2 => Box::new(ZeroS2Detector),
        ObstructionKind::S34 => Box::new(S34Detector),
        ObstructionKind::R4 => Box::new(R4Detector),
        ObstructionKind::R8 => Box::new(R8Detector),
    }
}

/// Every occurrence of `kind`, or of all kinds in priority order.
pub fn scan_all(inst: &MapInstance, kind: Option<ObstructionKind>) -> Vec<Obstruction> {
    match kind {
        Some(k) => detector(k).scan(inst),
        None => detectors().iter().flat_map(|d| d.scan(inst)).collect(),
    }
}

/// The first obstruction in priority order, least carrier within a kind.
pub fn detect(inst: &MapInstance) -> Option<Obstruction> {
    detectors().iter().find_map(|d| d.first(inst))
}

/// A valid 2EC instance with ≥ 12 nodes and no obstruction.
pub fn is_well_structured(inst: &MapInstance) -> bool {
    inst.node_count() >= 12 && validate_instance(inst, true).passed() && detect(inst).is_none()
}
