//! Turns a normalized D2 of a well-structured instance into a bridgeless
//! 2-edge cover by pseudo-ear augmentations paid from credits.

mod credits;

pub use credits::{init_credits, Credit, CreditState};

use crate::d2::D2Result;
use crate::graph::{block_decomposition, is_two_edge_connected, EdgeId, EdgeSubgraph, MapInstance, NodeId};
use crate::violation::{ensure, Violation};
use credits::{int, third, unit_bridge_degrees};
use num_traits::Zero;
use std::collections::VecDeque;
use std::fmt;

/// How the excluded node set Z was chosen before searching for the ear.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZCase {
    /// u white, Z empty.
    WhiteU,
    /// u black with two or more unit-bridges, Z = {u}.
    RichU,
    /// u has one unit-bridge and its other neighbour w is white or rich, Z = {u}.
    RichW,
    /// u and w both have one unit-bridge, Z = {u, w}.
    Pair,
}

/// Which of the three witness-path conditions released the missing credit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessCase {
    /// A white node other than r: its block's b-credit.
    WhiteNode,
    /// Three or more bridges: n-credits of the black nodes.
    ManyBridges,
    /// Two bridges and a black node with two unit-bridges.
    RichBlackNode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessCredit {
    pub case: WitnessCase,
    pub amount: Credit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoEar {
    /// Block index (in the current decomposition) of the pendant block R.
    pub block: usize,
    /// Bridge r–u leaving R, with r in R.
    pub r: NodeId,
    pub u: NodeId,
    pub z_case: ZCase,
    pub z: Vec<NodeId>,
    /// f_1 … f_k.
    pub edges: Vec<EdgeId>,
    /// Component indices of C_1 … C_{k-1}.
    pub components: Vec<usize>,
    pub head: NodeId,
    /// Node sequence of a shortest r–head path inside C_0.
    pub witness: Vec<NodeId>,
}

/// One bridge-covering iteration, for the optional trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EarRecord {
    pub component: Vec<NodeId>,
    pub block: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
    pub z_case: ZCase,
    pub witness: WitnessCase,
    pub c_paid: Credit,
    pub witness_released: Credit,
}

impl fmt::Display for EarRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ear component@{} block@{} k={} z={:?} witness={:?} c-credit={} released={}",
            self.component[0],
            self.block[0],
            self.edges.len(),
            self.z_case,
            self.witness,
            self.c_paid,
            self.witness_released
        )
    }
}

#[derive(Debug, Clone)]
pub struct BridgeCoverOutput {
    pub h: EdgeSubgraph,
    pub credits: CreditState,
    pub trace: Vec<EarRecord>,
}

const STAGE: &str = "bridge covering";

/// Credit available on the witness path Q (r excluded), with the first of
/// the three conditions that holds. `None` when none does.
pub fn witness_credit(state: &CreditState, q: &[NodeId]) -> Option<WitnessCredit> {
    let dec = &state.dec;
    let rest = &q[1..];
    if let Some(&w) = rest.iter().find(|&&v| dec.is_white(v)) {
        let b = dec.block_of[w].expect("white nodes have a block");
        return Some(WitnessCredit { case: WitnessCase::WhiteNode, amount: state.b_credit[b] });
    }
    let bridges = q.len() - 1;
    let amount = rest.iter().fold(Credit::zero(), |a, &v| a + state.n_credit[v]);
    if bridges >= 3 {
        return Some(WitnessCredit { case: WitnessCase::ManyBridges, amount });
    }
    if bridges == 2 && rest.iter().any(|&v| state.unit_bridge_degree[v] >= 2) {
        return Some(WitnessCredit { case: WitnessCase::RichBlackNode, amount });
    }
    None
}

/// Shortest path inside the H-component of `from` (neighbours in ascending id order).
fn path_in_h(inst: &MapInstance, h: &EdgeSubgraph, from: NodeId, to: NodeId) -> Option<Vec<NodeId>> {
    let mut prev = vec![usize::MAX; inst.node_count()];
    prev[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            let mut path = vec![to];
            let mut y = to;
            while y != from {
                y = prev[y];
                path.push(y);
            }
            path.reverse();
            return Some(path);
        }
        for &(y, id) in inst.neighbors(x) {
            if h.contains(id) && prev[y] == usize::MAX {
                prev[y] = x;
                queue.push_back(y);
            }
        }
    }
    None
}

/// Picks Z by the case analysis on u and w, then runs a 0-1 BFS (H-edges of
/// other components free, new edges cost one) in G − E(C_0) − Z from R to
/// C_0 − V(R) − Z. The witness path must release at least one credit.
pub fn find_pseudo_ear(
    inst: &MapInstance,
    h: &EdgeSubgraph,
    state: &CreditState,
    block: usize,
) -> Result<PseudoEar, Violation> {
    let dec = &state.dec;
    let blk = &dec.blocks[block];
    ensure(blk.is_pendant(), STAGE, || format!("block {:?} is not pendant", blk.nodes))?;
    let c0 = blk.component;
    let bridge = inst.edge(blk.incident_bridges[0]);
    let in_r = |x: NodeId| dec.block_of[x] == Some(block);
    let (r, u) = if in_r(bridge.u) { (bridge.u, bridge.v) } else { (bridge.v, bridge.u) };
    let ubd = &state.unit_bridge_degree;
    let (z_case, z) = if dec.is_white(u) {
        (ZCase::WhiteU, vec![])
    } else if ubd[u] >= 2 {
        (ZCase::RichU, vec![u])
    } else {
        let h_nbrs: Vec<NodeId> = inst.neighbors(u).iter().filter(|&&(_, id)| h.contains(id)).map(|&(y, _)| y).collect();
        ensure(h_nbrs.len() == 2, STAGE, || format!("black node {u} with one unit-bridge has H-degree {}", h_nbrs.len()))?;
        let w = if h_nbrs[0] == r { h_nbrs[1] } else { h_nbrs[0] };
        if dec.is_white(w) || ubd[w] >= 2 {
            (ZCase::RichW, vec![u])
        } else {
            (ZCase::Pair, vec![u, w])
        }
    };
    let n = inst.node_count();
    let mut banned = vec![false; n];
    for &x in &z {
        banned[x] = true;
    }
    let in_c0 = |x: NodeId| dec.component_of[x] == c0;
    let mut dist = vec![usize::MAX; n];
    let mut prev: Vec<Option<(NodeId, EdgeId)>> = vec![None; n];
    let mut deque = VecDeque::new();
    for &x in &blk.nodes {
        dist[x] = 0;
        deque.push_back(x);
    }
    let mut head = None;
    while let Some(x) = deque.pop_front() {
        if in_c0(x) && !in_r(x) {
            head = Some(x);
            break;
        }
        for &(y, id) in inst.neighbors(x) {
            if banned[y] {
                continue;
            }
            let w = if h.contains(id) {
                if in_c0(x) {
                    continue;
                }
                0
            } else {
                1
            };
            let d = dist[x] + w;
            if d < dist[y] {
                dist[y] = d;
                prev[y] = Some((x, id));
                if w == 0 {
                    deque.push_front(y);
                } else {
                    deque.push_back(y);
                }
            }
        }
    }
    let head = head.ok_or_else(|| {
        Violation::new(STAGE, format!("no pseudo-ear from block {:?} avoiding {:?}", blk.nodes, z))
    })?;
    let mut edges = Vec::new();
    let mut components = Vec::new();
    let mut y = head;
    while let Some((x, id)) = prev[y] {
        if !h.contains(id) {
            edges.push(id);
            if !in_c0(x) {
                components.push(dec.component_of[x]);
            }
        }
        y = x;
    }
    edges.reverse();
    components.reverse();
    let witness = path_in_h(inst, h, r, head).expect("head lies in C_0");
    if !z.is_empty() {
        ensure(witness.len() >= 3, STAGE, || format!("witness path {witness:?} has fewer than two edges"))?;
    }
    Ok(PseudoEar { block, r, u, z_case, z, edges, components, head, witness })
}

/// Adds f_1 … f_k, recomputes the blocks and carries credits: the merged
/// component keeps C_0's c-credit, R^new keeps R's b-credit, untouched blocks,
/// components and black nodes keep theirs. Everything else is released and
/// must cover the k new unit-edges.
pub fn apply_pseudo_ear(
    inst: &MapInstance,
    h: &EdgeSubgraph,
    state: &CreditState,
    ear: &PseudoEar,
) -> Result<(EdgeSubgraph, CreditState, EarRecord), Violation> {
    let old = &state.dec;
    let wc = witness_credit(state, &ear.witness).ok_or_else(|| {
        Violation::new(STAGE, format!("witness path {:?} meets none of the three conditions", ear.witness))
    })?;
    ensure(wc.amount >= int(1), STAGE, || format!("witness path {:?} releases only {}", ear.witness, wc.amount))?;
    let c_paid = ear.components.iter().fold(Credit::zero(), |a, &c| a + state.c_credit[c]);
    let k = int(ear.edges.len() as i64);
    ensure(c_paid + wc.amount >= k, STAGE, || format!("{} + {} credits cannot pay {k} edges", c_paid, wc.amount))?;

    let mut h2 = h.clone();
    for &f in &ear.edges {
        ensure(h2.insert(inst, f), STAGE, || format!("ear edge {f} already in H"))?;
    }
    let dec = block_decomposition(inst, &h2);
    let r_rep = old.blocks[ear.block].nodes[0];
    let r_new = dec.block_of[r_rep].expect("R stays white");
    let covered = old.blocks[ear.block].nodes.iter().chain(&ear.witness).all(|&x| dec.block_of[x] == Some(r_new));
    ensure(covered, STAGE, || "R^new does not contain R and the witness path".into())?;

    let mut c_credit = Vec::with_capacity(dec.components.len());
    for (nc, nodes) in dec.components.iter().enumerate() {
        if nc == dec.component_of[r_rep] {
            c_credit.push(state.c_credit[old.blocks[ear.block].component]);
            continue;
        }
        let oc = old.component_of[nodes[0]];
        ensure(&old.components[oc] == nodes, STAGE, || format!("component at {} changed without merging", nodes[0]))?;
        c_credit.push(state.c_credit[oc]);
    }
    let mut b_credit = Vec::with_capacity(dec.blocks.len());
    for (nb, b) in dec.blocks.iter().enumerate() {
        if nb == r_new {
            b_credit.push(state.b_credit[ear.block]);
            continue;
        }
        let ob = old.block_of[b.nodes[0]].filter(|&ob| old.blocks[ob].nodes == b.nodes);
        let ob = ob.ok_or_else(|| Violation::new(STAGE, format!("block at {} changed without joining R^new", b.nodes[0])))?;
        b_credit.push(state.b_credit[ob]);
    }
    let ubd = unit_bridge_degrees(inst, &dec);
    let mut n_credit = vec![Credit::zero(); inst.node_count()];
    for v in 0..inst.node_count() {
        if !dec.is_white(v) {
            ensure(!old.is_white(v) && state.unit_bridge_degree[v] == ubd[v], STAGE, || {
                format!("black node {v} changed its unit-bridges")
            })?;
            n_credit[v] = state.n_credit[v];
        }
    }
    let mut next = CreditState {
        dec,
        c_credit,
        b_credit,
        n_credit,
        unit_bridge_degree: ubd,
        budget: state.budget,
        initial: state.initial,
        paid: state.paid + k,
        released: state.released,
    };
    let dropped = state.total() - next.total();
    ensure(dropped >= k, STAGE, || format!("released {dropped} does not cover {k} new edges"))?;
    next.released += dropped;
    next.check(inst)?;
    let record = EarRecord {
        component: old.components[old.blocks[ear.block].component].clone(),
        block: old.blocks[ear.block].nodes.clone(),
        edges: ear.edges.clone(),
        z_case: ear.z_case,
        witness: wc.case,
        c_paid,
        witness_released: wc.amount,
    };
    Ok((h2, next, record))
}

/// Repeats pseudo-ear augmentations on the least component with a bridge and
/// its least pendant block until H is bridgeless. Every small block ends with
/// 4/3 credits, every large block with at least 2.
pub fn bridge_cover(inst: &MapInstance, d2: &D2Result) -> Result<BridgeCoverOutput, Violation> {
    let (mut h, mut state) = init_credits(inst, d2)?;
    let mut trace = Vec::new();
    let limit = d2.cover.len();
    loop {
        let dec = &state.dec;
        let Some(c) = (0..dec.components.len()).find(|&c| dec.component_has_bridge(c)) else {
            break;
        };
        ensure(trace.len() < limit, STAGE, || format!("more than |E(D2)| = {limit} iterations"))?;
        let block = dec
            .blocks_in_component(c)
            .into_iter()
            .filter(|&b| dec.blocks[b].is_pendant())
            .min_by_key(|&b| dec.blocks[b].nodes[0])
            .ok_or_else(|| Violation::new(STAGE, format!("component {c} has a bridge but no pendant block")))?;
        let ear = find_pseudo_ear(inst, &h, &state, block)?;
        let (h2, s2, record) = apply_pseudo_ear(inst, &h, &state, &ear)?;
        h = h2;
        state = s2;
        trace.push(record);
    }
    for id in d2.cover.iter() {
        ensure(h.contains(id), STAGE, || format!("D2 edge {id} was dropped"))?;
    }
    for (b, blk) in state.dec.blocks.iter().enumerate() {
        let need = if blk.unit_edges <= 2 { int(4) * third() } else { int(2) };
        ensure(state.block_total(b) >= need, STAGE, || {
            format!("block {:?} ends with {} credits", blk.nodes, state.block_total(b))
        })?;
        let sub = EdgeSubgraph::from_ids(inst, blk.edges.iter().copied());
        ensure(is_two_edge_connected(inst, &sub, false), STAGE, || format!("block {:?} is not 2EC", blk.nodes))?;
    }
    ensure((0..inst.node_count()).all(|v| h.degree(inst, v) >= 2), STAGE, || "H has a node of degree < 2".into())?;
    Ok(BridgeCoverOutput { h, credits: state, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::d2::{compute_d2, normalize_d2};
    use crate::gen::gen_tight_s3;

    #[test]
    fn tight_family_needs_no_ear() {
        let inst = gen_tight_s3(1).unwrap();
        let d2 = normalize_d2(&inst, compute_d2(&inst).unwrap()).unwrap();
        let out = bridge_cover(&inst, &d2).unwrap();
        assert!(out.trace.is_empty());
        assert_eq!(out.h, d2.cover);
        assert_eq!(out.credits.dec.components.len(), 2);
    }

    #[test]
    fn six_cycle_component_credits() {
        let hex = MapInstance::from_triples(6, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 5, 1), (5, 0, 1)]);
        let d2 = D2Result { cover: hex.full(), normalized: true, backend: crate::d2::BackendKind::Matching };
        let (_, s) = init_credits(&hex, &d2).unwrap();
        assert_eq!(s.c_credit, vec![int(1)]);
        assert_eq!(s.b_credit, vec![int(3)]);
    }
}
