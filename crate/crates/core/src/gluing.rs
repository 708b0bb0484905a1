//! Merges the 2EC components of a bridgeless 2-edge cover into one 2-ECSS,
//! paying every added unit-edge from block credits.

use crate::bridge_cover::{BridgeCoverOutput, Credit};
use crate::graph::{
    bridges, is_two_edge_connected, label_components, two_edge_disjoint_paths_exist, EdgeId, EdgeSubgraph,
    MapInstance, NodeId, NONE,
};
use crate::violation::{ensure, Violation};
use num_rational::Ratio;
use num_traits::Zero;
use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

const STAGE: &str = "gluing";

fn int(x: i64) -> Credit {
    Ratio::from_integer(x)
}

fn small_credit() -> Credit {
    Ratio::new(4, 3)
}

/// The current 2ec-blocks (= components of H), ordered by smallest node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Blocks {
    pub of: Vec<usize>,
    pub nodes: Vec<Vec<NodeId>>,
    pub edges: Vec<Vec<EdgeId>>,
    pub unit_edges: Vec<usize>,
}

impl Blocks {
    pub fn new(inst: &MapInstance, h: &EdgeSubgraph) -> Self {
        let (of, count) = label_components(inst, |id| h.contains(id), |_| true);
        let mut nodes = vec![Vec::new(); count];
        for (v, &b) in of.iter().enumerate() {
            nodes[b].push(v);
        }
        let mut edges = vec![Vec::new(); count];
        let mut unit_edges = vec![0; count];
        for id in h.iter() {
            let b = of[inst.edge(id).u];
            edges[b].push(id);
            unit_edges[b] += inst.edge(id).cost as usize;
        }
        Blocks { of, nodes, edges, unit_edges }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_small(&self, b: usize) -> bool {
        self.unit_edges[b] <= 2
    }

    /// Blocks other than `b` that `x` has a G-edge into, ascending.
    fn neighbour_blocks(&self, inst: &MapInstance, x: NodeId) -> BTreeSet<usize> {
        let b = self.of[x];
        inst.neighbors(x).iter().map(|&(y, _)| self.of[y]).filter(|&c| c != b).collect()
    }

    /// Lowest-id G-edge from `x` into block `target`.
    fn edge_into(&self, inst: &MapInstance, x: NodeId, target: usize) -> Option<EdgeId> {
        inst.neighbors(x).iter().filter(|&&(y, _)| self.of[y] == target).map(|&(_, id)| id).min()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PairForm {
    /// The unit-edge uw of the block, discarded by the merge.
    Edge(EdgeId),
    /// u, w opposite on a 4-cycle; the G-edge joining the other two nodes is
    /// added and the block's two unit-edges are discarded.
    Diagonal(EdgeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quality {
    Good { b_u: usize, b_w: usize },
    /// `target` is the only block holding the outside neighbours of u and w;
    /// `None` when one of them has no outside neighbour.
    Bad { target: Option<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwappablePair {
    pub block: usize,
    pub u: NodeId,
    pub w: NodeId,
    pub form: PairForm,
    pub quality: Quality,
}

impl SwappablePair {
    pub fn is_good(&self) -> bool {
        matches!(self.quality, Quality::Good { .. })
    }
}

fn classify(inst: &MapInstance, blocks: &Blocks, u: NodeId, w: NodeId) -> Quality {
    let su = blocks.neighbour_blocks(inst, u);
    let sw = blocks.neighbour_blocks(inst, w);
    for &b_u in &su {
        if let Some(&b_w) = sw.iter().find(|&&b| b != b_u) {
            return Quality::Good { b_u, b_w };
        }
    }
    let target = match (su.iter().next(), sw.iter().next()) {
        (Some(&a), Some(&b)) if a == b => Some(a),
        _ => None,
    };
    Quality::Bad { target }
}

/// Every swappable pair of the small block `block`, sorted by (u, w). A small
/// block must have one; a 3-cycle must have a swappable edge.
pub fn enumerate_swappable_pairs(
    inst: &MapInstance,
    h: &EdgeSubgraph,
    blocks: &Blocks,
    block: usize,
) -> Result<Vec<SwappablePair>, Violation> {
    let nodes = &blocks.nodes[block];
    ensure(blocks.is_small(block) && (nodes.len() == 3 || nodes.len() == 4), STAGE, || {
        format!("block {nodes:?} is not a small 3- or 4-cycle")
    })?;
    let attached = |x: NodeId| inst.neighbors(x).iter().any(|&(y, _)| blocks.of[y] != block);
    let mut out = Vec::new();
    for &id in &blocks.edges[block] {
        let e = inst.edge(id);
        if !e.is_zero() && attached(e.u) && attached(e.v) {
            let (u, w) = (e.u.min(e.v), e.u.max(e.v));
            out.push(SwappablePair { block, u, w, form: PairForm::Edge(id), quality: classify(inst, blocks, u, w) });
        }
    }
    if nodes.len() == 4 {
        let adjacent_in_h =
            |a: NodeId, b: NodeId| inst.neighbors(a).iter().any(|&(y, id)| y == b && h.contains(id));
        for (i, &u) in nodes.iter().enumerate() {
            for &w in &nodes[i + 1..] {
                if adjacent_in_h(u, w) {
                    continue;
                }
                let others: Vec<NodeId> = nodes.iter().copied().filter(|&x| x != u && x != w).collect();
                let diag = inst
                    .neighbors(others[0])
                    .iter()
                    .filter(|&&(y, id)| y == others[1] && !h.contains(id))
                    .map(|&(_, id)| id)
                    .min();
                if let Some(f) = diag {
                    out.push(SwappablePair { block, u, w, form: PairForm::Diagonal(f), quality: classify(inst, blocks, u, w) });
                }
            }
        }
    }
    out.sort_by_key(|p| (p.u, p.w, p.form));
    ensure(!out.is_empty(), STAGE, || format!("small block {nodes:?} has no swappable pair"))?;
    if nodes.len() == 3 {
        ensure(out.iter().any(|p| matches!(p.form, PairForm::Edge(_))), STAGE, || {
            format!("3-cycle {nodes:?} has no swappable edge")
        })?;
    }
    Ok(out)
}

/// Arcs of the auxiliary digraph: red (small) blocks point along bad pairs to
/// the block holding all outside neighbours of the pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxDigraph {
    pub red: Vec<bool>,
    pub arcs: Vec<(usize, usize, SwappablePair)>,
}

impl AuxDigraph {
    pub fn out_arcs(&self, a: usize) -> impl Iterator<Item = &(usize, usize, SwappablePair)> {
        self.arcs.iter().filter(move |arc| arc.0 == a)
    }
}

/// Builds D^aux when no good pair exists, and checks that every red node has
/// an outgoing arc and that no two red nodes point only at each other.
pub fn build_daux(inst: &MapInstance, h: &EdgeSubgraph, blocks: &Blocks) -> Result<AuxDigraph, Violation> {
    let red: Vec<bool> = (0..blocks.len()).map(|b| blocks.is_small(b)).collect();
    let mut arcs = Vec::new();
    for a in (0..blocks.len()).filter(|&b| red[b]) {
        for p in enumerate_swappable_pairs(inst, h, blocks, a)? {
            match p.quality {
                Quality::Good { .. } => {
                    return Err(Violation::new(STAGE, format!("good pair {:?} while building D^aux", (p.u, p.w))));
                }
                Quality::Bad { target: Some(t) } => arcs.push((a, t, p)),
                Quality::Bad { target: None } => {}
            }
        }
    }
    let d = AuxDigraph { red, arcs };
    for a in (0..blocks.len()).filter(|&b| d.red[b]) {
        let outs: Vec<usize> = d.out_arcs(a).map(|arc| arc.1).collect();
        ensure(!outs.is_empty(), STAGE, || format!("red block {:?} has no outgoing arc", blocks.nodes[a]))?;
        if let [b] = outs[..] {
            if d.red[b] {
                let back: Vec<usize> = d.out_arcs(b).map(|arc| arc.1).collect();
                ensure(back != [a], STAGE, || {
                    format!("red blocks {:?} and {:?} point only at each other", blocks.nodes[a], blocks.nodes[b])
                })?;
            }
        }
    }
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MergeKind {
    GoodPair,
    RedGreen,
    RedChain,
    LargeCycle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeRecord {
    pub kind: MergeKind,
    /// Smallest node of every merged block.
    pub blocks: Vec<NodeId>,
    pub added: Vec<EdgeId>,
    pub discarded: Vec<EdgeId>,
    pub credit_in: Credit,
    pub credit_out: Credit,
}

impl MergeRecord {
    pub fn net_cost(&self) -> i64 {
        self.added.len() as i64 - self.discarded.len() as i64
    }
}

impl fmt::Display for MergeRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "merge {:?} blocks@{:?} added={:?} discarded={:?} credit {} -> {}",
            self.kind, self.blocks, self.added, self.discarded, self.credit_in, self.credit_out
        )
    }
}

/// H with one credit balance per block.
#[derive(Debug, Clone)]
pub struct GlueState {
    pub h: EdgeSubgraph,
    pub blocks: Blocks,
    pub credit: Vec<Credit>,
}

impl GlueState {
    /// Per-block credit c + b from a finished bridge cover.
    pub fn from_bridge_cover(inst: &MapInstance, out: &BridgeCoverOutput) -> Result<Self, Violation> {
        let blocks = Blocks::new(inst, &out.h);
        let dec = &out.credits.dec;
        let mut credit = Vec::with_capacity(blocks.len());
        for nodes in &blocks.nodes {
            let b = dec.block_of[nodes[0]].filter(|&b| dec.blocks[b].nodes == *nodes);
            let b = b.ok_or_else(|| Violation::new(STAGE, format!("component at {} is not a 2ec-block", nodes[0])))?;
            credit.push(out.credits.block_total(b));
        }
        let s = GlueState { h: out.h.clone(), blocks, credit };
        s.check(inst)?;
        Ok(s)
    }

    pub fn total(&self) -> Credit {
        self.credit.iter().fold(Credit::zero(), |a, &b| a + b)
    }

    /// H simple, bridgeless, minimum degree two; small blocks hold 4/3, large at least 2.
    pub fn check(&self, inst: &MapInstance) -> Result<(), Violation> {
        let mut seen = HashSet::new();
        for id in self.h.iter() {
            let e = inst.edge(id);
            ensure(seen.insert((e.u.min(e.v), e.u.max(e.v))), STAGE, || format!("H has parallel edges at {id}"))?;
        }
        ensure(bridges(inst, &self.h).is_empty(), STAGE, || "H has a bridge".into())?;
        ensure((0..inst.node_count()).all(|v| self.h.degree(inst, v) >= 2), STAGE, || {
            "H has a node of degree < 2".into()
        })?;
        for b in 0..self.blocks.len() {
            let need = if self.blocks.is_small(b) { small_credit() } else { int(2) };
            ensure(self.credit[b] >= need, STAGE, || {
                format!("block {:?} holds {} < {need}", self.blocks.nodes[b], self.credit[b])
            })?;
        }
        Ok(())
    }

    /// Adds and discards edges, recomputes blocks and gives the merged block
    /// the pooled credit minus the net cost.
    fn commit(
        &mut self,
        inst: &MapInstance,
        kind: MergeKind,
        merged: &[usize],
        added: Vec<EdgeId>,
        discarded: Vec<EdgeId>,
        h: EdgeSubgraph,
    ) -> Result<MergeRecord, Violation> {
        let credit_in = merged.iter().fold(Credit::zero(), |a, &b| a + self.credit[b]);
        let net = added.len() as i64 - discarded.len() as i64;
        let credit_out = credit_in - int(net);
        let anchor = self.blocks.nodes[merged[0]][0];
        let blocks = Blocks::new(inst, &h);
        let fused = blocks.of[anchor];
        for &b in merged {
            let x = self.blocks.nodes[b][0];
            ensure(blocks.of[x] == fused, STAGE, || format!("block at {x} was not merged"))?;
        }
        let mut credit = Vec::with_capacity(blocks.len());
        for (nb, nodes) in blocks.nodes.iter().enumerate() {
            if nb == fused {
                credit.push(credit_out);
                continue;
            }
            let ob = self.blocks.of[nodes[0]];
            ensure(self.blocks.nodes[ob] == *nodes, STAGE, || format!("block at {} changed", nodes[0]))?;
            credit.push(self.credit[ob]);
        }
        ensure(credit_out >= int(2), STAGE, || format!("merged block keeps only {credit_out} credits"))?;
        ensure(blocks.len() < self.blocks.len(), STAGE, || "merge did not reduce the block count".into())?;
        let fused_edges = EdgeSubgraph::from_ids(inst, blocks.edges[fused].iter().copied());
        ensure(is_two_edge_connected(inst, &fused_edges, false), STAGE, || "merged block is not 2EC".into())?;
        let record = MergeRecord {
            kind,
            blocks: merged.iter().map(|&b| self.blocks.nodes[b][0]).collect(),
            added,
            discarded,
            credit_in,
            credit_out,
        };
        self.h = h;
        self.blocks = blocks;
        self.credit = credit;
        self.check(inst)?;
        Ok(record)
    }
}

/// Adds `edges`, then discards the pair's edges one at a time, each time
/// confirming two edge-disjoint paths between the ends of the discarded edge.
fn add_then_discard(
    inst: &MapInstance,
    h: &EdgeSubgraph,
    edges: &[EdgeId],
    pair: &SwappablePair,
    blocks: &Blocks,
) -> Result<(EdgeSubgraph, Vec<EdgeId>, Vec<EdgeId>), Violation> {
    let mut h = h.clone();
    let mut added = edges.to_vec();
    let discard: Vec<EdgeId> = match pair.form {
        PairForm::Edge(e) => vec![e],
        PairForm::Diagonal(f) => {
            added.push(f);
            blocks.edges[pair.block].iter().copied().filter(|&id| !inst.edge(id).is_zero()).collect()
        }
    };
    for &id in &added {
        ensure(h.insert(inst, id), STAGE, || format!("edge {id} is already in H"))?;
    }
    for &id in &discard {
        ensure(!inst.edge(id).is_zero(), STAGE, || format!("refusing to discard zero-edge {id}"))?;
        h.remove(inst, id);
        let e = inst.edge(id);
        ensure(two_edge_disjoint_paths_exist(inst, &h, e.u, e.v), STAGE, || {
            format!("discarding {id} leaves fewer than two paths between its ends")
        })?;
    }
    Ok((h, added, discard))
}

/// Shortest path of blocks from `from` to `to` in G̃ − `avoid`; returns the
/// G-edges along it.
fn block_path(inst: &MapInstance, blocks: &Blocks, from: usize, to: usize, avoid: usize) -> Option<Vec<EdgeId>> {
    let mut prev: Vec<Option<(usize, EdgeId)>> = vec![None; blocks.len()];
    let mut seen = vec![false; blocks.len()];
    seen[from] = true;
    seen[avoid] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(b) = queue.pop_front() {
        if b == to {
            let mut path = Vec::new();
            let mut c = to;
            while let Some((p, id)) = prev[c] {
                path.push(id);
                c = p;
            }
            path.reverse();
            return Some(path);
        }
        for &x in &blocks.nodes[b] {
            for &(y, id) in inst.neighbors(x) {
                let c = blocks.of[y];
                if !seen[c] {
                    seen[c] = true;
                    prev[c] = Some((b, id));
                    queue.push_back(c);
                }
            }
        }
    }
    None
}

/// Step (1): cycle A, B_u, …, B_w, A through G̃ − A, then the pair's discard.
pub fn merge_via_good_pair(inst: &MapInstance, state: &mut GlueState, pair: &SwappablePair) -> Result<MergeRecord, Violation> {
    let Quality::Good { b_u, b_w } = pair.quality else {
        return Err(Violation::new(STAGE, "pair is not good"));
    };
    let blocks = &state.blocks;
    let path = block_path(inst, blocks, b_u, b_w, pair.block).ok_or_else(|| {
        Violation::new(STAGE, format!("no path between the neighbours of {:?} avoiding it", blocks.nodes[pair.block]))
    })?;
    let mut edges = vec![blocks.edge_into(inst, pair.u, b_u).unwrap()];
    edges.extend(&path);
    edges.push(blocks.edge_into(inst, pair.w, b_w).unwrap());
    let mut merged = vec![pair.block];
    for &id in &path {
        let e = inst.edge(id);
        for x in [e.u, e.v] {
            if !merged.contains(&blocks.of[x]) {
                merged.push(blocks.of[x]);
            }
        }
    }
    for b in [b_u, b_w] {
        if !merged.contains(&b) {
            merged.push(b);
        }
    }
    let (h, added, discarded) = add_then_discard(inst, &state.h, &edges, pair, blocks)?;
    state.commit(inst, MergeKind::GoodPair, &merged, added, discarded, h)
}

/// Two edges from u and w into the target block, then the pair's discard.
fn bad_pair_edges(inst: &MapInstance, blocks: &Blocks, pair: &SwappablePair, target: usize) -> Result<Vec<EdgeId>, Violation> {
    let eu = blocks.edge_into(inst, pair.u, target);
    let ew = blocks.edge_into(inst, pair.w, target);
    match (eu, ew) {
        (Some(a), Some(b)) => Ok(vec![a, b]),
        _ => Err(Violation::new(STAGE, format!("pair {:?} does not reach its target", (pair.u, pair.w)))),
    }
}

pub fn merge_red_green(inst: &MapInstance, state: &mut GlueState, a: usize, b: usize, pair: &SwappablePair) -> Result<MergeRecord, Violation> {
    let edges = bad_pair_edges(inst, &state.blocks, pair, b)?;
    let (h, added, discarded) = add_then_discard(inst, &state.h, &edges, pair, &state.blocks)?;
    state.commit(inst, MergeKind::RedGreen, &[a, b], added, discarded, h)
}

/// A_1 into A_2 along the first pair, then A_2 into A_3 along the second.
pub fn merge_red_chain(
    inst: &MapInstance,
    state: &mut GlueState,
    chain: [usize; 3],
    first: &SwappablePair,
    second: &SwappablePair,
) -> Result<MergeRecord, Violation> {
    let blocks = &state.blocks;
    let e1 = bad_pair_edges(inst, blocks, first, chain[1])?;
    let (h1, mut added, mut discarded) = add_then_discard(inst, &state.h, &e1, first, blocks)?;
    let e2 = bad_pair_edges(inst, blocks, second, chain[2])?;
    let (h2, added2, discarded2) = add_then_discard(inst, &h1, &e2, second, blocks)?;
    added.extend(added2);
    discarded.extend(discarded2);
    state.commit(inst, MergeKind::RedChain, &chain, added, discarded, h2)
}

/// Step (3): shortest cycle of G̃ through block 0, all blocks large.
pub fn merge_large_cycle(inst: &MapInstance, state: &mut GlueState) -> Result<MergeRecord, Violation> {
    let blocks = &state.blocks;
    let root = 0;
    let k = blocks.len();
    let mut dist = vec![NONE; k];
    let mut branch = vec![NONE; k];
    let mut parent: Vec<Option<(usize, EdgeId)>> = vec![None; k];
    dist[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(b) = queue.pop_front() {
        for &x in &blocks.nodes[b] {
            for &(y, id) in inst.neighbors(x) {
                let c = blocks.of[y];
                if dist[c] == NONE {
                    dist[c] = dist[b] + 1;
                    branch[c] = if b == root { c } else { branch[b] };
                    parent[c] = Some((b, id));
                    queue.push_back(c);
                }
            }
        }
    }
    let mut best: Option<(usize, EdgeId)> = None;
    for (id, e) in inst.edges().iter().enumerate() {
        let (a, b) = (blocks.of[e.u], blocks.of[e.v]);
        if a == b || parent[a].map(|p| p.1) == Some(id) || parent[b].map(|p| p.1) == Some(id) {
            continue;
        }
        if dist[a] == NONE || dist[b] == NONE || branch[a] == branch[b] {
            continue;
        }
        let len = dist[a] + dist[b] + 1;
        if best.is_none_or(|(l, _)| len < l) {
            best = Some((len, id));
        }
    }
    let (_, closing) = best.ok_or_else(|| Violation::new(STAGE, "no cycle of G̃ through the first block"))?;
    let mut edges = vec![closing];
    let mut merged = vec![root];
    let e = inst.edge(closing);
    for start in [blocks.of[e.u], blocks.of[e.v]] {
        let mut c = start;
        while let Some((p, id)) = parent[c] {
            edges.push(id);
            merged.push(c);
            c = p;
        }
    }
    edges.sort_unstable();
    let mut h = state.h.clone();
    for &id in &edges {
        h.insert(inst, id);
    }
    state.commit(inst, MergeKind::LargeCycle, &merged, edges, Vec::new(), h)
}

#[derive(Debug, Clone)]
pub struct GlueOutput {
    pub h: EdgeSubgraph,
    pub credit: Credit,
    pub trace: Vec<MergeRecord>,
}

fn first_good_pair(inst: &MapInstance, state: &GlueState) -> Result<Option<SwappablePair>, Violation> {
    for a in (0..state.blocks.len()).filter(|&b| state.blocks.is_small(b)) {
        if let Some(p) = enumerate_swappable_pairs(inst, &state.h, &state.blocks, a)?.into_iter().find(|p| p.is_good()) {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

/// Bad pairs of small blocks, keyed by block node set, for the monotonicity check.
fn bad_pairs(inst: &MapInstance, state: &GlueState) -> Result<HashSet<(Vec<NodeId>, NodeId, NodeId)>, Violation> {
    let mut out = HashSet::new();
    for a in (0..state.blocks.len()).filter(|&b| state.blocks.is_small(b)) {
        for p in enumerate_swappable_pairs(inst, &state.h, &state.blocks, a)? {
            if !p.is_good() {
                out.insert((state.blocks.nodes[a].clone(), p.u, p.w));
            }
        }
    }
    Ok(out)
}

/// Steps (1) to (4): good-pair merges, then red merges driven by D^aux, then
/// cycles through large blocks until one block remains. The final block keeps
/// at least two credits, so cost(H') ≤ cost(H) + γ − 2.
pub fn glue(inst: &MapInstance, cover: &BridgeCoverOutput) -> Result<GlueOutput, Violation> {
    let mut state = GlueState::from_bridge_cover(inst, cover)?;
    let gamma = state.total();
    let start_cost = cover.h.cost();
    let mut trace = Vec::new();
    while let Some(pair) = first_good_pair(inst, &state)? {
        trace.push(merge_via_good_pair(inst, &mut state, &pair)?);
    }
    let mut bad_before = bad_pairs(inst, &state)?;
    while (0..state.blocks.len()).any(|b| state.blocks.is_small(b)) {
        let d = build_daux(inst, &state.h, &state.blocks)?;
        let red_green = d.arcs.iter().find(|arc| !d.red[arc.1]).copied();
        let record = if let Some((a, b, pair)) = red_green {
            merge_red_green(inst, &mut state, a, b, &pair)?
        } else {
            let chain = d.arcs.iter().find_map(|&(a1, a2, p1)| {
                d.out_arcs(a2).find(|arc| arc.1 != a1).map(|&(_, a3, p2)| ([a1, a2, a3], p1, p2))
            });
            let (chain, p1, p2) =
                chain.ok_or_else(|| Violation::new(STAGE, "D^aux has red nodes but no red path of length two"))?;
            merge_red_chain(inst, &mut state, chain, &p1, &p2)?
        };
        trace.push(record);
        let bad_now = bad_pairs(inst, &state)?;
        for a in (0..state.blocks.len()).filter(|&b| state.blocks.is_small(b)) {
            for p in enumerate_swappable_pairs(inst, &state.h, &state.blocks, a)? {
                let key = (state.blocks.nodes[a].clone(), p.u, p.w);
                ensure(!(p.is_good() && bad_before.contains(&key)), STAGE, || {
                    format!("pair {:?} of {:?} turned from bad to good", (p.u, p.w), key.0)
                })?;
            }
        }
        bad_before = bad_now;
    }
    while state.blocks.len() >= 2 {
        trace.push(merge_large_cycle(inst, &mut state)?);
    }
    let credit = state.credit[0];
    ensure(credit >= int(2), STAGE, || format!("final block keeps {credit} credits"))?;
    ensure(is_two_edge_connected(inst, &state.h, true), STAGE, || "output is not a 2-ECSS".into())?;
    let bound = int(start_cost as i64) + gamma - int(2);
    ensure(int(state.h.cost() as i64) <= bound, STAGE, || {
        format!("cost {} exceeds cost(H) + γ − 2 = {bound}", state.h.cost())
    })?;
    Ok(GlueOutput { h: state.h, credit, trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Three alternating 4-cycles; unit-edge 1-2 reaches only the second,
    /// unit-edge 5-6 only the third.
    fn chain() -> (MapInstance, GlueState) {
        let mut t = Vec::new();
        for base in [0, 4, 8] {
            t.extend([(base, base + 1, 0), (base + 1, base + 2, 1), (base + 2, base + 3, 0), (base + 3, base, 1)]);
        }
        t.extend([(1, 4, 1), (2, 7, 1), (5, 8, 1), (6, 11, 1)]);
        let inst = MapInstance::from_triples(12, &t);
        let h = EdgeSubgraph::from_ids(&inst, 0..12);
        let blocks = Blocks::new(&inst, &h);
        let state = GlueState { h, blocks, credit: vec![small_credit(); 3] };
        (inst, state)
    }

    #[test]
    fn chain_pairs_are_bad_and_point_forward() {
        let (inst, s) = chain();
        let p = enumerate_swappable_pairs(&inst, &s.h, &s.blocks, 0).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!((p[0].u, p[0].w), (1, 2));
        assert_eq!(p[0].quality, Quality::Bad { target: Some(1) });
        let d = build_daux(&inst, &s.h, &s.blocks).unwrap();
        let arcs: Vec<(usize, usize)> = d.arcs.iter().map(|a| (a.0, a.1)).collect();
        assert_eq!(arcs, vec![(0, 1), (1, 0), (1, 2), (2, 1)]);
    }

    #[test]
    fn red_chain_costs_two_and_keeps_two_credits() {
        let (inst, mut s) = chain();
        let d = build_daux(&inst, &s.h, &s.blocks).unwrap();
        let p1 = d.arcs[0].2;
        let p2 = d.arcs[2].2;
        let before = s.h.cost();
        let rec = merge_red_chain(&inst, &mut s, [0, 1, 2], &p1, &p2).unwrap();
        assert_eq!(rec.net_cost(), 2);
        assert_eq!(s.h.cost(), before + 2);
        assert_eq!(rec.credit_out, int(2));
        assert_eq!(s.blocks.len(), 1);
        assert!(is_two_edge_connected(&inst, &s.h, true));
    }

    #[test]
    fn triangle_has_a_swappable_edge() {
        // triangle 0-1-2 (zero 1-2) inside a unit 6-cycle 3..8
        let mut t = vec![(0, 1, 1), (0, 2, 1), (1, 2, 0)];
        for i in 0..6 {
            t.push((3 + i, 3 + (i + 1) % 6, 1));
        }
        t.extend([(0, 3, 1), (1, 5, 1), (2, 7, 1)]);
        let inst = MapInstance::from_triples(9, &t);
        let h = EdgeSubgraph::from_ids(&inst, 0..9);
        let blocks = Blocks::new(&inst, &h);
        let p = enumerate_swappable_pairs(&inst, &h, &blocks, 0).unwrap();
        assert!(p.iter().all(|p| matches!(p.form, PairForm::Edge(_))));
        assert_eq!(p.len(), 2);
        assert!(p.iter().all(|p| p.quality == Quality::Bad { target: Some(1) }));
    }
}
