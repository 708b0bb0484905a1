use super::{EdgeId, EdgeSubgraph, GraphError, MapInstance, NodeId, SubInstance};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

pub const NONE: usize = usize::MAX;

/// Labels the components of the graph restricted to edges passing `edge_ok` and
/// nodes passing `node_ok`. Excluded nodes get [`NONE`]. Labels are assigned in
/// order of the smallest node of each component.
pub fn label_components(
    inst: &MapInstance,
    edge_ok: impl Fn(EdgeId) -> bool,
    node_ok: impl Fn(NodeId) -> bool,
) -> (Vec<usize>, usize) {
    let n = inst.node_count();
    let mut label = vec![NONE; n];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for s in 0..n {
        if label[s] != NONE || !node_ok(s) {
            continue;
        }
        label[s] = count;
        queue.push_back(s);
        while let Some(x) = queue.pop_front() {
            for &(y, id) in inst.neighbors(x) {
                if label[y] == NONE && edge_ok(id) && node_ok(y) {
                    label[y] = count;
                    queue.push_back(y);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

fn groups(label: &[usize], count: usize) -> Vec<Vec<NodeId>> {
    let mut out = vec![Vec::new(); count];
    for (v, &l) in label.iter().enumerate() {
        if l != NONE {
            out[l].push(v);
        }
    }
    out
}

/// Components of `sub` over all nodes of the parent; untouched nodes are singletons.
pub fn connected_components(inst: &MapInstance, sub: &EdgeSubgraph) -> Vec<Vec<NodeId>> {
    let (label, count) = label_components(inst, |id| sub.contains(id), |_| true);
    groups(&label, count)
}

/// Bridges and articulation points of the subgraph given by `mask`, via one
/// iterative lowpoint DFS. Parallel edges are told apart by id, so a doubled
/// edge is never a bridge.
pub(crate) fn lowpoint(inst: &MapInstance, mask: &[bool]) -> (Vec<bool>, Vec<bool>) {
    let n = inst.node_count();
    let mut disc = vec![NONE; n];
    let mut low = vec![0usize; n];
    let mut is_bridge = vec![false; inst.edge_count()];
    let mut is_cut = vec![false; n];
    let mut timer = 0;
    let mut stack: Vec<(NodeId, EdgeId, usize)> = Vec::new();
    for root in 0..n {
        if disc[root] != NONE {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        let mut root_children = 0;
        stack.push((root, NONE, 0));
        while let Some(top) = stack.last_mut() {
            let (x, parent_edge) = (top.0, top.1);
            let adj = inst.neighbors(x);
            if top.2 < adj.len() {
                let (y, id) = adj[top.2];
                top.2 += 1;
                if !mask[id] || id == parent_edge || y == x {
                    continue;
                }
                if disc[y] == NONE {
                    disc[y] = timer;
                    low[y] = timer;
                    timer += 1;
                    if x == root {
                        root_children += 1;
                    }
                    stack.push((y, id, 0));
                } else if disc[y] < low[x] {
                    low[x] = disc[y];
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    if low[x] < low[p] {
                        low[p] = low[x];
                    }
                    if low[x] > disc[p] {
                        is_bridge[parent_edge] = true;
                    }
                    if p != root && low[x] >= disc[p] {
                        is_cut[p] = true;
                    }
                }
            }
        }
        if root_children >= 2 {
            is_cut[root] = true;
        }
    }
    (is_bridge, is_cut)
}

/// Edges of `sub` whose removal increases the number of components.
pub fn bridges(inst: &MapInstance, sub: &EdgeSubgraph) -> Vec<EdgeId> {
    let (is_bridge, _) = lowpoint(inst, sub.mask());
    (0..inst.edge_count()).filter(|&id| is_bridge[id]).collect()
}

/// Nodes whose deletion increases the number of components of `sub`.
pub fn cut_nodes(inst: &MapInstance, sub: &EdgeSubgraph) -> Vec<NodeId> {
    let (_, is_cut) = lowpoint(inst, sub.mask());
    (0..inst.node_count()).filter(|&v| is_cut[v]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeColor {
    White,
    Black,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SizeClass {
    Small,
    Large,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
    pub unit_edges: usize,
    pub class: SizeClass,
    /// Bridges of the subgraph with an endpoint in this block.
    pub incident_bridges: Vec<EdgeId>,
    pub component: usize,
}

impl Block {
    pub fn is_pendant(&self) -> bool {
        self.incident_bridges.len() == 1
    }

    pub fn min_node(&self) -> NodeId {
        self.nodes[0]
    }
}

/// Bridges, 2ec-blocks, cut nodes and the white/black colouring of a subgraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockDecomposition {
    pub bridges: Vec<EdgeId>,
    pub blocks: Vec<Block>,
    pub cut_nodes: Vec<NodeId>,
    pub node_color: Vec<NodeColor>,
    /// Block index per node, `None` for black nodes.
    pub block_of: Vec<Option<usize>>,
    /// Components of the subgraph (isolated nodes included), ordered by smallest node.
    pub components: Vec<Vec<NodeId>>,
    pub component_of: Vec<usize>,
    is_bridge: Vec<bool>,
}

impl BlockDecomposition {
    pub fn is_bridge(&self, id: EdgeId) -> bool {
        self.is_bridge[id]
    }

    pub fn is_white(&self, v: NodeId) -> bool {
        self.node_color[v] == NodeColor::White
    }

    /// Bridges of the subgraph with an endpoint at `v`.
    pub fn bridges_at(&self, inst: &MapInstance, v: NodeId) -> Vec<EdgeId> {
        inst.neighbors(v)
            .iter()
            .filter(|&&(_, id)| self.is_bridge[id])
            .map(|&(_, id)| id)
            .collect()
    }

    /// Blocks belonging to component `c`, in block order.
    pub fn blocks_in_component(&self, c: usize) -> Vec<usize> {
        (0..self.blocks.len()).filter(|&b| self.blocks[b].component == c).collect()
    }

    pub fn component_has_bridge(&self, c: usize) -> bool {
        let inside = self.blocks_in_component(c);
        inside.len() != 1 || self.blocks[inside[0]].nodes.len() != self.components[c].len()
    }
}

pub fn block_decomposition(inst: &MapInstance, sub: &EdgeSubgraph) -> BlockDecomposition {
    let n = inst.node_count();
    let (is_bridge, is_cut) = lowpoint(inst, sub.mask());
    let (comp_label, comp_count) = label_components(inst, |id| sub.contains(id), |_| true);
    let components = groups(&comp_label, comp_count);
    let (blk_label, blk_count) =
        label_components(inst, |id| sub.contains(id) && !is_bridge[id], |_| true);
    let raw_blocks = groups(&blk_label, blk_count);
    let mut block_index = vec![NONE; blk_count];
    let mut blocks = Vec::new();
    for (l, nodes) in raw_blocks.into_iter().enumerate() {
        if nodes.len() >= 2 {
            block_index[l] = blocks.len();
            let component = comp_label[nodes[0]];
            blocks.push(Block {
                nodes,
                edges: Vec::new(),
                unit_edges: 0,
                class: SizeClass::Small,
                incident_bridges: Vec::new(),
                component,
            });
        }
    }
    let mut block_of = vec![None; n];
    for v in 0..n {
        let b = block_index[blk_label[v]];
        if b != NONE {
            block_of[v] = Some(b);
        }
    }
    for id in sub.iter() {
        let e = inst.edge(id);
        if is_bridge[id] {
            for x in [e.u, e.v] {
                if let Some(b) = block_of[x] {
                    blocks[b].incident_bridges.push(id);
                }
            }
        } else if let Some(b) = block_of[e.u] {
            blocks[b].edges.push(id);
            blocks[b].unit_edges += e.cost as usize;
        }
    }
    for b in &mut blocks {
        b.class = if b.unit_edges <= 2 { SizeClass::Small } else { SizeClass::Large };
    }
    let node_color = block_of
        .iter()
        .map(|b| if b.is_some() { NodeColor::White } else { NodeColor::Black })
        .collect();
    BlockDecomposition {
        bridges: (0..inst.edge_count()).filter(|&id| is_bridge[id]).collect(),
        blocks,
        cut_nodes: (0..n).filter(|&v| is_cut[v]).collect(),
        node_color,
        block_of,
        components,
        component_of: comp_label,
        is_bridge,
    }
}

/// True iff the subgraph has ≥ 2 nodes, is connected and has no bridge. With
/// `spanning` the node set is every node of the parent, otherwise only the
/// nodes touched by `sub`.
pub fn is_two_edge_connected(inst: &MapInstance, sub: &EdgeSubgraph, spanning: bool) -> bool {
    let n = inst.node_count();
    let mut touched = vec![spanning; n];
    if !spanning {
        for id in sub.iter() {
            let e = inst.edge(id);
            touched[e.u] = true;
            touched[e.v] = true;
        }
    }
    if touched.iter().filter(|&&t| t).count() < 2 {
        return false;
    }
    let (_, count) = label_components(inst, |id| sub.contains(id), |v| touched[v]);
    if count != 1 {
        return false;
    }
    let (is_bridge, _) = lowpoint(inst, sub.mask());
    !sub.iter().any(|id| is_bridge[id])
}

/// Whether `sub` holds two edge-disjoint v–w paths (unit-capacity max-flow ≥ 2).
pub fn two_edge_disjoint_paths_exist(
    inst: &MapInstance,
    sub: &EdgeSubgraph,
    v: NodeId,
    w: NodeId,
) -> bool {
    assert_ne!(v, w);
    // flow[id] = +1 when pushed from edge.u to edge.v, -1 for the reverse.
    let mut flow = vec![0i8; inst.edge_count()];
    for _ in 0..2 {
        let mut pred: Vec<Option<(NodeId, EdgeId)>> = vec![None; inst.node_count()];
        let mut seen = vec![false; inst.node_count()];
        seen[v] = true;
        let mut queue = VecDeque::from([v]);
        while let Some(x) = queue.pop_front() {
            if x == w {
                break;
            }
            for &(y, id) in inst.neighbors(x) {
                if seen[y] || !sub.contains(id) || y == x {
                    continue;
                }
                let dir = if inst.edge(id).u == x { 1 } else { -1 };
                if flow[id] == dir {
                    continue;
                }
                seen[y] = true;
                pred[y] = Some((x, id));
                queue.push_back(y);
            }
        }
        if !seen[w] {
            return false;
        }
        let mut y = w;
        while let Some((x, id)) = pred[y] {
            let dir = if inst.edge(id).u == x { 1 } else { -1 };
            flow[id] += dir;
            y = x;
        }
    }
    true
}

/// Sub-instance induced on `nodes` (parallel copies included), numbered in
/// ascending parent order.
pub fn induced_subinstance(inst: &MapInstance, nodes: &[NodeId]) -> SubInstance {
    let mut sorted = nodes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut local = vec![NONE; inst.node_count()];
    for (i, &v) in sorted.iter().enumerate() {
        local[v] = i;
    }
    let mut edges = Vec::new();
    let mut ids = Vec::new();
    for (id, e) in inst.edges().iter().enumerate() {
        if local[e.u] != NONE && local[e.v] != NONE {
            edges.push(super::Edge::new(local[e.u], local[e.v], e.cost));
            ids.push(id);
        }
    }
    SubInstance {
        inst: MapInstance::new(sorted.len(), edges).expect("induced edges are in range"),
        nodes: sorted.into_iter().map(Some).collect(),
        edges: ids,
    }
}

/// The 2ec-v-blocks of `inst`: one sub-instance per component C of inst − v,
/// induced on {v} ∪ V(C), ordered by the smallest node of C.
pub fn two_ec_v_blocks(inst: &MapInstance, v: NodeId) -> Result<Vec<SubInstance>, GraphError> {
    let (label, count) = label_components(inst, |_| true, |x| x != v);
    if count < 2 {
        return Err(GraphError::NotACutNode(v));
    }
    let mut out = Vec::with_capacity(count);
    for comp in groups(&label, count) {
        let mut nodes = comp;
        nodes.push(v);
        out.push(induced_subinstance(inst, &nodes));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionResult {
    pub quotient: MapInstance,
    /// original node -> quotient node.
    pub node_map: Vec<NodeId>,
    pub contracted_node: NodeId,
    /// quotient edge -> original edge.
    pub edge_map: Vec<EdgeId>,
}

/// Contracts the node set `s`: edges inside `s` (parallel copies included) are
/// deleted, the nodes of `s` merge into one node placed at the position of the
/// smallest member, and edges of δ(s) keep their identity.
pub fn contract(inst: &MapInstance, s: &[NodeId]) -> Result<ContractionResult, GraphError> {
    let n = inst.node_count();
    let mut in_s = vec![false; n];
    for &x in s {
        if x >= n {
            return Err(GraphError::BadContractionSet);
        }
        in_s[x] = true;
    }
    let size = in_s.iter().filter(|&&b| b).count();
    if size == 0 || size == n {
        return Err(GraphError::BadContractionSet);
    }
    let (_, count) = label_components(inst, |_| true, |x| in_s[x]);
    if count != 1 {
        return Err(GraphError::BadContractionSet);
    }
    let first = (0..n).find(|&x| in_s[x]).unwrap();
    let mut node_map = vec![NONE; n];
    let mut next = 0;
    for x in 0..n {
        if x == first || !in_s[x] {
            node_map[x] = next;
            next += 1;
        }
    }
    let hat = node_map[first];
    for x in 0..n {
        if in_s[x] {
            node_map[x] = hat;
        }
    }
    let mut edges = Vec::new();
    let mut edge_map = Vec::new();
    for (id, e) in inst.edges().iter().enumerate() {
        if in_s[e.u] && in_s[e.v] {
            continue;
        }
        edges.push(super::Edge::new(node_map[e.u], node_map[e.v], e.cost));
        edge_map.push(id);
    }
    Ok(ContractionResult {
        quotient: MapInstance::new(next, edges).expect("contracted edges are in range"),
        node_map,
        contracted_node: hat,
        edge_map,
    })
}

impl ContractionResult {
    /// The 2ec-v̂-blocks of the quotient, with maps back to the *original* instance.
    /// The contracted node maps to `None`. Errors when v̂ is not a cut node.
    pub fn hat_blocks(&self) -> Result<Vec<SubInstance>, GraphError> {
        let blocks = two_ec_v_blocks(&self.quotient, self.contracted_node)?;
        let mut back = vec![NONE; self.quotient.node_count()];
        for (orig, &q) in self.node_map.iter().enumerate() {
            if q != self.contracted_node {
                back[q] = orig;
            }
        }
        Ok(blocks
            .into_iter()
            .map(|b| SubInstance {
                nodes: b
                    .nodes
                    .iter()
                    .map(|q| {
                        let q = q.expect("induced blocks map every node");
                        if q == self.contracted_node {
                            None
                        } else {
                            Some(back[q])
                        }
                    })
                    .collect(),
                edges: b.edges.iter().map(|&qe| self.edge_map[qe]).collect(),
                inst: b.inst,
            })
            .collect())
    }

    /// The quotient as a sub-instance of the original.
    pub fn as_subinstance(&self) -> SubInstance {
        let mut nodes = vec![None; self.quotient.node_count()];
        for (orig, &q) in self.node_map.iter().enumerate() {
            if q != self.contracted_node {
                nodes[q] = Some(orig);
            }
        }
        SubInstance { inst: self.quotient.clone(), nodes, edges: self.edge_map.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4() -> MapInstance {
        MapInstance::from_triples(4, &[(0, 1, 0), (1, 2, 1), (2, 3, 0), (3, 0, 1)])
    }

    fn bowtie() -> MapInstance {
        // two unit triangles 0-1-2 and 3-4-5 joined by edge 2-3
        MapInstance::from_triples(
            6,
            &[(0, 1, 1), (1, 2, 1), (2, 0, 1), (3, 4, 1), (4, 5, 1), (5, 3, 1), (2, 3, 1)],
        )
    }

    fn shared_node_bowtie() -> MapInstance {
        MapInstance::from_triples(5, &[(0, 1, 1), (1, 2, 1), (2, 0, 1), (2, 3, 1), (3, 4, 1), (4, 2, 1)])
    }

    #[test]
    fn components_of_empty_and_full() {
        let g = c4();
        assert_eq!(connected_components(&g, &g.full()), vec![vec![0, 1, 2, 3]]);
        let g3 = MapInstance::from_triples(3, &[(0, 1, 1)]);
        let empty = EdgeSubgraph::empty(&g3);
        assert_eq!(connected_components(&g3, &empty), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn bridges_of_cycle_and_bowtie() {
        let g = c4();
        assert!(bridges(&g, &g.full()).is_empty());
        let b = bowtie();
        assert_eq!(bridges(&b, &b.full()), vec![6]);
    }

    #[test]
    fn parallel_pair_is_not_a_bridge() {
        let g = MapInstance::from_triples(2, &[(0, 1, 1), (0, 1, 0)]);
        assert!(bridges(&g, &g.full()).is_empty());
        assert!(is_two_edge_connected(&g, &g.full(), true));
    }

    #[test]
    fn cut_node_of_shared_bowtie() {
        let g = shared_node_bowtie();
        assert_eq!(cut_nodes(&g, &g.full()), vec![2]);
        assert!(cut_nodes(&c4(), &c4().full()).is_empty());
    }

    #[test]
    fn blocks_of_c4_and_bowtie() {
        let g = c4();
        let d = block_decomposition(&g, &g.full());
        assert_eq!(d.blocks.len(), 1);
        assert_eq!(d.blocks[0].class, SizeClass::Small);
        let b = bowtie();
        let d = block_decomposition(&b, &b.full());
        assert_eq!(d.blocks.len(), 2);
        assert!(d.blocks.iter().all(|bl| bl.class == SizeClass::Large && bl.is_pendant()));
        assert!(d.node_color.iter().all(|&c| c == NodeColor::White));
        assert!(d.component_has_bridge(0));
    }

    #[test]
    fn black_nodes_on_bridge_paths() {
        // triangle 0-1-2, path 2-3-4, triangle 4-5-6
        let g = MapInstance::from_triples(
            7,
            &[(0, 1, 1), (1, 2, 1), (2, 0, 1), (2, 3, 1), (3, 4, 0), (4, 5, 1), (5, 6, 1), (6, 4, 1)],
        );
        let d = block_decomposition(&g, &g.full());
        assert_eq!(d.node_color[3], NodeColor::Black);
        assert_eq!(d.bridges, vec![3, 4]);
        assert_eq!(d.cut_nodes, vec![2, 3, 4]);
    }

    #[test]
    fn v_blocks_of_shared_bowtie() {
        let g = shared_node_bowtie();
        let parts = two_ec_v_blocks(&g, 2).unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].nodes, vec![Some(0), Some(1), Some(2)]);
        assert_eq!(parts[1].edges, vec![3, 4, 5]);
        assert!(two_ec_v_blocks(&c4(), 0).is_err());
    }

    #[test]
    fn contract_edge_of_c4_gives_triangle() {
        let g = c4();
        let r = contract(&g, &[0, 1]).unwrap();
        assert_eq!(r.quotient.node_count(), 3);
        assert_eq!(r.quotient.edge_count(), 3);
        assert_eq!(r.contracted_node, 0);
        assert_eq!(r.edge_map, vec![1, 2, 3]);
        assert!(contract(&g, &[0, 2]).is_err());
        assert!(contract(&g, &[0, 1, 2, 3]).is_err());
    }

    #[test]
    fn disjoint_paths() {
        let g = c4();
        assert!(two_edge_disjoint_paths_exist(&g, &g.full(), 0, 2));
        let path = MapInstance::from_triples(3, &[(0, 1, 1), (1, 2, 1)]);
        assert!(!two_edge_disjoint_paths_exist(&path, &path.full(), 0, 2));
        // a bowtie sharing node 2: 0 and 4 are joined by two edge-disjoint paths
        let b = shared_node_bowtie();
        assert!(two_edge_disjoint_paths_exist(&b, &b.full(), 0, 4));
    }

    #[test]
    fn two_ec_checks() {
        let g = c4();
        assert!(is_two_edge_connected(&g, &g.full(), true));
        let minus = EdgeSubgraph::from_ids(&g, [0, 1, 2]);
        assert!(!is_two_edge_connected(&g, &minus, true));
        let partial = EdgeSubgraph::from_ids(&g, [0]);
        assert!(!is_two_edge_connected(&g, &partial, false));
    }
}
