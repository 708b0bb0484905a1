//! Literal, brute-force evaluation of the obstruction definitions. Nothing here
//! is shared with the detectors beyond basic graph primitives.

use super::{opt_at_least, OracleBudget, OracleError};
use crate::graph::{contract, label_components, EdgeId, MapInstance, NodeId};
use crate::obstructions::{Carrier, ObstructionKind};

fn components_without(inst: &MapInstance, removed: &[NodeId]) -> usize {
    label_components(inst, |_| true, |x| !removed.contains(&x)).1
}

fn cheapest_edge(inst: &MapInstance, a: NodeId, b: NodeId) -> Option<EdgeId> {
    inst.neighbors(a)
        .iter()
        .filter(|&&(y, _)| y == b)
        .map(|&(_, id)| id)
        .min_by_key(|&id| (inst.edge(id).cost, id))
}

fn permutations(items: &[NodeId]) -> Vec<Vec<NodeId>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Every spanning cycle of cost two on `nodes` (3 or 4 nodes), as edge ids in
/// cycle order starting from the smallest node. Each consecutive pair uses its
/// cheapest edge, lowest id first.
pub fn spanning_cycles_of_cost_two(inst: &MapInstance, nodes: &[NodeId]) -> Vec<Vec<EdgeId>> {
    let mut sorted = nodes.to_vec();
    sorted.sort_unstable();
    if sorted.len() < 3 {
        return Vec::new();
    }
    let first = sorted[0];
    let mut out = Vec::new();
    for tail in permutations(&sorted[1..]) {
        if tail[0] > *tail.last().unwrap() {
            continue;
        }
        let mut order = vec![first];
        order.extend(tail);
        let mut ids = Vec::new();
        for i in 0..order.len() {
            match cheapest_edge(inst, order[i], order[(i + 1) % order.len()]) {
                Some(id) => ids.push(id),
                None => break,
            }
        }
        if ids.len() == order.len() && inst.cost_of(ids.iter().copied()) == 2 {
            out.push(ids);
        }
    }
    out
}

fn induced_two_node_connected(inst: &MapInstance, s: &[NodeId]) -> bool {
    if s.len() < 3 {
        return false;
    }
    let inside = |x: NodeId| s.contains(&x);
    if label_components(inst, |_| true, inside).1 != 1 {
        return false;
    }
    s.iter().all(|&v| label_components(inst, |_| true, |x| inside(x) && x != v).1 == 1)
}

/// Number of 2ec-v̂-blocks of inst / s with opt ≥ 3, counting only blocks for
/// which `extra` holds as well.
fn strong_hat_blocks(
    inst: &MapInstance,
    s: &[NodeId],
    budget: &OracleBudget,
    extra: impl Fn(&crate::graph::SubInstance) -> bool,
) -> Result<usize, OracleError> {
    let cr = match contract(inst, s) {
        Ok(cr) => cr,
        Err(_) => return Ok(0),
    };
    let blocks = match cr.hat_blocks() {
        Ok(b) => b,
        Err(_) => return Ok(0),
    };
    let mut count = 0;
    for b in &blocks {
        if extra(b) && opt_at_least(&b.inst, 3, budget)? {
            count += 1;
        }
    }
    Ok(count)
}

fn has_zero_at_hat(b: &crate::graph::SubInstance) -> bool {
    let hat = b.nodes.iter().position(|x| x.is_none());
    match hat {
        Some(h) => b.inst.neighbors(h).iter().any(|&(_, id)| b.inst.edge(id).is_zero()),
        None => false,
    }
}

fn attachments(inst: &MapInstance, s: &[NodeId]) -> Vec<NodeId> {
    let mut out: Vec<NodeId> = s
        .iter()
        .copied()
        .filter(|&v| inst.neighbors(v).iter().any(|&(y, _)| !s.contains(&y)))
        .collect();
    out.sort_unstable();
    out
}

fn check_r8(inst: &MapInstance, s: &[NodeId]) -> bool {
    let att = attachments(inst, s);
    if att.len() != 2 {
        return false;
    }
    for mask in 0u32..(1 << 8) {
        if mask.count_ones() != 4 || mask & 1 == 0 {
            continue;
        }
        let half1: Vec<NodeId> = (0..8).filter(|i| mask >> i & 1 == 1).map(|i| s[i]).collect();
        let half2: Vec<NodeId> = (0..8).filter(|i| mask >> i & 1 == 0).map(|i| s[i]).collect();
        for (h1, h2) in [(&half1, &half2), (&half2, &half1)] {
            if !(h1.contains(&att[0]) && h2.contains(&att[1])) {
                continue;
            }
            let ok1 = cycle_condition(inst, h1, att[0], h2);
            let ok2 = cycle_condition(inst, h2, att[1], h1);
            if ok1 && ok2 {
                return true;
            }
        }
    }
    false
}

/// Some cost-two 4-cycle on `half` whose path `C − a` has a unit-edge with both
/// ends adjacent to `other`.
fn cycle_condition(inst: &MapInstance, half: &[NodeId], a: NodeId, other: &[NodeId]) -> bool {
    let touches_other =
        |x: NodeId| inst.neighbors(x).iter().any(|&(y, _)| other.contains(&y));
    for cycle in spanning_cycles_of_cost_two(inst, half) {
        let path: Vec<EdgeId> = cycle.iter().copied().filter(|&id| !inst.edge(id).touches(a)).collect();
        let units: Vec<EdgeId> = path.iter().copied().filter(|&id| !inst.edge(id).is_zero()).collect();
        if units.len() == 1 {
            let e = inst.edge(units[0]);
            if touches_other(e.u) && touches_other(e.v) {
                return true;
            }
        }
    }
    false
}

/// Evaluates the definition of `kind` on `carrier` by brute force. Node
/// carriers are for cut-node, S34, R4 and R8; edge carriers for the rest.
pub fn obstruction_check_by_definition(
    inst: &MapInstance,
    kind: ObstructionKind,
    carrier: &Carrier,
    budget: &OracleBudget,
) -> Result<bool, OracleError> {
    let n = inst.node_count();
    let bad = || OracleError::BadCarrier(kind.name().to_string());
    let nodes = &carrier.nodes;
    if nodes.iter().any(|&v| v >= n) || carrier.edges.iter().any(|&id| id >= inst.edge_count()) {
        return Err(bad());
    }
    match kind {
        ObstructionKind::CutNode => {
            if nodes.len() != 1 || !carrier.edges.is_empty() {
                return Err(bad());
            }
            Ok(components_without(inst, nodes) >= 2)
        }
        ObstructionKind::ParallelEdges => {
            if carrier.edges.len() != 2 {
                return Err(bad());
            }
            let (e, f) = (inst.edge(carrier.edges[0]), inst.edge(carrier.edges[1]));
            Ok((e.u, e.v) == (f.u, f.v) || (e.u, e.v) == (f.v, f.u))
        }
        ObstructionKind::ZeroS2 | ObstructionKind::UnitS2 => {
            if carrier.edges.len() != 1 {
                return Err(bad());
            }
            let e = inst.edge(carrier.edges[0]);
            let zero_wanted = kind == ObstructionKind::ZeroS2;
            if e.is_zero() != zero_wanted || components_without(inst, &[e.u, e.v]) < 2 {
                return Ok(false);
            }
            if zero_wanted {
                return Ok(true);
            }
            Ok(strong_hat_blocks(inst, &[e.u, e.v], budget, has_zero_at_hat)? >= 2)
        }
        ObstructionKind::S34 => {
            if !(3..=4).contains(&nodes.len()) {
                return Err(bad());
            }
            if !induced_two_node_connected(inst, nodes)
                || spanning_cycles_of_cost_two(inst, nodes).is_empty()
                || components_without(inst, nodes) < 2
            {
                return Ok(false);
            }
            let zero_in_cut = inst.edges().iter().any(|e| {
                e.is_zero() && (nodes.contains(&e.u) != nodes.contains(&e.v))
            });
            if zero_in_cut {
                return Ok(false);
            }
            Ok(strong_hat_blocks(inst, nodes, budget, |_| true)? >= 2)
        }
        ObstructionKind::R4 => {
            if nodes.len() != 4 {
                return Err(bad());
            }
            if n == 4 || spanning_cycles_of_cost_two(inst, nodes).is_empty() {
                return Ok(false);
            }
            for i in 0..4 {
                for j in i + 1..4 {
                    let (a, b) = (nodes[i], nodes[j]);
                    if !inst.adjacent(a, b) && inst.degree(a) == 2 && inst.degree(b) == 2 {
                        return Ok(true);
                    }
                }
            }
            Ok(false)
        }
        ObstructionKind::R8 => {
            if nodes.len() != 8 {
                return Err(bad());
            }
            if n == 8 {
                return Ok(false);
            }
            Ok(check_r8(inst, nodes))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c4_zero_edge_is_not_zero_s2() {
        let c4 = MapInstance::from_triples(4, &[(0, 1, 0), (1, 2, 1), (2, 3, 0), (3, 0, 1)]);
        let b = OracleBudget::default();
        for id in 0..4 {
            let kind = if c4.edge(id).is_zero() { ObstructionKind::ZeroS2 } else { ObstructionKind::UnitS2 };
            assert!(!obstruction_check_by_definition(&c4, kind, &Carrier::edges(vec![id]), &b).unwrap());
        }
        let all = Carrier::nodes(vec![0, 1, 2, 3]);
        assert!(!obstruction_check_by_definition(&c4, ObstructionKind::S34, &all, &b).unwrap());
    }

    #[test]
    fn cost_two_cycles_of_c4() {
        let c4 = MapInstance::from_triples(4, &[(0, 1, 0), (1, 2, 1), (2, 3, 0), (3, 0, 1)]);
        assert_eq!(spanning_cycles_of_cost_two(&c4, &[0, 1, 2, 3]), vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn hanging_four_cycle_is_r4() {
        // cost-2 4-cycle 0-1-2-3 with 1 and 3 of degree two, hanging at 0 and 2
        // from a unit triangle-ish remainder 4-5
        let inst = MapInstance::from_triples(
            6,
            &[(0, 1, 0), (1, 2, 1), (2, 3, 0), (3, 0, 1), (0, 4, 1), (2, 5, 1), (4, 5, 0)],
        );
        let b = OracleBudget::default();
        let c = Carrier::nodes(vec![0, 1, 2, 3]);
        assert!(obstruction_check_by_definition(&inst, ObstructionKind::R4, &c, &b).unwrap());
    }

    #[test]
    fn wrong_carrier_shape_is_rejected() {
        let c4 = MapInstance::from_triples(4, &[(0, 1, 0), (1, 2, 1), (2, 3, 0), (3, 0, 1)]);
        let r = obstruction_check_by_definition(
            &c4,
            ObstructionKind::R8,
            &Carrier::nodes(vec![0, 1]),
            &OracleBudget::default(),
        );
        assert!(matches!(r, Err(OracleError::BadCarrier(_))));
    }
}
