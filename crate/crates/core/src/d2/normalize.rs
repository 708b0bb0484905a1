use super::{D2Error, D2Result};
use crate::graph::{block_decomposition, EdgeId, EdgeSubgraph, MapInstance, SizeClass};
use crate::oracle::OracleBudget;

/// Node sets of the small pendant blocks whose only bridge is a zero-edge.
pub fn star_violations(inst: &MapInstance, cover: &EdgeSubgraph) -> Vec<Vec<usize>> {
    let dec = block_decomposition(inst, cover);
    dec.blocks
        .iter()
        .filter(|b| {
            b.is_pendant() && b.class == SizeClass::Small && inst.edge(b.incident_bridges[0]).is_zero()
        })
        .map(|b| b.nodes.clone())
        .collect()
}

fn is_cover(inst: &MapInstance, cover: &EdgeSubgraph) -> bool {
    (0..inst.node_count()).all(|v| cover.degree(inst, v) >= 2)
}

/// One unit-edge out of a violating block, one unit-edge in at the end that
/// fell below degree two. Returns the first exchange that lowers the number
/// of violations.
fn improving_swap(inst: &MapInstance, cover: &EdgeSubgraph, current: usize) -> Option<EdgeSubgraph> {
    let dec = block_decomposition(inst, cover);
    for b in &dec.blocks {
        if !(b.is_pendant() && b.class == SizeClass::Small && inst.edge(b.incident_bridges[0]).is_zero()) {
            continue;
        }
        for &f in &b.edges {
            if inst.edge(f).is_zero() {
                continue;
            }
            let mut trial = cover.clone();
            trial.remove(inst, f);
            let e = inst.edge(f);
            let short: Vec<usize> = [e.u, e.v].into_iter().filter(|&x| trial.degree(inst, x) < 2).collect();
            let candidates: Vec<EdgeId> = match short.as_slice() {
                [] => Vec::new(),
                [x] => inst.neighbors(*x).iter().map(|&(_, id)| id).collect(),
                _ => inst.neighbors(e.u).iter().filter(|&&(y, _)| y == e.v).map(|&(_, id)| id).collect(),
            };
            let mut candidates: Vec<EdgeId> = candidates
                .into_iter()
                .filter(|&g| g != f && !cover.contains(g) && !inst.edge(g).is_zero())
                .collect();
            candidates.sort_unstable();
            for g in candidates {
                let mut next = trial.clone();
                next.insert(inst, g);
                if is_cover(inst, &next) && star_violations(inst, &next).len() < current {
                    return Some(next);
                }
            }
        }
    }
    None
}

struct CoverSearch<'a> {
    inst: &'a MapInstance,
    target: u64,
    state: Vec<u8>,
    visits: u64,
    cap: u64,
}

impl CoverSearch<'_> {
    fn run(&mut self, units: u64) -> Option<EdgeSubgraph> {
        self.visits += 1;
        if self.visits > self.cap {
            return None;
        }
        let inst = self.inst;
        let mut deficit = 0u64;
        let mut pick = None;
        let mut fewest = usize::MAX;
        for v in 0..inst.node_count() {
            let nbrs = inst.neighbors(v);
            let d = nbrs.iter().filter(|&&(_, id)| self.state[id] == 1).count();
            if d < 2 {
                deficit += 2 - d as u64;
                let free = nbrs.iter().filter(|&&(_, id)| self.state[id] == 0).count();
                if free + d < 2 {
                    return None;
                }
                if free < fewest {
                    fewest = free;
                    pick = Some(v);
                }
            }
        }
        if units + deficit.div_ceil(2) > self.target {
            return None;
        }
        let v = match pick {
            Some(v) => v,
            None => {
                let cover = EdgeSubgraph::from_ids(inst, (0..inst.edge_count()).filter(|&id| self.state[id] == 1));
                return star_violations(inst, &cover).is_empty().then_some(cover);
            }
        };
        let mut branch: Vec<EdgeId> =
            inst.neighbors(v).iter().filter(|&&(_, id)| self.state[id] == 0).map(|&(_, id)| id).collect();
        branch.sort_unstable();
        let mut found = None;
        for &id in &branch {
            self.state[id] = 1;
            found = self.run(units + inst.edge(id).cost as u64);
            self.state[id] = 2;
            if found.is_some() {
                break;
            }
        }
        for &id in &branch {
            self.state[id] = 0;
        }
        found
    }
}

/// Exhaustive search over covers of cost `target` containing every zero-edge.
fn search_normalized(inst: &MapInstance, target: u64, budget: &OracleBudget) -> Option<EdgeSubgraph> {
    if inst.node_count() > budget.max_nodes {
        return None;
    }
    let state = inst.edges().iter().map(|e| if e.is_zero() { 1 } else { 0 }).collect();
    let mut s = CoverSearch { inst, target, state, visits: 0, cap: budget.node_visit_cap };
    s.run(0)
}

/// Adds every zero-edge, then trades unit-edges one for one until no small
/// pendant block hangs on a zero-bridge. When exchanges stall, small inputs
/// fall back to exhaustive search over covers of the same cost.
pub fn normalize_d2(inst: &MapInstance, d2: D2Result) -> Result<D2Result, D2Error> {
    let mut cover = d2.cover;
    for id in inst.zero_edges().collect::<Vec<_>>() {
        cover.insert(inst, id);
    }
    let cost = cover.cost();
    loop {
        let current = star_violations(inst, &cover).len();
        if current == 0 {
            break;
        }
        match improving_swap(inst, &cover, current) {
            Some(next) => cover = next,
            None => {
                cover = search_normalized(inst, cost, &OracleBudget::default()).ok_or_else(|| {
                    D2Error::NormalizationFailed { n: inst.node_count(), blocks: star_violations(inst, &cover) }
                })?;
                break;
            }
        }
    }
    debug_assert_eq!(cover.cost(), cost);
    Ok(D2Result { cover, normalized: true, backend: d2.backend })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::d2::compute_d2;

    #[test]
    fn c4_is_already_normal() {
        let c4 = MapInstance::from_triples(4, &[(0, 1, 0), (1, 2, 1), (2, 3, 0), (3, 0, 1)]);
        let d2 = compute_d2(&c4).unwrap();
        let before = d2.cover.clone();
        let out = normalize_d2(&c4, d2).unwrap();
        assert!(out.normalized);
        assert_eq!(out.cover, before);
    }

    #[test]
    fn pendant_triangle_on_zero_bridge_is_repaired() {
        // triangle 0-1-2 (zero 1-2) hangs on zero-bridge 0-3; 3 sits in a large
        // unit cycle 3-4-5-6; unit edge 1-4 lets the triangle open up.
        let inst = MapInstance::from_triples(
            7,
            &[
                (0, 1, 1),
                (0, 2, 1),
                (1, 2, 0),
                (0, 3, 0),
                (3, 4, 1),
                (4, 5, 1),
                (5, 6, 1),
                (6, 3, 1),
                (2, 5, 1),
            ],
        );
        let start = EdgeSubgraph::from_ids(&inst, [0, 1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(star_violations(&inst, &start).len(), 1);
        let d2 = D2Result { cover: start, normalized: false, backend: crate::d2::BackendKind::Matching };
        let out = normalize_d2(&inst, d2).unwrap();
        assert!(star_violations(&inst, &out.cover).is_empty());
        assert_eq!(out.cover.cost(), 6);
    }
}
