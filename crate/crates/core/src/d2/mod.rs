//! Minimum-cost 2-edge covers (D2) and their normalization.

pub mod blossom;
mod normalize;

pub use normalize::{normalize_d2, star_violations};

use crate::graph::{EdgeSubgraph, MapInstance, NodeId};
use crate::oracle::{min_2edge_cover, OracleBudget, OracleError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BackendKind {
    Matching,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct D2Result {
    pub cover: EdgeSubgraph,
    pub normalized: bool,
    pub backend: BackendKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum D2Error {
    #[error("node {0} has degree < 2, no 2-edge cover exists")]
    Infeasible(NodeId),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("no cost-preserving exchange removes the small pendant blocks at {blocks:?} (n = {n})")]
    NormalizationFailed { n: usize, blocks: Vec<Vec<NodeId>> },
}

/// A way of computing a minimum-cost 2-edge cover.
pub trait D2Backend: Send + Sync {
    fn kind(&self) -> BackendKind;
    fn name(&self) -> &'static str;
    fn min_cover(&self, inst: &MapInstance) -> Result<EdgeSubgraph, D2Error>;
}

/// Weighted matching on the stub/slack gadget.
pub struct MatchingBackend;

/// Branch-and-bound over edge sets; small inputs only.
pub struct OracleBackend {
    pub budget: OracleBudget,
}

impl D2Backend for MatchingBackend {
    fn kind(&self) -> BackendKind {
        BackendKind::Matching
    }

    fn name(&self) -> &'static str {
        "matching"
    }

    fn min_cover(&self, inst: &MapInstance) -> Result<EdgeSubgraph, D2Error> {
        gadget_cover(inst)
    }
}

impl D2Backend for OracleBackend {
    fn kind(&self) -> BackendKind {
        BackendKind::Oracle
    }

    fn name(&self) -> &'static str {
        "oracle"
    }

    fn min_cover(&self, inst: &MapInstance) -> Result<EdgeSubgraph, D2Error> {
        check_degrees(inst)?;
        Ok(min_2edge_cover(inst, &self.budget)?.1)
    }
}

/// All registered backends, in a fixed order.
pub fn backends() -> Vec<Box<dyn D2Backend>> {
    vec![Box::new(MatchingBackend), Box::new(OracleBackend { budget: OracleBudget::default() })]
}

pub fn backend(name: &str) -> Option<Box<dyn D2Backend>> {
    backends().into_iter().find(|b| b.name() == name)
}

fn check_degrees(inst: &MapInstance) -> Result<(), D2Error> {
    match (0..inst.node_count()).find(|&v| inst.degree(v) < 2) {
        Some(v) => Err(D2Error::Infeasible(v)),
        None => Ok(()),
    }
}

const PAIR_WEIGHT: i64 = 4;
const SLACK_WEIGHT: i64 = 2;

/// Each edge e = uv becomes two stubs joined by a pair edge of weight 4; each
/// node v gets deg(v) − 2 slack nodes joined to all its stubs with weight
/// 2 + cost(e). An optimal matching pairs or releases every edge, releases at
/// most deg(v) − 2 edges at v, and has weight 4m + 2·(released unit-edges),
/// so the edges not released form a minimum-cost 2-edge cover.
fn gadget_cover(inst: &MapInstance) -> Result<EdgeSubgraph, D2Error> {
    check_degrees(inst)?;
    let m = inst.edge_count();
    let stub = |id: usize, end: usize| 2 * id + end;
    let mut next = 2 * m;
    let mut edges: Vec<(usize, usize, i64)> = Vec::new();
    for id in 0..m {
        edges.push((stub(id, 0), stub(id, 1), PAIR_WEIGHT));
    }
    for v in 0..inst.node_count() {
        let stubs: Vec<(usize, i64)> = inst
            .neighbors(v)
            .iter()
            .map(|&(_, id)| {
                let e = inst.edge(id);
                let end = if e.u == v { 0 } else { 1 };
                (stub(id, end), SLACK_WEIGHT + e.cost as i64)
            })
            .collect();
        for _ in 2..stubs.len() {
            let s = next;
            next += 1;
            for &(st, w) in &stubs {
                edges.push((st, s, w));
            }
        }
    }
    let mate = blossom::max_weight_matching(next, &edges, false);
    let released = |id: usize| {
        let slack = |s: usize| mate[s].is_some_and(|x| x >= 2 * m);
        slack(stub(id, 0)) && slack(stub(id, 1))
    };
    let mut cover = EdgeSubgraph::from_ids(inst, (0..m).filter(|&id| !released(id)));
    for id in inst.zero_edges().collect::<Vec<_>>() {
        cover.insert(inst, id);
    }
    debug_assert!((0..inst.node_count()).all(|v| cover.degree(inst, v) >= 2));
    Ok(cover)
}

/// Minimum-cost 2-edge cover via the matching backend, with every zero-edge.
pub fn compute_d2(inst: &MapInstance) -> Result<D2Result, D2Error> {
    compute_d2_with(inst, &MatchingBackend)
}

pub fn compute_d2_with(inst: &MapInstance, backend: &dyn D2Backend) -> Result<D2Result, D2Error> {
    let mut cover = backend.min_cover(inst)?;
    for id in inst.zero_edges().collect::<Vec<_>>() {
        cover.insert(inst, id);
    }
    Ok(D2Result { cover, normalized: false, backend: backend.kind() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn c4_cover_is_the_cycle() {
        let c4 = MapInstance::from_triples(4, &[(0, 1, 0), (1, 2, 1), (2, 3, 0), (3, 0, 1)]);
        let d2 = compute_d2(&c4).unwrap();
        assert_eq!(d2.cover.cost(), 2);
        assert_eq!(d2.cover.len(), 4);
    }

    #[test]
    fn degree_one_node_is_infeasible() {
        let p = MapInstance::from_triples(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1), (2, 0, 1)]);
        assert!(compute_d2(&p).is_ok());
        let q = MapInstance::from_triples(3, &[(0, 1, 1), (1, 2, 1)]);
        assert_eq!(compute_d2(&q).unwrap_err(), D2Error::Infeasible(0));
    }

    #[test]
    fn matching_backend_agrees_with_oracle_on_dense_multigraphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let oracle = backend("oracle").unwrap();
        for _ in 0..150 {
            let n = rng.gen_range(3..=8);
            let mut partner: Vec<Option<usize>> = vec![None; n];
            let mut triples = Vec::new();
            for _ in 0..rng.gen_range(n..3 * n) {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u == v {
                    continue;
                }
                let zero = partner[u].is_none() && partner[v].is_none() && rng.gen_bool(0.3);
                if zero {
                    partner[u] = Some(v);
                    partner[v] = Some(u);
                }
                triples.push((u, v, if zero { 0 } else { 1 }));
            }
            let inst = MapInstance::from_triples(n, &triples);
            match (compute_d2(&inst), compute_d2_with(&inst, oracle.as_ref())) {
                (Ok(a), Ok(b)) => assert_eq!(a.cover.cost(), b.cover.cost(), "{inst:?}"),
                (Err(D2Error::Infeasible(x)), Err(D2Error::Infeasible(y))) => assert_eq!(x, y),
                (a, b) => panic!("backends disagree on {inst:?}: {a:?} / {b:?}"),
            }
        }
    }
}
