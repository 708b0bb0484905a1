//! Helpers shared by the integration tests and the acceptance binary.
#![allow(dead_code)]

use mapaug_core::gen::gen_random;
use mapaug_core::graph::{Edge, MapInstance};
use mapaug_core::obstructions::{detector, Carrier, ObstructionKind};
use mapaug_core::oracle::{obstruction_check_by_definition, OracleBudget};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

pub fn fix_c4() -> MapInstance {
    MapInstance::from_triples(4, &[(0, 1, 0), (1, 2, 1), (2, 3, 0), (3, 0, 1)])
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            rec(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Every carrier of the right shape for `kind`.
pub fn candidate_carriers(inst: &MapInstance, kind: ObstructionKind) -> Vec<Carrier> {
    let (n, m) = (inst.node_count(), inst.edge_count());
    match kind {
        ObstructionKind::CutNode => (0..n).map(|v| Carrier::nodes(vec![v])).collect(),
        ObstructionKind::ParallelEdges => subsets(m, 2).into_iter().map(Carrier::edges).collect(),
        ObstructionKind::ZeroS2 | ObstructionKind::UnitS2 => (0..m).map(|e| Carrier::edges(vec![e])).collect(),
        ObstructionKind::S34 => subsets(n, 3).into_iter().chain(subsets(n, 4)).map(Carrier::nodes).collect(),
        ObstructionKind::R4 => subsets(n, 4).into_iter().map(Carrier::nodes).collect(),
        ObstructionKind::R8 => subsets(n, 8).into_iter().map(Carrier::nodes).collect(),
    }
}

/// Carriers the literal definition accepts, against those the detector reports.
pub fn carrier_sets(inst: &MapInstance, kind: ObstructionKind) -> (BTreeSet<Carrier>, BTreeSet<Carrier>) {
    let budget = OracleBudget::default();
    let by_def = candidate_carriers(inst, kind)
        .into_iter()
        .filter(|c| obstruction_check_by_definition(inst, kind, c, &budget).expect("carrier shape fits"))
        .collect();
    let by_det = detector(kind).scan(inst).into_iter().map(|o| o.carrier).collect();
    (by_def, by_det)
}

/// Sparse random instance with n ≤ 9; every fourth seed also duplicates an edge
/// as a unit copy.
pub fn small_instance(seed: u64) -> MapInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(4..=9);
    let density = [0.05, 0.15, 0.3][rng.gen_range(0..3)];
    let inst = gen_random(n, density, seed).expect("n >= 4");
    if seed % 4 != 3 {
        return inst;
    }
    let mut edges: Vec<Edge> = inst.edges().to_vec();
    let pick = edges[rng.gen_range(0..edges.len())];
    edges.push(Edge::new(pick.u, pick.v, 1));
    MapInstance::new(n, edges).expect("same endpoints")
}

/// The 8-node R8 gadget closed off by one degree-two node (n = 9).
pub fn fix_r8_small() -> MapInstance {
    MapInstance::from_triples(
        9,
        &[
            (0, 3, 0),
            (1, 2, 0),
            (4, 7, 0),
            (5, 6, 0),
            (0, 1, 1),
            (0, 4, 1),
            (1, 7, 1),
            (2, 3, 1),
            (3, 5, 1),
            (4, 5, 1),
            (6, 7, 1),
            (3, 8, 1),
            (7, 8, 1),
        ],
    )
}

/// Two triangles sharing node 0, each with one zero-edge.
pub fn bowtie() -> MapInstance {
    MapInstance::from_triples(5, &[(0, 1, 1), (1, 2, 0), (2, 0, 1), (0, 3, 1), (3, 4, 0), (4, 0, 1)])
}
