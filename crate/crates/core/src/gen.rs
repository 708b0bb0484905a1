//! Instance generators: the fixed example families and seeded random instances.

use crate::graph::{is_two_edge_connected, MapInstance, NodeId};
use crate::obstructions::{is_well_structured, ObstructionKind};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("parameter {name} = {value} is out of range ({expected})")]
    OutOfRange { name: &'static str, value: String, expected: &'static str },
}

fn out_of_range(name: &'static str, value: impl ToString, expected: &'static str) -> GenError {
    GenError::OutOfRange { name, value: value.to_string(), expected }
}

/// Unit 6-cycle v1..v6 plus `l` gadgets; each gadget is a 6-cycle u1..u6
/// with zero-edges u1u2, u3u4, u5u6 and unit-edges v1u1, v3u3, v5u5 to the
/// root cycle. Nodes: v1..v6 first, then six per gadget.
pub fn gen_tight_s3(l: usize) -> Result<MapInstance, GenError> {
    if l == 0 {
        return Err(out_of_range("l", l, ">= 1"));
    }
    let n = 6 + 6 * l;
    let mut t = Vec::new();
    for i in 0..6 {
        t.push((i, (i + 1) % 6, 1));
    }
    for g in 0..l {
        let u = |i: usize| 6 + 6 * g + i;
        for i in 0..6 {
            t.push((u(i), u((i + 1) % 6), if i % 2 == 0 { 0 } else { 1 }));
        }
        for i in [0, 2, 4] {
            t.push((i, u(i), 1));
        }
    }
    Ok(MapInstance::from_triples(n, &t))
}

/// The 12-node instance with three cost-two 4-cycles B1, B2, B3 where B2 is an
/// S34. Nodes in order u1 v1 w1 x1 u2 v2 w2 x2 u3 v3 w3 x3.
pub fn gen_g1() -> MapInstance {
    let (u1, v1, w1, x1, u2, v2, w2, x2, u3, v3, w3, x3) = (0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11);
    MapInstance::from_triples(
        12,
        &[
            (u1, v1, 1),
            (v1, w1, 0),
            (w1, x1, 1),
            (x1, u1, 0),
            (u2, v2, 1),
            (v2, w2, 0),
            (w2, x2, 1),
            (x2, u2, 0),
            (x3, u3, 0),
            (u3, v3, 1),
            (v3, w3, 0),
            (w3, x3, 1),
            (x1, v1, 1),
            (w3, u3, 1),
            (u2, x3, 1),
            (v2, x3, 1),
            (w2, v3, 1),
            (w2, w1, 1),
            (u2, u1, 1),
        ],
    )
}

/// 6-cycle w1..w6 with zero-edges w1w2, w3w4, w5w6, plus k copies of an
/// 8-node gadget joined by unit-edges gadget[a]–w1 and gadget[b]–w4.
fn root_with_gadgets(k: usize, zeros: &[(usize, usize)], units: &[(usize, usize)], a: usize, b: usize) -> MapInstance {
    let n = 6 + 8 * k;
    let mut t = Vec::new();
    for i in 0..6 {
        t.push((i, (i + 1) % 6, if i % 2 == 0 { 0 } else { 1 }));
    }
    for g in 0..k {
        let v = |i: usize| 6 + 8 * g + (i - 1);
        for &(x, y) in zeros {
            t.push((v(x), v(y), 0));
        }
        for &(x, y) in units {
            t.push((v(x), v(y), 1));
        }
        t.push((v(a), 0, 1));
        t.push((v(b), 3, 1));
    }
    MapInstance::from_triples(n, &t)
}

const GADGET_ZEROS: [(usize, usize); 4] = [(1, 4), (2, 3), (5, 8), (6, 7)];

/// Root 6-cycle plus k copies of the 8-node gadget containing an S34
/// (the 4-cycle v1 v2 v3 v4).
pub fn gen_g2(k: usize) -> Result<MapInstance, GenError> {
    if k == 0 {
        return Err(out_of_range("k", k, ">= 1"));
    }
    let units = [(1, 2), (1, 7), (2, 5), (3, 4), (3, 8), (5, 6), (7, 8)];
    Ok(root_with_gadgets(k, &GADGET_ZEROS, &units, 1, 3))
}

/// Root 6-cycle plus k copies of an R8 on v1..v8.
pub fn gen_g3(k: usize) -> Result<MapInstance, GenError> {
    if k == 0 {
        return Err(out_of_range("k", k, ">= 1"));
    }
    let units = [(1, 2), (1, 5), (2, 8), (3, 4), (4, 6), (5, 6), (7, 8)];
    Ok(root_with_gadgets(k, &GADGET_ZEROS, &units, 4, 8))
}

fn key(u: NodeId, v: NodeId) -> (NodeId, NodeId) {
    (u.min(v), u.max(v))
}

/// Random simple MAP instance: a random matching of zero-edges (each
/// consecutive pair of a shuffled order is matched with probability 1/2),
/// unit-edges between every other pair with probability `density`, then
/// random unit-edges until the graph is 2-edge-connected.
pub fn gen_random(n: usize, density: f64, seed: u64) -> Result<MapInstance, GenError> {
    if n < 3 {
        return Err(out_of_range("n", n, ">= 3"));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(out_of_range("density", density, "within [0, 1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut t = Vec::new();
    let mut used = HashSet::new();
    for pair in order.chunks(2) {
        if pair.len() == 2 && rng.gen_bool(0.5) {
            t.push((pair[0], pair[1], 0));
            used.insert(key(pair[0], pair[1]));
        }
    }
    for u in 0..n {
        for v in u + 1..n {
            if !used.contains(&(u, v)) && rng.gen_bool(density) {
                t.push((u, v, 1));
                used.insert((u, v));
            }
        }
    }
    loop {
        let inst = MapInstance::from_triples(n, &t);
        if is_two_edge_connected(&inst, &inst.full(), true) {
            return Ok(inst);
        }
        let free: Vec<(NodeId, NodeId)> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|p| !used.contains(p)).collect();
        let &(u, v) = free.choose(&mut rng).expect("complete graphs are 2-edge-connected");
        t.push((u, v, 1));
        used.insert((u, v));
    }
}

/// Random candidate for a well-structured instance: a zero matching (each
/// consecutive pair of a shuffled order is matched with probability
/// `zero_prob`), a unit Hamiltonian cycle, and random unit-edges until every
/// node has degree ≥ `min_degree`.
fn ws_candidate(n: usize, min_degree: usize, zero_prob: f64, rng: &mut ChaCha8Rng) -> MapInstance {
    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(rng);
    let mut t = Vec::new();
    let mut used = HashSet::new();
    let mut deg = vec![0usize; n];
    let mut add = |u: NodeId, v: NodeId, c: u8, t: &mut Vec<(NodeId, NodeId, u8)>, deg: &mut Vec<usize>| {
        if u != v && used.insert(key(u, v)) {
            t.push((u, v, c));
            deg[u] += 1;
            deg[v] += 1;
        }
    };
    for pair in order.chunks(2) {
        if pair.len() == 2 && rng.gen_bool(zero_prob) {
            add(pair[0], pair[1], 0, &mut t, &mut deg);
        }
    }
    order.shuffle(rng);
    for i in 0..n {
        add(order[i], order[(i + 1) % n], 1, &mut t, &mut deg);
    }
    let mut guard = 0;
    while let Some(u) = (0..n).find(|&x| deg[x] < min_degree) {
        let v = rng.gen_range(0..n);
        add(u, v, 1, &mut t, &mut deg);
        guard += 1;
        assert!(guard < 100 * n, "degree padding stalled");
    }
    MapInstance::from_triples(n, &t)
}

/// Rejection-samples [`ws_candidate`] until the instance is well-structured.
/// Deterministic in `(n, zero_prob, seed)`.
pub fn gen_random_ws(n: usize, zero_prob: f64, seed: u64) -> Result<MapInstance, GenError> {
    if n < 12 {
        return Err(out_of_range("n", n, ">= 12"));
    }
    if !(0.0..=1.0).contains(&zero_prob) {
        return Err(out_of_range("zero_prob", zero_prob, "within [0, 1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5753_4d41_5000_0000);
    loop {
        let inst = ws_candidate(n, 2, zero_prob, &mut rng);
        if is_well_structured(&inst) {
            return Ok(inst);
        }
    }
}

type Triples = Vec<(NodeId, NodeId, u8)>;

/// A random 2EC piece on `nodes`: a unit Hamiltonian cycle, a random zero
/// matching that avoids `free` and cycle neighbours, and a few unit chords.
fn piece(nodes: &[NodeId], free: &[NodeId], rng: &mut ChaCha8Rng, t: &mut Triples, used: &mut HashSet<(NodeId, NodeId)>) {
    let k = nodes.len();
    let mut ring = nodes.to_vec();
    ring.shuffle(rng);
    for i in 0..k {
        let (u, v) = (ring[i], ring[(i + 1) % k]);
        if used.insert(key(u, v)) {
            t.push((u, v, 1));
        }
    }
    let mut open: Vec<NodeId> = nodes.iter().copied().filter(|v| !free.contains(v)).collect();
    open.shuffle(rng);
    for pair in open.chunks(2) {
        if pair.len() == 2 && rng.gen_bool(0.6) && used.insert(key(pair[0], pair[1])) {
            t.push((pair[0], pair[1], 0));
        }
    }
    for _ in 0..k / 3 {
        let (u, v) = (*nodes.choose(rng).unwrap(), *nodes.choose(rng).unwrap());
        if u != v && used.insert(key(u, v)) {
            t.push((u, v, 1));
        }
    }
}

fn two_distinct(range: std::ops::Range<NodeId>, rng: &mut ChaCha8Rng) -> [NodeId; 2] {
    let picked: Vec<NodeId> = range.collect::<Vec<_>>().choose_multiple(rng, 2).copied().collect();
    [picked[0], picked[1]]
}

/// Relabels nodes and shuffles the edge order.
fn permuted(inst: &MapInstance, rng: &mut ChaCha8Rng) -> MapInstance {
    let n = inst.node_count();
    let mut perm: Vec<NodeId> = (0..n).collect();
    perm.shuffle(rng);
    let mut t: Triples = inst.edges().iter().map(|e| (perm[e.u], perm[e.v], e.cost)).collect();
    t.shuffle(rng);
    MapInstance::from_triples(n, &t)
}

/// Seeded instance on 12 to 14 nodes with one planted obstruction of the
/// returned kind. Pieces are random, so further obstructions may appear too.
pub fn gen_planted(seed: u64) -> (MapInstance, ObstructionKind) {
    use ObstructionKind::*;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x504c_414e_5400_0000);
    let n = rng.gen_range(12..=14usize);
    let mut t = Triples::new();
    let mut used = HashSet::new();
    let all: Vec<NodeId> = (0..n).collect();
    let kind = ObstructionKind::ALL[(seed % 7) as usize];
    match kind {
        CutNode => {
            let k1 = rng.gen_range(5..=n - 4);
            piece(&all[..k1], &[], &mut rng, &mut t, &mut used);
            let mut b = vec![0];
            b.extend(k1..n);
            piece(&b, &[0], &mut rng, &mut t, &mut used);
        }
        ParallelEdges => {
            piece(&all, &[], &mut rng, &mut t, &mut used);
            let units: Vec<_> = t.iter().copied().filter(|e| e.2 == 1).collect();
            t.push(*units.choose(&mut rng).unwrap());
        }
        ZeroS2 | UnitS2 => {
            // u joins side A, v joins side B; cross edges u–B and v–A keep
            // both ends off the cut-node list while G − {u, v} splits.
            let k1 = rng.gen_range(5..=n - 4);
            let (u, v) = (0, k1);
            let free: &[NodeId] = if kind == ZeroS2 { &[u, v] } else { &[] };
            piece(&all[..k1], free, &mut rng, &mut t, &mut used);
            piece(&all[k1..], free, &mut rng, &mut t, &mut used);
            t.push((u, v, if kind == ZeroS2 { 0 } else { 1 }));
            t.push((u, rng.gen_range(k1 + 1..n), 1));
            t.push((v, rng.gen_range(1..k1), 1));
        }
        S34 => {
            let triangle = rng.gen_bool(0.3);
            let c = if triangle { 3 } else { 4 };
            if triangle {
                t.extend([(0, 1, 0), (1, 2, 1), (2, 0, 1)]);
            } else {
                t.extend([(0, 1, 0), (1, 2, 1), (2, 3, 0), (3, 0, 1)]);
            }
            let k1 = rng.gen_range(c + 4..=n - 4);
            piece(&all[c..k1], &[], &mut rng, &mut t, &mut used);
            piece(&all[k1..], &[], &mut rng, &mut t, &mut used);
            let (ends1, ends2) = if triangle { ([0, 2], [1, 2]) } else { ([0, 2], [1, 3]) };
            for (ends, side) in [(ends1, c..k1), (ends2, k1..n)] {
                let [x, y] = two_distinct(side, &mut rng);
                t.push((ends[0], x, 1));
                t.push((ends[1], y, 1));
            }
        }
        R4 => {
            piece(&all[4..], &[], &mut rng, &mut t, &mut used);
            t.extend([(0, 1, 0), (1, 2, 1), (2, 3, 0), (3, 0, 1)]);
            let [x, y] = two_distinct(4..n, &mut rng);
            t.push((0, x, 1));
            t.push((2, y, 1));
        }
        R8 => {
            let (base, planted) = match rng.gen_range(0..3) {
                0 => (gen_g1(), S34),
                1 => (gen_g2(1).expect("k = 1"), S34),
                _ => (gen_g3(1).expect("k = 1"), R8),
            };
            return (permuted(&base, &mut rng), planted);
        }
    }
    (permuted(&MapInstance::from_triples(n, &t), &mut rng), kind)
}
