//! Frozen values for the named example instances. Exact numbers were produced
//! by the branch-and-bound oracle and the matching backend, then fixed here.

mod common;

use mapaug_core::d2::{compute_d2, compute_d2_with, normalize_d2, OracleBackend};
use mapaug_core::gen::{gen_g1, gen_g2, gen_g3, gen_random, gen_tight_s3};
use mapaug_core::graph::validate_instance;
use mapaug_core::obstructions::{detect, is_well_structured, ObstructionKind};
use mapaug_core::oracle::{min_2edge_cover, opt_2ecss, OracleBudget};
use mapaug_core::pipeline::{solve, SolveOptions};
use mapaug_core::preprocess::decompose;

fn opt(inst: &mapaug_core::graph::MapInstance) -> u64 {
    opt_2ecss(inst, &OracleBudget::default()).unwrap().0
}

#[test]
fn c4_costs_two_everywhere() {
    let c4 = common::fix_c4();
    assert_eq!(opt(&c4), 2);
    assert_eq!(compute_d2(&c4).unwrap().cover.cost(), 2);
    let r = solve("c4", &c4, &SolveOptions::default()).unwrap();
    assert_eq!((r.cost, r.opt), (2, Some(2)));
}

#[test]
fn tight_family_values() {
    let t1 = gen_tight_s3(1).unwrap();
    assert_eq!(t1.node_count(), 12);
    assert!(is_well_structured(&t1));
    assert_eq!(compute_d2(&t1).unwrap().cover.cost(), 9);
    assert_eq!(min_2edge_cover(&t1, &OracleBudget::default()).unwrap().0, 9);
    assert_eq!(opt(&t1), 11);
    let d2 = normalize_d2(&t1, compute_d2(&t1).unwrap()).unwrap();
    assert_eq!(d2.cover.cost(), 9);
    assert!(t1.zero_edges().all(|id| d2.cover.contains(id)));
}

#[test]
fn gadget_family_values() {
    for (name, inst) in [("g2", gen_g2(1).unwrap()), ("g3", gen_g3(1).unwrap())] {
        assert_eq!(inst.node_count(), 14, "{name}");
        assert_eq!(compute_d2(&inst).unwrap().cover.cost(), 7, "{name}");
        assert_eq!(opt(&inst), 10, "{name}");
    }
    assert_eq!(detect(&gen_g2(1).unwrap()).unwrap().kind, ObstructionKind::S34);
    assert_eq!(detect(&gen_g3(1).unwrap()).unwrap().kind, ObstructionKind::R8);
}

#[test]
fn g1_routes_through_s34() {
    let g1 = gen_g1();
    assert_eq!((g1.node_count(), g1.zero_edges().count(), g1.unit_edges().count()), (12, 6, 13));
    let ob = detect(&g1).unwrap();
    assert_eq!((ob.kind, ob.carrier.nodes.clone()), (ObstructionKind::S34, vec![4, 5, 6, 7]));
    let trace = decompose(&g1).unwrap();
    assert_eq!(trace.steps[0].kind, ObstructionKind::S34);
    assert!(trace.leaves.iter().all(|&l| trace.members[l].inst().node_count() < 12));
    let r = solve("g1", &g1, &SolveOptions::default()).unwrap();
    assert_eq!(r.opt, Some(7));
    assert_eq!(r.bound_ok, Some(true));
}

#[test]
fn bowtie_splits_at_its_center() {
    let trace = decompose(&common::bowtie()).unwrap();
    assert!(trace.steps.is_empty(), "small inputs are left to the oracle");
    let ob = detect(&common::bowtie()).unwrap();
    assert_eq!((ob.kind, ob.carrier.nodes.clone()), (ObstructionKind::CutNode, vec![0]));
}

#[test]
fn seeded_random_instance_is_stable() {
    let a = gen_random(8, 0.5, 42).unwrap();
    assert_eq!(a, gen_random(8, 0.5, 42).unwrap());
    assert!(validate_instance(&a, true).passed());
    let by_oracle = compute_d2_with(&a, &OracleBackend { budget: OracleBudget::default() }).unwrap();
    assert_eq!(by_oracle.cover.cost(), compute_d2(&a).unwrap().cover.cost());
}
