//! Invariants checked on seeded random instances.

use mapaug_core::bridge_cover::bridge_cover;
use mapaug_core::d2::{compute_d2, normalize_d2};
use mapaug_core::gen::{gen_planted, gen_random, gen_random_ws};
use mapaug_core::gluing::glue;
use mapaug_core::graph::{is_two_edge_connected, EdgeSubgraph};
use mapaug_core::io::{format_instance, parse_instance};
use mapaug_core::pipeline::{solve, solve_batch, verify, SolveOptions};
use mapaug_core::preprocess::{decompose, recombine};
use num_rational::Ratio;
use proptest::prelude::*;
use std::collections::{BTreeSet, HashMap};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_format_round_trips(n in 3usize..20, density in 0.0f64..1.0, seed in any::<u64>()) {
        let inst = gen_random(n, density, seed).unwrap();
        let text = format_instance(&inst);
        prop_assert_eq!(&parse_instance(&text).unwrap(), &inst);
        prop_assert_eq!(format_instance(&gen_random(n, density, seed).unwrap()), text);
    }

    #[test]
    fn verify_agrees_with_the_2ec_check(n in 3usize..10, seed in any::<u64>(), mask in any::<u64>()) {
        let inst = gen_random(n, 0.4, seed).unwrap();
        let ids: Vec<usize> = (0..inst.edge_count()).filter(|&i| mask >> (i % 64) & 1 == 1).collect();
        let sub = EdgeSubgraph::from_ids(&inst, ids.iter().copied());
        prop_assert_eq!(verify(&inst, &ids, None).passed(), is_two_edge_connected(&inst, &sub, true));
    }

    #[test]
    fn solve_output_is_verified_and_within_bound(n in 4usize..=12, seed in any::<u64>()) {
        let inst = gen_random(n, 0.25, seed).unwrap();
        let r = solve("p", &inst, &SolveOptions::default()).unwrap();
        prop_assert!(verify(&inst, &r.solution.ids(), Some(r.cost)).passed());
        prop_assert!(r.d2_cost <= r.opt.unwrap());
        prop_assert_eq!(r.bound_ok, Some(true));
    }

    #[test]
    fn solution_minus_an_edge_is_rejected_or_still_2ec(n in 4usize..=10, seed in any::<u64>(), pick in any::<usize>()) {
        let inst = gen_random(n, 0.3, seed).unwrap();
        let r = solve("p", &inst, &SolveOptions::default()).unwrap();
        let mut ids = r.solution.ids();
        ids.remove(pick % ids.len());
        let still = is_two_edge_connected(&inst, &EdgeSubgraph::from_ids(&inst, ids.iter().copied()), true);
        let verdict = verify(&inst, &ids, None);
        prop_assert_eq!(verdict.passed(), still);
        if !still {
            let named = verdict.failures.iter().any(|f| {
                let s = f.to_string();
                s.starts_with("bridge introduced") || s.starts_with("disconnected") || s.starts_with("not spanning")
            });
            prop_assert!(named);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decomposition_is_sound(seed in any::<u64>()) {
        let (inst, _) = gen_planted(seed);
        let trace = decompose(&inst).unwrap();
        prop_assert_eq!(&trace, &decompose(&inst).unwrap());
        for s in &trace.steps {
            prop_assert!(s.phi_after < s.phi_before);
        }
        let mut seen = BTreeSet::new();
        for &l in &trace.leaves {
            for &e in &trace.members[l].sub.edges {
                prop_assert!(seen.insert(e), "edge {} lies in two leaves", e);
            }
        }
        let sols: HashMap<usize, BTreeSet<usize>> = trace
            .leaves
            .iter()
            .map(|&l| (l, trace.members[l].sub.edges.iter().copied().collect()))
            .collect();
        let whole = recombine(&trace, &sols).unwrap();
        prop_assert!(verify(&inst, &whole.into_iter().collect::<Vec<_>>(), None).passed());
    }

    #[test]
    fn credits_hold_through_covering_and_gluing(n in 12usize..=30, zp in 0.3f64..=1.0, seed in any::<u64>()) {
        let inst = gen_random_ws(n, zp, seed).unwrap();
        let raw = compute_d2(&inst).unwrap();
        let d2 = normalize_d2(&inst, raw.clone()).unwrap();
        prop_assert_eq!(d2.cover.cost(), raw.cover.cost());
        let cover = bridge_cover(&inst, &d2).unwrap();
        cover.credits.check(&inst).unwrap();
        prop_assert_eq!(cover.credits.initial, cover.credits.total() + cover.credits.released);
        prop_assert!(cover.credits.released >= cover.credits.paid);
        let gamma = cover.credits.total();
        let out = glue(&inst, &cover).unwrap();
        prop_assert!(out.credit >= Ratio::from_integer(2));
        prop_assert!(Ratio::from_integer(out.h.cost() as i64) <= Ratio::from_integer(cover.h.cost() as i64) + gamma - Ratio::from_integer(2));
        prop_assert!(is_two_edge_connected(&inst, &out.h, true));
        prop_assert!(d2.cover.iter().all(|id| cover.h.contains(id)));
    }
}

#[test]
fn batch_results_follow_input_order() {
    let items: Vec<(String, _)> = (0..12).map(|s| (format!("i{s}"), gen_random(8 + s as usize % 5, 0.3, s).unwrap())).collect();
    let opts = SolveOptions::default();
    let batch = solve_batch(&items, &opts);
    for ((id, inst), r) in items.iter().zip(batch) {
        assert_eq!(r.unwrap(), solve(id, inst, &opts).unwrap());
    }
}

#[test]
fn invalid_input_exits_with_code_two() {
    let path = mapaug_core::graph::MapInstance::from_triples(3, &[(0, 1, 0), (1, 2, 1)]);
    assert_eq!(solve("path", &path, &SolveOptions::default()).unwrap_err().exit_code(), 2);
}
