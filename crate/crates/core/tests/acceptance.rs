//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

mod common;

use mapaug_core::bridge_cover::bridge_cover;
use mapaug_core::d2::{compute_d2, normalize_d2};
use mapaug_core::gen::{gen_g1, gen_planted, gen_random, gen_random_ws, gen_tight_s3};
use mapaug_core::gluing::glue;
use mapaug_core::graph::MapInstance;
use mapaug_core::obstructions::ObstructionKind;
use mapaug_core::oracle::{min_2edge_cover, opt_2ecss, OracleBudget};
use mapaug_core::pipeline::{ratio_report, render_ratio, solve, verify, Family, LeafMethod, SolveOptions, SolveReport};
use mapaug_core::preprocess::decompose;
use num_rational::Ratio;
use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! check {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn q(n: i64) -> Ratio<i64> {
    Ratio::from_integer(n)
}

/// cost ≤ max(opt, (5·opt − 6)/3), exactly.
fn within_guarantee(cost: u64, opt: u64) -> bool {
    let (c, o) = (cost as i64, opt as i64);
    q(c) <= q(o).max(Ratio::new(5 * o - 6, 3))
}

fn solve_checked(id: &str, inst: &MapInstance) -> Result<SolveReport, String> {
    let r = solve(id, inst, &SolveOptions::default()).map_err(|e| format!("{id}: {e}"))?;
    let verdict = verify(inst, &r.solution.ids(), Some(r.cost));
    check!(verdict.passed(), "{id}: verify failed: {:?}", verdict.failures);
    Ok(r)
}

fn sweep_instance(seed: u64) -> MapInstance {
    let n = 4 + (seed % 11) as usize;
    let density = [0.15, 0.3, 0.5][(seed / 11 % 3) as usize];
    gen_random(n, density, seed).expect("n >= 4")
}

const SWEEP: u64 = 500;

fn guarantee_sweep() -> Outcome {
    let start = Instant::now();
    let mut worst = Ratio::from_integer(1);
    for seed in 0..SWEEP {
        let inst = sweep_instance(seed);
        let r = solve_checked(&format!("seed {seed}"), &inst)?;
        let opt = r.opt.ok_or(format!("seed {seed}: opt unknown"))?;
        check!(within_guarantee(r.cost, opt), "seed {seed}: cost {} vs opt {opt}", r.cost);
        check!(r.bound_ok == Some(true), "seed {seed}: bound_ok disagrees");
        worst = worst.max(Ratio::new(r.cost as i64, opt as i64));
    }
    let took = start.elapsed();
    check!(took < Duration::from_secs(600), "took {took:?}");
    Ok(format!("{SWEEP} instances, n 4..=14, worst alg/opt {}, {took:.2?}", render_ratio(worst)))
}

fn lower_bound_sweep() -> Outcome {
    let budget = OracleBudget::default();
    for seed in 0..SWEEP {
        let inst = sweep_instance(seed);
        let d2 = compute_d2(&inst).map_err(|e| e.to_string())?.cover.cost();
        let (cover, _) = min_2edge_cover(&inst, &budget).map_err(|e| e.to_string())?;
        let (opt, _) = opt_2ecss(&inst, &budget).map_err(|e| e.to_string())?;
        check!(d2 == cover, "seed {seed}: matching D2 {d2} != oracle cover {cover}");
        check!(d2 <= opt, "seed {seed}: D2 {d2} > opt {opt}");
    }
    Ok(format!("{SWEEP} instances, D2 = oracle min cover and D2 <= opt on all"))
}

fn tight_family() -> Outcome {
    let start = Instant::now();
    let t1 = gen_tight_s3(1).map_err(|e| e.to_string())?;
    let d2 = compute_d2(&t1).map_err(|e| e.to_string())?.cover.cost();
    let (cover, _) = min_2edge_cover(&t1, &OracleBudget::default()).map_err(|e| e.to_string())?;
    let r = solve_checked("tight-s3(1)", &t1)?;
    let opt = r.opt.ok_or("opt unknown")?;
    check!(d2 == 9 && cover == 9, "D2 {d2}, oracle cover {cover}");
    check!(opt >= 11, "opt {opt}");
    check!(within_guarantee(r.cost, opt), "cost {} vs opt {opt}", r.cost);
    let took = start.elapsed();
    check!(took < Duration::from_secs(5), "took {took:?}");
    Ok(format!("D2 9, opt {opt}, alg {}, {took:.2?}", r.cost))
}

fn gadget_families() -> Outcome {
    let mut parts = Vec::new();
    for family in [Family::G2, Family::G3] {
        let start = Instant::now();
        let rows = ratio_report(family, &[1], &OracleBudget::default(), 0).map_err(|e| e.to_string())?;
        let took = start.elapsed();
        let row = &rows[0];
        let opt = match row.opt {
            mapaug_core::pipeline::OptValue::Exact(x) => x,
            other => return Err(format!("{family}: opt not certified ({other})")),
        };
        let gap = row.opt_over_d2().ok_or("no gap ratio")?;
        check!(row.d2_cost <= 7 && opt >= 10, "{family}: D2 {} opt {opt}", row.d2_cost);
        check!(gap >= Ratio::new(10, 7), "{family}: gap {gap}");
        check!(took < Duration::from_secs(60), "{family}: took {took:?}");
        parts.push(format!("{family}: D2 {} opt {opt} gap {}", row.d2_cost, render_ratio(gap)));
    }
    Ok(parts.join("; "))
}

fn credit_invariants() -> Outcome {
    let mut ears = 0;
    let mut merges = 0;
    for seed in 0..200u64 {
        let n = 12 + (seed % 29) as usize;
        let zp = [1.0, 0.7, 0.4][(seed % 3) as usize];
        let inst = gen_random_ws(n, zp, seed).map_err(|e| e.to_string())?;
        let d2 = compute_d2(&inst).and_then(|d| normalize_d2(&inst, d)).map_err(|e| format!("seed {seed}: {e}"))?;
        let cover = bridge_cover(&inst, &d2).map_err(|e| format!("seed {seed}: {e}"))?;
        let c = &cover.credits;
        c.check(&inst).map_err(|e| format!("seed {seed}: {e}"))?;
        let thirds = [c.initial, c.total(), c.released, c.paid, c.budget];
        check!(thirds.iter().all(|x| 3 % *x.denom() == 0), "seed {seed}: credit finer than 1/3");
        check!(c.initial == c.total() + c.released, "seed {seed}: ledger unbalanced");
        check!(c.released >= c.paid, "seed {seed}: paid {} > released {}", c.paid, c.released);
        check!(c.total() + c.paid <= c.budget, "seed {seed}: over budget");
        let gamma = c.total();
        let out = glue(&inst, &cover).map_err(|e| format!("seed {seed}: {e}"))?;
        check!(out.credit >= q(2), "seed {seed}: final credit {}", out.credit);
        check!(q(out.h.cost() as i64) <= q(cover.h.cost() as i64) + gamma - q(2), "seed {seed}: glue cost");
        ears += cover.trace.len();
        merges += out.trace.len();
    }
    Ok(format!("200 instances, {ears} ear steps and {merges} merges checked"))
}

fn detector_equivalence() -> Outcome {
    let mut instances: Vec<(String, MapInstance)> =
        vec![("c4".into(), common::fix_c4()), ("bowtie".into(), common::bowtie()), ("r8".into(), common::fix_r8_small())];
    instances.extend((0..1000).map(|s| (format!("seed {s}"), common::small_instance(s))));
    let mut positives = 0;
    let mut carriers = 0;
    for (name, inst) in &instances {
        for kind in ObstructionKind::ALL {
            carriers += common::candidate_carriers(inst, kind).len();
            let (by_def, by_det) = common::carrier_sets(inst, kind);
            check!(by_def == by_det, "{name} {kind}: definition {by_def:?} detector {by_det:?}");
            positives += by_def.len();
        }
    }
    Ok(format!("{} instances, {carriers} carriers, {positives} occurrences, 0 disagreements", instances.len()))
}

fn decomposition_soundness() -> Outcome {
    let mut steps = 0;
    for seed in 0..200u64 {
        let (inst, _) = gen_planted(seed);
        let trace = decompose(&inst).map_err(|e| format!("seed {seed}: {e}"))?;
        for s in &trace.steps {
            check!(s.phi_after < s.phi_before, "seed {seed}: potential did not drop");
        }
        let mut seen = BTreeSet::new();
        for &l in &trace.leaves {
            for &e in &trace.members[l].sub.edges {
                check!(seen.insert(e), "seed {seed}: edge {e} in two leaves");
            }
        }
        steps += trace.steps.len();
        let r = solve_checked(&format!("planted {seed}"), &inst)?;
        let opt = r.opt.ok_or(format!("seed {seed}: opt unknown"))?;
        check!(within_guarantee(r.cost, opt), "seed {seed}: cost {} vs opt {opt}", r.cost);
    }
    let g1 = gen_g1();
    let trace = decompose(&g1).map_err(|e| e.to_string())?;
    check!(trace.steps.first().map(|s| s.kind) == Some(ObstructionKind::S34), "FIX_A1 does not start with S34");
    let r = solve_checked("FIX_A1", &g1)?;
    check!(r.leaves.iter().all(|l| l.method == LeafMethod::Exact), "FIX_A1 reached gluing");
    check!(within_guarantee(r.cost, r.opt.ok_or("opt unknown")?), "FIX_A1 over bound");
    Ok(format!("200 planted instances, {steps} steps; FIX_A1 via S34, cost {}", r.cost))
}

fn performance() -> Outcome {
    let budget = OracleBudget::default();
    for seed in 0..200u64 {
        let n = 4 + (seed % 9) as usize;
        let inst = gen_random(n, [0.2, 0.5, 0.9][(seed % 3) as usize], seed).map_err(|e| e.to_string())?;
        let d2 = compute_d2(&inst).map_err(|e| e.to_string())?.cover.cost();
        let (cover, _) = min_2edge_cover(&inst, &budget).map_err(|e| e.to_string())?;
        check!(d2 == cover, "seed {seed}: blossom D2 {d2} != oracle {cover}");
    }
    let inst = gen_random_ws(2000, 0.7, 1).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let opts = SolveOptions { compute_opt: false, ..SolveOptions::default() };
    let r = solve("ws-2000", &inst, &opts).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    check!(verify(&inst, &r.solution.ids(), Some(r.cost)).passed(), "n=2000 output failed verify");
    check!(took < Duration::from_secs(30), "n=2000 took {took:?}");
    Ok(format!("blossom = oracle on 200 instances n <= 12; n=2000 solved in {took:.2?} (cost {}, D2 {})", r.cost, r.d2_cost))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 guarantee sweep", guarantee_sweep),
        ("2 D2 lower bound", lower_bound_sweep),
        ("3 tight family", tight_family),
        ("4 gadget families", gadget_families),
        ("5 credit invariants", credit_invariants),
        ("6 detector equivalence", detector_equivalence),
        ("7 decomposition soundness", decomposition_soundness),
        ("8 performance", performance),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("criterion {name}: PASS ({detail})"),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL ({detail})");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
