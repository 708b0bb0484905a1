//! End-to-end solve, solution verification and ratio tables.

use crate::bridge_cover::bridge_cover;
use crate::d2::{compute_d2, normalize_d2};
use crate::gen::{gen_g2, gen_g3, gen_random, gen_tight_s3, GenError};
use crate::gluing::glue;
use crate::graph::{
    bridges, connected_components, validate_instance, EdgeId, EdgeSubgraph, MapInstance, ValidationFailure,
};
use crate::io::format_instance;
use crate::oracle::{opt_2ecss, OracleBudget};
use crate::preprocess::{decompose, recombine, ApproxConfig, Member, SMALL_LIMIT};
use num_rational::Ratio;
use serde::Serialize;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub config: ApproxConfig,
    /// Budget for the exact opt in the report; leaves below 12 nodes always
    /// use the oracle regardless.
    pub budget: OracleBudget,
    pub compute_opt: bool,
    pub trace: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { config: ApproxConfig::default(), budget: OracleBudget::default(), compute_opt: true, trace: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LeafMethod {
    Exact,
    Approx,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeafReport {
    pub member: usize,
    pub nodes: usize,
    pub edges: usize,
    pub method: LeafMethod,
    pub cost: u64,
    pub d2_cost: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Traces {
    pub decompose: String,
    pub bridge: Vec<String>,
    pub glue: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub id: String,
    pub solution: EdgeSubgraph,
    pub cost: u64,
    pub d2_cost: u64,
    /// `None` when the oracle budget does not cover the instance.
    pub opt: Option<u64>,
    pub bound_ok: Option<bool>,
    pub steps: usize,
    pub leaves: Vec<LeafReport>,
    pub traces: Option<Traces>,
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = self.opt.map_or("unknown (budget)".to_string(), |o| o.to_string());
        let bound = self.bound_ok.map_or("n/a".to_string(), |b| b.to_string());
        writeln!(f, "instance {}", self.id)?;
        writeln!(f, "cost {}", self.cost)?;
        writeln!(f, "d2_cost {}", self.d2_cost)?;
        writeln!(f, "opt {opt}")?;
        writeln!(f, "bound_ok {bound}")?;
        writeln!(f, "steps {} leaves {}", self.steps, self.leaves.len())?;
        if let Some(t) = &self.traces {
            for line in t.decompose.lines() {
                writeln!(f, "trace decompose {line}")?;
            }
            for line in &t.bridge {
                writeln!(f, "trace bridge {line}")?;
            }
            for line in &t.glue {
                writeln!(f, "trace glue {line}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("invalid instance: {}", join(.0))]
    Invalid(Vec<ValidationFailure>),
    /// A guarantee failed; `instance` is the offending (sub-)instance in the
    /// text format.
    #[error("{stage} aborted: {detail}")]
    Abort { stage: String, detail: String, instance: String },
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl SolveError {
    /// Process exit code: 2 for bad input, 3 for an abort.
    pub fn exit_code(&self) -> i32 {
        match self {
            SolveError::Invalid(_) => 2,
            SolveError::Abort { .. } => 3,
        }
    }

    fn abort(stage: &str, detail: impl fmt::Display, inst: &MapInstance) -> Self {
        SolveError::Abort { stage: stage.into(), detail: detail.to_string(), instance: format_instance(inst) }
    }
}

struct LeafOutcome {
    solution: BTreeSet<EdgeId>,
    report: LeafReport,
    bridge: Vec<String>,
    glue: Vec<String>,
}

fn solve_leaf(member: &Member) -> Result<LeafOutcome, SolveError> {
    let inst = member.inst();
    let to_root = |sub: &EdgeSubgraph| sub.iter().map(|l| member.sub.edges[l]).collect::<BTreeSet<_>>();
    let mut report = LeafReport {
        member: member.id,
        nodes: inst.node_count(),
        edges: inst.edge_count(),
        method: LeafMethod::Exact,
        cost: 0,
        d2_cost: None,
    };
    if inst.node_count() < SMALL_LIMIT {
        let budget = OracleBudget::with_max_nodes(SMALL_LIMIT);
        let (cost, sol) = opt_2ecss(inst, &budget).map_err(|e| SolveError::abort("exact leaf", e, inst))?;
        report.cost = cost;
        return Ok(LeafOutcome { solution: to_root(&sol), report, bridge: Vec::new(), glue: Vec::new() });
    }
    let d2 = compute_d2(inst).and_then(|d| normalize_d2(inst, d)).map_err(|e| SolveError::abort("D2", e, inst))?;
    let cover = bridge_cover(inst, &d2).map_err(|v| SolveError::abort(v.stage, v.detail, inst))?;
    let glued = glue(inst, &cover).map_err(|v| SolveError::abort(v.stage, v.detail, inst))?;
    report.method = LeafMethod::Approx;
    report.cost = glued.h.cost();
    report.d2_cost = Some(d2.cover.cost());
    let tag = |s: String| format!("leaf {}: {s}", member.id);
    Ok(LeafOutcome {
        solution: to_root(&glued.h),
        report,
        bridge: cover.trace.iter().map(|r| tag(r.to_string())).collect(),
        glue: glued.trace.iter().map(|r| tag(r.to_string())).collect(),
    })
}

/// Decomposes, solves each leaf (exactly below 12 nodes, otherwise by D2,
/// normalization, bridge covering and gluing), lifts the leaf solutions back
/// and verifies the result before reporting.
pub fn solve(id: &str, inst: &MapInstance, opts: &SolveOptions) -> Result<SolveReport, SolveError> {
    let validation = validate_instance(inst, true);
    if !validation.passed() {
        return Err(SolveError::Invalid(validation.failures));
    }
    let trace = decompose(inst).map_err(|e| SolveError::abort("decompose", e, inst))?;
    let mut leaf_solutions = HashMap::new();
    let mut leaves = Vec::new();
    let mut traces = Traces { decompose: trace.log(), ..Traces::default() };
    for &l in &trace.leaves {
        let out = solve_leaf(&trace.members[l])?;
        leaf_solutions.insert(l, out.solution);
        leaves.push(out.report);
        traces.bridge.extend(out.bridge);
        traces.glue.extend(out.glue);
    }
    let lifted = recombine(&trace, &leaf_solutions).map_err(|e| SolveError::abort("recombine", e, inst))?;
    let ids: Vec<EdgeId> = lifted.into_iter().collect();
    let solution = EdgeSubgraph::from_ids(inst, ids.iter().copied());
    let verdict = verify(inst, &ids, Some(solution.cost()));
    if !verdict.passed() {
        return Err(SolveError::abort("verify", join(&verdict.failures), inst));
    }
    let d2_cost = match leaves.as_slice() {
        [only] if trace.steps.is_empty() && only.d2_cost.is_some() => only.d2_cost.unwrap(),
        _ => compute_d2(inst).map_err(|e| SolveError::abort("D2", e, inst))?.cover.cost(),
    };
    let opt = if opts.compute_opt && inst.node_count() <= opts.budget.max_nodes {
        opt_2ecss(inst, &opts.budget).ok().map(|(c, _)| c)
    } else {
        None
    };
    let cost = solution.cost();
    Ok(SolveReport {
        id: id.to_string(),
        cost,
        d2_cost,
        opt,
        bound_ok: opt.map(|o| opts.config.within_bound(cost, o)),
        steps: trace.steps.len(),
        leaves,
        traces: opts.trace.then_some(traces),
        solution,
    })
}

/// Solves every instance on a pool of scoped threads; results come back in
/// input order.
pub fn solve_batch(items: &[(String, MapInstance)], opts: &SolveOptions) -> Vec<Result<SolveReport, SolveError>> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len().max(1));
    let mut out: Vec<Option<Result<SolveReport, SolveError>>> = vec![None; items.len()];
    std::thread::scope(|s| {
        let chunks: Vec<_> = out
            .chunks_mut(items.len().div_ceil(workers).max(1))
            .zip(items.chunks(items.len().div_ceil(workers).max(1)))
            .map(|(slots, batch)| {
                s.spawn(move || {
                    for (slot, (id, inst)) in slots.iter_mut().zip(batch) {
                        *slot = Some(solve(id, inst, opts));
                    }
                })
            })
            .collect();
        for h in chunks {
            h.join().expect("solver thread panicked");
        }
    });
    out.into_iter().map(|r| r.expect("every slot is filled")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum VerifyFailure {
    NotASubgraph(EdgeId),
    NotSpanning(usize),
    Disconnected(usize),
    BridgeIntroduced(EdgeId),
    CostMismatch { claimed: u64, actual: u64 },
}

impl fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyFailure::NotASubgraph(id) => write!(f, "not a subgraph: edge {} is not in the instance", id + 1),
            VerifyFailure::NotSpanning(v) => write!(f, "not spanning: node {} has no solution edge", v + 1),
            VerifyFailure::Disconnected(k) => write!(f, "disconnected: {k} components"),
            VerifyFailure::BridgeIntroduced(id) => write!(f, "bridge introduced: edge {}", id + 1),
            VerifyFailure::CostMismatch { claimed, actual } => {
                write!(f, "cost mismatch: claimed {claimed}, actual {actual}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub failures: Vec<VerifyFailure>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that `solution` (duplicates ignored) is a spanning 2-edge-connected
/// subgraph of `inst` and, when given, that its cost matches `claimed_cost`.
pub fn verify(inst: &MapInstance, solution: &[EdgeId], claimed_cost: Option<u64>) -> Verdict {
    let mut failures: Vec<VerifyFailure> = Vec::new();
    let (inside, foreign): (Vec<EdgeId>, Vec<EdgeId>) = solution.iter().partition(|&&id| id < inst.edge_count());
    failures.extend(foreign.into_iter().map(VerifyFailure::NotASubgraph));
    let sub = EdgeSubgraph::from_ids(inst, inside);
    failures.extend((0..inst.node_count()).filter(|&v| sub.degree(inst, v) == 0).map(VerifyFailure::NotSpanning));
    let comps = connected_components(inst, &sub).len();
    if comps > 1 {
        failures.push(VerifyFailure::Disconnected(comps));
    }
    failures.extend(bridges(inst, &sub).into_iter().map(VerifyFailure::BridgeIntroduced));
    if let Some(claimed) = claimed_cost {
        if claimed != sub.cost() {
            failures.push(VerifyFailure::CostMismatch { claimed, actual: sub.cost() });
        }
    }
    Verdict { failures }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    TightS3,
    G2,
    G3,
    Random,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown family `{0}` (expected tight-s3, g2, g3 or random)")]
pub struct UnknownFamily(pub String);

impl FromStr for Family {
    type Err = UnknownFamily;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tight-s3" => Ok(Family::TightS3),
            "g2" => Ok(Family::G2),
            "g3" => Ok(Family::G3),
            "random" => Ok(Family::Random),
            _ => Err(UnknownFamily(s.to_string())),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::TightS3 => "tight-s3",
            Family::G2 => "g2",
            Family::G3 => "g3",
            Family::Random => "random",
        })
    }
}

impl Family {
    /// Builds the family member for `param` (ℓ, k, or n for `random`).
    pub fn instance(self, param: usize, seed: u64) -> Result<MapInstance, GenError> {
        match self {
            Family::TightS3 => gen_tight_s3(param),
            Family::G2 => gen_g2(param),
            Family::G3 => gen_g3(param),
            Family::Random => gen_random(param, 0.3, seed),
        }
    }

    /// Known lower bound on opt for the structured families.
    pub fn opt_lower_bound(self, param: usize) -> Option<u64> {
        match self {
            Family::TightS3 => Some(6 + 5 * param as u64),
            Family::G2 | Family::G3 => Some(7 * param as u64 + 3),
            Family::Random => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OptValue {
    Exact(u64),
    LowerBound(u64),
    Unknown,
}

impl OptValue {
    fn value(self) -> Option<u64> {
        match self {
            OptValue::Exact(x) | OptValue::LowerBound(x) => Some(x),
            OptValue::Unknown => None,
        }
    }
}

impl fmt::Display for OptValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptValue::Exact(x) => write!(f, "{x}"),
            OptValue::LowerBound(x) => write!(f, ">= {x} (bound only)"),
            OptValue::Unknown => f.write_str("unknown (budget)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RatioRow {
    pub family: Family,
    pub param: usize,
    pub nodes: usize,
    pub d2_cost: u64,
    pub opt: OptValue,
    pub alg_cost: u64,
}

fn ratio(p: u64, q: u64) -> Option<Ratio<i64>> {
    (q > 0).then(|| Ratio::new(p as i64, q as i64))
}

/// Exact ratio as `p/q (≈ x.xxx)`.
pub fn render_ratio(r: Ratio<i64>) -> String {
    format!("{}/{} (≈ {:.3})", r.numer(), r.denom(), *r.numer() as f64 / *r.denom() as f64)
}

impl RatioRow {
    pub fn opt_over_d2(&self) -> Option<Ratio<i64>> {
        ratio(self.opt.value()?, self.d2_cost)
    }

    pub fn alg_over_opt(&self) -> Option<Ratio<i64>> {
        ratio(self.alg_cost, self.opt.value()?)
    }

    pub fn alg_over_d2(&self) -> Option<Ratio<i64>> {
        ratio(self.alg_cost, self.d2_cost)
    }
}

impl fmt::Display for RatioRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bound = matches!(self.opt, OptValue::LowerBound(_));
        let show = |r: Option<Ratio<i64>>, prefix: &str| {
            r.map_or("-".to_string(), |r| if bound { format!("{prefix}{}", render_ratio(r)) } else { render_ratio(r) })
        };
        write!(
            f,
            "{} param={} n={} d2={} opt={} alg={} opt/d2={} alg/opt={} alg/d2={}",
            self.family,
            self.param,
            self.nodes,
            self.d2_cost,
            self.opt,
            self.alg_cost,
            show(self.opt_over_d2(), ">= "),
            show(self.alg_over_opt(), "<= "),
            show(self.alg_over_d2(), "")
        )
    }
}

/// One row per parameter; opt comes from the oracle when `budget` allows,
/// otherwise from the family's lower bound.
pub fn ratio_report(
    family: Family,
    params: &[usize],
    budget: &OracleBudget,
    seed: u64,
) -> Result<Vec<RatioRow>, SolveError> {
    let mut rows = Vec::new();
    for &param in params {
        let inst = family.instance(param, seed).map_err(|e| SolveError::Abort {
            stage: "generate".into(),
            detail: e.to_string(),
            instance: String::new(),
        })?;
        let opts = SolveOptions { budget: *budget, ..SolveOptions::default() };
        let report = solve(&format!("{family}-{param}"), &inst, &opts)?;
        let opt = match (report.opt, family.opt_lower_bound(param)) {
            (Some(x), _) => OptValue::Exact(x),
            (None, Some(lb)) => OptValue::LowerBound(lb),
            (None, None) => OptValue::Unknown,
        };
        rows.push(RatioRow {
            family,
            param,
            nodes: inst.node_count(),
            d2_cost: report.d2_cost,
            opt,
            alg_cost: report.cost,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_rendering() {
        assert_eq!(render_ratio(Ratio::new(10, 7)), "10/7 (≈ 1.429)");
        assert_eq!(render_ratio(Ratio::new(4, 2)), "2/1 (≈ 2.000)");
    }

    #[test]
    fn verify_names_each_failure() {
        let c4 = MapInstance::from_triples(4, &[(0, 1, 0), (1, 2, 1), (2, 3, 0), (3, 0, 1)]);
        assert!(verify(&c4, &[0, 1, 2, 3], Some(2)).passed());
        let v = verify(&c4, &[0, 1, 2], None);
        assert!(v.failures.iter().all(|f| matches!(f, VerifyFailure::BridgeIntroduced(_))));
        assert_eq!(v.failures.len(), 3);
        let v = verify(&c4, &[0, 1, 2, 3, 9], Some(3));
        assert_eq!(v.failures, vec![VerifyFailure::NotASubgraph(9), VerifyFailure::CostMismatch { claimed: 3, actual: 2 }]);
        let v = verify(&c4, &[0, 2], None);
        assert!(v.failures.iter().any(|f| f.to_string().starts_with("disconnected")));
    }
}
