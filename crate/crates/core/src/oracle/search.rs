use super::{OracleBudget, OracleError};
use crate::graph::{label_components, lowpoint, EdgeId, EdgeSubgraph, MapInstance, NONE};
use std::time::{Duration, Instant};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Goal {
    TwoEcss,
    TwoCover,
}

const UND: u8 = 0;
const IN: u8 = 1;
const OUT: u8 = 2;

fn spanning_2ec(inst: &MapInstance, mask: &[bool]) -> bool {
    let n = inst.node_count();
    if n < 2 {
        return false;
    }
    let (_, count) = label_components(inst, |id| mask[id], |_| true);
    if count != 1 {
        return false;
    }
    let (is_bridge, _) = lowpoint(inst, mask);
    !is_bridge.iter().zip(mask).any(|(&b, &m)| b && m)
}

fn covers_twice(inst: &MapInstance, mask: &[bool]) -> bool {
    (0..inst.node_count())
        .all(|v| inst.neighbors(v).iter().filter(|&&(_, id)| mask[id]).count() >= 2)
}

fn feasible(goal: Goal, inst: &MapInstance, mask: &[bool]) -> bool {
    match goal {
        Goal::TwoEcss => spanning_2ec(inst, mask),
        Goal::TwoCover => covers_twice(inst, mask),
    }
}

/// Unit copies that can matter: per node pair at most two edges in total, zero
/// copies first, then the lowest unit ids.
fn useful_units(inst: &MapInstance) -> Vec<bool> {
    let mut keep = vec![false; inst.edge_count()];
    for v in 0..inst.node_count() {
        let nbrs = inst.neighbors(v);
        let mut i = 0;
        while i < nbrs.len() {
            let w = nbrs[i].0;
            let mut j = i;
            while j < nbrs.len() && nbrs[j].0 == w {
                j += 1;
            }
            if w > v {
                let zeros = nbrs[i..j].iter().filter(|&&(_, id)| inst.edge(id).is_zero()).count();
                let mut room = 2usize.saturating_sub(zeros);
                for &(_, id) in &nbrs[i..j] {
                    if !inst.edge(id).is_zero() && room > 0 {
                        keep[id] = true;
                        room -= 1;
                    }
                }
            }
            i = j;
        }
    }
    keep
}

struct Search<'a> {
    inst: &'a MapInstance,
    goal: Goal,
    state: Vec<u8>,
    zero_count: u64,
    best: u64,
    best_state: Vec<bool>,
    visits: u64,
    cap: u64,
    deadline: Instant,
}

impl<'a> Search<'a> {
    fn tick(&mut self) -> Result<(), OracleError> {
        self.visits += 1;
        if self.visits > self.cap || (self.visits.is_multiple_of(1024) && Instant::now() > self.deadline) {
            return Err(OracleError::BudgetExceeded { visits: self.visits });
        }
        Ok(())
    }

    fn mask(&self, include_undecided: bool) -> Vec<bool> {
        self.state.iter().map(|&s| s == IN || (include_undecided && s == UND)).collect()
    }

    fn lower_bound(&self, units_in: u64) -> u64 {
        let n = self.inst.node_count();
        let mut deficit = 0u64;
        for v in 0..n {
            let d = self.inst.neighbors(v).iter().filter(|&&(_, id)| self.state[id] == IN).count();
            deficit += 2u64.saturating_sub(d as u64);
        }
        let by_degree = units_in + deficit.div_ceil(2);
        match self.goal {
            Goal::TwoEcss => by_degree.max((n as u64).saturating_sub(self.zero_count)),
            Goal::TwoCover => by_degree,
        }
    }

    /// Undecided edges, one of which every feasible completion must include.
    fn branching_set(&self) -> Vec<EdgeId> {
        let inst = self.inst;
        let n = inst.node_count();
        let mut best_node = None;
        let mut best_free = usize::MAX;
        for v in 0..n {
            let nbrs = inst.neighbors(v);
            let d = nbrs.iter().filter(|&&(_, id)| self.state[id] == IN).count();
            if d < 2 {
                let free = nbrs.iter().filter(|&&(_, id)| self.state[id] == UND).count();
                if free < best_free {
                    best_free = free;
                    best_node = Some(v);
                }
            }
        }
        if let Some(v) = best_node {
            let mut out: Vec<EdgeId> = inst
                .neighbors(v)
                .iter()
                .filter(|&&(_, id)| self.state[id] == UND)
                .map(|&(_, id)| id)
                .collect();
            out.sort_unstable();
            return out;
        }
        let in_mask = self.mask(false);
        let (label, count) = label_components(inst, |id| in_mask[id], |_| true);
        let side: Vec<bool> = if count > 1 {
            let mut sizes = vec![0usize; count];
            for &l in &label {
                sizes[l] += 1;
            }
            let smallest = (0..count).min_by_key(|&c| (sizes[c], c)).unwrap();
            label.iter().map(|&l| l == smallest).collect()
        } else {
            let (is_bridge, _) = lowpoint(inst, &in_mask);
            let b = match (0..inst.edge_count()).find(|&id| in_mask[id] && is_bridge[id]) {
                Some(b) => b,
                None => return Vec::new(),
            };
            let e = inst.edge(b);
            let (lab, _) = label_components(inst, |id| in_mask[id] && id != b, |_| true);
            let root = lab[e.u];
            lab.iter().map(|&l| l == root && l != NONE).collect()
        };
        (0..inst.edge_count())
            .filter(|&id| {
                let e = inst.edge(id);
                self.state[id] == UND && side[e.u] != side[e.v]
            })
            .collect()
    }

    fn run(&mut self, units_in: u64) -> Result<(), OracleError> {
        self.tick()?;
        if self.lower_bound(units_in) >= self.best {
            return Ok(());
        }
        if !feasible(self.goal, self.inst, &self.mask(true)) {
            return Ok(());
        }
        if feasible(self.goal, self.inst, &self.mask(false)) {
            self.best = units_in;
            self.best_state = self.mask(false);
            return Ok(());
        }
        let branch = self.branching_set();
        for &id in &branch {
            self.state[id] = IN;
            let cost = self.inst.edge(id).cost as u64;
            self.run(units_in + cost)?;
            self.state[id] = OUT;
        }
        for &id in &branch {
            self.state[id] = UND;
        }
        Ok(())
    }
}

fn solve(
    inst: &MapInstance,
    goal: Goal,
    budget: &OracleBudget,
) -> Result<(u64, EdgeSubgraph), OracleError> {
    let n = inst.node_count();
    if n > budget.max_nodes {
        return Err(OracleError::TooLarge { n, max: budget.max_nodes });
    }
    let useful = useful_units(inst);
    let mut state = vec![OUT; inst.edge_count()];
    let mut zero_count = 0;
    for (id, e) in inst.edges().iter().enumerate() {
        if e.is_zero() {
            state[id] = IN;
            zero_count += 1;
        } else if useful[id] {
            state[id] = UND;
        }
    }
    // Greedy minimal solution as the first upper bound.
    let mut greedy: Vec<bool> = state.iter().map(|&s| s != OUT).collect();
    if !feasible(goal, inst, &greedy) {
        return Err(OracleError::Infeasible);
    }
    for id in (0..inst.edge_count()).rev() {
        if state[id] == UND {
            greedy[id] = false;
            if !feasible(goal, inst, &greedy) {
                greedy[id] = true;
            }
        }
    }
    let greedy_cost = (0..inst.edge_count()).filter(|&id| greedy[id]).map(|id| inst.edge(id).cost as u64).sum();
    let mut search = Search {
        inst,
        goal,
        state,
        zero_count,
        best: greedy_cost,
        best_state: greedy,
        visits: 0,
        cap: budget.node_visit_cap,
        deadline: Instant::now() + Duration::from_millis(budget.max_millis),
    };
    search.run(0)?;
    let witness = EdgeSubgraph::from_ids(inst, (0..inst.edge_count()).filter(|&id| search.best_state[id]));
    Ok((search.best, witness))
}

/// Minimum cost of a spanning 2-edge-connected subgraph, with a witness.
pub fn opt_2ecss(inst: &MapInstance, budget: &OracleBudget) -> Result<(u64, EdgeSubgraph), OracleError> {
    solve(inst, Goal::TwoEcss, budget)
}

/// Minimum cost of an edge set covering every node at least twice.
pub fn min_2edge_cover(
    inst: &MapInstance,
    budget: &OracleBudget,
) -> Result<(u64, EdgeSubgraph), OracleError> {
    solve(inst, Goal::TwoCover, budget)
}

/// Whether opt ≥ z. Every 2-ECSS has ≥ n/2 unit-edges, so n ≥ 2z answers
/// without search.
pub fn opt_at_least(inst: &MapInstance, z: u64, budget: &OracleBudget) -> Result<bool, OracleError> {
    if inst.node_count() as u64 >= 2 * z {
        return Ok(true);
    }
    Ok(opt_2ecss(inst, budget)?.0 >= z)
}

const ENUM_MAX_NODES: usize = 8;

/// Advances `pick` to the next k-subset of `0..m` in lexicographic order.
fn next_combination(pick: &mut [usize], m: usize) -> bool {
    let k = pick.len();
    for i in (0..k).rev() {
        if pick[i] < m - k + i {
            pick[i] += 1;
            for j in i + 1..k {
                pick[j] = pick[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Plain enumeration: all zero-edges plus every unit subset of size k = 0, 1, …,
/// stopping at the first size that works.
fn enumerate(inst: &MapInstance, goal: Goal) -> Result<(u64, EdgeSubgraph), OracleError> {
    let n = inst.node_count();
    if n > ENUM_MAX_NODES {
        return Err(OracleError::TooLarge { n, max: ENUM_MAX_NODES });
    }
    let units: Vec<EdgeId> = inst.unit_edges().collect();
    let mut mask: Vec<bool> = inst.edges().iter().map(|e| e.is_zero()).collect();
    for k in 0..=units.len() {
        let mut pick: Vec<usize> = (0..k).collect();
        loop {
            for &i in &pick {
                mask[units[i]] = true;
            }
            let ok = feasible(goal, inst, &mask);
            if ok {
                let witness = EdgeSubgraph::from_ids(inst, (0..inst.edge_count()).filter(|&id| mask[id]));
                return Ok((k as u64, witness));
            }
            for &i in &pick {
                mask[units[i]] = false;
            }
            if !next_combination(&mut pick, units.len()) {
                break;
            }
        }
    }
    Err(OracleError::Infeasible)
}

/// Exhaustive-enumeration opt for n ≤ 8, independent of the branch-and-bound.
pub fn opt_2ecss_enumerate(inst: &MapInstance) -> Result<(u64, EdgeSubgraph), OracleError> {
    enumerate(inst, Goal::TwoEcss)
}

/// Exhaustive-enumeration minimum 2-edge cover for n ≤ 8.
pub fn min_2edge_cover_enumerate(inst: &MapInstance) -> Result<(u64, EdgeSubgraph), OracleError> {
    enumerate(inst, Goal::TwoCover)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_two_edge_connected;

    fn c4() -> MapInstance {
        MapInstance::from_triples(4, &[(0, 1, 0), (1, 2, 1), (2, 3, 0), (3, 0, 1)])
    }

    #[test]
    fn c4_costs_two() {
        let b = OracleBudget::default();
        assert_eq!(opt_2ecss(&c4(), &b).unwrap().0, 2);
        assert_eq!(min_2edge_cover(&c4(), &b).unwrap().0, 2);
        assert_eq!(opt_2ecss_enumerate(&c4()).unwrap().0, 2);
        assert!(!opt_at_least(&c4(), 3, &b).unwrap());
        assert!(opt_at_least(&c4(), 2, &b).unwrap());
    }

    #[test]
    fn refuses_oversized_input() {
        let tri: Vec<(usize, usize, u8)> = (0..20).map(|i| (i, (i + 1) % 20, 1)).collect();
        let inst = MapInstance::from_triples(20, &tri);
        assert_eq!(
            opt_2ecss(&inst, &OracleBudget::default()).unwrap_err(),
            OracleError::TooLarge { n: 20, max: 16 }
        );
        assert!(opt_at_least(&inst, 10, &OracleBudget::default()).unwrap());
    }

    #[test]
    fn visit_cap_is_an_error() {
        let b = OracleBudget { node_visit_cap: 0, ..Default::default() };
        let k4 = MapInstance::from_triples(
            5,
            &[(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 1), (2, 3, 1), (3, 4, 1), (4, 0, 1), (4, 2, 1)],
        );
        assert!(matches!(opt_2ecss(&k4, &b), Err(OracleError::BudgetExceeded { .. })));
    }

    #[test]
    fn path_is_infeasible() {
        let p = MapInstance::from_triples(3, &[(0, 1, 1), (1, 2, 1)]);
        assert_eq!(opt_2ecss(&p, &OracleBudget::default()).unwrap_err(), OracleError::Infeasible);
    }

    #[test]
    fn witness_is_spanning_2ec() {
        let k4 = MapInstance::from_triples(
            4,
            &[(0, 1, 0), (0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 1), (2, 3, 0)],
        );
        let (cost, w) = opt_2ecss(&k4, &OracleBudget::default()).unwrap();
        assert_eq!(cost, 2);
        assert_eq!(w.cost(), 2);
        assert!(is_two_edge_connected(&k4, &w, true));
    }
}
