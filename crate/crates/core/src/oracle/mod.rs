//! Exact solvers used as ground truth: minimum-cost 2-ECSS, minimum-cost
//! 2-edge cover, and literal obstruction checks.

mod definitions;
mod search;

pub use definitions::{obstruction_check_by_definition, spanning_cycles_of_cost_two};
pub use search::{
    min_2edge_cover, min_2edge_cover_enumerate, opt_2ecss, opt_2ecss_enumerate, opt_at_least,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Limits on exact search. Inputs above `max_nodes` are refused outright.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleBudget {
    pub max_nodes: usize,
    pub max_millis: u64,
    pub node_visit_cap: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_nodes: 16, max_millis: 120_000, node_visit_cap: 200_000_000 }
    }
}

impl OracleBudget {
    pub fn with_max_nodes(max_nodes: usize) -> Self {
        OracleBudget { max_nodes, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance has {n} nodes; the oracle budget allows {max}")]
    TooLarge { n: usize, max: usize },
    #[error("search budget exceeded after {visits} search nodes")]
    BudgetExceeded { visits: u64 },
    #[error("no feasible solution: the instance is not 2-edge-connected or has a node of degree < 2")]
    Infeasible,
    #[error("carrier does not fit obstruction kind {0}")]
    BadCarrier(String),
}
