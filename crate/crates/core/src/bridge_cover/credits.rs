use crate::d2::D2Result;
use crate::graph::{block_decomposition, BlockDecomposition, EdgeSubgraph, MapInstance, SizeClass};
use crate::violation::{ensure, Violation};
use num_rational::Ratio;
use num_traits::Zero;

pub type Credit = Ratio<i64>;

pub(crate) fn third() -> Credit {
    Ratio::new(1, 3)
}

pub(crate) fn int(x: i64) -> Credit {
    Ratio::from_integer(x)
}

/// Credits attached to the current bridge-covering subgraph H. Indices of
/// `c_credit` and `b_credit` follow `dec.components` and `dec.blocks`;
/// `n_credit` and `unit_bridge_degree` are per node (zero on white nodes).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CreditState {
    pub dec: BlockDecomposition,
    pub c_credit: Vec<Credit>,
    pub b_credit: Vec<Credit>,
    pub n_credit: Vec<Credit>,
    pub unit_bridge_degree: Vec<usize>,
    /// 2/3 of the D2 cost.
    pub budget: Credit,
    /// Total held right after initialization.
    pub initial: Credit,
    /// Cost of every edge added since initialization.
    pub paid: Credit,
    /// Credit taken out of the state since initialization.
    pub released: Credit,
}

pub(crate) fn unit_bridge_degrees(inst: &MapInstance, dec: &BlockDecomposition) -> Vec<usize> {
    (0..inst.node_count())
        .map(|v| {
            if dec.is_white(v) {
                0
            } else {
                dec.bridges_at(inst, v).into_iter().filter(|&id| !inst.edge(id).is_zero()).count()
            }
        })
        .collect()
}

impl CreditState {
    pub fn total(&self) -> Credit {
        let sum = |v: &[Credit]| v.iter().fold(Credit::zero(), |a, &b| a + b);
        sum(&self.c_credit) + sum(&self.b_credit) + sum(&self.n_credit)
    }

    /// c-credit plus b-credit of a component that is a single block.
    pub fn block_total(&self, block: usize) -> Credit {
        self.b_credit[block] + self.c_credit[self.dec.blocks[block].component]
    }

    fn component_is_block(&self, c: usize) -> Option<usize> {
        let inside = self.dec.blocks_in_component(c);
        (inside.len() == 1 && self.dec.blocks[inside[0]].nodes.len() == self.dec.components[c].len())
            .then(|| inside[0])
    }

    /// The four per-item lower bounds plus exact conservation of the ledger.
    pub fn check(&self, inst: &MapInstance) -> Result<(), Violation> {
        const S: &str = "credit invariant";
        for (c, &x) in self.c_credit.iter().enumerate() {
            ensure(x >= int(1), S, || format!("component {c} holds c-credit {x} < 1"))?;
        }
        for (b, &x) in self.b_credit.iter().enumerate() {
            let c = self.dec.blocks[b].component;
            let alone = self.component_is_block(c) == Some(b);
            let need = if alone && self.dec.blocks[b].class == SizeClass::Small { third() } else { int(1) };
            ensure(x >= need, S, || format!("block {b} holds b-credit {x} < {need}"))?;
        }
        let ubd = unit_bridge_degrees(inst, &self.dec);
        for v in 0..inst.node_count() {
            let want = if self.dec.is_white(v) { Credit::zero() } else { third() * int(ubd[v] as i64) };
            ensure(self.n_credit[v] == want && self.unit_bridge_degree[v] == ubd[v], S, || {
                format!("node {v} holds n-credit {} instead of {want}", self.n_credit[v])
            })?;
        }
        let total = self.total();
        ensure(self.initial == total + self.released, S, || {
            format!("ledger does not balance: initial {} != held {total} + released {}", self.initial, self.released)
        })?;
        ensure(self.released >= self.paid, S, || {
            format!("paid {} exceeds released {}", self.paid, self.released)
        })?;
        ensure(total + self.paid <= self.budget, S, || {
            format!("held {total} plus paid {} exceeds budget {}", self.paid, self.budget)
        })
    }
}

/// Distributes 2/3 per unit-edge of the normalized D2: block edges fund their
/// block, each unit-bridge gives 1/3 to both ends. Each component then takes
/// one c-credit from a large block, from three small blocks, or (exactly two
/// small pendant blocks) from the 1/3 the unit-bridges left on their white ends.
pub fn init_credits(inst: &MapInstance, d2: &D2Result) -> Result<(EdgeSubgraph, CreditState), Violation> {
    const S: &str = "initial credits";
    ensure(d2.normalized, S, || "D2 is not normalized".into())?;
    let h = d2.cover.clone();
    let dec = block_decomposition(inst, &h);
    let ubd = unit_bridge_degrees(inst, &dec);
    let two_thirds = Ratio::new(2, 3);
    let n = inst.node_count();
    let mut n_credit = vec![Credit::zero(); n];
    for v in 0..n {
        if !dec.is_white(v) {
            n_credit[v] = third() * int(ubd[v] as i64);
        }
    }
    let mut b_credit: Vec<Credit> = dec.blocks.iter().map(|b| two_thirds * int(b.unit_edges as i64)).collect();
    let mut c_credit = vec![Credit::zero(); dec.components.len()];
    for c in 0..dec.components.len() {
        let blocks = dec.blocks_in_component(c);
        ensure(!blocks.is_empty(), S, || format!("component {c} has no 2ec-block"))?;
        c_credit[c] = int(1);
        if !dec.component_has_bridge(c) {
            b_credit[blocks[0]] -= int(1);
        } else if let Some(&big) = blocks.iter().find(|&&b| dec.blocks[b].class == SizeClass::Large) {
            b_credit[big] -= int(1);
        } else if blocks.len() >= 3 {
            for &b in &blocks[..3] {
                b_credit[b] -= third();
            }
        } else if blocks.len() == 2 {
            for &b in &blocks {
                let blk = &dec.blocks[b];
                ensure(blk.is_pendant() && !inst.edge(blk.incident_bridges[0]).is_zero(), S, || {
                    format!("small pendant block {:?} hangs on a zero-bridge", blk.nodes)
                })?;
            }
            // the two white-end thirds plus one third from the first block
            b_credit[blocks[0]] -= third();
        } else {
            return Err(Violation::new(S, format!("component {c} has a bridge but a single block")));
        }
    }
    let mut state = CreditState {
        dec,
        c_credit,
        b_credit,
        n_credit,
        unit_bridge_degree: ubd,
        budget: two_thirds * int(d2.cover.cost() as i64),
        initial: Credit::zero(),
        paid: Credit::zero(),
        released: Credit::zero(),
    };
    state.initial = state.total();
    state.check(inst)?;
    Ok((h, state))
}
