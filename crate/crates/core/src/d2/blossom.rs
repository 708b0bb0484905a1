//! Maximum-weight matching in general graphs (Edmonds' primal-dual blossom
//! method, O(n³)), on integer weights only.
//!
//! Vertices are `0..n`; non-trivial blossoms take ids `n..2n`. Edge `k` has the
//! two endpoint handles `2k` and `2k + 1`; `mate[v]` stores the handle of the
//! far end of the matched edge at `v`. Weights are doubled on entry so every
//! dual variable stays integral and S–S slacks are even.

const NIL: usize = usize::MAX;

struct Solver {
    n: usize,
    edges: Vec<(usize, usize, i64)>,
    endpoint: Vec<usize>,
    neighbend: Vec<Vec<usize>>,
    mate: Vec<usize>,
    label: Vec<u8>,
    labelend: Vec<usize>,
    inblossom: Vec<usize>,
    parent: Vec<usize>,
    childs: Vec<Vec<usize>>,
    base: Vec<usize>,
    endps: Vec<Vec<usize>>,
    bestedge: Vec<usize>,
    blossom_best: Vec<Option<Vec<usize>>>,
    unused: Vec<usize>,
    dual: Vec<i64>,
    allowed: Vec<bool>,
    queue: Vec<usize>,
}

fn wrap(j: isize, len: usize) -> usize {
    j.rem_euclid(len as isize) as usize
}

impl Solver {
    fn new(n: usize, input: &[(usize, usize, i64)]) -> Self {
        let edges: Vec<(usize, usize, i64)> = input.iter().map(|&(i, j, w)| (i, j, 2 * w)).collect();
        let maxw = edges.iter().map(|e| e.2).max().unwrap_or(0).max(0);
        let mut endpoint = Vec::with_capacity(2 * edges.len());
        let mut neighbend = vec![Vec::new(); n];
        for (k, &(i, j, _)) in edges.iter().enumerate() {
            assert!(i != j && i < n && j < n, "bad matching edge {k}");
            endpoint.push(i);
            endpoint.push(j);
            neighbend[i].push(2 * k + 1);
            neighbend[j].push(2 * k);
        }
        let mut base: Vec<usize> = (0..n).collect();
        base.extend(std::iter::repeat_n(NIL, n));
        let mut dual = vec![maxw; n];
        dual.extend(std::iter::repeat_n(0, n));
        let m = edges.len();
        Solver {
            n,
            edges,
            endpoint,
            neighbend,
            mate: vec![NIL; n],
            label: vec![0; 2 * n],
            labelend: vec![NIL; 2 * n],
            inblossom: (0..n).collect(),
            parent: vec![NIL; 2 * n],
            childs: vec![Vec::new(); 2 * n],
            base,
            endps: vec![Vec::new(); 2 * n],
            bestedge: vec![NIL; 2 * n],
            blossom_best: vec![None; 2 * n],
            unused: (n..2 * n).rev().collect(),
            dual,
            allowed: vec![false; m],
            queue: Vec::new(),
        }
    }

    fn slack(&self, k: usize) -> i64 {
        let (i, j, w) = self.edges[k];
        self.dual[i] + self.dual[j] - 2 * w
    }

    fn leaves(&self, b: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![b];
        while let Some(x) = stack.pop() {
            if x < self.n {
                out.push(x);
            } else {
                stack.extend(self.childs[x].iter().rev().copied());
            }
        }
        out
    }

    fn assign_label(&mut self, w: usize, t: u8, p: usize) {
        let b = self.inblossom[w];
        debug_assert!(self.label[w] == 0 && self.label[b] == 0);
        self.label[w] = t;
        self.label[b] = t;
        self.labelend[w] = p;
        self.labelend[b] = p;
        self.bestedge[w] = NIL;
        self.bestedge[b] = NIL;
        if t == 1 {
            let leaves = self.leaves(b);
            self.queue.extend(leaves);
        } else {
            let bb = self.base[b];
            let mp = self.mate[bb];
            debug_assert!(mp != NIL);
            self.assign_label(self.endpoint[mp], 1, mp ^ 1);
        }
    }

    /// Walks up from `v` and `w` alternately; returns the base of the new
    /// blossom, or `NIL` when the two trees differ (augmenting path).
    fn scan_blossom(&mut self, mut v: usize, mut w: usize) -> usize {
        let mut path = Vec::new();
        let mut found = NIL;
        while v != NIL || w != NIL {
            let mut b = self.inblossom[v];
            if self.label[b] & 4 != 0 {
                found = self.base[b];
                break;
            }
            path.push(b);
            self.label[b] = 5;
            if self.labelend[b] == NIL {
                v = NIL;
            } else {
                v = self.endpoint[self.labelend[b]];
                b = self.inblossom[v];
                v = self.endpoint[self.labelend[b]];
            }
            if w != NIL {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = 1;
        }
        found
    }

    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];
        let b = self.unused.pop().expect("blossom ids exhausted");
        self.base[b] = base;
        self.parent[b] = NIL;
        self.parent[bb] = b;
        let mut path = Vec::new();
        let mut endps = Vec::new();
        while bv != bb {
            self.parent[bv] = b;
            path.push(bv);
            endps.push(self.labelend[bv]);
            v = self.endpoint[self.labelend[bv]];
            bv = self.inblossom[v];
        }
        path.push(bb);
        path.reverse();
        endps.reverse();
        endps.push(2 * k);
        while bw != bb {
            self.parent[bw] = b;
            path.push(bw);
            endps.push(self.labelend[bw] ^ 1);
            w = self.endpoint[self.labelend[bw]];
            bw = self.inblossom[w];
        }
        self.childs[b] = path.clone();
        self.endps[b] = endps;
        self.label[b] = 1;
        self.labelend[b] = self.labelend[bb];
        self.dual[b] = 0;
        for leaf in self.leaves(b) {
            if self.label[self.inblossom[leaf]] == 2 {
                self.queue.push(leaf);
            }
            self.inblossom[leaf] = b;
        }
        let mut best_to = vec![NIL; 2 * self.n];
        for &sub in &path {
            let lists: Vec<Vec<usize>> = match self.blossom_best[sub].take() {
                Some(list) => vec![list],
                None => self
                    .leaves(sub)
                    .into_iter()
                    .map(|x| self.neighbend[x].iter().map(|p| p / 2).collect())
                    .collect(),
            };
            for list in lists {
                for k in list {
                    let (mut i, mut j, _) = self.edges[k];
                    if self.inblossom[j] == b {
                        std::mem::swap(&mut i, &mut j);
                    }
                    let _ = i;
                    let bj = self.inblossom[j];
                    if bj != b
                        && self.label[bj] == 1
                        && (best_to[bj] == NIL || self.slack(k) < self.slack(best_to[bj]))
                    {
                        best_to[bj] = k;
                    }
                }
            }
            self.bestedge[sub] = NIL;
        }
        let list: Vec<usize> = best_to.into_iter().filter(|&k| k != NIL).collect();
        self.bestedge[b] = NIL;
        for &k in &list {
            if self.bestedge[b] == NIL || self.slack(k) < self.slack(self.bestedge[b]) {
                self.bestedge[b] = k;
            }
        }
        self.blossom_best[b] = Some(list);
    }

    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        let children = self.childs[b].clone();
        for &s in &children {
            self.parent[s] = NIL;
            if s < self.n {
                self.inblossom[s] = s;
            } else if endstage && self.dual[s] == 0 {
                self.expand_blossom(s, endstage);
            } else {
                for leaf in self.leaves(s) {
                    self.inblossom[leaf] = s;
                }
            }
        }
        if !endstage && self.label[b] == 2 {
            let len = children.len();
            let endps = self.endps[b].clone();
            let entry = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
            let pos = children.iter().position(|&c| c == entry).unwrap() as isize;
            let (mut j, jstep, trick) =
                if pos & 1 == 1 { (pos - len as isize, 1isize, 0usize) } else { (pos, -1isize, 1usize) };
            let mut p = self.labelend[b];
            while j != 0 {
                self.label[self.endpoint[p ^ 1]] = 0;
                let q = endps[wrap(j - trick as isize, len)] ^ trick ^ 1;
                self.label[self.endpoint[q]] = 0;
                self.assign_label(self.endpoint[p ^ 1], 2, p);
                self.allowed[endps[wrap(j - trick as isize, len)] / 2] = true;
                j += jstep;
                p = endps[wrap(j - trick as isize, len)] ^ trick;
                self.allowed[p / 2] = true;
                j += jstep;
            }
            let bv = children[wrap(j, len)];
            let ep = self.endpoint[p ^ 1];
            self.label[ep] = 2;
            self.label[bv] = 2;
            self.labelend[ep] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = NIL;
            j += jstep;
            while children[wrap(j, len)] != entry {
                let bv = children[wrap(j, len)];
                if self.label[bv] == 1 {
                    j += jstep;
                    continue;
                }
                let reached = self.leaves(bv).into_iter().find(|&x| self.label[x] != 0);
                if let Some(x) = reached {
                    self.label[x] = 0;
                    let mb = self.mate[self.base[bv]];
                    self.label[self.endpoint[mb]] = 0;
                    let le = self.labelend[x];
                    self.assign_label(x, 2, le);
                }
                j += jstep;
            }
        }
        self.label[b] = 0;
        self.labelend[b] = NIL;
        self.childs[b].clear();
        self.endps[b].clear();
        self.base[b] = NIL;
        self.blossom_best[b] = None;
        self.bestedge[b] = NIL;
        self.unused.push(b);
    }

    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.parent[t] != b {
            t = self.parent[t];
        }
        if t >= self.n {
            self.augment_blossom(t, v);
        }
        let len = self.childs[b].len();
        let i = self.childs[b].iter().position(|&c| c == t).unwrap();
        let (mut j, jstep, trick) = if i & 1 == 1 {
            (i as isize - len as isize, 1isize, 0usize)
        } else {
            (i as isize, -1isize, 1usize)
        };
        while j != 0 {
            j += jstep;
            let t1 = self.childs[b][wrap(j, len)];
            let p = self.endps[b][wrap(j - trick as isize, len)] ^ trick;
            if t1 >= self.n {
                self.augment_blossom(t1, self.endpoint[p]);
            }
            j += jstep;
            let t2 = self.childs[b][wrap(j, len)];
            if t2 >= self.n {
                self.augment_blossom(t2, self.endpoint[p ^ 1]);
            }
            self.mate[self.endpoint[p]] = p ^ 1;
            self.mate[self.endpoint[p ^ 1]] = p;
        }
        self.childs[b].rotate_left(i);
        self.endps[b].rotate_left(i);
        self.base[b] = self.base[self.childs[b][0]];
        debug_assert_eq!(self.base[b], v);
    }

    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for (mut s, mut p) in [(v, 2 * k + 1), (w, 2 * k)] {
            loop {
                let bs = self.inblossom[s];
                if bs >= self.n {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p;
                if self.labelend[bs] == NIL {
                    break;
                }
                let t = self.endpoint[self.labelend[bs]];
                let bt = self.inblossom[t];
                s = self.endpoint[self.labelend[bt]];
                let j = self.endpoint[self.labelend[bt] ^ 1];
                if bt >= self.n {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }

    fn run(&mut self, max_cardinality: bool) {
        let n = self.n;
        for _stage in 0..n {
            self.label.iter_mut().for_each(|l| *l = 0);
            self.bestedge.iter_mut().for_each(|e| *e = NIL);
            for b in n..2 * n {
                self.blossom_best[b] = None;
            }
            self.allowed.iter_mut().for_each(|a| *a = false);
            self.queue.clear();
            for v in 0..n {
                if self.mate[v] == NIL && self.label[self.inblossom[v]] == 0 {
                    self.assign_label(v, 1, NIL);
                }
            }
            let mut augmented = false;
            loop {
                while let Some(v) = self.queue.pop() {
                    for idx in 0..self.neighbend[v].len() {
                        let p = self.neighbend[v][idx];
                        let k = p / 2;
                        let w = self.endpoint[p];
                        if self.inblossom[v] == self.inblossom[w] {
                            continue;
                        }
                        let mut kslack = 0;
                        if !self.allowed[k] {
                            kslack = self.slack(k);
                            if kslack <= 0 {
                                self.allowed[k] = true;
                            }
                        }
                        if self.allowed[k] {
                            let bw = self.inblossom[w];
                            if self.label[bw] == 0 {
                                self.assign_label(w, 2, p ^ 1);
                            } else if self.label[bw] == 1 {
                                let base = self.scan_blossom(v, w);
                                if base != NIL {
                                    self.add_blossom(base, k);
                                } else {
                                    self.augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if self.label[w] == 0 {
                                self.label[w] = 2;
                                self.labelend[w] = p ^ 1;
                            }
                        } else if self.label[self.inblossom[w]] == 1 {
                            let b = self.inblossom[v];
                            if self.bestedge[b] == NIL || kslack < self.slack(self.bestedge[b]) {
                                self.bestedge[b] = k;
                            }
                        } else if self.label[w] == 0
                            && (self.bestedge[w] == NIL || kslack < self.slack(self.bestedge[w]))
                        {
                            self.bestedge[w] = k;
                        }
                    }
                    if augmented {
                        break;
                    }
                }
                if augmented {
                    break;
                }
                // No augmenting path under the current duals; find the dual step.
                let mut kind = 0u8;
                let mut delta = 0i64;
                let mut delta_edge = NIL;
                let mut delta_blossom = NIL;
                if !max_cardinality {
                    kind = 1;
                    delta = *self.dual[..n].iter().min().unwrap();
                }
                for v in 0..n {
                    if self.label[self.inblossom[v]] == 0 && self.bestedge[v] != NIL {
                        let d = self.slack(self.bestedge[v]);
                        if kind == 0 || d < delta {
                            delta = d;
                            kind = 2;
                            delta_edge = self.bestedge[v];
                        }
                    }
                }
                for b in 0..2 * n {
                    if self.parent[b] == NIL && self.label[b] == 1 && self.bestedge[b] != NIL {
                        let s = self.slack(self.bestedge[b]);
                        debug_assert!(s % 2 == 0, "odd S-S slack");
                        let d = s / 2;
                        if kind == 0 || d < delta {
                            delta = d;
                            kind = 3;
                            delta_edge = self.bestedge[b];
                        }
                    }
                }
                for b in n..2 * n {
                    if self.base[b] != NIL
                        && self.parent[b] == NIL
                        && self.label[b] == 2
                        && (kind == 0 || self.dual[b] < delta)
                    {
                        delta = self.dual[b];
                        kind = 4;
                        delta_blossom = b;
                    }
                }
                if kind == 0 {
                    kind = 1;
                    delta = (*self.dual[..n].iter().min().unwrap()).max(0);
                }
                for v in 0..n {
                    match self.label[self.inblossom[v]] {
                        1 => self.dual[v] -= delta,
                        2 => self.dual[v] += delta,
                        _ => {}
                    }
                }
                for b in n..2 * n {
                    if self.base[b] != NIL && self.parent[b] == NIL {
                        match self.label[b] {
                            1 => self.dual[b] += delta,
                            2 => self.dual[b] -= delta,
                            _ => {}
                        }
                    }
                }
                match kind {
                    1 => break,
                    2 => {
                        self.allowed[delta_edge] = true;
                        let (mut i, j, _) = self.edges[delta_edge];
                        if self.label[self.inblossom[i]] == 0 {
                            i = j;
                        }
                        self.queue.push(i);
                    }
                    3 => {
                        self.allowed[delta_edge] = true;
                        let (i, _, _) = self.edges[delta_edge];
                        self.queue.push(i);
                    }
                    _ => self.expand_blossom(delta_blossom, false),
                }
            }
            if !augmented {
                break;
            }
            for b in n..2 * n {
                if self.parent[b] == NIL
                    && self.base[b] != NIL
                    && self.label[b] == 1
                    && self.dual[b] == 0
                {
                    self.expand_blossom(b, true);
                }
            }
        }
    }
}

/// Maximum-weight matching; with `max_cardinality` only maximum-cardinality
/// matchings compete. Returns the partner of every vertex.
pub fn max_weight_matching(
    n: usize,
    edges: &[(usize, usize, i64)],
    max_cardinality: bool,
) -> Vec<Option<usize>> {
    if edges.is_empty() {
        return vec![None; n];
    }
    let mut s = Solver::new(n, edges);
    s.run(max_cardinality);
    s.mate.iter().map(|&p| if p == NIL { None } else { Some(s.endpoint[p]) }).collect()
}

/// Minimum-weight perfect matching, or `None` when no perfect matching exists.
/// Returns, per vertex, the index into `edges` of its matched edge.
pub fn min_weight_perfect_matching(n: usize, edges: &[(usize, usize, i64)]) -> Option<Vec<usize>> {
    if n % 2 == 1 {
        return None;
    }
    let top = edges.iter().map(|e| e.2).max().unwrap_or(0) + 1;
    let flipped: Vec<(usize, usize, i64)> = edges.iter().map(|&(i, j, w)| (i, j, top - w)).collect();
    if flipped.is_empty() {
        return if n == 0 { Some(Vec::new()) } else { None };
    }
    let mut s = Solver::new(n, &flipped);
    s.run(true);
    let mut out = Vec::with_capacity(n);
    for v in 0..n {
        if s.mate[v] == NIL {
            return None;
        }
        out.push(s.mate[v] / 2);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn weight_of(edges: &[(usize, usize, i64)], mate: &[Option<usize>]) -> i64 {
        let mut total = 0;
        for &(i, j, w) in edges {
            if mate[i] == Some(j) && mate[j] == Some(i) {
                total += w;
            }
        }
        total
    }

    fn brute(n: usize, edges: &[(usize, usize, i64)], perfect: bool) -> Option<i64> {
        fn go(
            v: usize,
            used: &mut Vec<bool>,
            n: usize,
            adj: &[Vec<(usize, i64)>],
            perfect: bool,
        ) -> Option<i64> {
            if v == n {
                return Some(0);
            }
            if used[v] {
                return go(v + 1, used, n, adj, perfect);
            }
            let mut best: Option<i64> = None;
            if !perfect {
                used[v] = true;
                best = go(v + 1, used, n, adj, perfect);
                used[v] = false;
            }
            for &(w, wt) in &adj[v] {
                if !used[w] {
                    used[v] = true;
                    used[w] = true;
                    if let Some(r) = go(v + 1, used, n, adj, perfect) {
                        let cand = r + wt;
                        best = Some(best.map_or(cand, |b| if perfect { b.min(cand) } else { b.max(cand) }));
                    }
                    used[v] = false;
                    used[w] = false;
                }
            }
            best
        }
        let mut adj = vec![Vec::new(); n];
        for &(i, j, w) in edges {
            adj[i.min(j)].push((i.max(j), w));
        }
        go(0, &mut vec![false; n], n, &adj, perfect)
    }

    #[test]
    fn triangle_plus_pendant() {
        let edges = [(0, 1, 5), (1, 2, 6), (0, 2, 4), (2, 3, 7)];
        let mate = max_weight_matching(4, &edges, false);
        assert_eq!(weight_of(&edges, &mate), 12);
    }

    #[test]
    fn blossom_is_expanded_for_cardinality() {
        // odd cycle with two tails; forces blossom creation and expansion
        let edges = [(0, 1, 8), (0, 2, 9), (1, 2, 10), (2, 3, 7), (0, 5, 5), (3, 4, 6)];
        let mate = max_weight_matching(6, &edges, true);
        assert!(mate.iter().all(|m| m.is_some()));
        assert_eq!(weight_of(&edges, &mate), brute(6, &edges, true).unwrap());
    }

    #[test]
    fn matches_brute_force_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..600 {
            let n = rng.gen_range(2..=11);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen_bool(0.45) {
                        edges.push((i, j, rng.gen_range(0..12)));
                    }
                }
            }
            let mate = max_weight_matching(n, &edges, false);
            for v in 0..n {
                if let Some(w) = mate[v] {
                    assert_eq!(mate[w], Some(v));
                }
            }
            assert_eq!(Some(weight_of(&edges, &mate)), brute(n, &edges, false));
            let perfect = min_weight_perfect_matching(n, &edges);
            match (perfect, brute(n, &edges, true)) {
                (None, None) => {}
                (Some(pm), Some(best)) => {
                    let mut total = 0;
                    for v in 0..n {
                        let (i, j, w) = edges[pm[v]];
                        assert!(i == v || j == v);
                        if v == i.min(j) {
                            total += w;
                        }
                    }
                    assert_eq!(total, best);
                }
                (a, b) => panic!("perfect matching disagreement: {a:?} vs {b:?}"),
            }
        }
    }
}
