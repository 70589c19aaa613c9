//! Independence numbers: an exact branch-and-bound solver, an exhaustive
//! oracle for small instances and a randomized greedy lower bound.

use rand::Rng as _;
use thiserror::Error;

use crate::hypercore::{Hypergraph, HypergraphError, Vertex, VertexSet};
use crate::seed;

/// Largest vertex count accepted by [`alpha_exact`].
pub const EXACT_MAX_VERTICES: usize = 128;
/// Largest vertex count accepted by [`alpha_exhaustive`].
pub const EXHAUSTIVE_MAX_VERTICES: usize = 22;
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

const GREEDY_PASSES: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndepError {
    #[error("{method} supports at most {max} vertices, got {n}")]
    TooLarge {
        method: &'static str,
        n: usize,
        max: usize,
    },
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlphaMethod {
    ExactBranchBound,
    Exhaustive,
    GreedyLower,
}

impl AlphaMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            AlphaMethod::ExactBranchBound => "exact-bb",
            AlphaMethod::Exhaustive => "exhaustive",
            AlphaMethod::GreedyLower => "greedy-lower",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlphaStatus {
    /// `alpha` is the independence number.
    Exact,
    /// The search ran out of budget; `alpha` is only a lower bound.
    Inconclusive,
    /// Heuristic value; a lower bound by construction.
    LowerBound,
}

impl AlphaStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            AlphaStatus::Exact => "exact",
            AlphaStatus::Inconclusive => "inconclusive",
            AlphaStatus::LowerBound => "lower-bound",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaResult {
    pub alpha: usize,
    pub witness: VertexSet,
    pub method: AlphaMethod,
    pub status: AlphaStatus,
    /// Search nodes visited (zero for the greedy bound).
    pub nodes: u64,
}

impl AlphaResult {
    pub fn is_exact(&self) -> bool {
        self.status == AlphaStatus::Exact
    }
}

/// True iff no edge of `h` lies inside `w`.
pub fn is_independent(h: &Hypergraph, w: &VertexSet) -> Result<bool, HypergraphError> {
    w.check_within(h.order())?;
    if w.len() < h.uniformity() {
        return Ok(true);
    }
    let mut member = vec![false; h.order()];
    for v in w.iter() {
        member[v as usize] = true;
    }
    Ok(!h.edges().any(|e| e.iter().all(|&v| member[v as usize])))
}

fn edge_masks(h: &Hypergraph) -> Vec<u128> {
    h.edges()
        .map(|e| e.iter().fold(0u128, |m, &v| m | (1u128 << v)))
        .collect()
}

fn mask_to_set(mut mask: u128) -> VertexSet {
    let mut v = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        v.push(mask.trailing_zeros() as Vertex);
        mask &= mask - 1;
    }
    VertexSet::from_sorted(v)
}

fn full_mask(n: usize) -> u128 {
    if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

/// Ground-truth oracle: for k = n, n-1, ... test every k-subset until an
/// independent one turns up. Prefixes that already contain an edge are
/// skipped, since every extension contains it too.
pub fn alpha_exhaustive(h: &Hypergraph) -> Result<AlphaResult, IndepError> {
    let n = h.order();
    if n > EXHAUSTIVE_MAX_VERTICES {
        return Err(IndepError::TooLarge {
            method: "exhaustive",
            n,
            max: EXHAUSTIVE_MAX_VERTICES,
        });
    }
    // closing[v]: edges whose largest vertex is v, minus v
    let mut closing: Vec<Vec<u32>> = vec![Vec::new(); n];
    for e in h.edges() {
        let top = *e.last().expect("edges are nonempty");
        let rest = e[..e.len() - 1].iter().fold(0u32, |m, &v| m | (1 << v));
        closing[top as usize].push(rest);
    }

    fn search(closing: &[Vec<u32>], next: usize, chosen: u32, need: usize, nodes: &mut u64) -> Option<u32> {
        *nodes += 1;
        if need == 0 {
            return Some(chosen);
        }
        let n = closing.len();
        for v in next..n {
            if n - v < need {
                break;
            }
            if closing[v].iter().any(|&rest| rest & chosen == rest) {
                continue;
            }
            if let Some(found) = search(closing, v + 1, chosen | (1 << v), need - 1, nodes) {
                return Some(found);
            }
        }
        None
    }

    let mut nodes = 0;
    for k in (0..=n).rev() {
        if let Some(mask) = search(&closing, 0, 0, k, &mut nodes) {
            return Ok(AlphaResult {
                alpha: k,
                witness: mask_to_set(u128::from(mask)),
                method: AlphaMethod::Exhaustive,
                status: AlphaStatus::Exact,
                nodes,
            });
        }
    }
    unreachable!("the empty set is independent")
}

/// Randomized greedy lower bound: vertices are scanned by increasing degree
/// (random tie-breaks) and kept unless they would complete an edge. The best
/// of a fixed number of passes is returned.
pub fn alpha_greedy(h: &Hypergraph, seed: u64) -> AlphaResult {
    let n = h.order();
    let r = h.uniformity();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, e) in h.edges().enumerate() {
        for &v in e {
            incident[v as usize].push(i);
        }
    }
    let mut rng = seed::derived_rng(seed, seed::stream::GREEDY_ALPHA, 0);
    let mut best: Vec<Vertex> = Vec::new();
    // inside[i]: members of the current set lying in edge i
    let mut inside = vec![0usize; h.edge_count()];
    for _ in 0..GREEDY_PASSES {
        let mut order: Vec<(usize, u64, Vertex)> = (0..n)
            .map(|v| (incident[v].len(), rng.random::<u64>(), v as Vertex))
            .collect();
        order.sort_unstable();
        inside.iter_mut().for_each(|c| *c = 0);
        let mut set = Vec::new();
        for &(_, _, v) in &order {
            if incident[v as usize].iter().all(|&i| inside[i] + 1 < r) {
                for &i in &incident[v as usize] {
                    inside[i] += 1;
                }
                set.push(v);
            }
        }
        if set.len() > best.len() {
            best = set;
        }
    }
    best.sort_unstable();
    AlphaResult {
        alpha: best.len(),
        witness: VertexSet::from_sorted(best),
        method: AlphaMethod::GreedyLower,
        status: AlphaStatus::LowerBound,
        nodes: 0,
    }
}

/// Branch-and-bound state. Every live constraint is kept as its residual:
/// the part of an edge still undecided, given that none of its vertices has
/// been excluded. A residual of size one forces an exclusion; an empty one
/// would mean an edge inside the chosen set.
struct Search {
    stack: Vec<u128>,
    best: u32,
    best_set: u128,
    nodes: u64,
    budget: u64,
    out_of_budget: bool,
    r: u32,
}

impl Search {
    /// Explores the subproblem whose residuals are `stack[lo..hi]`, after
    /// moving `add` into the chosen set and excluding `drop`.
    fn visit(&mut self, chosen: u128, cand: u128, lo: usize, hi: usize, add: u128, drop: u128) {
        if self.out_of_budget {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.out_of_budget = true;
            return;
        }
        let chosen = chosen | add;
        let mut cand = cand & !add & !drop;
        let base = self.stack.len();
        let mut forced = 0u128;
        for i in lo..hi {
            let res = self.stack[i];
            if res & drop != 0 {
                continue;
            }
            let res = res & !add;
            match res.count_ones() {
                0 => {
                    self.stack.truncate(base);
                    return;
                }
                1 => forced |= res,
                _ => self.stack.push(res),
            }
        }
        if forced != 0 {
            cand &= !forced;
            let mut w = base;
            for i in base..self.stack.len() {
                let res = self.stack[i];
                if res & forced == 0 {
                    self.stack[w] = res;
                    w += 1;
                }
            }
            self.stack.truncate(w);
        }
        let top = self.stack.len();
        let size = chosen.count_ones() + cand.count_ones();
        if size <= self.best {
            self.stack.truncate(base);
            return;
        }
        if top == base {
            self.best = size;
            self.best_set = chosen | cand;
            self.stack.truncate(base);
            return;
        }
        // disjoint residuals each cost at least one more exclusion
        let mut used = 0u128;
        let mut packed = 0;
        for want in 2..=self.r {
            for &res in &self.stack[base..top] {
                if res.count_ones() == want && res & used == 0 {
                    used |= res;
                    packed += 1;
                }
            }
        }
        if size - packed <= self.best {
            self.stack.truncate(base);
            return;
        }
        let pick = self.pick_residual(base, top);
        let mut add = 0u128;
        let mut rest = pick;
        while rest != 0 {
            let v = rest & rest.wrapping_neg();
            rest &= !v;
            self.visit(chosen, cand, base, top, add, v);
            add |= v;
        }
        self.stack.truncate(base);
    }

    /// Smallest residual; among those, the one whose vertices carry the most
    /// two-vertex residuals; remaining ties go to the earliest in edge order.
    fn pick_residual(&self, lo: usize, hi: usize) -> u128 {
        let live = &self.stack[lo..hi];
        let smallest = live.iter().map(|r| r.count_ones()).min().unwrap_or(0);
        let mut pair_degree = [0u16; 128];
        for &res in live {
            if res.count_ones() == 2 {
                let mut x = res;
                while x != 0 {
                    pair_degree[x.trailing_zeros() as usize] += 1;
                    x &= x - 1;
                }
            }
        }
        let score = |mut x: u128| {
            let mut s = 0u32;
            while x != 0 {
                s += u32::from(pair_degree[x.trailing_zeros() as usize]);
                x &= x - 1;
            }
            s
        };
        let mut best = 0u128;
        let mut best_score = 0;
        for &res in live {
            if res.count_ones() != smallest {
                continue;
            }
            let s = score(res);
            if best == 0 || s > best_score {
                best = res;
                best_score = s;
            }
        }
        best
    }
}

/// Exact independence number by branch and bound.
///
/// Branches on the vertices `v1 < .. < vk` of a smallest residual edge:
/// branch j excludes `vj` and takes `v1..v(j-1)`. A subproblem is pruned
/// when the chosen set plus the undecided vertices, less one per residual in
/// a greedy disjoint packing, cannot beat the incumbent. The incumbent starts
/// at the greedy bound. When `node_budget` runs out the result is marked
/// [`AlphaStatus::Inconclusive`] and carries the best set found.
pub fn alpha_exact(h: &Hypergraph, node_budget: u64) -> Result<AlphaResult, IndepError> {
    let n = h.order();
    if n > EXACT_MAX_VERTICES {
        return Err(IndepError::TooLarge {
            method: "exact-bb",
            n,
            max: EXACT_MAX_VERTICES,
        });
    }
    let greedy = alpha_greedy(h, 0);
    let greedy_mask = greedy.witness.iter().fold(0u128, |m, v| m | (1u128 << v));
    let mut search = Search {
        stack: edge_masks(h),
        best: greedy.alpha as u32,
        best_set: greedy_mask,
        nodes: 0,
        budget: node_budget,
        out_of_budget: false,
        r: h.uniformity() as u32,
    };
    let hi = search.stack.len();
    search.visit(0, full_mask(n), 0, hi, 0, 0);
    let (alpha, set) = (search.best as usize, search.best_set);
    Ok(AlphaResult {
        alpha,
        witness: mask_to_set(set),
        method: AlphaMethod::ExactBranchBound,
        status: if search.out_of_budget {
            AlphaStatus::Inconclusive
        } else {
            AlphaStatus::Exact
        },
        nodes: search.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercore::fixtures::fano;
    use crate::hypercore::for_each_subset;
    use proptest::prelude::*;

    fn vs(v: &[Vertex]) -> VertexSet {
        VertexSet::new(v.iter().copied()).unwrap()
    }

    fn random_hypergraph(n: usize, r: usize, p: f64, seed: u64) -> Hypergraph {
        let mut rng = seed::rng(seed);
        let mut rows = Vec::new();
        for_each_subset(n, r, |s| {
            if rng.random_bool(p) {
                rows.push(s.to_vec());
            }
        });
        Hypergraph::new(r, n, rows).unwrap()
    }

    #[test]
    fn independence_checks() {
        let k4 = Hypergraph::complete(4, 3).unwrap();
        assert!(is_independent(&k4, &vs(&[0, 1])).unwrap());
        assert!(!is_independent(&k4, &vs(&[0, 1, 2])).unwrap());
        assert!(is_independent(&k4, &vs(&[0, 9])).is_err());

        let f = fano();
        for set in [[0u32, 1, 3, 6], [0, 1, 2, 3], [3, 4, 5, 6]] {
            let w = vs(&set);
            let scan = f.edges().all(|e| !e.iter().all(|v| w.contains(*v)));
            assert_eq!(is_independent(&f, &w).unwrap(), scan, "{w}");
        }
    }

    #[test]
    fn edgeless_and_complete() {
        let h = Hypergraph::empty(3, 10).unwrap();
        assert_eq!(alpha_exact(&h, DEFAULT_NODE_BUDGET).unwrap().alpha, 10);
        assert_eq!(alpha_exhaustive(&h).unwrap().alpha, 10);
        assert_eq!(alpha_greedy(&h, 1).alpha, 10);
        for (t, r) in [(6, 3), (7, 4), (9, 3)] {
            let k = Hypergraph::complete(t, r).unwrap();
            assert_eq!(alpha_exact(&k, DEFAULT_NODE_BUDGET).unwrap().alpha, r - 1);
            assert_eq!(alpha_exhaustive(&k).unwrap().alpha, r - 1);
            assert_eq!(alpha_greedy(&k, 3).alpha, r - 1);
        }
    }

    #[test]
    fn fano_alpha_is_four() {
        let f = fano();
        // oracle: no 5-subset is independent, some 4-subset is
        let mut five = 0;
        for_each_subset(7, 5, |s| five += usize::from(is_independent(&f, &vs(s)).unwrap()));
        let mut four = 0;
        for_each_subset(7, 4, |s| four += usize::from(is_independent(&f, &vs(s)).unwrap()));
        assert_eq!(five, 0);
        assert!(four > 0);
        let res = alpha_exact(&f, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(res.alpha, 4);
        assert!(res.is_exact());
        assert!(is_independent(&f, &res.witness).unwrap());
        assert_eq!(alpha_exhaustive(&f).unwrap().alpha, 4);
    }

    #[test]
    fn single_edge() {
        let h = Hypergraph::new(3, 5, [[1, 2, 4]]).unwrap();
        assert_eq!(alpha_exhaustive(&h).unwrap().alpha, 4);
        assert_eq!(alpha_exact(&h, DEFAULT_NODE_BUDGET).unwrap().alpha, 4);
    }

    #[test]
    fn size_ceilings() {
        let big = Hypergraph::empty(3, 23).unwrap();
        assert!(matches!(alpha_exhaustive(&big), Err(IndepError::TooLarge { .. })));
        let huge = Hypergraph::empty(3, 129).unwrap();
        assert!(matches!(alpha_exact(&huge, 10), Err(IndepError::TooLarge { .. })));
        assert_eq!(alpha_greedy(&huge, 0).alpha, 129);
    }

    #[test]
    fn exhausted_budget_is_inconclusive() {
        let h = random_hypergraph(40, 3, 0.08, 11);
        let res = alpha_exact(&h, 5).unwrap();
        assert_eq!(res.status, AlphaStatus::Inconclusive);
        assert!(is_independent(&h, &res.witness).unwrap());
        assert_eq!(res.witness.len(), res.alpha);
        let full = alpha_exact(&h, DEFAULT_NODE_BUDGET).unwrap();
        assert!(full.is_exact());
        assert!(res.alpha <= full.alpha);
    }

    #[test]
    fn exact_is_deterministic() {
        let h = random_hypergraph(30, 3, 0.05, 5);
        assert_eq!(
            alpha_exact(&h, DEFAULT_NODE_BUDGET).unwrap(),
            alpha_exact(&h, DEFAULT_NODE_BUDGET).unwrap()
        );
    }

    #[test]
    fn uniformity_four_and_two() {
        for seed in 0..10 {
            let h = random_hypergraph(12, 4, 0.2, seed);
            assert_eq!(
                alpha_exact(&h, DEFAULT_NODE_BUDGET).unwrap().alpha,
                alpha_exhaustive(&h).unwrap().alpha
            );
            let g = random_hypergraph(14, 2, 0.3, seed);
            assert_eq!(
                alpha_exact(&g, DEFAULT_NODE_BUDGET).unwrap().alpha,
                alpha_exhaustive(&g).unwrap().alpha
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn exact_matches_exhaustive(n in 3usize..=18, p in 0.0f64..0.6, seed in any::<u64>()) {
            let h = random_hypergraph(n, 3, p, seed);
            let exact = alpha_exact(&h, DEFAULT_NODE_BUDGET).unwrap();
            let oracle = alpha_exhaustive(&h).unwrap();
            let greedy = alpha_greedy(&h, seed);
            prop_assert!(exact.is_exact());
            prop_assert_eq!(exact.alpha, oracle.alpha);
            prop_assert_eq!(exact.witness.len(), exact.alpha);
            prop_assert!(is_independent(&h, &exact.witness).unwrap());
            prop_assert!(is_independent(&h, &oracle.witness).unwrap());
            prop_assert!(is_independent(&h, &greedy.witness).unwrap());
            prop_assert!(greedy.alpha <= exact.alpha);
        }

        #[test]
        fn alpha_monotone_under_edits(n in 4usize..=14, p in 0.0f64..0.4, seed in any::<u64>(), extra in any::<u64>()) {
            let h = random_hypergraph(n, 3, p, seed);
            let a = alpha_exhaustive(&h).unwrap().alpha;
            // adding an edge never increases alpha
            let mut rng = seed::rng(extra);
            let mut e: Vec<Vertex> = Vec::new();
            while e.len() < 3 {
                let v = rng.random_range(0..n as Vertex);
                if !e.contains(&v) { e.push(v); }
            }
            let h2 = h.with_edges([e]).unwrap();
            prop_assert!(alpha_exhaustive(&h2).unwrap().alpha <= a);
            // deleting a vertex lowers alpha by at most one
            let drop = (extra % n as u64) as Vertex;
            let keep = VertexSet::new((0..n as Vertex).filter(|&v| v != drop)).unwrap();
            let a_sub = alpha_exhaustive(&h.induced(&keep).unwrap()).unwrap().alpha;
            prop_assert!(a_sub <= a && a <= a_sub + 1);
        }
    }
}
