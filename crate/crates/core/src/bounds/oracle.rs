//! Exact `T_ell(n, t, r)`: the least maximum ell-degree of an r-graph on n
//! vertices with independence number below t, by search over all edge sets.

use super::BoundsError;
use crate::hypercore::{binomial, for_each_subset};

/// Largest number of candidate edges C(n, r) the oracle accepts.
pub const ORACLE_MAX_EDGES: u64 = 24;

struct Tables {
    /// cover[T]: edges inside the t-set T
    covers: Vec<u32>,
    /// through[L]: edges containing the ell-set L
    through: Vec<u32>,
    k: usize,
}

fn tables(n: usize, t: usize, r: usize, ell: usize) -> Tables {
    let mut edge_masks = Vec::new();
    for_each_subset(n, r, |e| edge_masks.push(e.iter().fold(0u32, |m, &v| m | (1 << v))));
    let edges_in = |set: u32| {
        edge_masks
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, &e)| if e & set == e { acc | (1 << i) } else { acc })
    };
    let edges_through = |set: u32| {
        edge_masks
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, &e)| if e & set == set { acc | (1 << i) } else { acc })
    };
    let mut covers = Vec::new();
    if t <= n {
        for_each_subset(n, t, |s| covers.push(edges_in(s.iter().fold(0, |m, &v| m | (1 << v)))));
    }
    let mut through = Vec::new();
    for_each_subset(n, ell, |s| through.push(edges_through(s.iter().fold(0, |m, &v| m | (1 << v)))));
    Tables {
        covers,
        through,
        k: edge_masks.len(),
    }
}

fn max_degree(tab: &Tables, edges: u32) -> u64 {
    tab.through
        .iter()
        .map(|&m| u64::from((m & edges).count_ones()))
        .max()
        .unwrap_or(0)
}

fn check(n: usize, t: usize, r: usize, ell: usize) -> Result<(), BoundsError> {
    if r < 2 || ell == 0 || ell >= r || n < r {
        return Err(BoundsError::InvalidParams(format!(
            "need n >= r >= 2 and 1 <= ell < r, got n = {n}, r = {r}, ell = {ell}"
        )));
    }
    let edges = binomial(n as u64, r as u64).unwrap_or(u64::MAX);
    if edges > ORACLE_MAX_EDGES {
        return Err(BoundsError::OracleTooLarge { n, r, edges, max: ORACLE_MAX_EDGES });
    }
    let _ = t;
    Ok(())
}

/// `Ok(None)` when no r-graph on n vertices has alpha < t.
///
/// Depth-first over the candidate edges in order, deciding each one in or
/// out. A branch is cut when its ell-degree already reaches the incumbent
/// (adding edges never lowers it), when some t-set can no longer receive an
/// edge, or as soon as every t-set holds an edge (supersets only raise the
/// degree). Each cut discards only edge sets that cannot improve the answer.
pub fn t_ell_oracle(n: usize, t: usize, r: usize, ell: usize) -> Result<Option<u64>, BoundsError> {
    check(n, t, r, ell)?;
    if t > n {
        return Ok(Some(0));
    }
    let tab = tables(n, t, r, ell);
    let all = if tab.k == 32 { u32::MAX } else { (1u32 << tab.k) - 1 };

    fn dfs(tab: &Tables, next: usize, chosen: u32, all: u32, best: &mut Option<u64>) {
        let deg = max_degree(tab, chosen);
        if best.is_some_and(|b| deg >= b) {
            return;
        }
        let open = all & !((1u32 << next) - 1);
        let reachable = chosen | open;
        if tab.covers.iter().any(|&c| c & reachable == 0) {
            return;
        }
        if tab.covers.iter().all(|&c| c & chosen != 0) {
            *best = Some(deg);
            return;
        }
        if next == tab.k {
            return;
        }
        dfs(tab, next + 1, chosen, all, best);
        dfs(tab, next + 1, chosen | (1 << next), all, best);
    }

    let mut best = None;
    dfs(&tab, 0, 0, all, &mut best);
    Ok(best)
}

/// The same quantity by plain enumeration of every edge set. Exponentially
/// slower; kept as an independent check on [`t_ell_oracle`].
pub fn t_ell_oracle_unpruned(n: usize, t: usize, r: usize, ell: usize) -> Result<Option<u64>, BoundsError> {
    check(n, t, r, ell)?;
    if t > n {
        return Ok(Some(0));
    }
    let tab = tables(n, t, r, ell);
    let mut best: Option<u64> = None;
    for edges in 0..(1u64 << tab.k) {
        let edges = edges as u32;
        if tab.covers.iter().all(|&c| c & edges != 0) {
            let d = max_degree(&tab, edges);
            best = Some(best.map_or(d, |b| b.min(d)));
        }
    }
    Ok(best)
}
