//! Partial Steiner (m, r, r-1)-systems: r-graphs in which every (r-1)-set
//! lies in at most one edge. Systems are produced by randomized greedy
//! packing, keeping the restart with the smallest independence number.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use thiserror::Error;

use crate::hypercore::{binomial, for_each_subset, for_each_subset_of, Hypergraph, Vertex};
use crate::indep::{alpha_exact, alpha_greedy, AlphaResult, AlphaStatus, IndepError, DEFAULT_NODE_BUDGET};
use crate::io::Document;
use crate::seed;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SteinerError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("hypergraph is not a partial Steiner system: the set {0:?} lies in two edges")]
    NotSteiner(Vec<Vertex>),
    #[error("quality needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error(transparent)]
    Indep(#[from] IndepError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SteinerOptions {
    /// Restarts are ranked by exact alpha up to this many points and by the
    /// greedy bound beyond it.
    pub exact_max_points: usize,
    pub node_budget: u64,
}

impl Default for SteinerOptions {
    fn default() -> Self {
        Self {
            exact_max_points: 40,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteinerSystem {
    pub base: Hypergraph,
    pub alpha: AlphaResult,
    pub seed: u64,
    pub restarts_used: usize,
}

impl SteinerSystem {
    pub fn points(&self) -> usize {
        self.base.order()
    }

    pub fn uniformity(&self) -> usize {
        self.base.uniformity()
    }

    /// Wraps an existing hypergraph after checking the Steiner property.
    pub fn from_hypergraph(
        base: Hypergraph,
        seed: u64,
        restarts_used: usize,
        opts: &SteinerOptions,
    ) -> Result<Self, SteinerError> {
        if let Some(clash) = steiner_violation(&base) {
            return Err(SteinerError::NotSteiner(clash));
        }
        let alpha = evaluate_alpha(&base, seed, opts)?;
        Ok(Self {
            base,
            alpha,
            seed,
            restarts_used,
        })
    }

    /// Replaces a greedy or inconclusive alpha by an exact one.
    pub fn resolve_alpha(&mut self, node_budget: u64) -> Result<&AlphaResult, SteinerError> {
        if !self.alpha.is_exact() {
            let exact = alpha_exact(&self.base, node_budget)?;
            if exact.alpha >= self.alpha.alpha {
                self.alpha = exact;
            }
        }
        Ok(&self.alpha)
    }

    pub fn metadata(&self) -> Vec<(String, String)> {
        vec![
            ("kind".into(), "steiner".into()),
            ("m".into(), self.points().to_string()),
            ("r".into(), self.uniformity().to_string()),
            ("seed".into(), self.seed.to_string()),
            ("restarts".into(), self.restarts_used.to_string()),
            ("alpha".into(), self.alpha.alpha.to_string()),
            ("alpha_method".into(), self.alpha.method.as_str().into()),
            ("alpha_status".into(), self.alpha.status.as_str().into()),
        ]
    }

    pub fn to_document(&self) -> Document {
        Document {
            hypergraph: self.base.clone(),
            metadata: self.metadata(),
        }
    }

    /// Rebuilds a system from a file. The stored alpha is not trusted; it is
    /// recomputed under `opts`.
    pub fn from_document(doc: &Document, opts: &SteinerOptions) -> Result<Self, SteinerError> {
        let seed = doc.get("seed").and_then(|s| s.parse().ok()).unwrap_or(0);
        let restarts = doc.get("restarts").and_then(|s| s.parse().ok()).unwrap_or(1);
        Self::from_hypergraph(doc.hypergraph.clone(), seed, restarts, opts)
    }
}

fn evaluate_alpha(h: &Hypergraph, seed: u64, opts: &SteinerOptions) -> Result<AlphaResult, SteinerError> {
    if h.order() <= opts.exact_max_points {
        Ok(alpha_exact(h, opts.node_budget)?)
    } else {
        Ok(alpha_greedy(h, seed))
    }
}

/// Some (r-1)-set covered twice, if any.
fn steiner_violation(h: &Hypergraph) -> Option<Vec<Vertex>> {
    let mut seen: HashSet<Vec<Vertex>> = HashSet::new();
    let mut clash = None;
    for e in h.edges() {
        for_each_subset_of(e, h.uniformity() - 1, |s| {
            if clash.is_none() && !seen.insert(s.to_vec()) {
                clash = Some(s.to_vec());
            }
        });
        if clash.is_some() {
            break;
        }
    }
    clash
}

/// True iff every (r-1)-set of vertices lies in at most one edge.
pub fn verify_steiner(h: &Hypergraph) -> bool {
    steiner_violation(h).is_none()
}

/// Largest possible edge count of a partial Steiner (m, r, r-1)-system:
/// each edge uses r of the C(m, r-1) available (r-1)-sets.
pub fn packing_bound(m: usize, r: usize) -> u64 {
    binomial(m as u64, r as u64 - 1).map_or(u64::MAX, |c| c / r as u64)
}

/// One greedy maximal packing: scan all r-subsets in random order and keep
/// each one whose (r-1)-subsets are all still unused.
pub fn greedy_packing(m: usize, r: usize, rng: &mut seed::Rng) -> Hypergraph {
    let mut all: Vec<Vec<Vertex>> = Vec::new();
    for_each_subset(m, r, |s| all.push(s.to_vec()));
    all.shuffle(rng);
    let mut used: HashSet<Vec<Vertex>> = HashSet::new();
    let mut rows = Vec::new();
    let mut shadow: Vec<Vec<Vertex>> = Vec::with_capacity(r);
    for e in all {
        shadow.clear();
        for_each_subset_of(&e, r - 1, |s| shadow.push(s.to_vec()));
        if shadow.iter().all(|s| !used.contains(s)) {
            used.extend(shadow.drain(..));
            rows.push(e);
        }
    }
    rows.sort_unstable();
    Hypergraph::from_sorted_rows(r, m, rows)
}

pub fn generate_steiner(m: usize, r: usize, restarts: usize, seed: u64) -> Result<SteinerSystem, SteinerError> {
    generate_steiner_with(m, r, restarts, seed, &SteinerOptions::default())
}

/// Runs `restarts` independent packings (restart i seeded by
/// `seed::derive(seed, STEINER_RESTART, i)`) and keeps the one with the
/// smallest alpha, then the most edges, then the lowest restart index.
pub fn generate_steiner_with(
    m: usize,
    r: usize,
    restarts: usize,
    seed: u64,
    opts: &SteinerOptions,
) -> Result<SteinerSystem, SteinerError> {
    if r < 3 || m < r {
        return Err(SteinerError::InvalidParams(format!("need m >= r >= 3, got m = {m}, r = {r}")));
    }
    if restarts == 0 {
        return Err(SteinerError::InvalidParams("restarts must be at least 1".into()));
    }
    let runs: Vec<(Hypergraph, AlphaResult)> = (0..restarts)
        .into_par_iter()
        .map(|i| {
            let run_seed = seed::derive(seed, seed::stream::STEINER_RESTART, i as u64);
            let h = greedy_packing(m, r, &mut seed::rng(run_seed));
            let alpha = evaluate_alpha(&h, run_seed, opts)?;
            Ok((h, alpha))
        })
        .collect::<Result<_, SteinerError>>()?;

    let (base, alpha) = runs
        .into_iter()
        .reduce(|best, cand| {
            let better = (cand.1.alpha, std::cmp::Reverse(cand.0.edge_count()))
                < (best.1.alpha, std::cmp::Reverse(best.0.edge_count()));
            if better {
                cand
            } else {
                best
            }
        })
        .expect("at least one restart");
    debug_assert!(verify_steiner(&base));
    Ok(SteinerSystem {
        base,
        alpha,
        seed,
        restarts_used: restarts,
    })
}

/// Empirical constant `alpha / (m ln m)^(1/(r-1))`.
pub fn quality_ratio(alpha: usize, m: usize, r: usize) -> Result<f64, SteinerError> {
    if m < 3 {
        return Err(SteinerError::TooFewPoints(m));
    }
    let m = m as f64;
    Ok(alpha as f64 / (m * m.ln()).powf(1.0 / (r as f64 - 1.0)))
}

pub fn steiner_quality(s: &SteinerSystem) -> Result<f64, SteinerError> {
    quality_ratio(s.alpha.alpha, s.points(), s.uniformity())
}

/// True when alpha of the system is only a lower estimate.
pub fn alpha_is_estimate(s: &SteinerSystem) -> bool {
    s.alpha.status != AlphaStatus::Exact
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercore::fixtures::fano;
    use crate::indep::{alpha_exhaustive, is_independent};
    use proptest::prelude::*;

    #[test]
    fn verify_small_cases() {
        assert!(verify_steiner(&Hypergraph::new(3, 5, [[0, 1, 2]]).unwrap()));
        assert!(!verify_steiner(&Hypergraph::new(3, 5, [[0, 1, 2], [0, 1, 3]]).unwrap()));
        assert!(verify_steiner(&Hypergraph::new(4, 6, [[0, 1, 2, 3], [0, 1, 4, 5]]).unwrap()));
        assert!(!verify_steiner(&Hypergraph::new(4, 6, [[0, 1, 2, 3], [0, 1, 2, 5]]).unwrap()));
    }

    #[test]
    fn fano_is_a_steiner_triple_system() {
        let f = fano();
        // oracle: every pair covered exactly once
        let mut cover = [[0u8; 7]; 7];
        for e in f.edges() {
            for i in 0..3 {
                for j in i + 1..3 {
                    cover[e[i] as usize][e[j] as usize] += 1;
                }
            }
        }
        for a in 0..7 {
            for b in a + 1..7 {
                assert_eq!(cover[a][b], 1);
            }
        }
        assert!(verify_steiner(&f));
        assert_eq!(packing_bound(7, 3), 7);
    }

    #[test]
    fn m_equals_r_gives_one_edge() {
        for r in 3..=5 {
            let s = generate_steiner(r, r, 3, 9).unwrap();
            assert_eq!(s.base.edge_count(), 1);
            assert_eq!(s.alpha.alpha, r - 1);
            assert!(s.alpha.is_exact());
        }
    }

    #[test]
    fn seven_points_never_exceed_seven_triples() {
        for seed in 0..40 {
            let s = generate_steiner(7, 3, 2, seed).unwrap();
            assert!(s.base.edge_count() <= 7);
            assert!(verify_steiner(&s.base));
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(generate_steiner(2, 3, 1, 0), Err(SteinerError::InvalidParams(_))));
        assert!(matches!(generate_steiner(5, 2, 1, 0), Err(SteinerError::InvalidParams(_))));
        assert!(matches!(generate_steiner(5, 3, 0, 0), Err(SteinerError::InvalidParams(_))));
        let bad = Hypergraph::new(3, 5, [[0, 1, 2], [0, 1, 3]]).unwrap();
        assert!(matches!(
            SteinerSystem::from_hypergraph(bad, 0, 1, &SteinerOptions::default()),
            Err(SteinerError::NotSteiner(_))
        ));
    }

    #[test]
    fn packings_are_maximal() {
        let s = generate_steiner(11, 3, 1, 4).unwrap();
        let mut addable = 0;
        for_each_subset(11, 3, |e| {
            if !s.base.contains_edge(e) && verify_steiner(&s.base.with_edges([e.to_vec()]).unwrap()) {
                addable += 1;
            }
        });
        assert_eq!(addable, 0);
    }

    #[test]
    fn restarts_minimize_alpha() {
        let best = generate_steiner(12, 3, 16, 21).unwrap();
        for i in 0..16 {
            let run_seed = seed::derive(21, seed::stream::STEINER_RESTART, i);
            let h = greedy_packing(12, 3, &mut seed::rng(run_seed));
            assert!(alpha_exhaustive(&h).unwrap().alpha >= best.alpha.alpha);
        }
        assert_eq!(alpha_exhaustive(&best.base).unwrap().alpha, best.alpha.alpha);
    }

    #[test]
    fn quality_values() {
        let q = quality_ratio(2, 3, 3).unwrap();
        assert!((q - 2.0 / (3.0 * 3f64.ln()).sqrt()).abs() < 1e-15);
        let f = SteinerSystem::from_hypergraph(fano(), 0, 1, &SteinerOptions::default()).unwrap();
        assert_eq!(f.alpha.alpha, 4);
        let q = steiner_quality(&f).unwrap();
        assert!((q - 4.0 / (7.0 * 7f64.ln()).sqrt()).abs() < 1e-15);
        assert!(matches!(quality_ratio(1, 2, 3), Err(SteinerError::TooFewPoints(2))));
    }

    #[test]
    fn quality_is_relabel_invariant() {
        let s = generate_steiner(10, 3, 4, 2).unwrap();
        let perm: Vec<Vertex> = (0..10).rev().collect();
        let t = SteinerSystem::from_hypergraph(s.base.relabel(&perm).unwrap(), 0, 1, &SteinerOptions::default()).unwrap();
        assert_eq!(steiner_quality(&s).unwrap(), steiner_quality(&t).unwrap());
    }

    #[test]
    fn large_systems_use_greedy_proxy() {
        let opts = SteinerOptions {
            exact_max_points: 10,
            ..SteinerOptions::default()
        };
        let mut s = generate_steiner_with(16, 3, 3, 5, &opts).unwrap();
        assert!(alpha_is_estimate(&s));
        let estimate = s.alpha.alpha;
        let exact = s.resolve_alpha(DEFAULT_NODE_BUDGET).unwrap().clone();
        assert!(exact.is_exact());
        assert!(exact.alpha >= estimate);
        assert!(is_independent(&s.base, &exact.witness).unwrap());
    }

    #[test]
    fn document_round_trip() {
        let s = generate_steiner(9, 3, 2, 77).unwrap();
        let doc = s.to_document();
        assert_eq!(doc.get("seed"), Some("77"));
        let back = SteinerSystem::from_document(&doc, &SteinerOptions::default()).unwrap();
        assert_eq!(back.base, s.base);
        assert_eq!(back.alpha.alpha, s.alpha.alpha);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn generated_systems_are_valid_and_reproducible(m in 3usize..=14, r in 3usize..=4, restarts in 1usize..4, seed in any::<u64>()) {
            prop_assume!(m >= r);
            let s = generate_steiner(m, r, restarts, seed).unwrap();
            prop_assert!(verify_steiner(&s.base));
            prop_assert!(s.base.max_codegree() <= 1);
            prop_assert!(s.base.edge_count() as u64 <= packing_bound(m, r));
            prop_assert!(is_independent(&s.base, &s.alpha.witness).unwrap());
            prop_assert_eq!(generate_steiner(m, r, restarts, seed).unwrap().base, s.base);
        }
    }
}
