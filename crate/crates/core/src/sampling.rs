//! Random induced subhypergraphs whose codegree density stays close to the
//! host's, the size conditions under which they are guaranteed to exist, and
//! the small-delta parameter regime of the lower-bound argument.
//!
//! All conditions involving `exp` are evaluated in log space so that tiny
//! or huge magnitudes neither underflow nor overflow.

use rand::seq::index;
use rayon::prelude::*;
use thiserror::Error;

use crate::hypercore::{Hypergraph, VertexSet};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplingError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("m = {m} violates the size conditions for r = {r}, epsilon = {epsilon}")]
    ConditionsFail { m: usize, r: usize, epsilon: f64 },
    #[error("no accepted subset in {trials} trials")]
    Exhausted { trials: usize },
    #[error("d = {d} lies outside the window 0 < d < n/(ln n)^{exponent} = {limit} for n = {n}")]
    OutsideWindow { n: f64, d: f64, exponent: usize, limit: f64 },
}

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// ln C(m, k) for a possibly astronomically large m given as ln m.
fn ln_binomial_large(ln_m: f64, k: usize) -> f64 {
    let inv_m = (-ln_m).exp();
    (0..k)
        .map(|i| ln_m + (-(i as f64) * inv_m).ln_1p())
        .sum::<f64>()
        - ln_factorial(k)
}

/// Size conditions with m and epsilon given by their logarithms:
/// `m >= 2(r-1)/eps` and `C(m, r-1) exp(-eps^2 (m-r+1)/12) <= 1/2`.
pub fn lemma_conditions_log(ln_m: f64, r: usize, ln_eps: f64) -> bool {
    if r < 2 || ln_m < (r as f64).ln() {
        return false;
    }
    let first = ln_m >= (2.0 * (r as f64 - 1.0)).ln() - ln_eps;
    // ln C(m, r-1) + ln 2 <= eps^2 (m-r+1)/12, compared as logs of both sides
    let lhs = ln_binomial_large(ln_m, r - 1) + std::f64::consts::LN_2;
    let ln_gap = ln_m + (-(r as f64 - 1.0) * (-ln_m).exp()).ln_1p();
    let rhs_ln = 2.0 * ln_eps + ln_gap - 12f64.ln();
    let second = lhs <= 0.0 || lhs.ln() <= rhs_ln;
    first && second
}

pub fn lemma_m_conditions(m: usize, r: usize, epsilon: f64) -> bool {
    if !(epsilon > 0.0) || m < r {
        return false;
    }
    lemma_conditions_log((m as f64).ln(), r, epsilon.ln())
}

/// Least m satisfying [`lemma_m_conditions`]. Both conditions are monotone
/// in m from r upwards (ln C(m, r-1) is concave, the exponent linear), so a
/// doubling search followed by bisection finds it.
pub fn min_lemma_m(r: usize, epsilon: f64) -> Result<usize, SamplingError> {
    if r < 2 || !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(SamplingError::InvalidParams(format!(
            "need r >= 2 and epsilon > 0, got r = {r}, epsilon = {epsilon}"
        )));
    }
    let mut hi = r.max(1);
    while !lemma_m_conditions(hi, r, epsilon) {
        hi = hi.checked_mul(2).ok_or_else(|| {
            SamplingError::InvalidParams(format!("no admissible m below usize::MAX for epsilon = {epsilon}"))
        })?;
    }
    let mut lo = r.max(hi / 2);
    if lemma_m_conditions(lo, r, epsilon) {
        return Ok(lo);
    }
    // invariant: lo fails, hi passes
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if lemma_m_conditions(mid, r, epsilon) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsampleParams {
    pub epsilon: f64,
    pub m: usize,
    pub max_trials: usize,
    pub seed: u64,
}

impl SubsampleParams {
    fn validate(&self, h: &Hypergraph) -> Result<(), SamplingError> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(SamplingError::InvalidParams(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_trials == 0 {
            return Err(SamplingError::InvalidParams("max_trials must be at least 1".into()));
        }
        if self.m > h.order() {
            return Err(SamplingError::InvalidParams(format!(
                "m = {} exceeds the {} host vertices",
                self.m,
                h.order()
            )));
        }
        if !lemma_m_conditions(self.m, h.uniformity(), self.epsilon) {
            return Err(SamplingError::ConditionsFail {
                m: self.m,
                r: h.uniformity(),
                epsilon: self.epsilon,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subsample {
    pub vertices: VertexSet,
    pub sub: Hypergraph,
    /// 1-based index of the accepted trial.
    pub trials: usize,
    pub host_codegree: u64,
    pub sub_codegree: u64,
    pub host_density: f64,
    pub sub_density: f64,
}

fn accepts(sub_codegree: u64, m: usize, host_density: f64, epsilon: f64) -> bool {
    sub_codegree as f64 / m as f64 <= host_density + epsilon
}

fn draw(h: &Hypergraph, m: usize, master: u64, trial: usize) -> (VertexSet, Hypergraph) {
    let mut rng = seed::derived_rng(master, seed::stream::SUBSAMPLE_TRIAL, trial as u64);
    let picked = index::sample(&mut rng, h.order(), m);
    let vertices = VertexSet::new(picked.into_iter().map(|v| v as u32)).expect("distinct sample");
    let sub = h.induced(&vertices).expect("sample lies inside the host");
    (vertices, sub)
}

/// Draws uniform m-subsets (trial i seeded from the master seed and i) until
/// one induces a subhypergraph with `codeg(H')/m <= codeg(H)/n + epsilon`.
pub fn subsample(h: &Hypergraph, p: &SubsampleParams) -> Result<Subsample, SamplingError> {
    p.validate(h)?;
    let host_codegree = h.max_codegree();
    let host_density = host_codegree as f64 / h.order() as f64;
    for trial in 0..p.max_trials {
        let (vertices, sub) = draw(h, p.m, p.seed, trial);
        let sub_codegree = sub.max_codegree();
        if accepts(sub_codegree, p.m, host_density, p.epsilon) {
            return Ok(Subsample {
                vertices,
                trials: trial + 1,
                host_codegree,
                sub_codegree,
                host_density,
                sub_density: sub_codegree as f64 / p.m as f64,
                sub,
            });
        }
    }
    Err(SamplingError::Exhausted { trials: p.max_trials })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcceptanceStats {
    pub trials: usize,
    pub accepted: usize,
    pub host_density: f64,
    pub max_sub_density: f64,
}

impl AcceptanceStats {
    pub fn rate(&self) -> f64 {
        self.accepted as f64 / self.trials as f64
    }

    /// Standard error of the acceptance rate.
    pub fn std_error(&self) -> f64 {
        let p = self.rate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Runs `trials` independent draws (in parallel) and counts acceptances.
pub fn acceptance_stats(h: &Hypergraph, p: &SubsampleParams, trials: usize) -> Result<AcceptanceStats, SamplingError> {
    p.validate(h)?;
    let host_density = h.max_codegree() as f64 / h.order() as f64;
    let densities: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let (_, sub) = draw(h, p.m, p.seed, trial);
            sub.max_codegree() as f64 / p.m as f64
        })
        .collect();
    let accepted = densities
        .iter()
        .filter(|&&dens| dens <= host_density + p.epsilon)
        .count();
    Ok(AcceptanceStats {
        trials,
        accepted,
        host_density,
        max_sub_density: densities.iter().copied().fold(0.0, f64::max),
    })
}

/// Both small-delta conditions, with delta given as `x = ln(1/delta)`:
/// `24(r-1) ln ceil(1/delta^4) <= 1/delta^2` and
/// `1/delta^4 <= exp((1/(2 delta))^(1/(3(r-1)^2))) - 1`.
pub fn delta_regime_log(x: f64, r: usize) -> bool {
    if r < 2 || x <= 4f64.ln() {
        return false;
    }
    let ln_m = if 4.0 * x < 700.0 {
        (4.0 * x).exp().ceil().ln()
    } else {
        4.0 * x
    };
    let first = (24.0 * (r as f64 - 1.0)).ln() + ln_m.ln() <= 2.0 * x;
    let k = 3.0 * (r as f64 - 1.0).powi(2);
    let y = ((x - std::f64::consts::LN_2) / k).exp();
    // ln(e^y - 1) = y + ln(1 - e^-y)
    let second = 4.0 * x <= y + (-(-y).exp()).ln_1p();
    first && second
}

pub fn delta_regime(delta: f64, r: usize) -> bool {
    delta > 0.0 && delta < 0.25 && delta_regime_log(-delta.ln(), r)
}

/// Smallest `x = ln(1/delta)` (to within 1e-9) from which both conditions
/// hold for every smaller delta.
pub fn delta0_log(r: usize) -> f64 {
    let mut hi = 2.0;
    while !delta_regime_log(hi, r) {
        hi *= 2.0;
    }
    let mut lo = 4f64.ln();
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if delta_regime_log(mid, r) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `alpha(H) >= b1 ((n/d) ln(n/d))^(1/(r-1))`, defined on the window
/// `0 < d < n/(ln n)^(3(r-1)^2)`.
pub fn kmv_alpha_bound(n: f64, d: f64, r: usize, b1: f64) -> Result<f64, SamplingError> {
    if r < 2 || n <= 1.0 {
        return Err(SamplingError::InvalidParams(format!("need r >= 2 and n > 1, got r = {r}, n = {n}")));
    }
    let exponent = 3 * (r - 1) * (r - 1);
    let limit = n / n.ln().powi(exponent as i32);
    if !(d > 0.0 && d < limit) {
        return Err(SamplingError::OutsideWindow { n, d, exponent, limit });
    }
    let q = n / d;
    Ok(b1 * (q * q.ln()).powf(1.0 / (r as f64 - 1.0)))
}

/// Measured constant `alpha / ((n/d) ln(n/d))^(1/(r-1))`; needs n > d.
pub fn empirical_b1(alpha: usize, n: f64, d: f64, r: usize) -> Option<f64> {
    let q = n / d;
    (q > 1.0 && r >= 2).then(|| alpha as f64 / (q * q.ln()).powf(1.0 / (r as f64 - 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blowup::{build_blowup, BlowupSpec};
    use crate::hypercore::{binomial, fixtures::fano};
    use crate::steiner::{SteinerOptions, SteinerSystem};

    /// Direct evaluation without logs, usable while C(m, r-1) fits a float.
    fn direct_conditions(m: usize, r: usize, eps: f64) -> bool {
        let c = binomial(m as u64, r as u64 - 1).unwrap() as f64;
        m as f64 >= 2.0 * (r as f64 - 1.0) / eps && c * (-eps * eps * (m as f64 - r as f64 + 1.0) / 12.0).exp() <= 0.5
    }

    fn scan_min_m(r: usize, eps: f64) -> usize {
        (r..).find(|&m| direct_conditions(m, r, eps)).unwrap()
    }

    #[test]
    fn worked_conditions() {
        // 7 < 2*2/0.5
        assert!(!lemma_m_conditions(7, 3, 0.5));
        // 28 e^(-0.125) > 1/2
        assert!(!lemma_m_conditions(8, 3, 0.5));
        let m = min_lemma_m(3, 0.5).unwrap();
        assert_eq!(m, scan_min_m(3, 0.5));
        assert!(lemma_m_conditions(m, 3, 0.5));
        assert!(!lemma_m_conditions(m - 1, 3, 0.5));
        assert_eq!(m, 620);
    }

    #[test]
    fn log_space_agrees_with_direct_evaluation() {
        for r in 2..=5 {
            for &eps in &[0.3, 0.5, 0.8, 0.99, 1.5, 2.5] {
                for m in r..=100 {
                    assert_eq!(
                        lemma_m_conditions(m, r, eps),
                        direct_conditions(m, r, eps),
                        "m = {m}, r = {r}, eps = {eps}"
                    );
                }
            }
        }
    }

    #[test]
    fn min_m_matches_scan_and_is_monotone() {
        for r in 2..=4 {
            let mut last = usize::MAX;
            for &eps in &[0.2, 0.35, 0.5, 0.7, 0.9, 0.99, 1.3, 2.0, 3.0] {
                let m = min_lemma_m(r, eps).unwrap();
                assert_eq!(m, scan_min_m(r, eps), "r = {r}, eps = {eps}");
                assert!(m <= last);
                last = m;
            }
        }
        assert!(min_lemma_m(3, 0.0).is_err());
        assert!(min_lemma_m(3, -1.0).is_err());
    }

    fn fano_blowup() -> Hypergraph {
        let s = SteinerSystem::from_hypergraph(fano(), 0, 1, &SteinerOptions::default()).unwrap();
        build_blowup(&BlowupSpec::new(s, 3, false).unwrap())
    }

    #[test]
    fn edgeless_and_complete_accept_first_trial() {
        let eps = 0.9;
        let m = min_lemma_m(3, eps).unwrap();
        let p = SubsampleParams { epsilon: eps, m, max_trials: 3, seed: 1 };
        let empty = Hypergraph::empty(3, m + 40).unwrap();
        let out = subsample(&empty, &p).unwrap();
        assert_eq!(out.trials, 1);
        assert_eq!(out.sub.order(), m);

        let k = Hypergraph::complete(m + 5, 3).unwrap();
        let out = subsample(&k, &p).unwrap();
        assert_eq!(out.trials, 1);
        assert_eq!(out.sub_codegree as usize, m - 2);
    }

    #[test]
    fn fano_blowup_subsamples() {
        let h = fano_blowup();
        // a larger epsilon is needed for m to fit inside 21 vertices
        let eps = 2.0;
        let m = min_lemma_m(3, eps).unwrap();
        assert!(m <= 21, "m = {m}");
        let p = SubsampleParams { epsilon: eps, m, max_trials: 5, seed: 9 };
        let out = subsample(&h, &p).unwrap();
        assert_eq!(out.vertices.len(), m);
        assert_eq!(out.sub, h.induced(&out.vertices).unwrap());
        assert!(out.sub_density <= out.host_density + eps);
        let stats = acceptance_stats(&h, &p, 1000).unwrap();
        assert!(stats.rate() >= 0.5 - 3.0 * (0.25f64 / 1000.0).sqrt());
    }

    #[test]
    fn subsample_is_deterministic() {
        let h = fano_blowup();
        let p = SubsampleParams { epsilon: 2.0, m: 20, max_trials: 4, seed: 3 };
        assert_eq!(subsample(&h, &p).unwrap(), subsample(&h, &p).unwrap());
    }

    #[test]
    fn rejects_bad_params() {
        let h = fano_blowup();
        let ok = SubsampleParams { epsilon: 2.0, m: 20, max_trials: 4, seed: 3 };
        assert!(matches!(subsample(&h, &SubsampleParams { m: 30, ..ok }), Err(SamplingError::InvalidParams(_))));
        assert!(matches!(subsample(&h, &SubsampleParams { max_trials: 0, ..ok }), Err(SamplingError::InvalidParams(_))));
        assert!(matches!(subsample(&h, &SubsampleParams { epsilon: 0.5, ..ok }), Err(SamplingError::ConditionsFail { .. })));
    }

    #[test]
    fn delta_conditions() {
        // 24*2*ln 302 = 274 > 1/0.24^2 = 17.4
        assert!(!delta_regime(0.24, 3));
        let x0 = delta0_log(3);
        assert!(delta_regime_log(x0, 3));
        assert!(!delta_regime_log(x0 - 1e-6, 3));
        for step in 1..50 {
            assert!(delta_regime_log(x0 + step as f64, 3));
        }
        // first condition alone is monotone as delta shrinks
        let first = |x: f64| 48f64.ln() + ((4.0 * x).exp().ceil().ln()).ln() <= 2.0 * x;
        let start = (1..200).map(|i| i as f64 * 0.05 + 1.4).find(|&x| first(x)).unwrap();
        for i in 0..100 {
            assert!(first(start + i as f64 * 0.1));
        }
        // the implied m = ceil(1/delta^4) satisfies the size conditions with eps = delta
        for r in 3..=5 {
            let x = delta0_log(r);
            assert!(lemma_conditions_log(4.0 * x, r, -x), "r = {r}");
        }
        assert!(delta_regime(1e-30, 3));
        assert!(!delta_regime(0.3, 3));
    }

    #[test]
    fn kmv_bound_window() {
        assert!(matches!(kmv_alpha_bound(1000.0, 5.0, 3, 1.0), Err(SamplingError::OutsideWindow { .. })));
        assert!(kmv_alpha_bound(1000.0, 0.0, 3, 1.0).is_err());
        let n = 1e60;
        let a = kmv_alpha_bound(n, 2.0, 3, 1.0).unwrap();
        let b = kmv_alpha_bound(n, 2.0, 3, 2.0).unwrap();
        assert!((b - 2.0 * a).abs() <= 1e-12 * b);
        let q: f64 = n / 2.0;
        assert!((a - (q * q.ln()).sqrt()).abs() <= 1e-12 * a);
        let e = empirical_b1(8, 21.0, 3.0, 3).unwrap();
        assert!((e - 8.0 / (7.0 * 7f64.ln()).sqrt()).abs() < 1e-12);
        assert_eq!(empirical_b1(1, 3.0, 3.0, 3), None);
    }
}
