//! Blowups of partial Steiner systems and the tau-witnesses they certify.
//!
//! Each point `i` of the system becomes the class `V_i = {i*d, .., i*d+d-1}`.
//! The blowup contains every r-set inside a class and, for every system edge,
//! every rainbow r-set taking one vertex from each of its classes. With
//! `augment_even_r` it also contains every r-set that meets exactly r/2
//! classes in two vertices each.

use thiserror::Error;

use crate::hypercore::{binomial, for_each_subset, Hypergraph, Vertex};
use crate::indep::{alpha_exact, AlphaResult, AlphaStatus, IndepError};
use crate::steiner::SteinerSystem;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlowupError {
    #[error("invalid blowup: {0}")]
    InvalidSpec(String),
    #[error("construction undefined: {0}")]
    Plan(String),
    #[error(transparent)]
    Indep(#[from] IndepError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowupSpec {
    pub system: SteinerSystem,
    pub d: usize,
    pub augment_even_r: bool,
}

impl BlowupSpec {
    pub fn new(system: SteinerSystem, d: usize, augment_even_r: bool) -> Result<Self, BlowupError> {
        if d == 0 {
            return Err(BlowupError::InvalidSpec("class size d must be at least 1".into()));
        }
        if augment_even_r && system.uniformity() % 2 == 1 {
            return Err(BlowupError::InvalidSpec(format!(
                "augmentation is defined for even r only, got r = {}",
                system.uniformity()
            )));
        }
        Ok(Self {
            system,
            d,
            augment_even_r,
        })
    }

    pub fn points(&self) -> usize {
        self.system.points()
    }

    pub fn uniformity(&self) -> usize {
        self.system.uniformity()
    }

    pub fn order(&self) -> usize {
        self.points() * self.d
    }

    pub fn class_of(&self, v: Vertex) -> usize {
        v as usize / self.d
    }

    /// m*C(d, r) + |E(S)|*d^r, plus C(m, r/2)*C(d, 2)^(r/2) when augmented.
    pub fn expected_edge_count(&self) -> u64 {
        let (m, d, r) = (self.points() as u64, self.d as u64, self.uniformity() as u32);
        let inside = m * binomial(d, u64::from(r)).expect("small");
        let rainbow = self.system.base.edge_count() as u64 * d.pow(r);
        let extra = if self.augment_even_r {
            binomial(m, u64::from(r / 2)).expect("small") * binomial(d, 2).expect("small").pow(r / 2)
        } else {
            0
        };
        inside + rainbow + extra
    }

    pub fn metadata(&self) -> Vec<(String, String)> {
        vec![
            ("kind".into(), "blowup".into()),
            ("m".into(), self.points().to_string()),
            ("d".into(), self.d.to_string()),
            ("r".into(), self.uniformity().to_string()),
            ("steiner_seed".into(), self.system.seed.to_string()),
            ("augment".into(), self.augment_even_r.to_string()),
        ]
    }
}

/// Appends to `rows` every set choosing one vertex from each listed class
/// (`per_class` = 1) or two (`per_class` = 2).
fn product_sets(classes: &[usize], d: usize, per_class: usize, rows: &mut Vec<Vec<Vertex>>) {
    let mut picks: Vec<Vec<Vertex>> = Vec::new();
    for_each_subset(d, per_class, |s| picks.push(s.to_vec()));
    let mut idx = vec![0usize; classes.len()];
    loop {
        let mut row = Vec::with_capacity(classes.len() * per_class);
        for (&c, &i) in classes.iter().zip(&idx) {
            row.extend(picks[i].iter().map(|&v| (c * d) as Vertex + v));
        }
        rows.push(row);
        let mut k = classes.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < picks.len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

pub fn build_blowup(spec: &BlowupSpec) -> Hypergraph {
    let (m, d, r) = (spec.points(), spec.d, spec.uniformity());
    let mut rows: Vec<Vec<Vertex>> = Vec::new();
    for i in 0..m {
        let base = (i * d) as Vertex;
        for_each_subset(d, r, |s| rows.push(s.iter().map(|&v| base + v).collect()));
    }
    for e in spec.system.base.edges() {
        let classes: Vec<usize> = e.iter().map(|&i| i as usize).collect();
        product_sets(&classes, d, 1, &mut rows);
    }
    if spec.augment_even_r && d >= 2 {
        for_each_subset(m, r / 2, |cls| {
            let classes: Vec<usize> = cls.iter().map(|&i| i as usize).collect();
            product_sets(&classes, d, 2, &mut rows);
        });
    }
    // classes are contiguous and listed in ascending order, so every row is
    // already ascending
    rows.sort_unstable();
    Hypergraph::from_sorted_rows(r, m * d, rows)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdentityOutcome {
    Holds,
    Violated { expected: u64, actual: u64 },
    Inconclusive,
    /// The identity does not apply to this spec; the reason is given.
    NotApplicable(&'static str),
}

impl IdentityOutcome {
    fn compare(expected: u64, actual: u64) -> Self {
        if expected == actual {
            IdentityOutcome::Holds
        } else {
            IdentityOutcome::Violated { expected, actual }
        }
    }

    pub fn holds(&self) -> bool {
        matches!(self, IdentityOutcome::Holds)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub m: usize,
    pub d: usize,
    pub r: usize,
    pub n: usize,
    pub edges: usize,
    pub max_codegree: u64,
    pub alpha_system: AlphaResult,
    pub alpha_blowup: AlphaResult,
    /// Max codegree equals d; needs a nonempty system.
    pub codegree: IdentityOutcome,
    /// alpha(H) = (r-1) alpha(S); needs d >= r-1 so a class can hold r-1
    /// vertices of an independent set.
    pub alpha: IdentityOutcome,
    /// alpha(H) = min(d, r-1) alpha(S), valid for every d.
    pub alpha_any_d: IdentityOutcome,
}

impl IdentityReport {
    pub fn has_violation(&self) -> bool {
        [&self.codegree, &self.alpha, &self.alpha_any_d]
            .iter()
            .any(|o| matches!(o, IdentityOutcome::Violated { .. }))
    }
}

pub fn check_blowup_identities(spec: &BlowupSpec, node_budget: u64) -> Result<IdentityReport, BlowupError> {
    let h = build_blowup(spec);
    let (d, r) = (spec.d, spec.uniformity());
    let max_codegree = h.max_codegree();
    let mut system = spec.system.clone();
    let alpha_system = system
        .resolve_alpha(node_budget)
        .map_err(|e| match e {
            crate::steiner::SteinerError::Indep(i) => BlowupError::Indep(i),
            other => BlowupError::InvalidSpec(other.to_string()),
        })?
        .clone();
    let alpha_blowup = alpha_exact(&h, node_budget)?;

    let codegree = if spec.augment_even_r {
        IdentityOutcome::NotApplicable("augmented blowup")
    } else if system.base.edge_count() == 0 {
        IdentityOutcome::NotApplicable("steiner system has no edges")
    } else {
        IdentityOutcome::compare(d as u64, max_codegree)
    };
    let both_exact = alpha_system.is_exact() && alpha_blowup.is_exact();
    let a_s = alpha_system.alpha as u64;
    let a_h = alpha_blowup.alpha as u64;
    let alpha = if spec.augment_even_r {
        IdentityOutcome::NotApplicable("augmented blowup")
    } else if d + 1 < r {
        IdentityOutcome::NotApplicable("d < r-1")
    } else if !both_exact {
        IdentityOutcome::Inconclusive
    } else {
        IdentityOutcome::compare((r as u64 - 1) * a_s, a_h)
    };
    let alpha_any_d = if spec.augment_even_r {
        IdentityOutcome::NotApplicable("augmented blowup")
    } else if !both_exact {
        IdentityOutcome::Inconclusive
    } else {
        IdentityOutcome::compare(d.min(r - 1) as u64 * a_s, a_h)
    };
    Ok(IdentityReport {
        m: spec.points(),
        d,
        r,
        n: h.order(),
        edges: h.edge_count(),
        max_codegree,
        alpha_system,
        alpha_blowup,
        codegree,
        alpha,
        alpha_any_d,
    })
}

/// A finite certificate `T_{r-1}(n, t, r) <= max_codegree`, valid when the
/// hypergraph's independence number is known exactly and is below t.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauWitness {
    pub n: usize,
    pub t: usize,
    pub r: usize,
    pub max_codegree: u64,
    pub alpha: usize,
    pub alpha_status: AlphaStatus,
    /// max_codegree / (n - r + 1)
    pub tau_upper: Rational,
    pub valid: bool,
}

impl TauWitness {
    pub fn new(h: &Hypergraph, t: usize, alpha: &AlphaResult) -> Result<Self, BlowupError> {
        let (n, r) = (h.order(), h.uniformity());
        if n < r {
            return Err(BlowupError::InvalidSpec(format!("need n >= r, got n = {n}, r = {r}")));
        }
        let max_codegree = h.max_codegree();
        Ok(Self {
            n,
            t,
            r,
            max_codegree,
            alpha: alpha.alpha,
            alpha_status: alpha.status,
            tau_upper: Rational::new(i128::from(max_codegree), (n - r + 1) as i128),
            valid: alpha.is_exact() && alpha.alpha < t,
        })
    }

    pub fn tau_upper_f64(&self) -> f64 {
        *self.tau_upper.numer() as f64 / *self.tau_upper.denom() as f64
    }
}

pub fn witness_from_construction(spec: &BlowupSpec, t: usize, node_budget: u64) -> Result<TauWitness, BlowupError> {
    let h = build_blowup(spec);
    let alpha = alpha_exact(&h, node_budget)?;
    TauWitness::new(&h, t, &alpha)
}

/// Number of Steiner points for target t: `m = ceil(t^(r-1) / (c2 ln t))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstructionPlan {
    pub t: usize,
    pub r: usize,
    pub c2: f64,
    pub m: usize,
}

impl ConstructionPlan {
    /// Class size for an n-vertex instance; n must be a multiple of m.
    pub fn class_size(&self, n: usize) -> Option<usize> {
        (n > 0 && n % self.m == 0).then(|| n / self.m)
    }
}

pub fn plan_construction(t: usize, r: usize, c2: f64) -> Result<ConstructionPlan, BlowupError> {
    if t < 2 {
        return Err(BlowupError::Plan(format!("need ln t > 0, got t = {t}")));
    }
    if !(c2.is_finite() && c2 > 0.0) {
        return Err(BlowupError::Plan(format!("c2 must be positive, got {c2}")));
    }
    let tf = t as f64;
    let raw = tf.powi(r as i32 - 1) / (c2 * tf.ln());
    let m = raw.ceil();
    if m < r as f64 {
        return Err(BlowupError::Plan(format!(
            "m = {m} is below r = {r} for t = {t}, c2 = {c2}"
        )));
    }
    Ok(ConstructionPlan {
        t,
        r,
        c2,
        m: m as usize,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercore::fixtures::fano;
    use crate::indep::{alpha_exhaustive, DEFAULT_NODE_BUDGET};
    use crate::steiner::{generate_steiner, verify_steiner, SteinerOptions};

    fn system(h: Hypergraph) -> SteinerSystem {
        SteinerSystem::from_hypergraph(h, 0, 1, &SteinerOptions::default()).unwrap()
    }

    fn single_edge() -> SteinerSystem {
        system(Hypergraph::new(3, 3, [[0, 1, 2]]).unwrap())
    }

    #[test]
    fn single_edge_doubled() {
        let spec = BlowupSpec::new(single_edge(), 2, false).unwrap();
        let h = build_blowup(&spec);
        assert_eq!(h.order(), 6);
        assert_eq!(h.edge_count(), 8);
        assert_eq!(h.max_degree(2).unwrap(), 2);
        // brute force over all subsets of the six vertices
        assert_eq!(alpha_exhaustive(&h).unwrap().alpha, 4);
        let report = check_blowup_identities(&spec, DEFAULT_NODE_BUDGET).unwrap();
        assert!(report.codegree.holds());
        assert!(report.alpha.holds());
        assert!(report.alpha_any_d.holds());
    }

    #[test]
    fn fano_tripled() {
        let spec = BlowupSpec::new(system(fano()), 3, false).unwrap();
        let h = build_blowup(&spec);
        assert_eq!(h.order(), 21);
        assert_eq!(h.max_codegree(), 3);
        assert_eq!(h.edge_count() as u64, spec.expected_edge_count());
        assert_eq!(h.edge_count(), 7 + 7 * 27);
        let report = check_blowup_identities(&spec, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(report.alpha_blowup.alpha, 8);
        assert!(report.codegree.holds() && report.alpha.holds());
        assert!(!report.has_violation());
    }

    #[test]
    fn unit_classes_reproduce_the_system() {
        let spec = BlowupSpec::new(system(fano()), 1, false).unwrap();
        assert_eq!(build_blowup(&spec), fano());
        let report = check_blowup_identities(&spec, DEFAULT_NODE_BUDGET).unwrap();
        assert!(report.codegree.holds());
        assert_eq!(report.alpha, IdentityOutcome::NotApplicable("d < r-1"));
        assert!(report.alpha_any_d.holds());
        assert_eq!(report.alpha_blowup.alpha, 4);
    }

    #[test]
    fn empty_system_flags_precondition() {
        let spec = BlowupSpec::new(system(Hypergraph::empty(3, 4).unwrap()), 5, false).unwrap();
        let report = check_blowup_identities(&spec, DEFAULT_NODE_BUDGET).unwrap();
        // only the within-class triples remain: a pair inside a class
        // extends in d - 2 ways
        assert_eq!(report.max_codegree, 3);
        assert_eq!(report.codegree, IdentityOutcome::NotApplicable("steiner system has no edges"));
    }

    #[test]
    fn class_lookup() {
        let spec = BlowupSpec::new(single_edge(), 4, false).unwrap();
        let h = build_blowup(&spec);
        for e in h.edges() {
            let mut classes: Vec<usize> = e.iter().map(|&v| spec.class_of(v)).collect();
            classes.dedup();
            assert!(classes.len() == 1 || classes.len() == 3);
        }
        assert_eq!(spec.class_of(7), 1);
    }

    #[test]
    fn augmentation_for_even_r() {
        let s = generate_steiner(6, 4, 2, 3).unwrap();
        assert!(BlowupSpec::new(single_edge(), 2, true).is_err());
        assert!(BlowupSpec::new(s.clone(), 0, false).is_err());
        for d in 1..=3 {
            let plain = BlowupSpec::new(s.clone(), d, false).unwrap();
            let aug = BlowupSpec::new(s.clone(), d, true).unwrap();
            let hp = build_blowup(&plain);
            let ha = build_blowup(&aug);
            assert_eq!(ha.edge_count() as u64, aug.expected_edge_count());
            assert!(hp.edges().all(|e| ha.contains_edge(e)));
            let ap = alpha_exact(&hp, DEFAULT_NODE_BUDGET).unwrap();
            let aa = alpha_exact(&ha, DEFAULT_NODE_BUDGET).unwrap();
            assert!(aa.alpha <= ap.alpha);
            if d >= 2 {
                // two vertices from each of two classes
                assert!(ha.contains_edge(&[0, 1, d as Vertex, d as Vertex + 1]));
                assert!(!verify_steiner(&ha));
            }
        }
    }

    #[test]
    fn witnesses() {
        let fano_sys = system(fano());
        let spec = BlowupSpec::new(fano_sys.clone(), 3, false).unwrap();
        let w = witness_from_construction(&spec, 9, DEFAULT_NODE_BUDGET).unwrap();
        assert!(w.valid);
        assert_eq!(w.tau_upper, Rational::new(3, 19));
        let w8 = witness_from_construction(&spec, 8, DEFAULT_NODE_BUDGET).unwrap();
        assert!(!w8.valid);
        assert_eq!(w8.alpha, 8);

        let unit = BlowupSpec::new(fano_sys, 1, false).unwrap();
        let w = witness_from_construction(&unit, 5, DEFAULT_NODE_BUDGET).unwrap();
        assert!(w.valid);
        assert_eq!(w.tau_upper, Rational::new(1, 5));
    }

    #[test]
    fn inconclusive_alpha_invalidates_witness() {
        let s = generate_steiner(30, 3, 1, 8).unwrap();
        let spec = BlowupSpec::new(s, 2, false).unwrap();
        let w = witness_from_construction(&spec, 1000, 3).unwrap();
        assert_eq!(w.alpha_status, AlphaStatus::Inconclusive);
        assert!(!w.valid);
    }

    #[test]
    fn plans() {
        // 4096 / (24 ln 64) = 41.04.., rounded up
        let p = plan_construction(64, 3, 24.0).unwrap();
        assert_eq!(p.m, 42);
        assert_eq!(p.class_size(84), Some(2));
        assert_eq!(p.class_size(85), None);

        let mut last = 0;
        for t in 8..200 {
            let m = plan_construction(t, 3, 5.0).unwrap().m;
            assert!(m >= last, "t = {t}");
            last = m;
        }
        let a = plan_construction(100, 3, 4.0).unwrap().m as f64;
        let b = plan_construction(100, 3, 8.0).unwrap().m as f64;
        assert!((a / 2.0 - b).abs() <= 1.0);

        assert!(matches!(plan_construction(8, 3, 100.0), Err(BlowupError::Plan(_))));
        assert!(matches!(plan_construction(1, 3, 1.0), Err(BlowupError::Plan(_))));
        assert!(matches!(plan_construction(10, 3, -1.0), Err(BlowupError::Plan(_))));
    }
}
