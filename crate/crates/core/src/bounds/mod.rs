//! Closed-form bounds on the Turán and codegree densities of complete
//! r-graphs, the constants that relate them, an exhaustive oracle for small
//! instances and a fitter for measured scaling data.

mod fit;
mod oracle;

pub use fit::{fit_scaling, ScalingFit};
pub use oracle::{t_ell_oracle, t_ell_oracle_unpruned, ORACLE_MAX_EDGES};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::hypercore::binomial;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("exact arithmetic overflowed: {0}")]
    Overflow(String),
    #[error("unavailable: {0}")]
    Unavailable(String),
    #[error("oracle needs C(n, r) <= {max}, got C({n}, {r}) = {edges}")]
    OracleTooLarge { n: usize, r: usize, edges: u64, max: u64 },
}

fn checked_pow(base: i128, exp: u32) -> Result<i128, BoundsError> {
    base.checked_pow(exp)
        .ok_or_else(|| BoundsError::Overflow(format!("{base}^{exp}")))
}

/// `1 - ((r-1)/(t-1))^(r-1) <= pi(K_t^r) <= 1 - 1/C(t-1, r-1)`.
pub fn classical_bounds(t: usize, r: usize) -> Result<(Rational, Rational), BoundsError> {
    if r < 2 || t <= r {
        return Err(BoundsError::InvalidParams(format!("need t > r >= 2, got t = {t}, r = {r}")));
    }
    let e = r as u32 - 1;
    let lower = Rational::one()
        - Rational::new(checked_pow(r as i128 - 1, e)?, checked_pow(t as i128 - 1, e)?);
    let c = binomial(t as u64 - 1, r as u64 - 1).map_err(|err| BoundsError::Overflow(err.to_string()))?;
    let upper = Rational::one() - Rational::new(1, i128::from(c));
    Ok((lower, upper))
}

/// Where a ledger constant came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    UserSupplied,
    FittedEmpirical,
    /// Computed from other ledger entries.
    Derived,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::UserSupplied => "user-supplied",
            Provenance::FittedEmpirical => "fitted-empirical",
            Provenance::Derived => "derived",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant {
    pub value: f64,
    pub provenance: Provenance,
}

/// Named constants for one uniformity r. Ships empty: nothing is assumed.
///
/// Relations: `c0 = 4^(-1/(r-1)) b1`, `c1 = (r-1) c0^(r-1) / 2`,
/// `c2 = (r-1)^r a2^(r-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsLedger {
    pub r: usize,
    pub a2: Option<Constant>,
    pub b1: Option<Constant>,
    pub c0: Option<Constant>,
    pub c1: Option<Constant>,
    pub c2: Option<Constant>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantName {
    A2,
    B1,
    C0,
    C1,
    C2,
}

impl ConstantsLedger {
    pub fn empty(r: usize) -> Self {
        Self {
            r,
            a2: None,
            b1: None,
            c0: None,
            c1: None,
            c2: None,
        }
    }

    fn slot(&mut self, name: ConstantName) -> &mut Option<Constant> {
        match name {
            ConstantName::A2 => &mut self.a2,
            ConstantName::B1 => &mut self.b1,
            ConstantName::C0 => &mut self.c0,
            ConstantName::C1 => &mut self.c1,
            ConstantName::C2 => &mut self.c2,
        }
    }

    pub fn set(&mut self, name: ConstantName, value: f64, provenance: Provenance) -> Result<(), BoundsError> {
        if !(value.is_finite() && value > 0.0) {
            return Err(BoundsError::InvalidParams(format!("{name:?} must be positive, got {value}")));
        }
        *self.slot(name) = Some(Constant { value, provenance });
        Ok(())
    }

    pub fn with(mut self, name: ConstantName, value: f64, provenance: Provenance) -> Result<Self, BoundsError> {
        self.set(name, value, provenance)?;
        Ok(self)
    }

    fn rf(&self) -> f64 {
        self.r as f64
    }

    pub fn c0_from_b1(&self, b1: f64) -> f64 {
        4f64.powf(-1.0 / (self.rf() - 1.0)) * b1
    }

    pub fn c1_from_c0(&self, c0: f64) -> f64 {
        (self.rf() - 1.0) * c0.powf(self.rf() - 1.0) / 2.0
    }

    pub fn c2_from_a2(&self, a2: f64) -> f64 {
        (self.rf() - 1.0).powf(self.rf()) * a2.powf(self.rf() - 1.0)
    }

    /// Inverse of [`Self::c2_from_a2`].
    pub fn a2_from_c2(&self, c2: f64) -> f64 {
        (c2 / (self.rf() - 1.0).powf(self.rf())).powf(1.0 / (self.rf() - 1.0))
    }

    /// Fills empty slots that follow from filled ones.
    pub fn derive(&mut self) {
        let derived = |value| Some(Constant { value, provenance: Provenance::Derived });
        if let (Some(b1), None) = (self.b1, self.c0) {
            self.c0 = derived(self.c0_from_b1(b1.value));
        }
        if let (Some(c0), None) = (self.c0, self.c1) {
            self.c1 = derived(self.c1_from_c0(c0.value));
        }
        if let (Some(a2), None) = (self.a2, self.c2) {
            self.c2 = derived(self.c2_from_a2(a2.value));
        }
    }

    /// Relations violated beyond relative tolerance `rel_tol`.
    pub fn inconsistencies(&self, rel_tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        let mut check = |label: &str, have: Option<Constant>, want: Option<f64>| {
            if let (Some(have), Some(want)) = (have, want) {
                if (have.value - want).abs() > rel_tol * want.abs() {
                    out.push(format!("{label}: have {}, relation gives {want}", have.value));
                }
            }
        };
        check("c0", self.c0, self.b1.map(|b| self.c0_from_b1(b.value)));
        check("c1", self.c1, self.c0.map(|c| self.c1_from_c0(c.value)));
        check("c2", self.c2, self.a2.map(|a| self.c2_from_a2(a.value)));
        out
    }

    pub fn entries(&self) -> Vec<(&'static str, Constant)> {
        [("a2", self.a2), ("b1", self.b1), ("c0", self.c0), ("c1", self.c1), ("c2", self.c2)]
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k, v)))
            .collect()
    }
}

/// `c1 ln t / t^(r-1)` and `c2 ln t / t^(r-1)`.
pub fn theorem1_envelope(t: usize, r: usize, ledger: &ConstantsLedger) -> Result<(f64, f64), BoundsError> {
    if t < 3 || r < 2 {
        return Err(BoundsError::InvalidParams(format!("need t >= 3 and r >= 2, got t = {t}, r = {r}")));
    }
    let (Some(c1), Some(c2)) = (ledger.c1, ledger.c2) else {
        return Err(BoundsError::Unavailable("the envelope needs both c1 and c2 in the ledger".into()));
    };
    let scale = (t as f64).ln() / (t as f64).powi(r as i32 - 1);
    Ok((c1.value * scale, c2.value * scale))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub t: usize,
    pub r: usize,
    /// Bounds on pi(K_t^r).
    pub turan_lower: Rational,
    pub turan_upper: Rational,
    /// The same bounds as bounds on tau_1 = 1 - pi.
    pub tau1_lower: Rational,
    pub tau1_upper: Rational,
    /// Envelope for tau_{r-1}, when the ledger has c1 and c2.
    pub tau_lower: Option<f64>,
    pub tau_upper: Option<f64>,
    /// `(1 - tau_upper, 1 - tau_lower)`, bounds on the codegree density.
    pub pi_codegree_bounds: Option<(f64, f64)>,
}

impl BoundsReport {
    pub fn new(t: usize, r: usize, ledger: &ConstantsLedger) -> Result<Self, BoundsError> {
        let (turan_lower, turan_upper) = classical_bounds(t, r)?;
        let envelope = match theorem1_envelope(t, r, ledger) {
            Ok(e) => Some(e),
            Err(BoundsError::Unavailable(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(Self {
            t,
            r,
            tau1_lower: Rational::one() - turan_upper,
            tau1_upper: Rational::one() - turan_lower,
            turan_lower,
            turan_upper,
            tau_lower: envelope.map(|e| e.0),
            tau_upper: envelope.map(|e| e.1),
            pi_codegree_bounds: envelope.map(|(lo, hi)| (1.0 - hi, 1.0 - lo)),
        })
    }
}

/// Leading-order constants from the refined argument; valid only
/// asymptotically in r (c1) and t (c2), never as finite-r values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinedConstants {
    pub r: usize,
    /// `(r-1)/3 * (r-3)!`
    pub c1: Rational,
    /// `r * r!` for even r, `2^(r-1) * r * r!` for odd r.
    pub c2: Rational,
    pub even: bool,
}

impl RefinedConstants {
    pub const NOTE: &'static str = "asymptotic, not valid at finite r";
}

fn factorial(k: usize) -> Result<i128, BoundsError> {
    (1..=k as i128).try_fold(1i128, |acc, i| {
        acc.checked_mul(i)
            .ok_or_else(|| BoundsError::Overflow(format!("{k}!")))
    })
}

pub fn refined_c_values(r: usize) -> Result<RefinedConstants, BoundsError> {
    if r < 3 {
        return Err(BoundsError::InvalidParams(format!("need r >= 3, got {r}")));
    }
    let overflow = || BoundsError::Overflow(format!("refined constants for r = {r}"));
    let c1 = Rational::new(r as i128 - 1, 3) * Rational::from_integer(factorial(r - 3)?);
    let r_rfact = (r as i128).checked_mul(factorial(r)?).ok_or_else(overflow)?;
    let even = r % 2 == 0;
    let c2 = if even {
        r_rfact
    } else {
        checked_pow(2, r as u32 - 1)?.checked_mul(r_rfact).ok_or_else(overflow)?
    };
    Ok(RefinedConstants {
        r,
        c1,
        c2: Rational::from_integer(c2),
        even,
    })
}

pub fn to_f64(q: &Rational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    *q.numer() as f64 / *q.denom() as f64
}
