//! Reproducible experiments driven by a flat `key = value` config file.
//!
//! Every run produces rows with the columns in [`CSV_HEADER`]. All
//! randomness is derived from the config seed: the instance for target t is
//! seeded by `seed::derive(seed, EXPERIMENT, t)`.

use std::collections::HashSet;
use std::fmt;
use std::path::PathBuf;

use rayon::prelude::*;
use thiserror::Error;

use crate::blowup::{build_blowup, check_blowup_identities, plan_construction, BlowupError, BlowupSpec, IdentityOutcome, TauWitness};
use crate::bounds::{fit_scaling, t_ell_oracle, BoundsError, Provenance};
use crate::indep::{alpha_exact, AlphaStatus, IndepError, DEFAULT_NODE_BUDGET};
use crate::sampling::{acceptance_stats, min_lemma_m, SamplingError, SubsampleParams};
use crate::seed;
use crate::steiner::{generate_steiner, steiner_quality, SteinerError, SteinerSystem};
use crate::Rational;

pub const CSV_HEADER: &str = "t,r,ell,n,value,kind,provenance,status,seed,version";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Calibration multiplies c2 by this factor after each failed round.
const C2_STEP: f64 = 1.1;
const MAX_CALIBRATION_ROUNDS: usize = 40;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct ConfigError {
    /// 0 when the problem is a missing key rather than a specific line.
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Steiner(#[from] SteinerError),
    #[error(transparent)]
    Blowup(#[from] BlowupError),
    #[error(transparent)]
    Indep(#[from] IndepError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Scaling,
    Identities,
    SteinerQuality,
    SubsampleStats,
    OracleSweep,
}

impl Mode {
    pub const ALL: [Mode; 5] = [
        Mode::Scaling,
        Mode::Identities,
        Mode::SteinerQuality,
        Mode::SubsampleStats,
        Mode::OracleSweep,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Scaling => "scaling",
            Mode::Identities => "identities",
            Mode::SteinerQuality => "steiner-quality",
            Mode::SubsampleStats => "subsample-stats",
            Mode::OracleSweep => "oracle-sweep",
        }
    }

    fn needs_c2(self) -> bool {
        self != Mode::OracleSweep
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub r: usize,
    pub t_list: Vec<usize>,
    pub c2_guess: Option<f64>,
    pub restarts: usize,
    pub seed: u64,
    /// Class size of the blowup.
    pub d: usize,
    pub output_dir: PathBuf,
    pub node_budget: u64,
    /// subsample-stats only.
    pub epsilon: f64,
    pub trials: usize,
    /// oracle-sweep only: n runs over r..=n_max.
    pub n_max: usize,
}

const KEYS: [&str; 12] = [
    "mode",
    "r",
    "t_list",
    "c2_guess",
    "restarts",
    "seed",
    "d",
    "output_dir",
    "node_budget",
    "epsilon",
    "trials",
    "n_max",
];

fn parse_value<T: std::str::FromStr>(line: usize, key: &str, raw: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    raw.parse().map_err(|e: T::Err| ConfigError {
        line,
        message: format!("bad value for {key}: {raw:?} ({e})"),
    })
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut seen: HashSet<&str> = HashSet::new();
        let mut mode = None;
        let mut r = None;
        let mut t_list = None;
        let mut c2_guess = None;
        let mut restarts = 8;
        let mut seed = None;
        let mut d = 1;
        let mut output_dir = PathBuf::from(".");
        let mut node_budget = DEFAULT_NODE_BUDGET;
        let mut epsilon: f64 = 2.0;
        let mut trials = 1000;
        let mut n_max = 6;

        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| ConfigError { line, message };
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got {content:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let Some(&key) = KEYS.iter().find(|&&k| k == key) else {
                return Err(err(format!("unknown key {key:?}")));
            };
            if !seen.insert(key) {
                return Err(err(format!("duplicate key {key}")));
            }
            if value.is_empty() {
                return Err(err(format!("empty value for {key}")));
            }
            match key {
                "mode" => {
                    mode = Some(
                        Mode::ALL
                            .into_iter()
                            .find(|m| m.as_str() == value)
                            .ok_or_else(|| err(format!("unknown mode {value:?}")))?,
                    )
                }
                "r" => r = Some(parse_value(line, key, value)?),
                "t_list" => {
                    let ts = value
                        .split(',')
                        .map(|s| parse_value::<usize>(line, key, s.trim()))
                        .collect::<Result<Vec<_>, _>>()?;
                    if ts.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(err("t_list must be strictly ascending".into()));
                    }
                    t_list = Some(ts);
                }
                "c2_guess" => {
                    let c: f64 = parse_value(line, key, value)?;
                    if !(c.is_finite() && c > 0.0) {
                        return Err(err(format!("c2_guess must be positive, got {value}")));
                    }
                    c2_guess = Some(c);
                }
                "restarts" => restarts = parse_value(line, key, value)?,
                "seed" => seed = Some(parse_value(line, key, value)?),
                "d" => d = parse_value(line, key, value)?,
                "output_dir" => output_dir = PathBuf::from(value),
                "node_budget" => node_budget = parse_value(line, key, value)?,
                "epsilon" => {
                    epsilon = parse_value(line, key, value)?;
                    if !(epsilon.is_finite() && epsilon > 0.0) {
                        return Err(err(format!("epsilon must be positive, got {value}")));
                    }
                }
                "trials" => trials = parse_value(line, key, value)?,
                "n_max" => n_max = parse_value(line, key, value)?,
                _ => unreachable!("key list is exhaustive"),
            }
        }

        let missing = |key: &str| ConfigError {
            line: 0,
            message: format!("missing required key {key}"),
        };
        let mode: Mode = mode.ok_or_else(|| missing("mode"))?;
        let seed = seed.ok_or_else(|| missing("seed"))?;
        let r: usize = r.ok_or_else(|| missing("r"))?;
        let t_list: Vec<usize> = t_list.ok_or_else(|| missing("t_list"))?;
        if mode.needs_c2() && c2_guess.is_none() {
            return Err(missing("c2_guess"));
        }
        let invalid = |message: String| ConfigError { line: 0, message };
        if r < 3 {
            return Err(invalid(format!("r must be at least 3, got {r}")));
        }
        if restarts == 0 || d == 0 || trials == 0 {
            return Err(invalid("restarts, d and trials must be positive".into()));
        }
        Ok(Self {
            mode,
            r,
            t_list,
            c2_guess,
            restarts,
            seed,
            d,
            output_dir,
            node_budget,
            epsilon,
            trials,
            n_max,
        })
    }

    pub fn read(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            line: 0,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    fn instance_seed(&self, t: usize) -> u64 {
        seed::derive(self.seed, seed::stream::EXPERIMENT, t as u64)
    }
}

/// Outcome attached to each row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RowStatus {
    Ok,
    /// The value is sound but does not certify what was asked (e.g. alpha >= t).
    Invalid,
    /// A search ran out of budget; the value is a bound, not the answer.
    Inconclusive,
    /// An identity or invariant that must hold failed.
    Violated,
    Skipped,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Invalid => "invalid",
            RowStatus::Inconclusive => "inconclusive",
            RowStatus::Violated => "violated",
            RowStatus::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub t: Option<usize>,
    pub r: usize,
    pub ell: Option<usize>,
    pub n: Option<usize>,
    /// Number, exact fraction or bare token; never contains a comma.
    pub value: String,
    pub kind: &'static str,
    pub provenance: Provenance,
    pub status: RowStatus,
    pub seed: u64,
}

impl Row {
    fn new(t: Option<usize>, r: usize, kind: &'static str, value: impl fmt::Display, seed: u64) -> Self {
        Self {
            t,
            r,
            ell: None,
            n: None,
            value: value.to_string(),
            kind,
            provenance: Provenance::Derived,
            status: RowStatus::Ok,
            seed,
        }
    }

    fn n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    fn ell(mut self, ell: usize) -> Self {
        self.ell = Some(ell);
        self
    }

    fn status(mut self, status: RowStatus) -> Self {
        self.status = status;
        self
    }

    fn provenance(mut self, p: Provenance) -> Self {
        self.provenance = p;
        self
    }

    pub fn to_csv_line(&self) -> String {
        let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            opt(self.t),
            self.r,
            opt(self.ell),
            opt(self.n),
            self.value,
            self.kind,
            self.provenance.as_str(),
            self.status.as_str(),
            self.seed,
            VERSION
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub mode: Mode,
    pub rows: Vec<Row>,
    /// Human-readable lines for the terminal.
    pub summary: Vec<String>,
}

impl ExperimentReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.to_csv_line());
            out.push('\n');
        }
        out
    }

    pub fn has_inconclusive(&self) -> bool {
        self.rows.iter().any(|r| r.status == RowStatus::Inconclusive)
    }

    pub fn has_violation(&self) -> bool {
        self.rows.iter().any(|r| r.status == RowStatus::Violated)
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.6}")
}

fn fmt_rational(q: &Rational) -> String {
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn alpha_row_status(status: AlphaStatus) -> RowStatus {
    match status {
        AlphaStatus::Exact => RowStatus::Ok,
        AlphaStatus::Inconclusive | AlphaStatus::LowerBound => RowStatus::Inconclusive,
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    let (mut rows, summary) = match cfg.mode {
        Mode::Scaling => run_scaling(cfg)?,
        Mode::Identities => run_identities(cfg)?,
        Mode::SteinerQuality => run_steiner_quality(cfg)?,
        Mode::SubsampleStats => run_subsample_stats(cfg)?,
        Mode::OracleSweep => run_oracle_sweep(cfg)?,
    };
    // rows without t (global results) go last
    rows.sort_by(|a, b| {
        (a.t.is_none(), a.t, a.n, a.ell, a.kind).cmp(&(b.t.is_none(), b.t, b.n, b.ell, b.kind))
    });
    Ok(ExperimentReport {
        mode: cfg.mode,
        rows,
        summary,
    })
}

type Output = (Vec<Row>, Vec<String>);

/// Plans and builds the instance for one target t.
fn instance(cfg: &ExperimentConfig, t: usize, c2: f64) -> Result<(BlowupSpec, u64), ExperimentError> {
    let plan = plan_construction(t, cfg.r, c2)?;
    let seed = cfg.instance_seed(t);
    let system = generate_steiner(plan.m, cfg.r, cfg.restarts, seed)?;
    Ok((BlowupSpec::new(system, cfg.d, false)?, seed))
}

struct ScalingPoint {
    t: usize,
    m: usize,
    witness: TauWitness,
}

fn scaling_round(cfg: &ExperimentConfig, c2: f64) -> Result<Vec<ScalingPoint>, ExperimentError> {
    cfg.t_list
        .par_iter()
        .map(|&t| {
            let (spec, _) = instance(cfg, t, c2)?;
            let h = build_blowup(&spec);
            let alpha = alpha_exact(&h, cfg.node_budget)?;
            Ok(ScalingPoint {
                t,
                m: spec.points(),
                witness: TauWitness::new(&h, t, &alpha)?,
            })
        })
        .collect()
}

/// Starts from `c2_guess` and raises c2 geometrically until every witness is
/// valid, then fits `tau * t^(r-1) / ln t` to a constant.
fn run_scaling(cfg: &ExperimentConfig) -> Result<Output, ExperimentError> {
    let mut c2 = cfg.c2_guess.expect("checked by the parser");
    let mut rounds = 1;
    let mut points = scaling_round(cfg, c2)?;
    while points.iter().any(|p| !p.witness.valid) && rounds < MAX_CALIBRATION_ROUNDS {
        let next = c2 * C2_STEP;
        // a plan error means some m dropped below r; keep the last round
        match scaling_round(cfg, next) {
            Ok(p) => points = p,
            Err(ExperimentError::Blowup(BlowupError::Plan(_))) => break,
            Err(e) => return Err(e),
        }
        c2 = next;
        rounds += 1;
    }

    let r = cfg.r;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for p in &points {
        let w = &p.witness;
        let st = if w.valid {
            RowStatus::Ok
        } else if w.alpha_status != AlphaStatus::Exact {
            RowStatus::Inconclusive
        } else {
            RowStatus::Invalid
        };
        let seed = cfg.instance_seed(p.t);
        rows.push(Row::new(Some(p.t), r, "witness", fmt_rational(&w.tau_upper), seed).n(w.n).ell(r - 1).status(st));
        rows.push(
            Row::new(Some(p.t), r, "alpha", w.alpha, seed)
                .n(w.n)
                .status(alpha_row_status(w.alpha_status)),
        );
        rows.push(Row::new(Some(p.t), r, "max-codegree", w.max_codegree, seed).n(w.n).ell(r - 1));
        rows.push(Row::new(Some(p.t), r, "steiner-points", p.m, seed).n(w.n));
        summary.push(format!(
            "t = {:>3}  m = {:>3}  n = {:>4}  alpha = {:>3}  codegree = {}  tau <= {}  {}",
            p.t,
            p.m,
            w.n,
            w.alpha,
            w.max_codegree,
            fmt_rational(&w.tau_upper),
            st.as_str()
        ));
    }
    let provenance = if rounds > 1 {
        Provenance::FittedEmpirical
    } else {
        Provenance::UserSupplied
    };
    rows.push(Row::new(None, r, "c2", fmt_f64(c2), cfg.seed).provenance(provenance));
    summary.push(format!("c2 = {c2:.6} after {rounds} round(s)"));

    let fit_points: Vec<(usize, f64)> = points.iter().map(|p| (p.t, p.witness.tau_upper_f64())).collect();
    match fit_scaling(&fit_points, r) {
        Ok(fit) => {
            rows.push(Row::new(None, r, "c-hat", fmt_f64(fit.c_hat), cfg.seed).provenance(Provenance::FittedEmpirical));
            rows.push(Row::new(None, r, "spread", fmt_f64(fit.spread()), cfg.seed).provenance(Provenance::FittedEmpirical));
            summary.push(format!("c_hat = {:.6}, spread = {:.6}", fit.c_hat, fit.spread()));
        }
        Err(e) => summary.push(format!("no fit: {e}")),
    }
    Ok((rows, summary))
}

fn outcome_row(o: &IdentityOutcome) -> (String, RowStatus) {
    match o {
        IdentityOutcome::Holds => ("1".into(), RowStatus::Ok),
        IdentityOutcome::Violated { .. } => ("0".into(), RowStatus::Violated),
        IdentityOutcome::Inconclusive => ("na".into(), RowStatus::Inconclusive),
        IdentityOutcome::NotApplicable(_) => ("na".into(), RowStatus::Skipped),
    }
}

fn run_identities(cfg: &ExperimentConfig) -> Result<Output, ExperimentError> {
    let c2 = cfg.c2_guess.expect("checked by the parser");
    let reports = cfg
        .t_list
        .par_iter()
        .map(|&t| {
            let (spec, seed) = instance(cfg, t, c2)?;
            Ok((t, seed, check_blowup_identities(&spec, cfg.node_budget)?))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for (t, seed, rep) in reports {
        for (kind, outcome) in [
            ("identity-codegree", &rep.codegree),
            ("identity-alpha", &rep.alpha),
            ("identity-alpha-any-d", &rep.alpha_any_d),
        ] {
            let (value, st) = outcome_row(outcome);
            rows.push(Row::new(Some(t), cfg.r, kind, value, seed).n(rep.n).status(st));
        }
        summary.push(format!(
            "t = {t:>3}  m = {:>3}  d = {}  codegree {:?}  alpha {:?}  alpha(min(d,r-1)) {:?}",
            rep.m, rep.d, rep.codegree, rep.alpha, rep.alpha_any_d
        ));
    }
    Ok((rows, summary))
}

fn run_steiner_quality(cfg: &ExperimentConfig) -> Result<Output, ExperimentError> {
    let c2 = cfg.c2_guess.expect("checked by the parser");
    let systems = cfg
        .t_list
        .par_iter()
        .map(|&t| {
            let plan = plan_construction(t, cfg.r, c2)?;
            let seed = cfg.instance_seed(t);
            let mut s: SteinerSystem = generate_steiner(plan.m, cfg.r, cfg.restarts, seed)?;
            s.resolve_alpha(cfg.node_budget)?;
            Ok((t, seed, s))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for (t, seed, s) in systems {
        let m = s.points();
        let st = alpha_row_status(s.alpha.status);
        let q = steiner_quality(&s)?;
        rows.push(Row::new(Some(t), cfg.r, "steiner-edges", s.base.edge_count(), seed).n(m));
        rows.push(Row::new(Some(t), cfg.r, "alpha", s.alpha.alpha, seed).n(m).status(st));
        rows.push(Row::new(Some(t), cfg.r, "quality", fmt_f64(q), seed).n(m).status(st));
        summary.push(format!(
            "t = {t:>3}  m = {m:>3}  edges = {:>4}  alpha = {:>3} ({})  quality = {q:.4}",
            s.base.edge_count(),
            s.alpha.alpha,
            s.alpha.status.as_str()
        ));
    }
    Ok((rows, summary))
}

fn run_subsample_stats(cfg: &ExperimentConfig) -> Result<Output, ExperimentError> {
    let c2 = cfg.c2_guess.expect("checked by the parser");
    let m_sub = min_lemma_m(cfg.r, cfg.epsilon)?;
    let results = cfg
        .t_list
        .par_iter()
        .map(|&t| {
            let (spec, seed) = instance(cfg, t, c2)?;
            let h = build_blowup(&spec);
            if m_sub > h.order() {
                return Ok((t, seed, h.order(), None));
            }
            let p = SubsampleParams {
                epsilon: cfg.epsilon,
                m: m_sub,
                max_trials: cfg.trials,
                seed,
            };
            Ok((t, seed, h.order(), Some(acceptance_stats(&h, &p, cfg.trials)?)))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for (t, seed, n, stats) in results {
        match stats {
            None => {
                rows.push(Row::new(Some(t), cfg.r, "acceptance-rate", "na", seed).n(n).status(RowStatus::Skipped));
                summary.push(format!("t = {t:>3}  n = {n}: subsample size {m_sub} exceeds n, skipped"));
            }
            Some(s) => {
                // an admissible m is accepted with probability at least 1/2
                let st = if s.rate() + 3.0 * s.std_error().max(0.5 / (s.trials as f64).sqrt()) >= 0.5 {
                    RowStatus::Ok
                } else {
                    RowStatus::Violated
                };
                rows.push(Row::new(Some(t), cfg.r, "acceptance-rate", fmt_f64(s.rate()), seed).n(n).ell(cfg.r - 1).status(st));
                rows.push(Row::new(Some(t), cfg.r, "subsample-m", m_sub, seed).n(n));
                summary.push(format!(
                    "t = {t:>3}  n = {n}  m = {m_sub}  accepted {}/{} ({:.4} +- {:.4})",
                    s.accepted,
                    s.trials,
                    s.rate(),
                    s.std_error()
                ));
            }
        }
    }
    Ok((rows, summary))
}

/// `T_{r-1}(n, t, r)` for every n in r..=n_max and t in t_list small enough
/// for the exact oracle.
fn run_oracle_sweep(cfg: &ExperimentConfig) -> Result<Output, ExperimentError> {
    let (r, ell) = (cfg.r, cfg.r - 1);
    let cells: Vec<(usize, usize)> = cfg
        .t_list
        .iter()
        .flat_map(|&t| (r..=cfg.n_max).map(move |n| (t, n)))
        .collect();
    let values = cells
        .par_iter()
        .map(|&(t, n)| match t_ell_oracle(n, t, r, ell) {
            Ok(v) => Ok(Some(v)),
            Err(BoundsError::OracleTooLarge { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>, BoundsError>>()?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for (&(t, n), v) in cells.iter().zip(values) {
        let row = Row::new(Some(t), r, "oracle", "", cfg.seed).n(n).ell(ell);
        let row = match v {
            Some(Some(x)) => Row { value: x.to_string(), ..row },
            Some(None) => Row { value: "infeasible".into(), ..row },
            None => Row { value: "na".into(), ..row }.status(RowStatus::Skipped),
        };
        summary.push(format!("T_{ell}(n = {n}, t = {t}, r = {r}) = {}", row.value));
        rows.push(row);
    }
    Ok((rows, summary))
}
