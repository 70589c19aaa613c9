use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use codegree::bounds::{ConstantName, Provenance};
use codegree::experiment::{self, ExperimentConfig, CSV_HEADER};
use codegree::indep::DEFAULT_NODE_BUDGET;
use codegree::io::write_with_metadata;
use codegree::sampling::{acceptance_stats, min_lemma_m};
use codegree::steiner::{generate_steiner, SteinerOptions};
use codegree::{
    alpha_exact, alpha_exhaustive, alpha_greedy, build_blowup, read_document, t_ell_oracle, BlowupSpec, BoundsReport,
    ConstantsLedger, SteinerSystem, SubsampleParams, TauWitness,
};

const EXIT_USAGE: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;
const EXIT_INVARIANT: u8 = 4;

const AFTER_HELP: &str = "\
Exit codes: 0 success, 2 usage or input error, 3 an inconclusive result is
present, 4 an internal invariant was violated.

CSV columns (bounds, oracle, experiment):
  t,r,ell,n,value,kind,provenance,status,seed,version
Empty cells mean not applicable. Fractions are written exactly as p/q.";

#[derive(Parser)]
#[command(name = "codegree", version, about = "Codegree Turán constructions, solvers and experiments", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Exact,
    Exhaustive,
    Greedy,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a partial Steiner (m, r, r-1)-system by randomized greedy packing.
    GenSteiner {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        r: usize,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Blow each Steiner point up into a class of d vertices.
    Blowup {
        steiner: PathBuf,
        #[arg(long)]
        d: usize,
        /// Add the extra edges used for even r.
        #[arg(long)]
        augment: bool,
        /// Also compute a tau witness for this t (written next to --out).
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        node_budget: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Independence number of a hypergraph file.
    Alpha {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        method: Method,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        node_budget: u64,
    },
    /// Maximum and minimum ell-degree (default ell = r-1, the codegree).
    Codegree {
        file: PathBuf,
        #[arg(long)]
        ell: Option<usize>,
    },
    /// Draw an m-subset whose codegree density stays within epsilon of the host's.
    Subsample {
        file: PathBuf,
        #[arg(long)]
        epsilon: f64,
        /// Defaults to the least m satisfying the size conditions.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 100)]
        max_trials: usize,
        #[arg(long)]
        seed: u64,
        /// Run this many independent trials and report the acceptance rate.
        #[arg(long)]
        stats: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classical Turán bounds and, given constants, the tau envelope.
    Bounds {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        a2: Option<f64>,
        #[arg(long)]
        b1: Option<f64>,
        #[arg(long)]
        c0: Option<f64>,
        #[arg(long)]
        c1: Option<f64>,
        #[arg(long)]
        c2: Option<f64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Exact T_ell(n, t, r) by exhaustive search (tiny n only).
    Oracle {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Run an experiment described by a key = value config file.
    Experiment {
        config: PathBuf,
        /// CSV destination; defaults to <output_dir>/<mode>.csv.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Status {
    Ok,
    Inconclusive,
    Violation,
}

/// An error that indicates a bug rather than bad input.
#[derive(Debug)]
struct InvariantViolation(String);

impl std::fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "internal invariant violated: {}", self.0)
    }
}

impl std::error::Error for InvariantViolation {}

fn read_hypergraph_file(path: &Path) -> Result<codegree::Document> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    read_document(&text).with_context(|| format!("{}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn csv_row(t: impl ToString, r: usize, ell: impl ToString, n: impl ToString, value: impl ToString, kind: &str, provenance: &str, status: &str, seed: impl ToString) -> String {
    format!(
        "{},{r},{},{},{},{kind},{provenance},{status},{},{}",
        t.to_string(),
        ell.to_string(),
        n.to_string(),
        value.to_string(),
        seed.to_string(),
        experiment::VERSION
    )
}

fn frac(q: &codegree::Rational) -> String {
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn gen_steiner(m: usize, r: usize, restarts: usize, seed: u64, out: &Path) -> Result<Status> {
    let s = generate_steiner(m, r, restarts, seed)?;
    if !codegree::verify_steiner(&s.base) {
        return Err(InvariantViolation("generated system is not a partial Steiner system".into()).into());
    }
    write_file(out, &write_with_metadata(&s.base, &s.metadata()))?;
    println!(
        "m = {m}, r = {r}, edges = {}, alpha = {} ({}, {})",
        s.base.edge_count(),
        s.alpha.alpha,
        s.alpha.method.as_str(),
        s.alpha.status.as_str()
    );
    Ok(if s.alpha.is_exact() { Status::Ok } else { Status::Inconclusive })
}

fn witness_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".witness.csv");
    out.with_file_name(name)
}

fn blowup(steiner: &Path, d: usize, augment: bool, t: Option<usize>, node_budget: u64, out: &Path) -> Result<Status> {
    let doc = read_hypergraph_file(steiner)?;
    let opts = SteinerOptions { node_budget, ..SteinerOptions::default() };
    let system = SteinerSystem::from_document(&doc, &opts)?;
    let spec = BlowupSpec::new(system, d, augment)?;
    let h = build_blowup(&spec);
    if h.edge_count() as u64 != spec.expected_edge_count() {
        return Err(InvariantViolation(format!(
            "blowup has {} edges, expected {}",
            h.edge_count(),
            spec.expected_edge_count()
        ))
        .into());
    }
    write_file(out, &write_with_metadata(&h, &spec.metadata()))?;
    println!("n = {}, edges = {}, max codegree = {}", h.order(), h.edge_count(), h.max_codegree());
    let Some(t) = t else {
        return Ok(Status::Ok);
    };
    let alpha = alpha_exact(&h, node_budget)?;
    let w = TauWitness::new(&h, t, &alpha)?;
    let status = match (alpha.is_exact(), w.valid) {
        (false, _) => "inconclusive",
        (true, true) => "ok",
        (true, false) => "invalid",
    };
    let row = csv_row(t, w.r, w.r - 1, w.n, frac(&w.tau_upper), "witness", "derived", status, spec.system.seed);
    let record = format!("{CSV_HEADER}\n{row}\n");
    write_file(&witness_path(out), &record)?;
    println!(
        "t = {t}: alpha = {} ({}), tau <= {}, valid = {}",
        w.alpha,
        w.alpha_status.as_str(),
        frac(&w.tau_upper),
        w.valid
    );
    Ok(if alpha.is_exact() { Status::Ok } else { Status::Inconclusive })
}

fn alpha(file: &Path, method: Method, seed: u64, node_budget: u64) -> Result<Status> {
    let h = read_hypergraph_file(file)?.hypergraph;
    let res = match method {
        Method::Exact => alpha_exact(&h, node_budget)?,
        Method::Exhaustive => alpha_exhaustive(&h)?,
        Method::Greedy => alpha_greedy(&h, seed),
    };
    if !codegree::is_independent(&h, &res.witness)? || res.witness.len() != res.alpha {
        return Err(InvariantViolation("alpha witness is not an independent set of the reported size".into()).into());
    }
    println!("method,status,alpha,nodes,witness");
    println!(
        "{},{},{},{},{}",
        res.method.as_str(),
        res.status.as_str(),
        res.alpha,
        res.nodes,
        res.witness.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
    );
    Ok(if res.status == codegree::AlphaStatus::Inconclusive {
        Status::Inconclusive
    } else {
        Status::Ok
    })
}

fn codegree_cmd(file: &Path, ell: Option<usize>) -> Result<Status> {
    let h = read_hypergraph_file(file)?.hypergraph;
    let ell = ell.unwrap_or(h.uniformity() - 1);
    let idx = h.degree_index(ell)?;
    let (max, min) = (idx.max(), idx.min()?);
    let normalized = max as f64 / (h.order() - ell) as f64;
    println!("n,r,ell,edges,max_degree,min_degree,normalized_max");
    println!("{},{},{ell},{},{max},{min},{normalized:.6}", h.order(), h.uniformity(), h.edge_count());
    Ok(Status::Ok)
}

#[allow(clippy::too_many_arguments)]
fn subsample_cmd(file: &Path, epsilon: f64, m: Option<usize>, max_trials: usize, seed: u64, stats: Option<usize>, out: Option<&Path>) -> Result<Status> {
    let h = read_hypergraph_file(file)?.hypergraph;
    let m = match m {
        Some(m) => m,
        None => min_lemma_m(h.uniformity(), epsilon)?,
    };
    let p = SubsampleParams { epsilon, m, max_trials, seed };
    if let Some(trials) = stats {
        let s = acceptance_stats(&h, &p, trials)?;
        println!(
            "{{\"n\": {}, \"m\": {m}, \"epsilon\": {epsilon}, \"trials\": {}, \"accepted\": {}, \"rate\": {:.6}, \"std_error\": {:.6}, \"host_density\": {:.6}, \"max_sub_density\": {:.6}, \"seed\": {seed}}}",
            h.order(),
            s.trials,
            s.accepted,
            s.rate(),
            s.std_error(),
            s.host_density,
            s.max_sub_density
        );
        return Ok(Status::Ok);
    }
    let s = codegree::subsample(&h, &p)?;
    if let Some(out) = out {
        let meta = vec![
            ("kind".to_string(), "subsample".to_string()),
            ("epsilon".into(), epsilon.to_string()),
            ("seed".into(), seed.to_string()),
            ("trial".into(), s.trials.to_string()),
            (
                "vertices".into(),
                s.vertices.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "),
            ),
        ];
        write_file(out, &write_with_metadata(&s.sub, &meta))?;
    }
    println!(
        "{{\"n\": {}, \"m\": {m}, \"epsilon\": {epsilon}, \"trials\": {}, \"host_codegree\": {}, \"sub_codegree\": {}, \"host_density\": {:.6}, \"sub_density\": {:.6}, \"seed\": {seed}}}",
        h.order(),
        s.trials,
        s.host_codegree,
        s.sub_codegree,
        s.host_density,
        s.sub_density
    );
    Ok(Status::Ok)
}

fn bounds_cmd(t: usize, r: usize, constants: [(ConstantName, Option<f64>); 5]) -> Result<Status> {
    let mut ledger = ConstantsLedger::empty(r);
    for (name, value) in constants {
        if let Some(v) = value {
            ledger.set(name, v, Provenance::UserSupplied)?;
        }
    }
    ledger.derive();
    for issue in ledger.inconsistencies(1e-9) {
        eprintln!("warning: inconsistent constants: {issue}");
    }
    let rep = BoundsReport::new(t, r, &ledger)?;
    println!("{CSV_HEADER}");
    println!("{}", csv_row(t, r, "", "", frac(&rep.turan_lower), "classical-lo", "derived", "ok", ""));
    println!("{}", csv_row(t, r, "", "", frac(&rep.turan_upper), "classical-hi", "derived", "ok", ""));
    let prov = |c: Option<codegree::bounds::Constant>| c.map(|c| c.provenance.as_str()).unwrap_or("derived");
    if let (Some(lo), Some(hi)) = (rep.tau_lower, rep.tau_upper) {
        println!("{}", csv_row(t, r, r - 1, "", format!("{lo:.9}"), "tau-lo", prov(ledger.c1), "ok", ""));
        println!("{}", csv_row(t, r, r - 1, "", format!("{hi:.9}"), "tau-hi", prov(ledger.c2), "ok", ""));
    }
    Ok(Status::Ok)
}

fn oracle_cmd(n: usize, t: usize, r: usize, ell: usize) -> Result<Status> {
    let value = match t_ell_oracle(n, t, r, ell)? {
        Some(v) => v.to_string(),
        None => "infeasible".into(),
    };
    println!("{CSV_HEADER}");
    println!("{}", csv_row(t, r, ell, n, value, "oracle", "derived", "ok", ""));
    Ok(Status::Ok)
}

fn experiment_cmd(config: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<Status> {
    let mut cfg = ExperimentConfig::read(config).with_context(|| format!("{}", config.display()))?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let report = experiment::run(&cfg)?;
    let path = match out {
        Some(p) => p.to_path_buf(),
        None => cfg.output_dir.join(format!("{}.csv", cfg.mode.as_str())),
    };
    write_file(&path, &report.to_csv())?;
    for line in &report.summary {
        println!("{line}");
    }
    println!("wrote {} rows to {}", report.rows.len(), path.display());
    Ok(if report.has_violation() {
        Status::Violation
    } else if report.has_inconclusive() {
        Status::Inconclusive
    } else {
        Status::Ok
    })
}

fn run(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::GenSteiner { m, r, restarts, seed, out } => gen_steiner(m, r, restarts, seed, &out),
        Command::Blowup { steiner, d, augment, t, node_budget, out } => blowup(&steiner, d, augment, t, node_budget, &out),
        Command::Alpha { file, method, seed, node_budget } => alpha(&file, method, seed, node_budget),
        Command::Codegree { file, ell } => codegree_cmd(&file, ell),
        Command::Subsample { file, epsilon, m, max_trials, seed, stats, out } => {
            subsample_cmd(&file, epsilon, m, max_trials, seed, stats, out.as_deref())
        }
        Command::Bounds { t, r, a2, b1, c0, c1, c2, format: Format::Csv } => bounds_cmd(
            t,
            r,
            [
                (ConstantName::A2, a2),
                (ConstantName::B1, b1),
                (ConstantName::C0, c0),
                (ConstantName::C1, c1),
                (ConstantName::C2, c2),
            ],
        ),
        Command::Oracle { n, t, r, ell, format: Format::Csv } => oracle_cmd(n, t, r, ell),
        Command::Experiment { config, out, seed, format: Format::Csv } => experiment_cmd(&config, out.as_deref(), seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Inconclusive) => ExitCode::from(EXIT_INCONCLUSIVE),
        Ok(Status::Violation) => ExitCode::from(EXIT_INVARIANT),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<InvariantViolation>().is_some() {
                ExitCode::from(EXIT_INVARIANT)
            } else {
                ExitCode::from(EXIT_USAGE)
            }
        }
    }
}
