//! Verification driver for `T*h(2n+1)`: each subcommand runs a suite of
//! checks and returns a [`Report`].

mod input;
mod verbs;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

pub use input::{read_metric, MetricFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, ok: bool, detail: impl Into<String>) -> Self {
        let status = if ok { Status::Pass } else { Status::Fail };
        Check { name: name.to_string(), status, detail: detail.into() }
    }

    pub fn inconclusive(name: &str, detail: impl Into<String>) -> Self {
        Check { name: name.to_string(), status: Status::Inconclusive, detail: detail.into() }
    }

    /// A check whose computation itself errored counts as a failure.
    pub fn from_result(name: &str, r: anyhow::Result<(bool, String)>) -> Self {
        match r {
            Ok((ok, detail)) => Check::new(name, ok, detail),
            Err(e) => Check::new(name, false, format!("error: {e:#}")),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub n: usize,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub elapsed_ms: u64,
    pub data: Value,
}

impl Report {
    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn render_text(&self, out: &mut String) {
        out.push_str(&format!("{} n={} seed={}\n", self.command, self.n, self.seed));
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Inconclusive => "????",
            };
            out.push_str(&format!("  {tag}  {:<34} {}\n", c.name, c.detail));
        }
        out.push_str(&format!("  ({} ms)\n", self.elapsed_ms));
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Verb {
    Algebra,
    Aut,
    Reduce,
    Equiv,
    Adinv,
    Complex,
    Kahler,
    Curvature,
    All,
}

impl Verb {
    pub fn name(self) -> &'static str {
        match self {
            Verb::Algebra => "algebra",
            Verb::Aut => "aut",
            Verb::Reduce => "reduce",
            Verb::Equiv => "equiv",
            Verb::Adinv => "adinv",
            Verb::Complex => "complex",
            Verb::Kahler => "kahler",
            Verb::Curvature => "curvature",
            Verb::All => "all",
        }
    }

    /// Verbs that `all` runs.
    pub const SUITE: [Verb; 8] =
        [Verb::Algebra, Verb::Aut, Verb::Reduce, Verb::Equiv, Verb::Adinv, Verb::Complex, Verb::Kahler, Verb::Curvature];
}

#[derive(Debug, Parser)]
#[command(name = "thn", about = "Verification suites for the cotangent Heisenberg algebra T*h(2n+1)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Structure constants, Jacobi, center, derivations
    Algebra(Flags),
    /// Automorphism sampling and closure
    Aut(Flags),
    /// Canonical form of Riemannian metrics
    Reduce(Flags),
    /// Isometry test through canonical forms
    Equiv(Flags),
    /// Ad-invariant metrics and flatness of the pairing
    Adinv(Flags),
    /// Integrable complex structures and normalization to J0
    Complex(Flags),
    /// Closed J0-invariant 2-forms and pseudo-Kähler metrics
    Kahler(Flags),
    /// Levi-Civita connection, Riemann and Ricci tensors
    Curvature(Flags),
    /// Every suite; sweeps n = 1..3 unless --n is given
    All(Flags),
}

#[derive(Debug, Clone, clap::Args)]
pub struct Flags {
    #[arg(long)]
    pub n: Option<i64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
    /// residual tolerance for float computations
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// rational arithmetic where the suite supports it
    #[arg(long)]
    pub exact: bool,
    /// JSON metric {"n", "matrix"} (reduce, equiv, curvature)
    #[arg(long)]
    pub metric: Option<PathBuf>,
    /// second metric for equiv
    #[arg(long)]
    pub other: Option<PathBuf>,
}

/// Settings shared by every suite.
#[derive(Clone, Debug)]
pub struct Ctx {
    pub n: usize,
    pub seed: u64,
    pub tol: f64,
    pub exact: bool,
    pub metric: Option<PathBuf>,
    pub other: Option<PathBuf>,
}

impl Ctx {
    pub fn new(n: usize, seed: u64) -> Self {
        Ctx { n, seed, tol: 1e-9, exact: false, metric: None, other: None }
    }

    /// Independent stream per suite so that adding samples to one suite
    /// leaves the others unchanged.
    pub fn rng(&self, salt: u64) -> impl rand::Rng {
        thn_core::metric::seeded_rng(self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(salt))
    }
}

/// Runs one suite and times it.
pub fn run_verb(verb: Verb, ctx: &Ctx) -> anyhow::Result<Report> {
    let start = Instant::now();
    let (mut checks, data) = match verb {
        Verb::Algebra => verbs::algebra(ctx)?,
        Verb::Aut => verbs::aut(ctx)?,
        Verb::Reduce => verbs::reduce(ctx)?,
        Verb::Equiv => verbs::equiv(ctx)?,
        Verb::Adinv => verbs::adinv(ctx)?,
        Verb::Complex => verbs::complex(ctx)?,
        Verb::Kahler => verbs::kahler(ctx)?,
        Verb::Curvature => verbs::curvature(ctx)?,
        Verb::All => return run_all(ctx),
    };
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(Report { command: verb.name().into(), n: ctx.n, seed: ctx.seed, checks, elapsed_ms: start.elapsed().as_millis() as u64, data })
}

fn run_all(ctx: &Ctx) -> anyhow::Result<Report> {
    let start = Instant::now();
    let suite_ctx = Ctx { metric: None, other: None, ..ctx.clone() };
    let results: Vec<anyhow::Result<Report>> = map_suites(|v| run_verb(v, &suite_ctx));
    let mut checks = Vec::new();
    let mut data = serde_json::Map::new();
    for r in results {
        let r = r?;
        checks.extend(r.checks.into_iter().map(|c| Check { name: format!("{}.{}", r.command, c.name), ..c }));
        data.insert(r.command, r.data);
    }
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(Report { command: "all".into(), n: ctx.n, seed: ctx.seed, checks, elapsed_ms: start.elapsed().as_millis() as u64, data: Value::Object(data) })
}

#[cfg(feature = "parallel")]
fn map_suites<T: Send>(f: impl Fn(Verb) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    Verb::SUITE.par_iter().map(|&v| f(v)).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_suites<T>(f: impl Fn(Verb) -> T) -> Vec<T> {
    Verb::SUITE.iter().map(|&v| f(v)).collect()
}

/// Parses `argv` (including the program name), runs the suites and returns
/// the exit code with everything that should go to stdout.
pub fn run<I, S>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.render().to_string());
        }
    };
    let (verb, flags) = match cli.command {
        Command::Algebra(f) => (Verb::Algebra, f),
        Command::Aut(f) => (Verb::Aut, f),
        Command::Reduce(f) => (Verb::Reduce, f),
        Command::Equiv(f) => (Verb::Equiv, f),
        Command::Adinv(f) => (Verb::Adinv, f),
        Command::Complex(f) => (Verb::Complex, f),
        Command::Kahler(f) => (Verb::Kahler, f),
        Command::Curvature(f) => (Verb::Curvature, f),
        Command::All(f) => (Verb::All, f),
    };
    match execute(verb, &flags) {
        Ok(reports) => {
            let failed = reports.iter().any(Report::failed);
            let out = if flags.json {
                let v = if verb == Verb::All {
                    serde_json::to_string_pretty(&reports)
                } else {
                    serde_json::to_string_pretty(&reports[0])
                };
                v.expect("report serializes") + "\n"
            } else {
                let mut s = String::new();
                for r in &reports {
                    r.render_text(&mut s);
                }
                let fails = reports.iter().flat_map(|r| &r.checks).filter(|c| c.status == Status::Fail).count();
                s.push_str(&format!("{}\n", if fails == 0 { "ok".to_string() } else { format!("{fails} check(s) failed") }));
                s
            };
            (i32::from(failed), out)
        }
        Err(e) => (2, format!("error: {e:#}\n")),
    }
}

fn execute(verb: Verb, flags: &Flags) -> anyhow::Result<Vec<Report>> {
    let file_n = match &flags.metric {
        Some(p) => Some(read_metric(p)?.n),
        None => None,
    };
    let ns: Vec<usize> = match (flags.n, file_n) {
        (Some(n), _) if n < 1 => anyhow::bail!("--n must be at least 1 (got {n})"),
        (Some(n), Some(f)) if n as usize != f => anyhow::bail!("--n {n} does not match the metric file (n = {f})"),
        (Some(n), _) => vec![n as usize],
        (None, Some(f)) => vec![f],
        (None, None) if verb == Verb::All => vec![1, 2, 3],
        (None, None) => vec![1],
    };
    if !(flags.tol > 0.0 && flags.tol.is_finite()) {
        anyhow::bail!("--tol must be positive");
    }
    if flags.other.is_some() && verb != Verb::Equiv {
        anyhow::bail!("--other is only used by equiv");
    }
    ns.into_iter()
        .map(|n| {
            let ctx = Ctx { n, seed: flags.seed, tol: flags.tol, exact: flags.exact, metric: flags.metric.clone(), other: flags.other.clone() };
            run_verb(verb, &ctx)
        })
        .collect()
}
