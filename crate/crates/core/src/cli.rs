//! Command-line front end. Results go to standard output or files, logs to
//! standard error.
//!
//! Exit codes: 0 solved (or success), 1 refuted (or a failed check),
//! 2 unknown, 3 runtime error, 64 usage error.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use log::info;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::catalog;
use crate::certifier::{self, CertifyOptions, PolytopeCertificate, PolytopeReport, Verdict};
use crate::io::{self as json_io, rat_map, rat_opt};
use crate::kernel::{kernel_from_polytope, uniform_assignment, Kernel};
use crate::moment;
use crate::polytope::{catalog_polytope, Polytope};
use crate::rational::{self, int};
use crate::Rational;

pub const EXIT_ERROR: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "TORIC_KE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "toric-ke",
    version,
    about = "Exact search for projectively induced Kähler-Einstein metrics on toric manifolds"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Polytope validation and combinatorics.
    #[command(subcommand)]
    Polytope(PolytopeCommand),
    /// Solve or refute the Einstein identity for a Delzant polytope.
    Certify(CertifyArgs),
    /// Verify Einstein normalizations of products of projective spaces.
    VerifyCatalog(CatalogArgs),
    /// Sample the moment map on a logarithmic grid.
    MomentSample(MomentArgs),
    /// Re-check a JSON report written by `certify`.
    Replay {
        file: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum PolytopeCommand {
    /// Half-spaces, vertices, lattice point count, and smoothness.
    Inspect { input: String },
    /// Smoothness check with a witness; exits 1 when not Delzant.
    CheckDelzant { input: String },
    /// Lattice points in lexicographic order.
    Lattice { input: String },
    /// Move a vertex to the origin with edges on the axes; prints JSON.
    Normalize { input: String },
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Polytope JSON file or `catalog:NAME`.
    pub input: String,
    /// Only this integer exponent, without perfect-power probes.
    #[arg(long)]
    pub sigma: Option<u32>,
    /// Wall-clock limit per branch in milliseconds.
    #[arg(long, default_value_t = 60_000)]
    pub budget_ms: u64,
    /// Largest coefficient bound accepted for box subdivision.
    #[arg(long, default_value = "10000")]
    pub amax: String,
    /// Output path for the JSON report; `-` for standard output.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Seed for the numeric multistart.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    /// Only products of this complex dimension.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Global multiple applied to every factor.
    #[arg(long, default_value_t = 1)]
    pub q: u32,
    /// Print JSON instead of a table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct MomentArgs {
    /// Kernel JSON file, or `catalog:NAME` for the polytope's kernel with
    /// all coefficients 1.
    pub input: String,
    /// Grid points per axis.
    #[arg(long, default_value_t = 10)]
    pub grid: usize,
    /// CSV output with columns x_1..x_n, mu_1..mu_n.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// Persisted result of `certify`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyOutput {
    pub polytope: Value,
    pub verdict: Verdict,
    #[serde(with = "rat_opt")]
    pub sigma: Option<Rational>,
    #[serde(with = "rat_opt")]
    pub lambda: Option<Rational>,
    #[serde(with = "rat_map_opt")]
    pub assignment: Option<BTreeMap<String, Rational>>,
    pub certificate: Option<PolytopeCertificate>,
    pub report: PolytopeReport,
    pub options: OptionsRecord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionsRecord {
    pub budget_ms: u64,
    pub amax: String,
    pub seed: u64,
    pub sigma: Option<u32>,
}

mod rat_map_opt {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        m: &Option<BTreeMap<String, Rational>>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct W<'a>(#[serde(with = "rat_map")] &'a BTreeMap<String, Rational>);
        m.as_ref().map(W).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<BTreeMap<String, Rational>>, D::Error> {
        #[derive(Deserialize)]
        struct W(#[serde(with = "rat_map")] BTreeMap<String, Rational>);
        Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
    }
}

pub fn load_polytope(input: &str) -> anyhow::Result<Polytope> {
    if let Some(name) = input.strip_prefix("catalog:") {
        return Ok(catalog_polytope(name)?);
    }
    let text = fs::read_to_string(input).with_context(|| format!("reading {input}"))?;
    let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {input}"))?;
    Ok(json_io::polytope_from_json(&v)?)
}

fn load_kernel(input: &str) -> anyhow::Result<(Kernel, Option<Polytope>)> {
    if let Some(name) = input.strip_prefix("catalog:") {
        let (p, _) = catalog_polytope(name)?.normalized()?;
        let k = kernel_from_polytope(&p)?;
        let k = k.substitute(&uniform_assignment(&k, int(1)))?;
        return Ok((k, Some(p)));
    }
    let text = fs::read_to_string(input).with_context(|| format!("reading {input}"))?;
    let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {input}"))?;
    Ok((json_io::kernel_from_json(&v)?, None))
}

fn point(v: &[u32]) -> String {
    let parts: Vec<String> = v.iter().map(|e| e.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn rpoint(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(rational::format).collect();
    format!("({})", parts.join(", "))
}

fn write_json(path: Option<&Path>, value: &impl Serialize, out: &mut dyn Write) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match path {
        Some(p) if p != Path::new("-") => {
            fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
            info!("wrote {}", p.display());
        }
        _ => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run_polytope(cmd: &PolytopeCommand, out: &mut dyn Write) -> anyhow::Result<i32> {
    match cmd {
        PolytopeCommand::Inspect { input } => {
            let p = load_polytope(input)?;
            writeln!(out, "dimension: {}", p.dim())?;
            writeln!(out, "half-spaces:")?;
            for h in p.halfspaces() {
                let normal: Vec<String> = h.normal().iter().map(|c| c.to_string()).collect();
                writeln!(out, "  [{}] . x <= {}", normal.join(", "), rational::format(h.offset()))?;
            }
            writeln!(out, "vertices: {}", p.vertices().len())?;
            for v in p.vertices() {
                writeln!(out, "  {}", rpoint(v))?;
            }
            match p.lattice_points() {
                Ok(pts) => writeln!(out, "lattice points: {}", pts.len())?,
                Err(e) => writeln!(out, "lattice points: unavailable ({e})")?,
            }
            let (ok, _) = p.is_delzant();
            writeln!(out, "delzant: {ok}")?;
            if ok {
                let divisors: Vec<String> = p.lattice_divisors().iter().map(|d| d.to_string()).collect();
                let listed = if divisors.is_empty() { "none".to_string() } else { divisors.join(", ") };
                writeln!(out, "homothety divisors: {listed}")?;
            }
            Ok(0)
        }
        PolytopeCommand::CheckDelzant { input } => {
            let p = load_polytope(input)?;
            let (ok, witness) = p.is_delzant();
            writeln!(out, "delzant: {ok}")?;
            writeln!(out, "{witness}")?;
            Ok(if ok { 0 } else { 1 })
        }
        PolytopeCommand::Lattice { input } => {
            let p = load_polytope(input)?;
            let pts = match p.lattice_points() {
                Err(crate::Error::NotNormalized) => {
                    info!("listing lattice points of the normalized polytope");
                    p.normalized()?.0.lattice_points()?
                }
                r => r?,
            };
            writeln!(out, "{} lattice points", pts.len())?;
            for pt in pts {
                writeln!(out, "{}", point(&pt))?;
            }
            Ok(0)
        }
        PolytopeCommand::Normalize { input } => {
            let p = load_polytope(input)?;
            let (q, map) = p.normalized()?;
            info!("unimodular map determinant {}", map.determinant());
            write_json(None, &json_io::polytope_to_json(&q), out)?;
            Ok(0)
        }
    }
}

fn run_certify(args: &CertifyArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    let p = load_polytope(&args.input)?;
    let amax = rational::parse(&args.amax).context("--amax must be a rational")?;
    let opts = CertifyOptions {
        budget_ms: args.budget_ms,
        amax,
        seed: args.seed,
        sigma: args.sigma,
        ..Default::default()
    };
    info!(
        "certifying {} (dimension {}), budget {} ms per branch",
        args.input,
        p.dim(),
        opts.budget_ms
    );
    let report = certifier::certify(&p, &opts)?;
    for b in &report.branches {
        info!(
            "branch {:?}: sigma {}, {} unknowns, {} equations, {:?}",
            b.label,
            rational::format(&b.sigma),
            b.unknowns,
            b.equations,
            b.result.verdict()
        );
    }
    let solution = report.solution().cloned();
    let output = CertifyOutput {
        polytope: json_io::polytope_to_json(&p),
        verdict: report.verdict,
        sigma: solution.as_ref().map(|s| s.sigma.clone()),
        lambda: solution.as_ref().map(|s| s.lambda.clone()),
        assignment: solution.as_ref().map(|s| s.assignment.clone()),
        certificate: report.certificate.clone(),
        report,
        options: OptionsRecord {
            budget_ms: args.budget_ms,
            amax: args.amax.clone(),
            seed: args.seed,
            sigma: args.sigma,
        },
    };
    match &output.verdict {
        Verdict::Solved => {
            let s = solution.expect("solved report has a solution");
            writeln!(
                out,
                "solved: sigma = {}, lambda = {}",
                rational::format(&s.sigma),
                rational::format(&s.lambda)
            )?;
            for (k, v) in &s.assignment {
                writeln!(out, "  {k} = {}", rational::format(v))?;
            }
        }
        Verdict::Refuted => writeln!(out, "refuted: {} branches", output.report.branches.len())?,
        Verdict::Unknown => {
            writeln!(out, "unknown")?;
            for b in &output.report.branches {
                if let certifier::CertificationResult::Unknown { reason, .. } = &b.result {
                    writeln!(out, "  sigma {}: {reason}", rational::format(&b.sigma))?;
                }
            }
        }
    }
    if let Some(path) = &args.json {
        write_json(Some(path), &output, out)?;
    }
    Ok(output.verdict.exit_code())
}

fn run_catalog(args: &CatalogArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    if args.q == 0 {
        bail!("--q must be positive");
    }
    let rows = catalog::verify_catalog(args.dim, args.q)?;
    if args.json {
        write_json(None, &rows, out)?;
    } else {
        writeln!(out, "{:<18} {:<12} {:>7} {:>9} {:>9} {:>8}", "manifold", "c", "lambda", "residual", "positive", "N")?;
        for r in &rows {
            let c: Vec<String> = r.c.iter().map(|v| (v * args.q).to_string()).collect();
            writeln!(
                out,
                "{:<18} {:<12} {:>7} {:>9} {:>9} {:>8}",
                r.manifold,
                c.join(","),
                r.lambda.as_ref().map_or("-".into(), rational::format),
                if r.residual_zero { "0" } else { "nonzero" },
                r.positivity,
                r.embedding_dim
            )?;
        }
        for r in rows.iter().filter(|r| r.discrepancy) {
            let printed = r.printed.as_ref().expect("discrepancy implies a printed value");
            writeln!(
                out,
                "note: {} verifies with multiples {:?}; the classification lists {:?}",
                r.manifold, r.c, printed
            )?;
        }
    }
    let ok = rows.iter().all(|r| r.residual_zero && r.positivity);
    Ok(if ok { 0 } else { 1 })
}

fn run_moment(args: &MomentArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    let (k, polytope) = load_kernel(&args.input)?;
    let samples = moment::sample(&k, args.grid)?;
    if let Some(path) = &args.csv {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
        let n = k.n();
        let header: Vec<String> = (1..=n)
            .map(|i| format!("x_{i}"))
            .chain((1..=n).map(|i| format!("mu_{i}")))
            .collect();
        w.write_record(&header)?;
        for s in &samples {
            w.write_record(s.x.iter().chain(&s.mu).map(rational::format))?;
        }
        w.flush()?;
        info!("wrote {} samples to {}", samples.len(), path.display());
    }
    writeln!(out, "{} samples", samples.len())?;
    if let Some(p) = polytope {
        let r = moment::convexity_check(&k, &p, args.grid)?;
        writeln!(out, "all inside polytope: {}", r.all_inside)?;
        writeln!(out, "max vertex distance: {:.3e}", r.max_vertex_distance)?;
        return Ok(if r.all_inside { 0 } else { 1 });
    }
    Ok(0)
}

fn run_replay(file: &Path, out: &mut dyn Write) -> anyhow::Result<i32> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let output: CertifyOutput = serde_json::from_str(&text).context("parsing certify report")?;
    let p = json_io::polytope_from_json(&output.polytope)?;
    let sol = output.report.solution();
    let consistent = output.verdict == output.report.verdict
        && output.certificate == output.report.certificate
        && output.sigma.as_ref() == sol.map(|s| &s.sigma)
        && output.lambda.as_ref() == sol.map(|s| &s.lambda)
        && output.assignment.as_ref() == sol.map(|s| &s.assignment);
    if !consistent {
        writeln!(out, "replay: summary fields disagree with the report")?;
        return Ok(1);
    }
    let ok = certifier::replay_report(&p, &output.report)?;
    writeln!(
        out,
        "replay {}: verdict {:?}",
        if ok { "ok" } else { "failed" },
        output.verdict
    )?;
    Ok(if ok { 0 } else { 1 })
}

/// Executes one parsed command, writing results to `out`.
pub fn run(config: &RunConfig, out: &mut dyn Write) -> anyhow::Result<i32> {
    match &config.command {
        Command::Polytope(cmd) => run_polytope(cmd, out),
        Command::Certify(args) => run_certify(args, out),
        Command::VerifyCatalog(args) => run_catalog(args, out),
        Command::MomentSample(args) => run_moment(args, out),
        Command::Replay { file } => run_replay(file, out),
    }
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.parse().with_context(|| format!("{THREADS_ENV} must be a positive integer"))?;
        if n == 0 {
            bail!("{THREADS_ENV} must be a positive integer");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

/// Parses process arguments, runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .try_init();
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("error: {e:#}");
        return EXIT_USAGE;
    }
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(&config, &mut lock) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String) {
        let config = RunConfig::try_parse_from(std::iter::once("toric-ke").chain(args.iter().copied())).unwrap();
        let mut out = Vec::new();
        let code = run(&config, &mut out).unwrap();
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn lattice_listing() {
        let (code, out) = run_args(&["polytope", "lattice", "catalog:alz2d"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("7 lattice points"));
        assert_eq!(out.lines().count(), 8);
    }

    #[test]
    fn delzant_exit_codes() {
        let (code, _) = run_args(&["polytope", "check-delzant", "catalog:alz2d"]);
        assert_eq!(code, 0);
        let (code, out) = run_args(&["polytope", "check-delzant", "catalog:alz4d_c"]);
        assert_eq!(code, 1);
        assert!(out.starts_with("delzant: false"));
    }

    #[test]
    fn certify_simplex_and_replay() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        let p = path.to_str().unwrap();
        let (code, out) = run_args(&["certify", "catalog:simplex(2,1)", "--json", p]);
        assert_eq!(code, 0);
        assert!(out.contains("lambda = 6"));
        let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(v["verdict"], "solved");
        assert_eq!(v["lambda"], "6");
        let (code, out) = run_args(&["replay", p]);
        assert_eq!(code, 0, "{out}");
    }

    #[test]
    fn replay_detects_tampering() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        let p = path.to_str().unwrap();
        run_args(&["certify", "catalog:square", "--json", p]);
        let text = fs::read_to_string(&path).unwrap().replace("\"a_1_1\": \"1\"", "\"a_1_1\": \"2\"");
        fs::write(&path, text).unwrap();
        let (code, _) = run_args(&["replay", p]);
        assert_eq!(code, 1);
    }

    #[test]
    fn normalize_round_trips() {
        let (code, out) = run_args(&["polytope", "normalize", "catalog:alz2d"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let q = json_io::polytope_from_json(&v).unwrap();
        assert_eq!(q.lattice_points().unwrap().len(), 7);
    }

    #[test]
    fn moment_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let (code, out) = run_args(&["moment-sample", "catalog:square", "--grid", "4", "--csv", path.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.contains("16 samples"));
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("x_1,x_2,mu_1,mu_2"));
        assert_eq!(text.lines().count(), 17);
    }

    #[test]
    fn usage_errors_exceed_two() {
        assert_eq!(main_with_args(["toric-ke", "certify"]), EXIT_USAGE);
        assert_eq!(main_with_args(["toric-ke", "polytope", "inspect", "catalog:nope"]), EXIT_ERROR);
    }
}
