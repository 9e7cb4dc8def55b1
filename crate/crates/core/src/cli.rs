//! Command-line front end.
//!
//! Every subcommand is first resolved into a [`Request`], which is also what the
//! run manifest records; `replay` feeds a manifest's request back through the
//! same path. Structured output goes to stdout, the manifest to stderr (or to
//! `--manifest FILE`), so stdout stays byte-identical across repeated runs.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::hypmodel::{attracting_audit, mu_multiplier, mu_param_from_multiplier, AuditReport, BlaschkeParam};
use crate::multmap::{independence_certificate, CertificateReport};
use crate::orbits::{orbits_of_exact_period, Config, PeriodicOrbit};
use crate::poly::{set_degree_cap, CentPoly};
use crate::steer::{construct_attracting_traced, SteerOptions, SteerPath};

pub const DEGREE_CAP_VAR: &str = "MULTMAP_DEGREE_CAP";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_DEGREE_CAP: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;
pub const EXIT_ALL_TRIALS_FAILED: i32 = 5;
pub const EXIT_CONSTRUCTION: i32 = 6;

/// Multiplier-map toolkit for centered monic polynomials.
#[derive(Debug, Parser)]
#[command(name = "multmap", version)]
pub struct Cli {
    /// Write the run manifest to this file instead of stderr.
    #[arg(long, global = true, value_name = "FILE")]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the orbits of exact period m of a polynomial.
    Orbits {
        /// CentPoly JSON file; read from stdin when absent.
        #[arg(long, value_name = "FILE")]
        poly: Option<PathBuf>,
        #[arg(long)]
        period: usize,
    },
    /// Run the independence certificate over random configurations.
    Certify {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        periods: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the trial table as CSV instead of the JSON report.
        #[arg(long)]
        csv: bool,
    },
    /// Build a polynomial with attracting cycles of the given periods and audit it.
    Construct {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        periods: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Keep every intermediate step of the steering path.
        #[arg(long)]
        trace: bool,
        /// Print the steering path as CSV instead of JSON.
        #[arg(long)]
        csv: bool,
    },
    /// Blaschke model multiplier and its inverse.
    Blaschke(BlaschkeArgs),
    /// List the attracting cycles of period at most max-period.
    Audit {
        #[arg(long, value_name = "FILE")]
        poly: Option<PathBuf>,
        #[arg(long)]
        max_period: usize,
    },
    /// Re-run the request recorded in a manifest.
    Replay {
        #[arg(value_name = "MANIFEST")]
        path: PathBuf,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct BlaschkeArgs {
    /// Parameter a as "re,im".
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub a: Option<Complex64>,
    /// Multiplier as "re,im".
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub lambda: Option<Complex64>,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected \"re,im\", got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    let z = Complex64::new(parse(re)?, parse(im)?);
    if !z.is_finite() {
        return Err(format!("non-finite value {s:?}"));
    }
    Ok(z)
}

/// A fully resolved invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "inputs", rename_all = "snake_case")]
pub enum Request {
    Orbits { poly: CentPoly, period: usize },
    Certify { n: usize, periods: Vec<usize>, trials: usize, seed: u64, csv: bool },
    Construct { n: usize, periods: Vec<usize>, seed: u64, trace: bool, csv: bool },
    Blaschke { a: Option<Complex64>, lambda: Option<Complex64> },
    Audit { poly: CentPoly, max_period: usize },
}

impl Request {
    pub fn name(&self) -> &'static str {
        match self {
            Request::Orbits { .. } => "orbits",
            Request::Certify { .. } => "certify",
            Request::Construct { .. } => "construct",
            Request::Blaschke { .. } => "blaschke",
            Request::Audit { .. } => "audit",
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Request::Certify { seed, .. } | Request::Construct { seed, .. } => *seed,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: serde_json::Value,
    pub seed: u64,
    pub tool_version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(request: &Request) -> Self {
        let tagged = serde_json::to_value(request).expect("requests always serialize");
        Self {
            command: request.name().to_string(),
            inputs: tagged["inputs"].clone(),
            seed: request.seed(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    pub fn request(&self) -> Result<Request, serde_json::Error> {
        serde_json::from_value(serde_json::json!({ "command": self.command, "inputs": self.inputs }))
    }
}

/// What a request printed and how it ended.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
    pub diagnostic: Option<String>,
}

impl Outcome {
    fn done(stdout: String, code: i32) -> Self {
        Self { stdout, code, diagnostic: None }
    }

    fn failed(err: Error) -> Self {
        Self { stdout: String::new(), code: exit_code(&err), diagnostic: Some(format!("error: {err}")) }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidInput(_) | Error::InvalidConfig(_) | Error::OutsideDisk { .. } => EXIT_BAD_INPUT,
        Error::DegreeCapExceeded { .. } => EXIT_DEGREE_CAP,
        Error::AllTrialsFailed { .. } => EXIT_ALL_TRIALS_FAILED,
        Error::SatelliteNotFound { .. } | Error::PersistenceLost { .. } => EXIT_CONSTRUCTION,
        _ => EXIT_NUMERICAL,
    }
}

#[derive(Serialize)]
struct OrbitsOutput<'a> {
    period: usize,
    orbits: &'a [PeriodicOrbit],
}

#[derive(Serialize)]
struct ConstructOutput<'a> {
    config: &'a Config,
    path: &'a SteerPath,
    audit: &'a AuditReport,
    audit_pass: bool,
}

#[derive(Serialize)]
struct BlaschkeOutput {
    a: Complex64,
    multiplier: Complex64,
    /// `| |μ_a'(0)| - |a| |`.
    modulus_gap: f64,
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("outputs always serialize");
    text.push('\n');
    text
}

/// Runs a resolved request. Deterministic in the request.
pub fn execute(request: &Request) -> Outcome {
    let result = match request {
        Request::Orbits { poly, period } => orbits_of_exact_period(poly, *period)
            .map(|orbits| Outcome::done(to_json(&OrbitsOutput { period: *period, orbits: &orbits }), EXIT_OK)),
        Request::Certify { n, periods, trials, seed, csv } => {
            independence_certificate(*n, periods, *trials, *seed).map(|report| {
                let code = if report.pass { EXIT_OK } else { EXIT_CHECK_FAILED };
                let text = if *csv { certificate_csv(&report) } else { to_json(&report) };
                Outcome::done(text, code)
            })
        }
        Request::Construct { n, periods, seed, trace, csv } => run_construct(*n, periods, *seed, *trace, *csv),
        Request::Blaschke { a, lambda } => run_blaschke(*a, *lambda),
        Request::Audit { poly, max_period } => attracting_audit(poly, *max_period).map(|report| {
            let code = if report.bound_ok { EXIT_OK } else { EXIT_CHECK_FAILED };
            Outcome::done(to_json(&report), code)
        }),
    };
    result.unwrap_or_else(Outcome::failed)
}

fn run_construct(n: usize, periods: &[usize], seed: u64, trace: bool, csv: bool) -> crate::Result<Outcome> {
    let built = construct_attracting_traced(n, periods, seed, &SteerOptions::default())?;
    let max_period = periods.iter().copied().max().unwrap_or(1);
    let audit = attracting_audit(&built.config.poly, max_period)?;
    let mut wanted = periods.to_vec();
    wanted.sort_unstable();
    let audit_pass = audit.bound_ok && audit.periods() == wanted;
    let path = if trace { built.path } else { built.path.endpoints_only() };
    let text = if csv {
        path_csv(&path)
    } else {
        to_json(&ConstructOutput { config: &built.config, path: &path, audit: &audit, audit_pass })
    };
    Ok(Outcome::done(text, if audit_pass { EXIT_OK } else { EXIT_CHECK_FAILED }))
}

fn run_blaschke(a: Option<Complex64>, lambda: Option<Complex64>) -> crate::Result<Outcome> {
    let param = match (a, lambda) {
        (Some(a), None) => BlaschkeParam::new(a)?,
        (None, Some(lambda)) => mu_param_from_multiplier(lambda)?,
        _ => return Err(Error::InvalidInput("give exactly one of --a and --lambda".into())),
    };
    let multiplier = mu_multiplier(param);
    let out = BlaschkeOutput {
        a: param.value(),
        multiplier,
        modulus_gap: (multiplier.norm() - param.value().norm()).abs(),
    };
    Ok(Outcome::done(to_json(&out), EXIT_OK))
}

/// Columns: `seed_index,status,rank,sigma_min,sigma_max`; absent values are empty.
pub fn certificate_csv(report: &CertificateReport) -> String {
    let mut out = String::from("seed_index,status,rank,sigma_min,sigma_max\n");
    let opt = |v: Option<String>| v.unwrap_or_default();
    for t in &report.trials {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            t.seed_index,
            t.status,
            opt(t.rank.map(|r| r.to_string())),
            opt(t.sigma_min.map(|s| s.to_string())),
            opt(t.sigma_max.map(|s| s.to_string())),
        );
    }
    out
}

/// Columns: `step,step_size`, then `lambda_j_re,lambda_j_im` for each marked
/// orbit, then `c_k_re,c_k_im` for each free coefficient.
pub fn path_csv(path: &SteerPath) -> String {
    let mut out = String::from("step,step_size");
    let first = &path.steps[0];
    for j in 0..first.multipliers.len() {
        let _ = write!(out, ",lambda_{j}_re,lambda_{j}_im");
    }
    for k in 0..first.cfg.poly.coeffs().len() {
        let _ = write!(out, ",c_{k}_re,c_{k}_im");
    }
    out.push('\n');
    for (i, step) in path.steps.iter().enumerate() {
        let _ = write!(out, "{i},{}", step.step_size);
        for z in step.multipliers.iter().chain(step.cfg.poly.coeffs()) {
            let _ = write!(out, ",{},{}", z.re, z.im);
        }
        out.push('\n');
    }
    out
}

fn read_poly(path: Option<&Path>) -> Result<CentPoly, String> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?,
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| format!("stdin: {e}"))?;
            s
        }
    };
    serde_json::from_str(&text).map_err(|e| format!("malformed polynomial JSON: {e}"))
}

fn resolve(command: Command) -> Result<Request, String> {
    Ok(match command {
        Command::Orbits { poly, period } => Request::Orbits { poly: read_poly(poly.as_deref())?, period },
        Command::Certify { n, periods, trials, seed, csv } => Request::Certify { n, periods, trials, seed, csv },
        Command::Construct { n, periods, seed, trace, csv } => {
            Request::Construct { n, periods, seed, trace, csv }
        }
        Command::Blaschke(BlaschkeArgs { a, lambda }) => Request::Blaschke { a, lambda },
        Command::Audit { poly, max_period } => Request::Audit { poly: read_poly(poly.as_deref())?, max_period },
        Command::Replay { path } => {
            let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            let manifest: RunManifest =
                serde_json::from_str(&text).map_err(|e| format!("malformed manifest: {e}"))?;
            manifest.request().map_err(|e| format!("manifest does not describe a request: {e}"))?
        }
    })
}

fn apply_degree_cap() -> Result<(), String> {
    match std::env::var(DEGREE_CAP_VAR) {
        Ok(v) => {
            let cap = v.trim().parse::<usize>().map_err(|e| format!("{DEGREE_CAP_VAR}={v:?}: {e}"))?;
            set_degree_cap(cap);
            Ok(())
        }
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(e) => Err(format!("{DEGREE_CAP_VAR}: {e}")),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_BAD_INPUT } else { EXIT_OK };
        }
    };
    if let Err(msg) = apply_degree_cap() {
        eprintln!("error: {msg}");
        return EXIT_BAD_INPUT;
    }
    let request = match resolve(cli.command) {
        Ok(r) => r,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_BAD_INPUT;
        }
    };

    let manifest = serde_json::to_string(&RunManifest::new(&request)).expect("manifests always serialize");
    match &cli.manifest {
        Some(path) => {
            if let Err(e) = std::fs::write(path, format!("{manifest}\n")) {
                eprintln!("error: {}: {e}", path.display());
                return EXIT_BAD_INPUT;
            }
        }
        None => eprintln!("{manifest}"),
    }

    let outcome = execute(&request);
    print!("{}", outcome.stdout);
    if let Some(msg) = &outcome.diagnostic {
        eprintln!("{msg}");
    }
    outcome.code
}
