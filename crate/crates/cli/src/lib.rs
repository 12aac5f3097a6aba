//! The `colehopf` command line.
//!
//! Exit codes: 0 pass, 1 verification or condition failed, 2 parse or
//! configuration error, 3 numeric failure.

pub mod problem;

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use colehopf::catalog::{build_case, list_cases};
use colehopf::expr::{differentiate, simplify};
use colehopf::ode::{CoeffFn, Ivp};
use colehopf::pairing::{synth_nonlinear, theorem_check, LinearOde, NonlinearOde, Transform, THEOREM_SAMPLES, THEOREM_TOL};
use colehopf::verify::{verify_pair, VerificationReport, VerifyOptions, DEFAULT_SAMPLES, DEFAULT_TOL};
use thiserror::Error;

use problem::{parse_expr, show, ProblemFile};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Header of the verification CSV.
pub const CSV_HEADER: &str = "x,phi,dphi,psi,dpsi,residual,masked";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] colehopf::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numeric() => EXIT_NUMERIC,
            CliError::Io { .. } | CliError::Config(_) | CliError::Core(_) => EXIT_CONFIG,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "colehopf", version, about = "Pair nonlinear and linear second-order ODEs through psi = P + Q phi'/phi")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Expression tools.
    Expr {
        #[command(subcommand)]
        command: ExprCommand,
    },
    /// Pairing synthesis, theorem checks and verification.
    Pair {
        #[command(subcommand)]
        command: PairCommand,
    },
    /// The built-in cases.
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
}

#[derive(Debug, Subcommand)]
enum ExprCommand {
    /// Print the derivative with respect to x.
    Diff {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
}

#[derive(Debug, Subcommand)]
enum PairCommand {
    /// Print S, V, W, R for given P, Q, K, U.
    Synth(SynthArgs),
    /// Test the intrinsic condition on S, V, W.
    Check(CheckArgs),
    /// Integrate the linear equation and check the nonlinear one.
    Verify(VerifyArgs),
}

#[derive(Debug, Subcommand)]
enum CatalogCommand {
    /// List the registered cases and their parameters.
    List,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long = "P", allow_hyphen_values = true)]
    p: String,
    #[arg(long = "Q", allow_hyphen_values = true, default_value = "1")]
    q: String,
    #[arg(long = "K", allow_hyphen_values = true, default_value = "0")]
    k: String,
    #[arg(long = "U", allow_hyphen_values = true)]
    u: String,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    lambda: f64,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long = "S", allow_hyphen_values = true)]
    s: String,
    #[arg(long = "V", allow_hyphen_values = true)]
    v: String,
    #[arg(long = "W", allow_hyphen_values = true)]
    w: String,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    lambda: f64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_interval)]
    interval: (f64, f64),
    #[arg(long, default_value_t = THEOREM_SAMPLES)]
    n: usize,
    #[arg(long, default_value_t = THEOREM_TOL)]
    tol: f64,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Problem file (TOML).
    #[arg(long, conflicts_with = "case", required_unless_present = "case")]
    file: Option<PathBuf>,
    /// Name of a built-in case.
    #[arg(long)]
    case: Option<String>,
    /// Parameter binding `name=value` (repeatable).
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    /// Verification interval `a:b`; the initial values are then given at `a`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_interval)]
    interval: Option<(f64, f64)>,
    /// Initial values `phi,dphi`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_ic)]
    ic: Option<(f64, f64)>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Write every sample to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn parse_interval(text: &str) -> Result<(f64, f64), String> {
    let (a, b) = text.split_once(':').ok_or_else(|| format!("expected a:b, got {text:?}"))?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if !(a < b) {
        return Err(format!("interval needs a < b, got {a}:{b}"));
    }
    Ok((a, b))
}

fn parse_ic(text: &str) -> Result<(f64, f64), String> {
    let (a, b) = text.split_once(',').ok_or_else(|| format!("expected v0,v1, got {text:?}"))?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    Ok((a, b))
}

fn parse_param(text: &str) -> Result<(String, f64), String> {
    let (k, v) = text.split_once('=').ok_or_else(|| format!("expected name=value, got {text:?}"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("{v:?}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let result = match cli.command {
        Command::Expr { command: ExprCommand::Diff { expr } } => expr_diff(&expr, out),
        Command::Pair { command } => match command {
            PairCommand::Synth(a) => pair_synth(&a, out),
            PairCommand::Check(a) => pair_check(&a, out),
            PairCommand::Verify(a) => pair_verify(&a, out),
        },
        Command::Catalog { command: CatalogCommand::List } => catalog_list(out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn stdout_err(e: io::Error) -> CliError {
    CliError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    }
}

fn expr_diff(text: &str, out: &mut dyn Write) -> Result<i32, CliError> {
    let e = parse_expr("expression", text)?;
    writeln!(out, "{}", simplify(&differentiate(&e))).map_err(stdout_err)?;
    Ok(EXIT_PASS)
}

fn symbolic(what: &str, text: &str) -> Result<CoeffFn<f64>, CliError> {
    Ok(CoeffFn::symbolic(parse_expr(what, text)?))
}

fn print_nonlinear(nl: &NonlinearOde<f64>, out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "S = {}", show(&nl.s))?;
    writeln!(out, "V = {}", show(&nl.v))?;
    writeln!(out, "W = {}", show(&nl.w))?;
    writeln!(out, "R = {}", show(&nl.r))
}

fn pair_synth(a: &SynthArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (p, q, k, u) = (symbolic("P", &a.p)?, symbolic("Q", &a.q)?, symbolic("K", &a.k)?, symbolic("U", &a.u)?);
    let nl = synth_nonlinear(&p, &q, &k, &u, a.lambda).map_err(|e| match e {
        colehopf::Error::InvalidArgument(m) => CliError::Config(m),
        e => e.into(),
    })?;
    print_nonlinear(&nl, out).map_err(stdout_err)?;
    Ok(EXIT_PASS)
}

fn pair_check(a: &CheckArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (s, v, w) = (symbolic("S", &a.s)?, symbolic("V", &a.v)?, symbolic("W", &a.w)?);
    let cert = theorem_check(&s, &v, &w, None, a.lambda, a.interval, a.n, a.tol)?;
    let mut put = || -> io::Result<()> {
        writeln!(out, "satisfied = {}", cert.satisfied)?;
        writeln!(out, "max_delta = {:.16e}", cert.max_delta)?;
        writeln!(out, "max_S = {:.16e}", cert.max_s)?;
        writeln!(out, "tol = {:e}", cert.tol)?;
        writeln!(out, "samples = {}", cert.nodes.len())?;
        if let (Some(p), Some(u), Some(k)) = (&cert.p, &cert.u, &cert.k) {
            writeln!(out, "P = {}", show(p))?;
            writeln!(out, "U = {}", show(u))?;
            writeln!(out, "K = {}", show(k))?;
        }
        Ok(())
    };
    put().map_err(stdout_err)?;
    Ok(if cert.satisfied { EXIT_PASS } else { EXIT_FAIL })
}

struct Setup {
    name: String,
    linear: LinearOde<f64>,
    transform: Transform<f64>,
    nonlinear: NonlinearOde<f64>,
    ivp: Ivp<f64>,
}

fn setup(a: &VerifyArgs) -> Result<Setup, CliError> {
    let params: BTreeMap<String, f64> = a.params.iter().cloned().collect();
    let mut s = if let Some(path) = &a.file {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let p = ProblemFile::from_toml(&text)?.build(&params)?;
        Setup {
            name: p.name,
            linear: p.linear,
            transform: p.transform,
            nonlinear: p.nonlinear,
            ivp: p.ivp,
        }
    } else {
        let name = a.case.as_deref().expect("clap requires --file or --case");
        let c = build_case(name, &params)?;
        let ivp = c.ivp().clone();
        Setup {
            name: c.name,
            linear: c.linear,
            transform: c.transform,
            nonlinear: c.nonlinear,
            ivp,
        }
    };
    if let Some((lo, hi)) = a.interval {
        s.ivp = Ivp::new(lo, hi, s.ivp.state.clone());
    }
    if let Some((v0, v1)) = a.ic {
        s.ivp.state = vec![v0, v1];
    }
    Ok(s)
}

fn pair_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if !(a.tol > 0.0) || a.samples < 2 {
        return Err(CliError::Config("need --tol > 0 and --samples >= 2".into()));
    }
    let s = setup(a)?;
    s.ivp.validate()?;
    let opts = VerifyOptions::default().with_tol(a.tol).with_samples(a.samples);
    let report = verify_pair(&s.linear, &s.transform, &s.nonlinear, &s.ivp, &opts)?;
    if let Some(path) = &a.csv {
        let mut file = io::BufWriter::new(fs::File::create(path).map_err(io_err(path))?);
        write_csv(&report, &mut file)
            .and_then(|_| file.flush())
            .map_err(io_err(path))?;
    }
    summarize(&s, &report, out).map_err(stdout_err)?;
    Ok(if report.passed { EXIT_PASS } else { EXIT_FAIL })
}

fn summarize(s: &Setup, r: &VerificationReport<f64>, out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "problem = {}", s.name)?;
    writeln!(out, "interval = [{}, {}]", s.ivp.lo, s.ivp.hi)?;
    writeln!(out, "initial = {} at x = {}", fmt_state(&s.ivp.state), s.ivp.origin)?;
    writeln!(out, "samples = {}", r.samples.len())?;
    writeln!(out, "masked = {} ({:.2}%, {})", r.masked, 100.0 * r.masked_fraction(), r.mask_reason)?;
    writeln!(out, "max_residual = {:.6e}", r.max_residual)?;
    writeln!(out, "max_abs_residual = {:.6e}", r.max_abs_residual)?;
    writeln!(out, "rms_residual = {:.6e}", r.rms_residual)?;
    writeln!(out, "tol = {:e}", r.tol)?;
    if r.inconclusive {
        writeln!(out, "inconclusive = true")?;
    }
    writeln!(out, "result = {}", if r.passed { "PASS" } else { "FAIL" })
}

fn fmt_state(state: &[f64]) -> String {
    state.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// Writes every sample of `report` under [`CSV_HEADER`], 17 significant digits.
pub fn write_csv(report: &VerificationReport<f64>, w: &mut dyn Write) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for s in &report.samples {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            s.x,
            s.phi,
            s.dphi,
            s.psi,
            s.dpsi,
            s.scaled,
            u8::from(s.masked)
        )?;
    }
    Ok(())
}

fn catalog_list(out: &mut dyn Write) -> Result<i32, CliError> {
    for c in list_cases() {
        let params = c
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ");
        writeln!(out, "{:<18} {:<16} {}", c.name, params, c.summary).map_err(stdout_err)?;
    }
    Ok(EXIT_PASS)
}
