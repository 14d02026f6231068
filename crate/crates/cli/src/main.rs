use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use blockdom::certificate::{assemble_and_verify, Outcome};
use blockdom::comparison::DiagonalSource;
use blockdom::{
    block_comparison, certify, full_report, hinf_norm_resolvent, CertifyOptions, ExtendedReal,
    HinfOptions, Strategy, TestReport,
};
use blockdom_cli::format::{matrix_table, sig6};
use blockdom_cli::{CertificateFile, ErrorRecord, Exit, ProblemError, ProblemFile, Status};
use clap::{Args, Parser, Subcommand};
use nalgebra as na;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "blockdom",
    version,
    about = "Block-diagonal Lyapunov certificates for partitioned matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a block-diagonal Lyapunov certificate.
    Certify(RunArgs),
    /// Print the block comparison matrix.
    Compare(CompareArgs),
    /// H-infinity norm of the resolvent of a matrix or diagonal block.
    Hinf(HinfArgs),
    /// Re-check a certificate file against its problem file.
    Verify(VerifyArgs),
    /// Run every route and print the outcome table.
    Report(RunArgs),
}

#[derive(Args)]
struct Common {
    /// Problem file (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Write machine-readable output here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress human-readable output.
    #[arg(long)]
    quiet: bool,
    /// Relative tolerance of the H-infinity bisection.
    #[arg(long, allow_negative_numbers = true)]
    hinf_tol: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Certification route (auto, a, b, c or prop4); defaults to auto.
    #[arg(long, value_parser = parse_strategy)]
    strategy: Option<Strategy>,
    /// Uniform epsilon for the Riccati tests.
    #[arg(long, allow_negative_numbers = true)]
    epsilon: Option<f64>,
    /// Relative strictness margin for matrix inequalities.
    #[arg(long, allow_negative_numbers = true)]
    margin: Option<f64>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct HinfArgs {
    /// Problem file; the whole matrix is used unless --block is given.
    #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
    input: Option<PathBuf>,
    /// Inline matrix as JSON rows, e.g. '[[-2]]'.
    #[arg(long)]
    matrix: Option<String>,
    /// 1-based diagonal block of the problem file.
    #[arg(long, requires = "input")]
    block: Option<usize>,
    /// Relative tolerance of the H-infinity bisection.
    #[arg(long, allow_negative_numbers = true)]
    hinf_tol: Option<f64>,
    /// Write machine-readable output here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress human-readable output.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Problem file the certificate was issued for.
    #[arg(long)]
    input: PathBuf,
    /// Certificate file produced by `certify`.
    #[arg(long)]
    certificate: PathBuf,
    /// Relative strictness margin for matrix inequalities.
    #[arg(long, allow_negative_numbers = true)]
    margin: Option<f64>,
    /// Suppress human-readable output.
    #[arg(long)]
    quiet: bool,
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse()
}

/// An error with the exit code it maps to.
struct Failure {
    exit: Exit,
    error: anyhow::Error,
}

impl Failure {
    fn input(error: impl Into<anyhow::Error>) -> Self {
        Self {
            exit: Exit::InputError,
            error: error.into(),
        }
    }

    fn record(&self) -> ErrorRecord {
        let msg = format!("{:#}", self.error);
        match self.exit {
            Exit::NumericalFailure => ErrorRecord::numerical(msg),
            _ => ErrorRecord::input(msg),
        }
    }
}

impl From<ProblemError> for Failure {
    fn from(e: ProblemError) -> Self {
        let exit = match &e {
            ProblemError::Matrix(inner) => Exit::for_error(inner),
            _ => Exit::InputError,
        };
        Self {
            exit,
            error: e.into(),
        }
    }
}

impl From<blockdom::Error> for Failure {
    fn from(e: blockdom::Error) -> Self {
        Self {
            exit: Exit::for_error(&e),
            error: e.into(),
        }
    }
}

fn write_out(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(Failure::input)
}

/// Human output goes to stdout, unless machine output already occupies it.
fn say(quiet: bool, to_stderr: bool, text: &str) {
    if quiet {
        return;
    }
    if to_stderr {
        eprintln!("{text}");
    } else {
        println!("{text}");
    }
}

fn positive(name: &str, v: Option<f64>) -> Result<Option<f64>, Failure> {
    match v {
        Some(x) if !(x.is_finite() && x > 0.0) => Err(Failure::input(anyhow::anyhow!(
            "{name} must be positive, got {x}"
        ))),
        _ => Ok(v),
    }
}

fn hinf_options(tol: Option<f64>) -> Result<HinfOptions<f64>, Failure> {
    Ok(match positive("hinf-tol", tol)? {
        Some(t) => HinfOptions::with_tol(t),
        None => HinfOptions::default(),
    })
}

fn resolve(
    args: &RunArgs,
    problem: &ProblemFile,
) -> Result<(Strategy, CertifyOptions<f64>), Failure> {
    let o = &problem.options;
    let strategy = match (args.strategy, &o.strategy) {
        (Some(s), _) => s,
        (None, Some(s)) => s
            .parse()
            .map_err(|e: String| Failure::input(anyhow::anyhow!(e)))?,
        (None, None) => Strategy::Auto,
    };
    let mut opts = CertifyOptions {
        epsilon: positive("epsilon", args.epsilon.or(o.epsilon))?,
        hinf: hinf_options(args.common.hinf_tol.or(o.hinf_tol))?,
        ..CertifyOptions::default()
    };
    if let Some(m) = args.margin.or(o.margin) {
        if !(m.is_finite() && m >= 0.0) {
            return Err(Failure::input(anyhow::anyhow!(
                "margin must be nonnegative, got {m}"
            )));
        }
        opts.margin = m;
    }
    Ok((strategy, opts))
}

fn strategy_name(s: Strategy) -> &'static str {
    match s {
        Strategy::Auto => "auto",
        Strategy::A => "a",
        Strategy::B => "b",
        Strategy::C => "c",
        Strategy::Prop4 => "prop4",
    }
}

fn route_table(report: &TestReport<f64>) -> String {
    let mut lines = vec![format!(
        "{:<7}{:<9}{:>12}  detail",
        "route", "outcome", "time"
    )];
    for r in &report.routes {
        let detail = match &r.outcome {
            Outcome::Pass(c) => format!("lyapunov margin {}", sig6(c.lyapunov_margin)),
            Outcome::Fail(f) => f.to_string(),
            Outcome::Error(e) => e.to_string(),
        };
        let ms = r.elapsed.as_secs_f64() * 1e3;
        lines.push(format!(
            "{:<7}{:<9}{:>9} ms  {detail}",
            r.method.name(),
            r.outcome.label(),
            sig6(ms)
        ));
    }
    lines.join("\n")
}

fn summary(report: &TestReport<f64>) -> String {
    match report.certificate() {
        Some(c) => format!(
            "certified via {} (lyapunov margin {}, min eigenvalue of P {})",
            c.strategy,
            sig6(c.lyapunov_margin),
            sig6(c.min_block_eigenvalue)
        ),
        None => "not certified (inconclusive)".into(),
    }
}

fn run_routes(args: &RunArgs, all: bool) -> Result<Exit, Failure> {
    let problem = match ProblemFile::load(&args.common.input) {
        Ok(p) => p,
        Err(e) => {
            let f = Failure::from(e);
            if let Some(out) = &args.common.out {
                let rec = CertificateFile::error("", &[], None, f.record());
                write_out(out, &rec.to_json())?;
            }
            return Err(f);
        }
    };
    let (strategy, opts) = resolve(args, &problem)?;
    let p = problem.partitioned()?;
    let report = if all {
        full_report(&p, &opts)
    } else {
        certify(&p, strategy, &opts)
    };
    let requested = if all { "all" } else { strategy_name(strategy) };
    let exit = Exit::for_report(&report);
    let mut file =
        CertificateFile::from_report(&report, requested, &problem.partition, problem.digest());
    if matches!(exit, Exit::InputError | Exit::NumericalFailure) {
        let msg = report.routes.iter().find_map(|r| match &r.outcome {
            Outcome::Error(e) => Some(e.to_string()),
            _ => None,
        });
        let msg = msg.unwrap_or_default();
        file.status = Status::Error;
        file.error = Some(if exit == Exit::InputError {
            ErrorRecord::input(msg)
        } else {
            ErrorRecord::numerical(msg)
        });
    }

    let json = file.to_json();
    let to_stderr = args.common.out.is_none();
    match &args.common.out {
        Some(path) => write_out(path, &json)?,
        None => print!("{json}"),
    }
    let quiet = args.common.quiet;
    if all {
        say(quiet, to_stderr, &route_table(&report));
        say(quiet, to_stderr, &summary(&report));
    } else {
        say(quiet, to_stderr, &summary(&report));
        if report.certificate().is_none() {
            say(quiet, to_stderr, &route_table(&report));
        }
    }
    Ok(exit)
}

fn diagonal_note(src: &DiagonalSource<f64>) -> String {
    match src {
        DiagonalSource::Clipped { entry } => format!("clipped diagonal entry {}", sig6(*entry)),
        DiagonalSource::InverseHinfNorm {
            value,
            peak_frequency,
        } => {
            format!(
                "inverse H-infinity norm {} at frequency {}",
                sig6(*value),
                sig6(*peak_frequency)
            )
        }
        DiagonalSource::UnstableBlock => "diagonal block is not Hurwitz; entry set to 0".into(),
    }
}

fn diagonal_json(i: usize, src: &DiagonalSource<f64>, m: f64) -> serde_json::Value {
    match src {
        DiagonalSource::Clipped { entry } => {
            json!({"block": i + 1, "value": m, "source": "clipped", "entry": entry})
        }
        DiagonalSource::InverseHinfNorm {
            value,
            peak_frequency,
        } => json!({
            "block": i + 1, "value": m, "source": "inverse-hinf-norm",
            "inverse_norm": value, "peak_frequency": peak_frequency
        }),
        DiagonalSource::UnstableBlock => {
            json!({"block": i + 1, "value": m, "source": "unstable-block"})
        }
    }
}

fn run_compare(args: &CompareArgs) -> Result<Exit, Failure> {
    let c = &args.common;
    let problem = ProblemFile::load(&c.input)?;
    let p = problem.partitioned()?;
    let cmp = block_comparison(&p, &hinf_options(c.hinf_tol)?)?;
    let hurwitz = cmp.is_hurwitz(blockdom::comparison::DEFAULT_HURWITZ_MARGIN)?;
    if let Some(out) = &c.out {
        let rows: Vec<Vec<f64>> = (0..cmp.order())
            .map(|i| cmp.matrix.row(i).iter().copied().collect())
            .collect();
        let diag: Vec<_> = cmp
            .diagonal
            .iter()
            .enumerate()
            .map(|(i, s)| diagonal_json(i, s, cmp.matrix[(i, i)]))
            .collect();
        let doc = json!({
            "matrix": rows,
            "partition": problem.partition,
            "hurwitz": hurwitz,
            "diagonal": diag,
            "tool_version": blockdom_cli::TOOL_VERSION,
            "input_digest": problem.digest(),
        });
        write_out(
            out,
            &(serde_json::to_string_pretty(&doc).expect("json") + "\n"),
        )?;
    }
    if !c.quiet {
        println!("block comparison matrix ({n}x{n}):", n = cmp.order());
        println!("{}", matrix_table(&cmp.matrix, 4));
        println!("hurwitz: {}", if hurwitz { "yes" } else { "no" });
        for (i, s) in cmp.diagonal.iter().enumerate() {
            println!(
                "  ({k}, {k}) = {}: {}",
                sig6(cmp.matrix[(i, i)]),
                diagonal_note(s),
                k = i + 1
            );
        }
    }
    Ok(Exit::Ok)
}

fn parse_inline(text: &str) -> anyhow::Result<na::DMatrix<f64>> {
    let rows: Vec<Vec<f64>> =
        serde_json::from_str(text).context("inline matrix must be a JSON array of rows")?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        bail!("inline matrix must be square and nonempty");
    }
    Ok(na::DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn run_hinf(args: &HinfArgs) -> Result<Exit, Failure> {
    let a = match (&args.input, &args.matrix) {
        (Some(path), _) => {
            let problem = ProblemFile::load(path)?;
            match args.block {
                Some(i) => problem.partitioned()?.block(i, i)?,
                None => problem.dense(),
            }
        }
        (None, Some(text)) => parse_inline(text).map_err(Failure::input)?,
        (None, None) => {
            return Err(Failure::input(anyhow::anyhow!(
                "either --input or --matrix is required"
            )))
        }
    };
    let r = hinf_norm_resolvent(&a, &hinf_options(args.hinf_tol)?)?;
    if let Some(out) = &args.out {
        let norm = match r.norm {
            ExtendedReal::Finite(x) => json!(x),
            ExtendedReal::Infinity => json!("infinite"),
        };
        let doc = json!({
            "norm": norm,
            "inverse_norm": r.inverse_norm,
            "peak_frequency": r.peak_frequency,
            "iterations": r.iterations,
        });
        write_out(
            out,
            &(serde_json::to_string_pretty(&doc).expect("json") + "\n"),
        )?;
    }
    if !args.quiet {
        match r.norm {
            ExtendedReal::Finite(x) => {
                println!("norm: {}", sig6(x));
                println!("inverse norm: {}", sig6(r.inverse_norm));
                println!("peak frequency: {}", sig6(r.peak_frequency));
            }
            ExtendedReal::Infinity => {
                println!("norm: infinite (matrix is not Hurwitz)");
                println!("inverse norm: 0");
            }
        }
    }
    Ok(Exit::Ok)
}

fn run_verify(args: &VerifyArgs) -> Result<Exit, Failure> {
    let problem = ProblemFile::load(&args.input)?;
    let text = std::fs::read_to_string(&args.certificate)
        .with_context(|| format!("cannot read {}", args.certificate.display()))
        .map_err(Failure::input)?;
    let cert: CertificateFile = serde_json::from_str(&text)
        .context("malformed certificate file")
        .map_err(Failure::input)?;
    let digest = problem.digest();
    if cert.input_digest.as_deref() != Some(digest.as_str()) {
        return Err(Failure::input(anyhow::anyhow!(
            "certificate was issued for a different input"
        )));
    }
    cert.check()
        .map_err(|e| Failure::input(anyhow::anyhow!(e)))?;
    if cert.status != Status::Certified {
        say(
            args.quiet,
            false,
            "certificate does not claim stability; nothing to verify",
        );
        return Ok(Exit::NotCertified);
    }
    if cert.partition != problem.partition {
        return Err(Failure::input(anyhow::anyhow!(
            "certificate partition does not match the input"
        )));
    }
    let blocks = cert
        .block_matrices()
        .map_err(|e| Failure::input(anyhow::anyhow!(e)))?;
    let margin = args.margin.unwrap_or(blockdom::certificate::DEFAULT_MARGIN);
    if !(margin.is_finite() && margin >= 0.0) {
        return Err(Failure::input(anyhow::anyhow!(
            "margin must be nonnegative, got {margin}"
        )));
    }
    let p = problem.partitioned()?;
    match assemble_and_verify(&p, &blocks, margin)? {
        Some(c) => {
            say(
                args.quiet,
                false,
                &format!(
                    "verified: lyapunov margin {}, min eigenvalue of P {}",
                    sig6(c.lyapunov_margin),
                    sig6(c.min_block_eigenvalue)
                ),
            );
            Ok(Exit::Ok)
        }
        None => {
            say(
                args.quiet,
                false,
                "verification failed: P is not a Lyapunov certificate for this input",
            );
            Ok(Exit::NotCertified)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Certify(a) => run_routes(a, false),
        Command::Report(a) => run_routes(a, true),
        Command::Compare(a) => run_compare(a),
        Command::Hinf(a) => run_hinf(a),
        Command::Verify(a) => run_verify(a),
    };
    match result {
        Ok(exit) => exit.into(),
        Err(f) => {
            let kind = if f.exit == Exit::NumericalFailure {
                "numerical failure"
            } else {
                "input error"
            };
            eprintln!("error ({kind}): {:#}", f.error);
            f.exit.into()
        }
    }
}
