//! Orchestration of the certification routes and their outcomes.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use super::decoupled::{
    decoupled_riccati_test, default_epsilon, gamma_for_test, RiccatiOutcome, TestKind,
};
use super::witness::{prop4_construct, verify_general_witnesses};
use super::{assemble_and_verify, Certificate, CertifyOptions, Method};
use crate::comparison::{block_comparison, metzler_scalings, ScalingPair};
use crate::error::{Error, Result};
use crate::partition::PartitionedMatrix;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Comparison-matrix route, then tests C, A, B; stops at the first success.
    Auto,
    A,
    B,
    C,
    Prop4,
}

impl Strategy {
    fn routes(self) -> &'static [Method] {
        match self {
            Strategy::Auto => &[Method::Prop4, Method::TestC, Method::TestA, Method::TestB],
            Strategy::A => &[Method::TestA],
            Strategy::B => &[Method::TestB],
            Strategy::C => &[Method::TestC],
            Strategy::Prop4 => &[Method::Prop4],
        }
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(Strategy::Auto),
            "a" => Ok(Strategy::A),
            "b" => Ok(Strategy::B),
            "c" => Ok(Strategy::C),
            "prop4" => Ok(Strategy::Prop4),
            other => Err(format!(
                "unknown strategy `{other}` (expected auto, a, b, c or prop4)"
            )),
        }
    }
}

/// Why a route did not produce a certificate. None of these disprove
/// stability.
#[derive(Debug, Clone, PartialEq)]
pub enum FailureReason {
    ComparisonNotHurwitz,
    RiccatiNoSolution { block: usize },
    WitnessesRejected,
    LyapunovNotVerified,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureReason::ComparisonNotHurwitz => {
                f.write_str("block comparison matrix is not Hurwitz")
            }
            FailureReason::RiccatiNoSolution { block } => {
                write!(
                    f,
                    "Riccati equation for block {block} has no stabilizing solution"
                )
            }
            FailureReason::WitnessesRejected => {
                f.write_str("constructed witnesses failed verification")
            }
            FailureReason::LyapunovNotVerified => {
                f.write_str("assembled P does not satisfy the Lyapunov inequality")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome<T: Scalar> {
    Pass(Box<Certificate<T>>),
    Fail(FailureReason),
    Error(Error),
}

impl<T: Scalar> Outcome<T> {
    pub fn is_pass(&self) -> bool {
        matches!(self, Outcome::Pass(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Pass(_) => "pass",
            Outcome::Fail(_) => "fail",
            Outcome::Error(_) => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteReport<T: Scalar> {
    pub method: Method,
    pub outcome: Outcome<T>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestReport<T: Scalar> {
    pub routes: Vec<RouteReport<T>>,
}

impl<T: Scalar> TestReport<T> {
    /// The first certificate found, if any.
    pub fn certificate(&self) -> Option<&Certificate<T>> {
        self.routes.iter().find_map(|r| match &r.outcome {
            Outcome::Pass(c) => Some(c.as_ref()),
            _ => None,
        })
    }

    pub fn outcome(&self, method: Method) -> Option<&Outcome<T>> {
        self.routes
            .iter()
            .find(|r| r.method == method)
            .map(|r| &r.outcome)
    }

    pub fn passed(&self, method: Method) -> bool {
        self.outcome(method).is_some_and(Outcome::is_pass)
    }

    /// `true` when every attempted route ended in an error.
    pub fn all_errored(&self) -> bool {
        !self.routes.is_empty()
            && self
                .routes
                .iter()
                .all(|r| matches!(r.outcome, Outcome::Error(_)))
    }
}

fn scalings<T: Scalar>(
    p: &PartitionedMatrix<T>,
    opts: &CertifyOptions<T>,
) -> Result<Option<ScalingPair<T>>> {
    let cmp = block_comparison(p, &opts.hinf)?;
    metzler_scalings(&cmp.matrix, opts.hurwitz_margin)
}

fn run_prop4<T: Scalar>(p: &PartitionedMatrix<T>, opts: &CertifyOptions<T>) -> Result<Outcome<T>> {
    let Some(s) = scalings(p, opts)? else {
        return Ok(Outcome::Fail(FailureReason::ComparisonNotHurwitz));
    };
    let built = prop4_construct(p, &s, opts)?;
    if !verify_general_witnesses(p, &built.witnesses, opts.margin)?.holds {
        return Ok(Outcome::Fail(FailureReason::WitnessesRejected));
    }
    let Some(mut cert) = assemble_and_verify(p, &built.witnesses.p, opts.margin)? else {
        return Ok(Outcome::Fail(FailureReason::LyapunovNotVerified));
    };
    cert.strategy = Method::Prop4;
    cert.epsilon = (0..p.num_blocks())
        .map(|i| built.shift[i] * built.gamma.gamma[(i, i)])
        .collect();
    cert.riccati_residuals = built.riccati_residuals;
    Ok(Outcome::Pass(Box::new(cert)))
}

fn run_test<T: Scalar>(
    p: &PartitionedMatrix<T>,
    kind: TestKind,
    opts: &CertifyOptions<T>,
) -> Result<Outcome<T>> {
    let s = if kind == TestKind::C {
        match scalings(p, opts)? {
            Some(s) => Some(s),
            None => return Ok(Outcome::Fail(FailureReason::ComparisonNotHurwitz)),
        }
    } else {
        None
    };
    let g = gamma_for_test(p, kind, s.as_ref())?;
    let eps = match opts.epsilon {
        Some(e) => vec![e; p.num_blocks()],
        None => default_epsilon(&g),
    };
    let (blocks, residuals) = match decoupled_riccati_test(p, &g, &eps, opts.care)? {
        RiccatiOutcome::Solved { blocks, residuals } => (blocks, residuals),
        RiccatiOutcome::NoSolution { block } => {
            return Ok(Outcome::Fail(FailureReason::RiccatiNoSolution { block }))
        }
    };
    let Some(mut cert) = assemble_and_verify(p, &blocks, opts.margin)? else {
        return Ok(Outcome::Fail(FailureReason::LyapunovNotVerified));
    };
    cert.strategy = kind.method();
    cert.epsilon = eps;
    cert.riccati_residuals = residuals;
    Ok(Outcome::Pass(Box::new(cert)))
}

fn run_route<T: Scalar>(
    p: &PartitionedMatrix<T>,
    method: Method,
    opts: &CertifyOptions<T>,
) -> RouteReport<T> {
    let start = Instant::now();
    let result = match method {
        Method::TestA => run_test(p, TestKind::A, opts),
        Method::TestB => run_test(p, TestKind::B, opts),
        Method::TestC => run_test(p, TestKind::C, opts),
        Method::Prop4 => run_prop4(p, opts),
        Method::Custom => Err(Error::InvalidGamma(
            "custom weights are not a certification route".into(),
        )),
    };
    let outcome = result.unwrap_or_else(Outcome::Error);
    RouteReport {
        method,
        outcome,
        elapsed: start.elapsed(),
    }
}

/// Runs the routes selected by `strategy`, stopping at the first certificate.
/// Every certificate in the report has passed [`assemble_and_verify`].
pub fn certify<T: Scalar>(
    p: &PartitionedMatrix<T>,
    strategy: Strategy,
    opts: &CertifyOptions<T>,
) -> TestReport<T> {
    let mut routes = Vec::new();
    for &method in strategy.routes() {
        let r = run_route(p, method, opts);
        let done = r.outcome.is_pass();
        routes.push(r);
        if done {
            break;
        }
    }
    TestReport { routes }
}

/// Runs tests A, B, C and the comparison-matrix route regardless of success.
pub fn full_report<T: Scalar>(p: &PartitionedMatrix<T>, opts: &CertifyOptions<T>) -> TestReport<T> {
    let routes = [Method::TestA, Method::TestB, Method::TestC, Method::Prop4]
        .iter()
        .map(|&m| run_route(p, m, opts))
        .collect();
    TestReport { routes }
}
