//! File formats and formatting helpers for the `blockdom` command-line tool.

pub mod certfile;
pub mod format;
pub mod problem;

pub use certfile::{CertificateFile, ErrorRecord, RouteRecord, Status};
pub use problem::{input_digest, ProblemError, ProblemFile, ProblemOptions};

pub const TOOL_VERSION: &str = concat!("blockdom ", env!("CARGO_PKG_VERSION"));

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Exit {
    Ok = 0,
    NotCertified = 1,
    InputError = 2,
    NumericalFailure = 3,
}

impl Exit {
    pub fn for_error(err: &blockdom::Error) -> Self {
        if err.is_input_error() {
            Exit::InputError
        } else {
            Exit::NumericalFailure
        }
    }

    /// `Ok` with a certificate, the first route's error class when every
    /// route errored, `NotCertified` otherwise.
    pub fn for_report(report: &blockdom::TestReport<f64>) -> Self {
        if report.certificate().is_some() {
            return Exit::Ok;
        }
        if report.all_errored() {
            if let Some(blockdom::certificate::Outcome::Error(e)) =
                report.routes.first().map(|r| &r.outcome)
            {
                return Exit::for_error(e);
            }
        }
        Exit::NotCertified
    }
}

impl From<Exit> for std::process::ExitCode {
    fn from(e: Exit) -> Self {
        std::process::ExitCode::from(e as u8)
    }
}
