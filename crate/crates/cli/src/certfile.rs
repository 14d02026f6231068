use blockdom::certificate::Outcome;
use blockdom::{Certificate64, TestReport};
use nalgebra as na;
use serde::{Deserialize, Serialize};

use crate::TOOL_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Certified,
    NotCertified,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteRecord {
    pub method: String,
    pub outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    /// `input` or `numerical`.
    pub kind: String,
    pub message: String,
}

impl ErrorRecord {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            kind: "input".into(),
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            kind: "numerical".into(),
            message: message.into(),
        }
    }
}

/// Serialized certification result. Floats are written in shortest
/// round-trip form, so blocks reload bit-identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
    #[serde(default)]
    pub requested_strategy: String,
    #[serde(default)]
    pub partition: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lyapunov_margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_block_eigenvalue: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub epsilon: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub routes: Vec<RouteRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
    pub tool_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_digest: Option<String>,
}

fn rows(m: &na::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

pub fn route_records(report: &TestReport<f64>) -> Vec<RouteRecord> {
    report
        .routes
        .iter()
        .map(|r| RouteRecord {
            method: r.method.name().into(),
            outcome: r.outcome.label().into(),
            reason: match &r.outcome {
                Outcome::Pass(_) => None,
                Outcome::Fail(f) => Some(f.to_string()),
                Outcome::Error(e) => Some(e.to_string()),
            },
        })
        .collect()
}

impl CertificateFile {
    fn empty(status: Status, requested: &str, partition: &[usize], digest: Option<String>) -> Self {
        Self {
            status,
            strategy: None,
            requested_strategy: requested.into(),
            partition: partition.to_vec(),
            blocks: None,
            lyapunov_margin: None,
            min_block_eigenvalue: None,
            epsilon: Vec::new(),
            routes: Vec::new(),
            error: None,
            tool_version: TOOL_VERSION.into(),
            input_digest: digest,
        }
    }

    pub fn from_report(
        report: &TestReport<f64>,
        requested: &str,
        partition: &[usize],
        digest: String,
    ) -> Self {
        let mut out = match report.certificate() {
            Some(c) => Self::from_certificate(c, requested, digest),
            None => Self::empty(Status::NotCertified, requested, partition, Some(digest)),
        };
        out.routes = route_records(report);
        out
    }

    pub fn from_certificate(c: &Certificate64, requested: &str, digest: String) -> Self {
        let mut out = Self::empty(
            Status::Certified,
            requested,
            c.partition.sizes(),
            Some(digest),
        );
        out.strategy = Some(c.strategy.name().into());
        out.blocks = Some(c.blocks.iter().map(rows).collect());
        out.lyapunov_margin = Some(c.lyapunov_margin);
        out.min_block_eigenvalue = Some(c.min_block_eigenvalue);
        out.epsilon = c.epsilon.clone();
        out
    }

    pub fn error(
        requested: &str,
        partition: &[usize],
        digest: Option<String>,
        err: ErrorRecord,
    ) -> Self {
        let mut out = Self::empty(Status::Error, requested, partition, digest);
        out.error = Some(err);
        out
    }

    /// Structural consistency: a certified file carries blocks and a
    /// positive margin.
    pub fn check(&self) -> Result<(), String> {
        if self.status == Status::Certified {
            let Some(blocks) = &self.blocks else {
                return Err("certified file has no blocks".into());
            };
            if blocks.len() != self.partition.len() {
                return Err(format!(
                    "{} blocks for {} partition entries",
                    blocks.len(),
                    self.partition.len()
                ));
            }
            if !self.lyapunov_margin.is_some_and(|m| m > 0.0) {
                return Err("certified file needs a positive lyapunov_margin".into());
            }
        }
        Ok(())
    }

    /// Blocks as dense matrices; `Err` when a block is ragged or non-square.
    pub fn block_matrices(&self) -> Result<Vec<na::DMatrix<f64>>, String> {
        let blocks = self.blocks.as_ref().ok_or("certificate has no blocks")?;
        blocks
            .iter()
            .enumerate()
            .map(|(b, rows)| {
                let k = rows.len();
                if rows.iter().any(|r| r.len() != k) {
                    return Err(format!("block {} is not square", b + 1));
                }
                Ok(na::DMatrix::from_fn(k, k, |i, j| rows[i][j]))
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use blockdom::{certify, fixtures, CertifyOptions, Strategy};

    #[test]
    fn certified_round_trip_is_bit_exact() {
        let p = fixtures::triangular();
        let report = certify(&p, Strategy::Auto, &CertifyOptions::default());
        let file = CertificateFile::from_report(&report, "auto", &[2, 3, 1], "d".into());
        file.check().unwrap();
        let back: CertificateFile = serde_json::from_str(&file.to_json()).unwrap();
        assert_eq!(back, file);
        let blocks = back.block_matrices().unwrap();
        assert_eq!(blocks, report.certificate().unwrap().blocks);
    }

    #[test]
    fn not_certified_has_no_blocks() {
        let report = certify(&fixtures::only_a(), Strategy::A, &CertifyOptions::default());
        let file = CertificateFile::from_report(&report, "a", &[2, 2], "d".into());
        assert_eq!(file.status, Status::NotCertified);
        assert!(file.blocks.is_none());
        assert!(file.to_json().contains("\"not-certified\""));
    }

    #[test]
    fn check_rejects_inconsistent_files() {
        let mut f = CertificateFile::error("auto", &[1], None, ErrorRecord::input("x"));
        f.check().unwrap();
        f.status = Status::Certified;
        assert!(f.check().is_err());
        f.blocks = Some(vec![vec![vec![1.0]]]);
        f.lyapunov_margin = Some(0.0);
        assert!(f.check().is_err());
    }
}
