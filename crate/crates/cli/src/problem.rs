use std::path::Path;

use blockdom::{make_partitioned, Partitioned};
use nalgebra as na;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("cannot read {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON")]
    Parse(#[from] serde_json::Error),
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error(transparent)]
    Matrix(#[from] blockdom::Error),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hinf_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
}

/// `{"n": 4, "partition": [2, 2], "matrix": [[...], ...], "options": {...}}`.
/// `n` is optional and checked against the matrix when present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub partition: Vec<usize>,
    pub matrix: Vec<Vec<f64>>,
    #[serde(default)]
    pub options: ProblemOptions,
}

impl ProblemFile {
    pub fn load(path: &Path) -> Result<Self, ProblemError> {
        let text = std::fs::read_to_string(path).map_err(|source| ProblemError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ProblemError> {
        let p: ProblemFile = serde_json::from_str(text)?;
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ProblemError> {
        let order = self.matrix.len();
        if order == 0 {
            return Err(ProblemError::Invalid("matrix has no rows".into()));
        }
        if let Some((i, row)) = self
            .matrix
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != order)
        {
            return Err(ProblemError::Invalid(format!(
                "row {} has {} entries, expected {order}",
                i + 1,
                row.len()
            )));
        }
        if let Some(n) = self.n.filter(|&n| n != order) {
            return Err(ProblemError::Invalid(format!(
                "n = {n} but the matrix has {order} rows"
            )));
        }
        if self.matrix.iter().flatten().any(|x| !x.is_finite()) {
            return Err(blockdom::Error::NonFinite.into());
        }
        let sum: usize = self.partition.iter().sum();
        if self.partition.is_empty() || self.partition.contains(&0) {
            return Err(blockdom::Error::InvalidPartition.into());
        }
        if sum != order {
            return Err(blockdom::Error::SizeMismatch { sum, order }.into());
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.matrix.len()
    }

    pub fn dense(&self) -> na::DMatrix<f64> {
        let n = self.order();
        na::DMatrix::from_fn(n, n, |i, j| self.matrix[i][j])
    }

    pub fn partitioned(&self) -> Result<Partitioned, ProblemError> {
        Ok(make_partitioned(self.dense(), &self.partition)?)
    }

    pub fn digest(&self) -> String {
        input_digest(&self.dense(), &self.partition)
    }
}

/// SHA-256 over the partition sizes and the row-major bit patterns of the
/// entries, with `-0.0` folded into `0.0`.
pub fn input_digest(a: &na::DMatrix<f64>, partition: &[usize]) -> String {
    let mut h = Sha256::new();
    h.update(b"blockdom-input-v1");
    h.update((partition.len() as u64).to_le_bytes());
    for &k in partition {
        h.update((k as u64).to_le_bytes());
    }
    h.update((a.nrows() as u64).to_le_bytes());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let x = a[(i, j)];
            let x = if x == 0.0 { 0.0f64 } else { x };
            h.update(x.to_bits().to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}
