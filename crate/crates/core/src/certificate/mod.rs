//! Block-diagonal Lyapunov certificates: decoupled Riccati tests, the
//! comparison-matrix witness construction, and independent verification.

mod border;
mod counterexample;
mod decoupled;
mod report;
mod scalar;
mod witness;

pub use border::{
    border_witnesses_from, check_border_structure, verify_bbd_witnesses, BorderWitnesses,
};
pub use counterexample::{
    counterexample_conditions, counterexample_matrix, critical_delta, CounterexampleConditions,
};
pub use decoupled::{
    decoupled_riccati_test, default_epsilon, gamma_for_test, RiccatiOutcome, TestKind,
};
pub use report::{certify, full_report, FailureReason, Outcome, RouteReport, Strategy, TestReport};
pub use scalar::{scalar_witnesses, verify_scalar_conditions, ScalarWitnesses};
pub use witness::{
    lyapunov_decomposition, prop4_construct, verify_general_witnesses, LyapunovDecomposition,
    Prop4Construction, WitnessCheck, WitnessSet,
};

use std::fmt;

use nalgebra::DMatrix;

use crate::comparison::DEFAULT_HURWITZ_MARGIN;
use crate::error::{Error, Result};
use crate::linalg::{
    block_diagonal, frobenius, symmetric_eigenvalues, symmetrize, CareOptions, HinfOptions,
};
use crate::partition::{BlockPartition, PartitionedMatrix};
use crate::Scalar;

/// Default relative strictness margin for definiteness checks.
pub const DEFAULT_MARGIN: f64 = 1e-9;

/// How a set of `γᵢⱼ` or a certificate was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    TestA,
    TestB,
    TestC,
    /// Witnesses built from a Hurwitz block comparison matrix.
    Prop4,
    /// Supplied by the caller.
    Custom,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::TestA => "a",
            Method::TestB => "b",
            Method::TestC => "c",
            Method::Prop4 => "prop4",
            Method::Custom => "custom",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Coupling weights `γᵢⱼ`. The diagonal is zero except for [`Method::Prop4`],
/// where it holds `γᵢᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaMatrix<T: Scalar> {
    pub gamma: DMatrix<T>,
    pub strategy: Method,
}

#[derive(Debug, Clone, Copy)]
pub struct CertifyOptions<T> {
    /// Uniform `εᵢ`; `None` selects `10⁻⁶·(1 + Σ_{j≠i} γⱼᵢ)`.
    pub epsilon: Option<T>,
    pub hinf: HinfOptions<T>,
    pub care: CareOptions<T>,
    /// Relative margin for strict and non-strict matrix inequalities.
    pub margin: T,
    /// Absolute margin on the spectral abscissa of comparison matrices.
    pub hurwitz_margin: T,
}

impl<T: Scalar> Default for CertifyOptions<T> {
    fn default() -> Self {
        Self {
            epsilon: None,
            hinf: HinfOptions::default(),
            care: CareOptions::default(),
            margin: T::lit(DEFAULT_MARGIN),
            hurwitz_margin: T::lit(DEFAULT_HURWITZ_MARGIN),
        }
    }
}

/// A verified block-diagonal Lyapunov solution `P = diag(P₁, …, Pₙ)` with
/// `P ≻ 0` and `P·A + Aᵀ·P ≺ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate<T: Scalar> {
    pub blocks: Vec<DMatrix<T>>,
    pub partition: BlockPartition,
    pub strategy: Method,
    pub epsilon: Vec<T>,
    /// `−λ_max(P·A + Aᵀ·P)`.
    pub lyapunov_margin: T,
    /// Smallest eigenvalue over all `Pᵢ`.
    pub min_block_eigenvalue: T,
    pub riccati_residuals: Vec<T>,
}

impl<T: Scalar> Certificate<T> {
    pub fn assembled(&self) -> DMatrix<T> {
        block_diagonal(&self.blocks)
    }
}

/// Tolerance `margin·(1 + Σ‖termₖ‖_F)` for an inequality whose operand is a
/// sum of the given terms.
pub(crate) fn floor<T: Scalar>(margin: T, terms: &[&DMatrix<T>]) -> T {
    margin * (T::one() + terms.iter().fold(T::zero(), |s, m| s + frobenius(m)))
}

pub(crate) fn lambda_max<T: Scalar>(m: &DMatrix<T>) -> Result<T> {
    symmetric_eigenvalues(m)?
        .last()
        .copied()
        .ok_or(Error::Empty)
}

pub(crate) fn lambda_min<T: Scalar>(m: &DMatrix<T>) -> Result<T> {
    symmetric_eigenvalues(m)?
        .first()
        .copied()
        .ok_or(Error::Empty)
}

/// Independent check of a candidate `P = diag(blocks)`: every block symmetric
/// to `10⁻¹⁰` relative and positive definite, and
/// `λ_max(P·A + Aᵀ·P) < −margin·(1 + ‖P·A‖_F)`. Nothing from the construction
/// that produced `blocks` is trusted.
pub fn assemble_and_verify<T: Scalar>(
    p: &PartitionedMatrix<T>,
    blocks: &[DMatrix<T>],
    margin: T,
) -> Result<Option<Certificate<T>>> {
    let part = p.partition();
    if blocks.len() != part.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} blocks supplied for a partition with {} blocks",
            blocks.len(),
            part.len()
        )));
    }
    for (i, b) in blocks.iter().enumerate() {
        let k = part.size0(i);
        if b.nrows() != k || b.ncols() != k {
            return Err(Error::DimensionMismatch(format!(
                "block {} is {}x{}, expected {k}x{k}",
                i + 1,
                b.nrows(),
                b.ncols()
            )));
        }
        crate::linalg::ensure_finite(b)?;
    }

    let asym_tol = T::lit(1e-10);
    let mut min_eig: Option<T> = None;
    for b in blocks {
        if frobenius(&(b - b.transpose())) > asym_tol * frobenius(b) {
            return Ok(None);
        }
        let lo = lambda_min(b)?;
        if lo <= margin * (T::one() + frobenius(b)) {
            return Ok(None);
        }
        min_eig = Some(min_eig.map_or(lo, |m: T| m.min(lo)));
    }

    let sym: Vec<DMatrix<T>> = blocks.iter().map(symmetrize).collect();
    let pa = block_diagonal(&sym) * p.matrix();
    let lyap = &pa + pa.transpose();
    let top = lambda_max(&lyap)?;
    if top >= -floor(margin, &[&pa]) {
        return Ok(None);
    }
    Ok(Some(Certificate {
        blocks: sym,
        partition: part.clone(),
        strategy: Method::Custom,
        epsilon: Vec::new(),
        lyapunov_margin: -top,
        min_block_eigenvalue: min_eig.unwrap_or_else(T::zero),
        riccati_residuals: Vec::new(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::make_partitioned;

    fn coupled_pair(delta: f64) -> PartitionedMatrix<f64> {
        let a = DMatrix::from_row_slice(
            4,
            4,
            &[
                -8.0, 8.0, delta, 0.0, //
                5.0, -8.0, 0.0, delta, //
                delta, 0.0, -8.0, 8.0, //
                0.0, delta, 5.0, -8.0,
            ],
        );
        make_partitioned(a, &[2, 2]).unwrap()
    }

    #[test]
    fn hand_built_blocks_certify_coupled_pair() {
        let q1 = DMatrix::from_row_slice(2, 2, &[7.0, 7.0, 7.0, 11.0]);
        let cert = assemble_and_verify(&coupled_pair(1.63), &[q1.clone(), q1], 1e-9)
            .unwrap()
            .unwrap();
        assert!(cert.lyapunov_margin > 0.0);
        assert!(cert.min_block_eigenvalue > 0.0);
    }

    #[test]
    fn identity_blocks_follow_symmetric_part() {
        let p = coupled_pair(1.63);
        let a = p.matrix();
        let top = lambda_max(&(a + a.transpose())).unwrap();
        let eye = DMatrix::identity(2, 2);
        let cert = assemble_and_verify(&p, &[eye.clone(), eye], 1e-9).unwrap();
        assert_eq!(cert.is_some(), top < 0.0);
    }

    #[test]
    fn unstable_matrix_is_never_certified() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let p = make_partitioned(a, &[1, 1]).unwrap();
        let one = DMatrix::identity(1, 1);
        assert!(assemble_and_verify(&p, &[one.clone(), one], 0.0)
            .unwrap()
            .is_none());
    }

    #[test]
    fn rejects_indefinite_or_mismatched_blocks() {
        let p = coupled_pair(1.0);
        let neg = -DMatrix::<f64>::identity(2, 2);
        assert!(assemble_and_verify(&p, &[neg.clone(), neg], 0.0)
            .unwrap()
            .is_none());
        let err = assemble_and_verify(&p, &[DMatrix::identity(2, 2)], 0.0).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
        let err = assemble_and_verify(&p, &[DMatrix::identity(2, 2), DMatrix::identity(3, 3)], 0.0)
            .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }
}
