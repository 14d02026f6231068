//! Tests A, B and C: one Riccati equation per diagonal block,
//! `Pᵢ·Aᵢᵢ + Aᵢᵢᵀ·Pᵢ + Pᵢ·(Σ_{j≠i} Aᵢⱼ·Aᵢⱼᵀ/γᵢⱼ)·Pᵢ + (εᵢ + Σ_{j≠i} γⱼᵢ)·I = 0`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{GammaMatrix, Method};
use crate::comparison::ScalingPair;
use crate::error::{Error, Result};
use crate::linalg::{care_residual, max_singular_value, solve_care_positive, CareOptions};
use crate::partition::PartitionedMatrix;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    /// `γᵢⱼ = σ̄(Aᵢⱼ)`.
    A,
    /// `γᵢⱼ = 1` for every nonzero coupling.
    B,
    /// `γᵢⱼ = σ̄(Aᵢⱼ)·eᵢ/dⱼ` with scalings of the block comparison matrix.
    C,
}

impl TestKind {
    pub fn method(self) -> Method {
        match self {
            TestKind::A => Method::TestA,
            TestKind::B => Method::TestB,
            TestKind::C => Method::TestC,
        }
    }
}

/// Off-diagonal `γᵢⱼ` for one of the decoupled tests. Zero blocks get
/// `γᵢⱼ = 0` under every rule; the diagonal is zero.
pub fn gamma_for_test<T: Scalar>(
    p: &PartitionedMatrix<T>,
    which: TestKind,
    scalings: Option<&ScalingPair<T>>,
) -> Result<GammaMatrix<T>> {
    let n = p.num_blocks();
    let scalings = match which {
        TestKind::C => {
            let s = scalings.ok_or(Error::MissingScalings)?;
            if s.d.len() != n || s.e.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "scalings must have length {n}"
                )));
            }
            Some(s)
        }
        _ => None,
    };
    let mut gamma = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            if p.is_zero_block0(i, j) {
                continue;
            }
            gamma[(i, j)] = match which {
                TestKind::A => max_singular_value(&p.block0(i, j))?,
                TestKind::B => T::one(),
                TestKind::C => {
                    let s = scalings.expect("checked above");
                    max_singular_value(&p.block0(i, j))? * s.e[i] / s.d[j]
                }
            };
        }
    }
    Ok(GammaMatrix {
        gamma,
        strategy: which.method(),
    })
}

/// `εᵢ = 10⁻⁶·(1 + Σ_{j≠i} γⱼᵢ)`.
pub fn default_epsilon<T: Scalar>(g: &GammaMatrix<T>) -> Vec<T> {
    let n = g.gamma.nrows();
    let scale = T::lit(1e-6);
    (0..n)
        .map(|i| scale * (T::one() + column_sum_off_diagonal(&g.gamma, i)))
        .collect()
}

fn column_sum_off_diagonal<T: Scalar>(g: &DMatrix<T>, i: usize) -> T {
    (0..g.nrows())
        .filter(|&j| j != i)
        .fold(T::zero(), |s, j| s + g[(j, i)])
}

#[derive(Debug, Clone, PartialEq)]
pub enum RiccatiOutcome<T: Scalar> {
    Solved {
        blocks: Vec<DMatrix<T>>,
        residuals: Vec<T>,
    },
    /// The equation for this block (1-based) has no stabilizing
    /// positive-definite solution.
    NoSolution { block: usize },
}

impl<T: Scalar> RiccatiOutcome<T> {
    pub fn blocks(&self) -> Option<&[DMatrix<T>]> {
        match self {
            RiccatiOutcome::Solved { blocks, .. } => Some(blocks),
            RiccatiOutcome::NoSolution { .. } => None,
        }
    }
}

fn validate_gamma<T: Scalar>(
    p: &PartitionedMatrix<T>,
    g: &GammaMatrix<T>,
    eps: &[T],
) -> Result<()> {
    let n = p.num_blocks();
    if g.gamma.nrows() != n || g.gamma.ncols() != n {
        return Err(Error::DimensionMismatch(format!("gamma must be {n}x{n}")));
    }
    if eps.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "epsilon must have length {n}"
        )));
    }
    if eps.iter().any(|e| !(e.is_finite() && *e > T::zero())) {
        return Err(Error::InvalidGamma(
            "every epsilon must be positive and finite".into(),
        ));
    }
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let v = g.gamma[(i, j)];
            if !(v.is_finite() && v >= T::zero()) {
                return Err(Error::InvalidGamma(format!(
                    "entry ({}, {}) is {v}",
                    i + 1,
                    j + 1
                )));
            }
            if v.is_zero() && !p.is_zero_block0(i, j) {
                return Err(Error::InvalidGamma(format!(
                    "entry ({}, {}) is zero but the coupling block is not",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(())
}

/// `Σ_{j≠i, γᵢⱼ>0} Aᵢⱼ·Aᵢⱼᵀ/γᵢⱼ`.
pub(crate) fn coupling_weight<T: Scalar>(
    p: &PartitionedMatrix<T>,
    gamma: &DMatrix<T>,
    i: usize,
) -> DMatrix<T> {
    let k = p.partition().size0(i);
    let mut r = DMatrix::zeros(k, k);
    for j in (0..p.num_blocks()).filter(|&j| j != i) {
        let g = gamma[(i, j)];
        if g > T::zero() && !p.is_zero_block0(i, j) {
            let aij = p.block0(i, j);
            r += &aij * aij.transpose() / g;
        }
    }
    crate::linalg::symmetrize(&r)
}

/// Solves the `n` decoupled Riccati equations concurrently. An equation
/// without a stabilizing positive-definite solution makes the test
/// inconclusive; the lowest such block index is reported.
pub fn decoupled_riccati_test<T: Scalar>(
    p: &PartitionedMatrix<T>,
    g: &GammaMatrix<T>,
    eps: &[T],
    care: CareOptions<T>,
) -> Result<RiccatiOutcome<T>> {
    validate_gamma(p, g, eps)?;
    let n = p.num_blocks();
    let solved = (0..n)
        .into_par_iter()
        .map(|i| {
            let a = p.block0(i, i);
            let k = a.nrows();
            let r = coupling_weight(p, &g.gamma, i);
            let q = DMatrix::identity(k, k) * (eps[i] + column_sum_off_diagonal(&g.gamma, i));
            let sol = solve_care_positive(&a, &r, &q, care)?;
            Ok(sol.map(|pi| {
                let (res, scale) = care_residual(&a, &r, &q, &pi);
                (pi, res / scale.max(T::default_epsilon()))
            }))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut blocks = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for (i, s) in solved.into_iter().enumerate() {
        match s {
            Some((pi, res)) => {
                blocks.push(pi);
                residuals.push(res);
            }
            None => return Ok(RiccatiOutcome::NoSolution { block: i + 1 }),
        }
    }
    Ok(RiccatiOutcome::Solved { blocks, residuals })
}
