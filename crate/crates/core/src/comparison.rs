//! Comparison matrices `M(A)`, `M^α(A)` and the Metzler scalings that
//! certify their stability.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    ensure_finite, ensure_square, hinf_norm_resolvent, max_singular_value, resolvent_inverse_gain,
    HinfOptions,
};
use crate::partition::{BlockPartition, PartitionedMatrix};
use crate::Scalar;

/// Absolute floor on `−max Re λ` used when a comparison matrix must be Hurwitz.
pub const DEFAULT_HURWITZ_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComparisonKind {
    Scalar,
    Block,
}

/// Where a diagonal entry of a comparison matrix came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiagonalSource<T> {
    /// `−max(−aᵢᵢ, 0)`.
    Clipped { entry: T },
    /// `−‖(sI − Aᵢᵢ)⁻¹‖_H∞⁻¹` with the frequency of the peak.
    InverseHinfNorm { value: T, peak_frequency: T },
    /// `Aᵢᵢ` has an eigenvalue in the closed right half-plane; entry is `0`.
    UnstableBlock,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonMatrix<T: Scalar> {
    pub matrix: DMatrix<T>,
    pub kind: ComparisonKind,
    pub diagonal: Vec<DiagonalSource<T>>,
}

impl<T: Scalar> ComparisonMatrix<T> {
    pub fn order(&self) -> usize {
        self.matrix.nrows()
    }

    /// `‖(sI − Aᵢᵢ)⁻¹‖_H∞⁻¹` (block kind) or `max(−aᵢᵢ, 0)` (scalar kind).
    pub fn diagonal_gain(&self, i: usize) -> T {
        -self.matrix[(i, i)]
    }

    pub fn is_hurwitz(&self, margin: T) -> Result<bool> {
        crate::linalg::is_hurwitz(&self.matrix, margin)
    }
}

/// Positive vectors with `−M·d > 0` and `−eᵀ·M > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingPair<T: Scalar> {
    pub d: DVector<T>,
    pub e: DVector<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DominanceMode {
    Row,
    Column,
}

/// `M(A)`: clipped diagonal, absolute values off the diagonal.
pub fn scalar_comparison<T: Scalar>(a: &DMatrix<T>) -> Result<ComparisonMatrix<T>> {
    let n = ensure_square(a)?;
    ensure_finite(a)?;
    let mut m = a.abs();
    let mut diagonal = Vec::with_capacity(n);
    for i in 0..n {
        let entry = a[(i, i)].min(T::zero());
        m[(i, i)] = entry;
        diagonal.push(DiagonalSource::Clipped { entry });
    }
    Ok(ComparisonMatrix {
        matrix: m,
        kind: ComparisonKind::Scalar,
        diagonal,
    })
}

/// `M^α(A)`. Diagonal H∞ norms and coupling norms are evaluated in parallel;
/// the result does not depend on scheduling.
pub fn block_comparison<T: Scalar>(
    p: &PartitionedMatrix<T>,
    opts: &HinfOptions<T>,
) -> Result<ComparisonMatrix<T>> {
    ensure_finite(p.matrix())?;
    let n = p.num_blocks();
    let diagonal = (0..n)
        .into_par_iter()
        .map(|i| {
            let r = hinf_norm_resolvent(&p.block0(i, i), opts)?;
            Ok(if r.norm.is_finite() {
                DiagonalSource::InverseHinfNorm {
                    value: r.inverse_norm,
                    peak_frequency: r.peak_frequency,
                }
            } else {
                DiagonalSource::UnstableBlock
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let gains = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n, k % n);
            if i == j || p.is_zero_block0(i, j) {
                Ok(T::zero())
            } else {
                max_singular_value(&p.block0(i, j))
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut m = DMatrix::from_row_slice(n, n, &gains);
    for (i, src) in diagonal.iter().enumerate() {
        m[(i, i)] = match *src {
            DiagonalSource::InverseHinfNorm { value, .. } => -value,
            _ => T::zero(),
        };
    }
    Ok(ComparisonMatrix {
        matrix: m,
        kind: ComparisonKind::Block,
        diagonal,
    })
}

/// Every off-diagonal entry is nonnegative.
pub fn is_metzler<T: Scalar>(m: &DMatrix<T>) -> Result<bool> {
    let n = ensure_square(m)?;
    Ok((0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] >= T::zero())))
}

/// For a Metzler `m` with `m + margin·I` Hurwitz, returns `d = −m⁻¹𝟙` and
/// `e = −m⁻ᵀ𝟙`. Hurwitz stability is decided through the sign of
/// `−(m + margin·I)⁻¹𝟙`, which for Metzler matrices is equivalent to the
/// spectral test.
pub fn metzler_scalings<T: Scalar>(m: &DMatrix<T>, margin: T) -> Result<Option<ScalingPair<T>>> {
    let n = ensure_square(m)?;
    ensure_finite(m)?;
    if !is_metzler(m)? {
        return Err(Error::NotMetzler);
    }
    if n == 0 {
        return Err(Error::Empty);
    }
    let ones = DVector::from_element(n, T::one());
    let shifted = m + DMatrix::identity(n, n) * margin;
    let positive = |v: &DVector<T>| v.iter().all(|x| x.is_finite() && *x > T::zero());
    let Some(probe) = shifted.lu().solve(&(-&ones)) else {
        return Ok(None);
    };
    if !positive(&probe) {
        return Ok(None);
    }

    let solve = |mat: DMatrix<T>| -> Result<DVector<T>> {
        mat.lu()
            .solve(&(-&ones))
            .ok_or_else(|| Error::SolverFailure("comparison matrix is singular".into()))
    };
    let d = solve(m.clone())?;
    let e = solve(m.transpose())?;
    let half = T::lit(0.5);
    let md = -(m * &d);
    let em = -(m.transpose() * &e);
    if !(positive(&d)
        && positive(&e)
        && md.iter().all(|x| *x > half)
        && em.iter().all(|x| *x > half))
    {
        return Err(Error::NumericalFailure(
            "Metzler scalings failed verification".into(),
        ));
    }
    Ok(Some(ScalingPair { d, e }))
}

/// Strict scaled diagonal dominance: `dᵢ|aᵢᵢ| > Σ_{j≠i} dⱼ|aᵢⱼ|` in row mode,
/// `dᵢ|aᵢᵢ| > Σ_{j≠i} dⱼ|aⱼᵢ|` in column mode.
pub fn check_scaled_dominance<T: Scalar>(
    a: &DMatrix<T>,
    d: &DVector<T>,
    mode: DominanceMode,
) -> Result<bool> {
    let n = ensure_square(a)?;
    if d.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "scaling has length {}, expected {n}",
            d.len()
        )));
    }
    if d.iter()
        .any(|x| x.partial_cmp(&T::zero()) != Some(std::cmp::Ordering::Greater))
    {
        return Err(Error::DimensionMismatch(
            "scaling must be strictly positive".into(),
        ));
    }
    let entry = |i: usize, j: usize| match mode {
        DominanceMode::Row => a[(i, j)],
        DominanceMode::Column => a[(j, i)],
    };
    Ok((0..n).all(|i| {
        let off = (0..n)
            .filter(|&j| j != i)
            .fold(T::zero(), |s, j| s + d[j] * entry(i, j).abs());
        d[i] * a[(i, i)].abs() > off
    }))
}

/// Per-block Gershgorin data at a point `λ`: `(σ_min(λI − Aᵢᵢ), Σ_{j≠i} σ̄(Aᵢⱼ))`.
pub fn block_gershgorin_radii<T: Scalar>(
    p: &PartitionedMatrix<T>,
    lambda: Complex<T>,
) -> Result<Vec<(T, T)>> {
    let n = p.num_blocks();
    (0..n)
        .map(|i| {
            let centre = resolvent_inverse_gain(&p.block0(i, i), lambda)?;
            let mut radius = T::zero();
            for j in (0..n).filter(|&j| j != i) {
                if !p.is_zero_block0(i, j) {
                    radius += max_singular_value(&p.block0(i, j))?;
                }
            }
            Ok((centre, radius))
        })
        .collect()
}

/// `true` when `λ` lies in at least one block Gershgorin set, i.e.
/// `σ_min(λI − Aᵢᵢ) ≤ Σ_{j≠i} σ̄(Aᵢⱼ) + tol` for some `i`.
pub fn in_block_gershgorin_set<T: Scalar>(
    p: &PartitionedMatrix<T>,
    lambda: Complex<T>,
    tol: T,
) -> Result<bool> {
    Ok(block_gershgorin_radii(p, lambda)?
        .iter()
        .any(|&(c, r)| c <= r + tol))
}

/// The trivial partition `{1, …, 1}` of a square matrix.
pub fn scalar_partition<T: Scalar>(a: DMatrix<T>) -> Result<PartitionedMatrix<T>> {
    let n = ensure_square(&a)?;
    PartitionedMatrix::new(a, BlockPartition::scalar(n)?)
}
