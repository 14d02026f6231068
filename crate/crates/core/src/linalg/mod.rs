//! Dense kernels: spectra, singular values, Lyapunov and Riccati solvers, and
//! the H-infinity norm of a resolvent.

mod hinf;
mod lyapunov;
mod riccati;
mod schur;

pub use hinf::{hinf_norm_resolvent, resolvent_gain, ExtendedReal, HinfOptions, HinfResult};
pub use lyapunov::{
    lyapunov_residual, solve_lyapunov, solve_lyapunov_kronecker, solve_lyapunov_schur,
};
pub use riccati::{care_residual, solve_care_positive, CareOptions};
pub use schur::{real_schur, RealSchur};

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::Scalar;

/// Dense real matrix, the numeric carrier for every operation.
pub type DenseMatrix<T> = DMatrix<T>;

const SVD_MAX_SWEEPS: usize = 10_000;

/// Eigenvalues of a real square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    pub eigenvalues: Vec<Complex<T>>,
}

impl<T: Scalar> Spectrum<T> {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Largest real part (spectral abscissa). `None` for an empty spectrum.
    pub fn abscissa(&self) -> Option<T> {
        self.eigenvalues
            .iter()
            .map(|z| z.re)
            .reduce(|a, b| a.max(b))
    }
}

pub fn ensure_square<T: Scalar>(m: &DMatrix<T>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NonSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub fn ensure_finite<T: Scalar>(m: &DMatrix<T>) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub(crate) fn ensure_same_order<T: Scalar>(what: &str, m: &DMatrix<T>, n: usize) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "{what} is {}x{}, expected {n}x{n}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// `(m + mᵀ) / 2`.
pub fn symmetrize<T: Scalar>(m: &DMatrix<T>) -> DMatrix<T> {
    (m + m.transpose()) * T::lit(0.5)
}

/// Frobenius norm.
pub fn frobenius<T: Scalar>(m: &DMatrix<T>) -> T {
    m.norm()
}

/// `|z|` without requiring `Float` on `T`.
pub(crate) fn modulus<T: Scalar>(z: &Complex<T>) -> T {
    z.re.hypot(z.im)
}

/// All eigenvalues of a square matrix, via a real Schur decomposition.
pub fn eigenvalues<T: Scalar>(m: &DMatrix<T>) -> Result<Spectrum<T>> {
    ensure_square(m)?;
    ensure_finite(m)?;
    let schur = real_schur(m)?;
    Ok(Spectrum {
        eigenvalues: schur.eigenvalues(),
    })
}

/// `true` iff every eigenvalue has real part below `-margin`.
pub fn is_hurwitz<T: Scalar>(m: &DMatrix<T>, margin: T) -> Result<bool> {
    let spectrum = eigenvalues(m)?;
    Ok(spectrum.abscissa().is_none_or(|a| a < -margin))
}

/// Singular values in descending order.
pub fn singular_values<T: Scalar>(m: &DMatrix<T>) -> Result<Vec<T>> {
    if m.is_empty() {
        return Err(Error::Empty);
    }
    ensure_finite(m)?;
    let svd = SVD::try_new(
        m.clone(),
        false,
        false,
        T::default_epsilon(),
        SVD_MAX_SWEEPS,
    )
    .ok_or(Error::IterationFailure("singular value decomposition"))?;
    let mut values: Vec<T> = svd.singular_values.iter().copied().collect();
    values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(values)
}

/// Largest singular value, `‖m‖₂`. Exactly zero for an all-zero matrix.
pub fn max_singular_value<T: Scalar>(m: &DMatrix<T>) -> Result<T> {
    if m.is_empty() {
        return Err(Error::Empty);
    }
    if m.iter().all(|x| x.is_zero()) {
        return Ok(T::zero());
    }
    Ok(singular_values(m)?[0])
}

/// Smallest singular value. For non-square input this is the smallest of the
/// `min(rows, cols)` singular values.
pub fn min_singular_value<T: Scalar>(m: &DMatrix<T>) -> Result<T> {
    let values = singular_values(m)?;
    Ok(*values.last().expect("nonempty"))
}

/// Eigenvalues of the symmetric part of `m`, ascending.
pub fn symmetric_eigenvalues<T: Scalar>(m: &DMatrix<T>) -> Result<Vec<T>> {
    ensure_square(m)?;
    ensure_finite(m)?;
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let eig = SymmetricEigen::try_new(symmetrize(m), T::default_epsilon(), SVD_MAX_SWEEPS).ok_or(
        Error::IterationFailure("symmetric eigenvalue decomposition"),
    )?;
    let mut values: Vec<T> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(values)
}

/// Smallest eigenvalue of the symmetric part of `m`.
pub fn min_symmetric_eigenvalue<T: Scalar>(m: &DMatrix<T>) -> Result<T> {
    symmetric_eigenvalues(m)?
        .first()
        .copied()
        .ok_or(Error::Empty)
}

/// Largest eigenvalue of the symmetric part of `m`.
pub fn max_symmetric_eigenvalue<T: Scalar>(m: &DMatrix<T>) -> Result<T> {
    symmetric_eigenvalues(m)?
        .last()
        .copied()
        .ok_or(Error::Empty)
}

/// Real embedding `[[Re, -Im], [Im, Re]]` of `z·I - m`; its singular values are
/// those of the complex matrix, each repeated twice.
pub(crate) fn shifted_real_embedding<T: Scalar>(m: &DMatrix<T>, z: Complex<T>) -> DMatrix<T> {
    let n = m.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = -m[(i, j)];
            out[(n + i, n + j)] = -m[(i, j)];
        }
        out[(i, i)] += z.re;
        out[(n + i, n + i)] += z.re;
        out[(i, n + i)] = -z.im;
        out[(n + i, i)] = z.im;
    }
    out
}

/// `σ_min(z·I - m)` for complex `z`, i.e. `‖(zI - m)⁻¹‖₂⁻¹`.
pub fn resolvent_inverse_gain<T: Scalar>(m: &DMatrix<T>, z: Complex<T>) -> Result<T> {
    ensure_square(m)?;
    if z.im.is_zero() {
        let mut shifted = -m.clone();
        for i in 0..m.nrows() {
            shifted[(i, i)] += z.re;
        }
        return min_singular_value(&shifted);
    }
    min_singular_value(&shifted_real_embedding(m, z))
}

/// Block-diagonal matrix with the given square blocks.
pub(crate) fn block_diagonal<T: Scalar>(blocks: &[DMatrix<T>]) -> DMatrix<T> {
    let total: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(total, total);
    let mut offset = 0;
    for b in blocks {
        let k = b.nrows();
        out.view_mut((offset, offset), (k, k)).copy_from(b);
        offset += k;
    }
    out
}
