//! Continuous Lyapunov equation `X·aᵀ + a·X + q = 0`.

use nalgebra::{DMatrix, DVector};

use super::{ensure_finite, ensure_same_order, ensure_square, is_hurwitz, real_schur};
use crate::error::{Error, Result};
use crate::Scalar;

/// Orders up to this use the dense Kronecker system; larger ones use
/// Bartels–Stewart on the real Schur form.
pub const KRONECKER_MAX_ORDER: usize = 8;

/// Residual `X·aᵀ + a·X + q`.
pub fn lyapunov_residual<T: Scalar>(a: &DMatrix<T>, q: &DMatrix<T>, x: &DMatrix<T>) -> DMatrix<T> {
    x * a.transpose() + a * x + q
}

/// Solves `X·aᵀ + a·X + q = 0` for Hurwitz `a`. The result is symmetrized
/// when `q` is symmetric.
pub fn solve_lyapunov<T: Scalar>(a: &DMatrix<T>, q: &DMatrix<T>) -> Result<DMatrix<T>> {
    let n = ensure_square(a)?;
    ensure_same_order("q", q, n)?;
    ensure_finite(a)?;
    ensure_finite(q)?;
    if !is_hurwitz(a, T::zero())? {
        return Err(Error::NotHurwitz);
    }
    let x = if n <= KRONECKER_MAX_ORDER {
        solve_lyapunov_kronecker(a, q)?
    } else {
        solve_lyapunov_schur(a, q)?
    };
    if q == &q.transpose() {
        Ok(super::symmetrize(&x))
    } else {
        Ok(x)
    }
}

/// Direct solve of `(I ⊗ a + a ⊗ I)·vec(X) = −vec(q)`. Requires only that `a`
/// and `−a` share no eigenvalue; cost is `O(n⁶)`.
pub fn solve_lyapunov_kronecker<T: Scalar>(a: &DMatrix<T>, q: &DMatrix<T>) -> Result<DMatrix<T>> {
    let n = ensure_square(a)?;
    ensure_same_order("q", q, n)?;
    let nn = n * n;
    let mut k = DMatrix::<T>::zeros(nn, nn);
    // vec(a·X): block (j, j) = a; vec(X·aᵀ): block (j, l) = a[j, l]·I.
    for j in 0..n {
        for r in 0..n {
            for c in 0..n {
                k[(j * n + r, j * n + c)] += a[(r, c)];
            }
        }
        for l in 0..n {
            let coef = a[(j, l)];
            for r in 0..n {
                k[(j * n + r, l * n + r)] += coef;
            }
        }
    }
    let rhs = DVector::from_iterator(nn, q.iter().map(|&v| -v));
    let sol = k
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::SolverFailure("Lyapunov operator is singular".into()))?;
    Ok(DMatrix::from_column_slice(n, n, sol.as_slice()))
}

/// Bartels–Stewart: with `a = U·S·Uᵀ`, solves `S·Y + Y·Sᵀ = −Uᵀ·q·U` by block
/// back substitution over the quasi-triangular structure of `S`.
pub fn solve_lyapunov_schur<T: Scalar>(a: &DMatrix<T>, q: &DMatrix<T>) -> Result<DMatrix<T>> {
    let n = ensure_square(a)?;
    ensure_same_order("q", q, n)?;
    let schur = real_schur(a)?;
    let s = &schur.t;
    let u = &schur.z;
    let c = u.transpose() * q * u;
    let blocks = schur.blocks();
    let mut y = DMatrix::<T>::zeros(n, n);

    for bi in (0..blocks.len()).rev() {
        let (i0, p) = blocks[bi];
        for bj in (0..blocks.len()).rev() {
            let (j0, r) = blocks[bj];
            // rhs = −C_ij − Σ_{k>i} S_ik·Y_kj − Σ_{l>j} Y_il·S_jlᵀ
            let mut rhs = -c.view((i0, j0), (p, r)).clone_owned();
            let below = i0 + p;
            if below < n {
                rhs -= s.view((i0, below), (p, n - below)) * y.view((below, j0), (n - below, r));
            }
            let right = j0 + r;
            if right < n {
                rhs -= y.view((i0, right), (p, n - right))
                    * s.view((j0, right), (r, n - right)).transpose();
            }
            let sii = s.view((i0, i0), (p, p)).clone_owned();
            let sjj = s.view((j0, j0), (r, r)).clone_owned();
            let block = small_sylvester(&sii, &sjj, &rhs)?;
            y.view_mut((i0, j0), (p, r)).copy_from(&block);
        }
    }
    Ok(u * y * u.transpose())
}

/// Solves `a·Y + Y·bᵀ = rhs` for blocks of order ≤ 2.
fn small_sylvester<T: Scalar>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    rhs: &DMatrix<T>,
) -> Result<DMatrix<T>> {
    let p = a.nrows();
    let r = b.nrows();
    let mut k = DMatrix::<T>::zeros(p * r, p * r);
    for col in 0..r {
        for row in 0..p {
            let eq = col * p + row;
            for m in 0..p {
                k[(eq, col * p + m)] += a[(row, m)];
            }
            for c in 0..r {
                k[(eq, c * p + row)] += b[(col, c)];
            }
        }
    }
    let v = DVector::from_column_slice(rhs.as_slice());
    let sol = k
        .lu()
        .solve(&v)
        .ok_or_else(|| Error::SolverFailure("Sylvester block is singular".into()))?;
    Ok(DMatrix::from_column_slice(p, r, sol.as_slice()))
}
