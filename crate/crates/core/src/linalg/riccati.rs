//! Riccati equations with a positive quadratic term,
//! `P·a + aᵀ·P + P·r·P + q = 0`, as they arise from the bounded real lemma.

use nalgebra::DMatrix;

use super::{
    ensure_finite, ensure_same_order, ensure_square, is_hurwitz, min_symmetric_eigenvalue, modulus,
    real_schur, solve_lyapunov, symmetrize,
};
use crate::error::{Error, Result};
use crate::Scalar;

#[derive(Debug, Clone, Copy)]
pub struct CareOptions<T> {
    /// Accepted residual relative to the size of the equation's terms.
    pub tol: T,
    /// Apply one Newton defect-correction step after the Schur solve.
    pub refine: bool,
}

impl<T: Scalar> Default for CareOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-8),
            refine: false,
        }
    }
}

/// Returns `(‖P·a + aᵀ·P + P·r·P + q‖_F, scale)` where `scale` bounds the
/// Frobenius norms of the individual terms.
pub fn care_residual<T: Scalar>(
    a: &DMatrix<T>,
    r: &DMatrix<T>,
    q: &DMatrix<T>,
    p: &DMatrix<T>,
) -> (T, T) {
    let pa = p * a;
    let prp = p * r * p;
    let res = &pa + pa.transpose() + &prp + q;
    let scale = T::lit(2.0) * pa.norm() + prp.norm() + q.norm();
    (res.norm(), scale)
}

/// Stabilizing solution of `P·a + aᵀ·P + P·r·P + q = 0` (closed loop
/// `a + r·P` Hurwitz) when it exists and is positive definite.
///
/// `r` must be symmetric positive semidefinite and `q` symmetric positive
/// definite. Returns `Ok(None)` when the Hamiltonian `[[a, r], [−q, −aᵀ]]` has
/// eigenvalues on the imaginary axis or the stable subspace is not a graph;
/// in both cases no such `P` exists.
pub fn solve_care_positive<T: Scalar>(
    a: &DMatrix<T>,
    r: &DMatrix<T>,
    q: &DMatrix<T>,
    opts: CareOptions<T>,
) -> Result<Option<DMatrix<T>>> {
    let n = ensure_square(a)?;
    ensure_same_order("r", r, n)?;
    ensure_same_order("q", q, n)?;
    ensure_finite(a)?;
    ensure_finite(r)?;
    ensure_finite(q)?;
    if n == 0 {
        return Ok(Some(DMatrix::zeros(0, 0)));
    }

    let mut ham = DMatrix::<T>::zeros(2 * n, 2 * n);
    ham.view_mut((0, 0), (n, n)).copy_from(a);
    ham.view_mut((0, n), (n, n)).copy_from(r);
    ham.view_mut((n, 0), (n, n)).copy_from(&(-q));
    ham.view_mut((n, n), (n, n)).copy_from(&(-a.transpose()));

    let mut schur = real_schur(&ham)?;
    let axis = T::axis_tol();
    let on_axis = schur
        .eigenvalues()
        .iter()
        .any(|z| z.re.abs() <= axis * (T::one() + modulus(z)));
    if on_axis {
        return Ok(None);
    }
    let stable = schur.reorder(|z| z.re < T::zero())?;
    if stable != n {
        return Ok(None);
    }

    let u1 = schur.z.view((0, 0), (n, n)).clone_owned();
    let u2 = schur.z.view((n, 0), (n, n)).clone_owned();
    // P = U2·U1⁻¹  ⇔  U1ᵀ·Pᵀ = U2ᵀ
    let lu = u1.transpose().lu();
    let cond_guard = u1.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let Some(pt) = lu.solve(&u2.transpose()) else {
        return Ok(None);
    };
    if !pt.iter().all(|x| x.is_finite()) || cond_guard.is_zero() {
        return Ok(None);
    }
    let mut p = symmetrize(&pt.transpose());

    if opts.refine {
        let closed = a + r * &p;
        if is_hurwitz(&closed, T::zero())? {
            let res = &p * a + a.transpose() * &p + &p * r * &p + q;
            // (a + rP)ᵀ·Δ + Δ·(a + rP) + res = 0
            if let Ok(delta) = solve_lyapunov(&closed.transpose(), &symmetrize(&res)) {
                p = symmetrize(&(&p + delta));
            }
        }
    }

    let (res, scale) = care_residual(a, r, q, &p);
    if res > opts.tol * scale {
        return Err(Error::NumericalFailure(format!(
            "Riccati residual {res:e} exceeds tolerance (scale {scale:e})"
        )));
    }
    if min_symmetric_eigenvalue(&p)? <= T::zero() {
        return Ok(None);
    }
    if !is_hurwitz(&(a + r * &p), T::zero())? {
        return Ok(None);
    }
    Ok(Some(p))
}
