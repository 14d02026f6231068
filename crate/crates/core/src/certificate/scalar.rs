//! Scalar (1×1 block) witnesses `(w, v, p)` for diagonal stability.
//!
//! The conditions are `−aᵢᵢ ≥ (wᵢᵢ + vᵢᵢ)/(2pᵢ)`, `|aᵢⱼ| ≤ √(wᵢⱼ·vᵢⱼ)/pᵢ`,
//! `wᵢᵢ > Σ_{j≠i} wᵢⱼ` and `vᵢᵢ > Σ_{j≠i} vⱼᵢ`.

use nalgebra::{DMatrix, DVector};

use super::CertifyOptions;
use crate::comparison::{metzler_scalings, scalar_comparison};
use crate::error::{Error, Result};
use crate::linalg::{ensure_finite, ensure_square};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarWitnesses<T: Scalar> {
    pub w: DMatrix<T>,
    pub v: DMatrix<T>,
    pub p: DVector<T>,
}

/// Builds witnesses from the scalings of a Hurwitz `M(A)`:
/// `wᵢⱼ = |aᵢⱼ|·eᵢ·dⱼ/dᵢ²`, `vᵢⱼ = |aᵢⱼ|·eᵢ/dⱼ`, `pᵢ = eᵢ/dᵢ`, with each
/// diagonal `wᵢᵢ`, `vᵢᵢ` placed halfway between its lower bound and
/// `−aᵢᵢ·pᵢ`. Returns `None` when `M(A)` is not Hurwitz.
pub fn scalar_witnesses<T: Scalar>(
    a: &DMatrix<T>,
    opts: &CertifyOptions<T>,
) -> Result<Option<ScalarWitnesses<T>>> {
    let n = ensure_square(a)?;
    let cmp = scalar_comparison(a)?;
    let Some(s) = metzler_scalings(&cmp.matrix, opts.hurwitz_margin)? else {
        return Ok(None);
    };
    let (d, e) = (&s.d, &s.e);
    let p = DVector::from_fn(n, |i, _| e[i] / d[i]);
    let mut w = DMatrix::zeros(n, n);
    let mut v = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let aij = a[(i, j)].abs();
            w[(i, j)] = aij * e[i] * d[j] / (d[i] * d[i]);
            v[(i, j)] = aij * e[i] / d[j];
        }
    }
    let half = T::lit(0.5);
    for i in 0..n {
        let cap = -a[(i, i)] * p[i];
        let w_sum = (0..n)
            .filter(|&j| j != i)
            .fold(T::zero(), |s, j| s + w[(i, j)]);
        let v_sum = (0..n)
            .filter(|&j| j != i)
            .fold(T::zero(), |s, j| s + v[(j, i)]);
        w[(i, i)] = (w_sum + cap) * half;
        v[(i, i)] = (v_sum + cap) * half;
    }
    let out = ScalarWitnesses { w, v, p };
    if !verify_scalar_conditions(a, &out, opts.margin)? {
        return Err(Error::NumericalFailure(
            "scalar witnesses failed verification".into(),
        ));
    }
    Ok(Some(out))
}

/// Checks all four families of scalar conditions. Strict inequalities need
/// slack above `margin·(1 + |terms|)`; non-strict ones tolerate the same
/// amount of violation.
pub fn verify_scalar_conditions<T: Scalar>(
    a: &DMatrix<T>,
    wit: &ScalarWitnesses<T>,
    margin: T,
) -> Result<bool> {
    let n = ensure_square(a)?;
    ensure_finite(a)?;
    if wit.w.shape() != (n, n) || wit.v.shape() != (n, n) || wit.p.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "scalar witnesses must match order {n}"
        )));
    }
    let (w, v, p) = (&wit.w, &wit.v, &wit.p);
    let nonneg = |m: &DMatrix<T>| m.iter().all(|x| x.is_finite() && *x >= T::zero());
    if !nonneg(w) || !nonneg(v) || p.iter().any(|x| !(x.is_finite() && *x > T::zero())) {
        return Ok(false);
    }
    let two = T::lit(2.0);
    let tol = |x: T, y: T| margin * (T::one() + x.abs() + y.abs());
    for i in 0..n {
        let lhs = -a[(i, i)];
        let rhs = (w[(i, i)] + v[(i, i)]) / (two * p[i]);
        if lhs - rhs < -tol(lhs, rhs) {
            return Ok(false);
        }
        let mut w_sum = T::zero();
        let mut v_sum = T::zero();
        for j in (0..n).filter(|&j| j != i) {
            let lhs = a[(i, j)].abs();
            let rhs = (w[(i, j)] * v[(i, j)]).sqrt() / p[i];
            if rhs - lhs < -tol(lhs, rhs) {
                return Ok(false);
            }
            w_sum += w[(i, j)];
            v_sum += v[(j, i)];
        }
        if w[(i, i)] - w_sum <= tol(w[(i, i)], w_sum) || v[(i, i)] - v_sum <= tol(v[(i, i)], v_sum)
        {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, data: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(rows, rows, data)
    }

    #[test]
    fn symmetric_dominant_matrix() {
        let a = m(2, &[-3.0, 1.0, 1.0, -3.0]);
        let wit = scalar_witnesses(&a, &CertifyOptions::default())
            .unwrap()
            .unwrap();
        // d = e = (½, ½) so p = 1 and wᵢⱼ = vᵢⱼ = |aᵢⱼ|.
        assert!((wit.p[0] - 1.0).abs() < 1e-14);
        assert!((wit.w[(0, 1)] - 1.0).abs() < 1e-14);
        assert!((wit.w[(0, 0)] - 2.0).abs() < 1e-14);
        assert!(verify_scalar_conditions(&a, &wit, 1e-9).unwrap());
    }

    #[test]
    fn non_dominant_matrix_has_no_witnesses() {
        let a = m(2, &[-1.0, 2.0, 2.0, -1.0]);
        assert!(scalar_witnesses(&a, &CertifyOptions::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn single_entry() {
        let a = m(1, &[-5.0]);
        let wit = scalar_witnesses(&a, &CertifyOptions::default())
            .unwrap()
            .unwrap();
        assert!((wit.p[0] - 1.0).abs() < 1e-14);
        assert!(verify_scalar_conditions(&a, &wit, 1e-9).unwrap());
    }

    #[test]
    fn doubling_p_breaks_witnesses() {
        let a = m(2, &[-3.0, 1.0, 1.0, -3.0]);
        let mut wit = scalar_witnesses(&a, &CertifyOptions::default())
            .unwrap()
            .unwrap();
        wit.p *= 2.0;
        assert!(!verify_scalar_conditions(&a, &wit, 1e-9).unwrap());
    }

    #[test]
    fn diagonal_matrix_with_small_witnesses() {
        let a = m(2, &[-1.0, 0.0, 0.0, -2.0]);
        let wit = ScalarWitnesses {
            w: m(2, &[0.1, 0.0, 0.0, 0.1]),
            v: m(2, &[0.1, 0.0, 0.0, 0.1]),
            p: DVector::from_element(2, 1.0),
        };
        assert!(verify_scalar_conditions(&a, &wit, 1e-9).unwrap());
    }

    #[test]
    fn dimension_mismatch() {
        let a = m(2, &[-1.0, 0.0, 0.0, -2.0]);
        let wit = ScalarWitnesses {
            w: m(1, &[0.1]),
            v: m(1, &[0.1]),
            p: DVector::from_element(1, 1.0),
        };
        assert!(matches!(
            verify_scalar_conditions(&a, &wit, 0.0),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
