//! Sufficient conditions under which `A = [[B, δI], [δI, B]]` has a Hurwitz
//! block comparison matrix, yet no block-diagonal `X ≻ 0` makes the block
//! comparison matrix of `Aᵀ·X + X·A` Hurwitz.

use nalgebra::DMatrix;

use crate::comparison::block_comparison;
use crate::error::{Error, Result};
use crate::linalg::{
    ensure_square, is_hurwitz, max_singular_value, min_singular_value, solve_lyapunov, HinfOptions,
};
use crate::partition::make_partitioned;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleConditions<T: Scalar> {
    /// `σ_min(B) ≥ 1`.
    pub cond_a: bool,
    /// `σ̄(X₀)·δ ≥ ½` where `X₀·Bᵀ + B·X₀ + I = 0`.
    pub cond_b: bool,
    /// The block comparison matrix of `A` (partition `{k, k}`) is Hurwitz.
    pub cond_c: bool,
    pub sigma_min_b: T,
    pub sigma_max_x0: T,
    /// Smallest `δ` satisfying the second condition, `1 / (2·σ̄(X₀))`.
    pub critical_delta: T,
    pub comparison: DMatrix<T>,
}

impl<T: Scalar> CounterexampleConditions<T> {
    pub fn all(&self) -> bool {
        self.cond_a && self.cond_b && self.cond_c
    }
}

/// `[[B, δI], [δI, B]]`.
pub fn counterexample_matrix<T: Scalar>(b: &DMatrix<T>, delta: T) -> DMatrix<T> {
    let k = b.nrows();
    let mut a = DMatrix::zeros(2 * k, 2 * k);
    a.view_mut((0, 0), (k, k)).copy_from(b);
    a.view_mut((k, k), (k, k)).copy_from(b);
    for i in 0..k {
        a[(i, k + i)] = delta;
        a[(k + i, i)] = delta;
    }
    a
}

/// `1 / (2·σ̄(X₀))` for Hurwitz `b`.
pub fn critical_delta<T: Scalar>(b: &DMatrix<T>) -> Result<T> {
    let k = ensure_square(b)?;
    let x0 = solve_lyapunov(b, &DMatrix::identity(k, k))?;
    Ok(T::one() / (T::lit(2.0) * max_singular_value(&x0)?))
}

pub fn counterexample_conditions<T: Scalar>(
    b: &DMatrix<T>,
    delta: T,
    hinf: &HinfOptions<T>,
    hurwitz_margin: T,
) -> Result<CounterexampleConditions<T>> {
    let k = ensure_square(b)?;
    if !is_hurwitz(b, T::zero())? {
        return Err(Error::NotHurwitz);
    }
    let sigma_min_b = min_singular_value(b)?;
    let x0 = solve_lyapunov(b, &DMatrix::identity(k, k))?;
    let sigma_max_x0 = max_singular_value(&x0)?;
    let half = T::lit(0.5);
    let p = make_partitioned(counterexample_matrix(b, delta), &[k, k])?;
    let cmp = block_comparison(&p, hinf)?;
    Ok(CounterexampleConditions {
        cond_a: sigma_min_b >= T::one(),
        cond_b: sigma_max_x0 * delta >= half,
        cond_c: cmp.is_hurwitz(hurwitz_margin)?,
        sigma_min_b,
        sigma_max_x0,
        critical_delta: half / sigma_max_x0,
        comparison: cmp.matrix,
    })
}
