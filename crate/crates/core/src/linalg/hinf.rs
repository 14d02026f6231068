//! `‖(sI − a)⁻¹‖_H∞` by bisection on the bounded-real Hamiltonian.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex;

use super::{eigenvalues, ensure_finite, ensure_square, modulus, resolvent_inverse_gain};
use crate::error::{Error, Result};
use crate::Scalar;

/// A nonnegative real or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal<T> {
    Finite(T),
    Infinity,
}

impl<T: Scalar> ExtendedReal<T> {
    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite(_))
    }

    pub fn finite(&self) -> Option<T> {
        match *self {
            Self::Finite(v) => Some(v),
            Self::Infinity => None,
        }
    }

    /// `f64::INFINITY` for the infinite case.
    pub fn to_f64(&self) -> f64 {
        self.finite().map_or(f64::INFINITY, Scalar::as_f64)
    }
}

impl<T: Scalar> fmt::Display for ExtendedReal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => fmt::Display::fmt(v, f),
            Self::Infinity => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct HinfOptions<T> {
    /// Relative bracket width at which bisection stops.
    pub tol: T,
    pub max_iter: usize,
}

impl<T: Scalar> Default for HinfOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-8),
            max_iter: 200,
        }
    }
}

impl<T: Scalar> HinfOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HinfResult<T> {
    /// Upper end of the final bracket, or `Infinity` when `a` is not Hurwitz.
    pub norm: ExtendedReal<T>,
    /// `1 / norm`, and `0` in the infinite case.
    pub inverse_norm: T,
    /// Frequency at which the largest gain was observed.
    pub peak_frequency: T,
    pub iterations: usize,
}

/// `σ̄((iωI − a)⁻¹)`. Infinite (for floating types) when `iω` is an eigenvalue.
pub fn resolvent_gain<T: Scalar>(a: &DMatrix<T>, omega: T) -> Result<T> {
    let s = resolvent_inverse_gain(a, Complex::new(T::zero(), omega))?;
    Ok(T::one() / s)
}

fn hamiltonian<T: Scalar>(a: &DMatrix<T>, gamma: T) -> DMatrix<T> {
    let n = a.nrows();
    let inv = T::one() / gamma;
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    h.view_mut((0, 0), (n, n)).copy_from(a);
    h.view_mut((n, n), (n, n)).copy_from(&(-a.transpose()));
    for i in 0..n {
        h[(i, n + i)] = inv;
        h[(n + i, i)] = -inv;
    }
    h
}

/// Frequencies `ω ≥ 0` such that `iω` is (numerically) an eigenvalue of the
/// Hamiltonian at level `gamma`. Nonempty iff `gamma ≤ ‖(sI − a)⁻¹‖_H∞`.
fn crossing_frequencies<T: Scalar>(a: &DMatrix<T>, gamma: T) -> Result<Vec<T>> {
    let axis = T::axis_tol();
    let spectrum = eigenvalues(&hamiltonian(a, gamma))?;
    Ok(spectrum
        .eigenvalues
        .iter()
        .filter(|z| z.re.abs() <= axis * (T::one() + modulus(z)))
        .map(|z| z.im.abs())
        .collect())
}

struct Peak<T> {
    gain: T,
    frequency: T,
}

impl<T: Scalar> Peak<T> {
    fn offer(&mut self, a: &DMatrix<T>, omega: T) -> Result<()> {
        let g = resolvent_gain(a, omega)?;
        if g > self.gain {
            self.gain = g;
            self.frequency = omega;
        }
        Ok(())
    }
}

/// H∞ norm of the resolvent `(sI − a)⁻¹`.
///
/// The lower bound starts from `ω = 0` and the moduli of the eigenvalues of
/// `a`, and is raised whenever a Hamiltonian test exposes an axis crossing.
/// The returned norm is the upper end of the bracket, so it never
/// underestimates the true value.
pub fn hinf_norm_resolvent<T: Scalar>(
    a: &DMatrix<T>,
    opts: &HinfOptions<T>,
) -> Result<HinfResult<T>> {
    let n = ensure_square(a)?;
    ensure_finite(a)?;
    if n == 0 {
        return Err(Error::Empty);
    }
    let spectrum = eigenvalues(a)?;
    if spectrum.abscissa().is_some_and(|r| r >= T::zero()) {
        let peak = spectrum
            .eigenvalues
            .iter()
            .filter(|z| z.re >= T::zero())
            .map(|z| z.im.abs())
            .fold(T::zero(), |m, w| m.max(w));
        return Ok(HinfResult {
            norm: ExtendedReal::Infinity,
            inverse_norm: T::zero(),
            peak_frequency: peak,
            iterations: 0,
        });
    }

    let mut peak = Peak {
        gain: T::zero(),
        frequency: T::zero(),
    };
    peak.offer(a, T::zero())?;
    for z in &spectrum.eigenvalues {
        peak.offer(a, z.im.abs())?;
        peak.offer(a, modulus(z))?;
    }
    if !(peak.gain.is_finite() && peak.gain > T::zero()) {
        return Err(Error::NumericalFailure(
            "resolvent gain is not finite".into(),
        ));
    }

    let two = T::lit(2.0);
    let mut lo = peak.gain;
    let mut hi = lo * two;
    let mut iterations = 0;
    loop {
        let crossings = crossing_frequencies(a, hi)?;
        if crossings.is_empty() {
            break;
        }
        iterations += 1;
        if iterations > opts.max_iter {
            return Err(Error::IterationBudgetExceeded(opts.max_iter));
        }
        for w in crossings {
            peak.offer(a, w)?;
        }
        lo = lo.max(hi).max(peak.gain);
        hi = lo * two;
    }

    while (hi - lo) / lo > opts.tol {
        iterations += 1;
        if iterations > opts.max_iter {
            return Err(Error::IterationBudgetExceeded(opts.max_iter));
        }
        let mid = (lo * hi).sqrt();
        let crossings = crossing_frequencies(a, mid)?;
        if crossings.is_empty() {
            hi = mid;
        } else {
            for w in crossings {
                peak.offer(a, w)?;
            }
            lo = mid.max(peak.gain).min(hi);
        }
    }

    Ok(HinfResult {
        norm: ExtendedReal::Finite(hi),
        inverse_norm: T::one() / hi,
        peak_frequency: peak.frequency,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(a: &DMatrix<f64>) -> HinfResult<f64> {
        hinf_norm_resolvent(a, &HinfOptions::default()).unwrap()
    }

    #[test]
    fn scalar_pole() {
        let r = run(&DMatrix::from_row_slice(1, 1, &[-2.0]));
        assert!((r.norm.to_f64() - 0.5).abs() < 1e-8);
        assert!((r.inverse_norm - 2.0).abs() < 1e-7);
        assert_eq!(r.peak_frequency, 0.0);
    }

    #[test]
    fn unstable_scalar_is_infinite() {
        let r = run(&DMatrix::from_row_slice(1, 1, &[1.0]));
        assert_eq!(r.norm, ExtendedReal::Infinity);
        assert_eq!(r.inverse_norm, 0.0);
    }

    #[test]
    fn marginal_rotation_is_infinite() {
        let r = run(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        assert_eq!(r.norm, ExtendedReal::Infinity);
        assert!((r.peak_frequency - 1.0).abs() < 1e-12);
    }

    #[test]
    fn metzler_block_peaks_at_zero_frequency() {
        let a = DMatrix::from_row_slice(2, 2, &[-6.0, 4.0, 8.0, -7.0]);
        let r = run(&a);
        let inv = a.clone().try_inverse().unwrap();
        let expected = crate::linalg::max_singular_value(&inv).unwrap();
        assert!((r.norm.to_f64() - expected).abs() <= 1e-7 * expected);
        assert!((r.inverse_norm - 0.77994).abs() < 5e-5);
    }

    #[test]
    fn resonant_block_beats_frequency_grid() {
        let a = DMatrix::from_row_slice(3, 3, &[-1.0, -2.0, 4.0, 3.0, -1.0, 6.0, 1.0, 0.0, -7.0]);
        let r = run(&a);
        let norm = r.norm.to_f64();
        let grid = (0..4000)
            .map(|k| 10f64.powf(-3.0 + 6.0 * k as f64 / 3999.0))
            .map(|w| resolvent_gain(&a, w).unwrap())
            .fold(0.0f64, f64::max);
        assert!(norm >= grid);
        assert!(norm <= grid * (1.0 + 1e-4));
        assert!(r.peak_frequency > 1.0);
        assert!(r.inverse_norm * norm > 1.0 - 1e-12 && r.inverse_norm * norm < 1.0 + 1e-12);
    }

    #[test]
    fn lightly_damped_peak_is_found() {
        let a = DMatrix::from_row_slice(2, 2, &[-0.01, 10.0, -10.0, -0.01]);
        let r = run(&a);
        assert!((r.norm.to_f64() - 100.0).abs() < 1e-5);
        assert!((r.peak_frequency - 10.0).abs() < 1e-3);
    }

    #[test]
    fn single_precision() {
        let a = DMatrix::from_row_slice(1, 1, &[-4.0f32]);
        let r = hinf_norm_resolvent(&a, &HinfOptions::with_tol(1e-5)).unwrap();
        assert!((r.inverse_norm - 4.0).abs() < 1e-3);
    }
}
