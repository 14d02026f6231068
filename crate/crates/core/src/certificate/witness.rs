//! Matrix witnesses `(P, W, V)` for block-diagonal stability and their
//! construction from a Hurwitz block comparison matrix.
//!
//! The inequalities checked are
//! `Pᵢ·Aᵢᵢ + Aᵢᵢᵀ·Pᵢ + Vᵢᵢ + Wᵢᵢ ⪯ 0`,
//! `[[Wᵢⱼ, −Pᵢ·Aᵢⱼ], [−Aᵢⱼᵀ·Pᵢ, Vᵢⱼ]] ⪰ 0` for `i ≠ j`, and
//! `Vᵢᵢ ≻ Σ_{j≠i} Vⱼᵢ`, `Wᵢᵢ ≻ Σ_{j≠i} Wᵢⱼ`, together with `Pᵢ ≻ 0`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::decoupled::coupling_weight;
use super::{floor, lambda_max, lambda_min, CertifyOptions, GammaMatrix, Method};
use crate::comparison::{
    block_comparison, check_scaled_dominance, DiagonalSource, DominanceMode, ScalingPair,
};
use crate::error::{Error, Result};
use crate::linalg::{care_residual, solve_care_positive};
use crate::partition::PartitionedMatrix;
use crate::Scalar;

/// `W[i][j]` is `kᵢ×kᵢ`, `V[i][j]` is `kⱼ×kⱼ`. Entries for zero coupling
/// blocks are zero matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessSet<T: Scalar> {
    pub p: Vec<DMatrix<T>>,
    pub w: Vec<Vec<DMatrix<T>>>,
    pub v: Vec<Vec<DMatrix<T>>>,
}

impl<T: Scalar> WitnessSet<T> {
    fn check_dimensions(&self, part: &crate::partition::BlockPartition) -> Result<()> {
        let n = part.len();
        let bad = |what: &str| {
            Err(Error::DimensionMismatch(format!(
                "witness {what} does not match the partition"
            )))
        };
        if self.p.len() != n || self.w.len() != n || self.v.len() != n {
            return bad("grid");
        }
        for i in 0..n {
            let ki = part.size0(i);
            if self.p[i].shape() != (ki, ki) || self.w[i].len() != n || self.v[i].len() != n {
                return bad("P");
            }
            for j in 0..n {
                let kj = part.size0(j);
                if self.w[i][j].shape() != (ki, ki) {
                    return bad("W");
                }
                if self.v[i][j].shape() != (kj, kj) {
                    return bad("V");
                }
            }
        }
        Ok(())
    }
}

/// Slack of every constraint; positive means satisfied with room to spare.
/// Non-strict constraints hold when their slack is at least `−tolerance`,
/// strict ones when it exceeds `+tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessCheck<T: Scalar> {
    pub holds: bool,
    /// `λ_min(Pᵢ)`.
    pub p_slack: Vec<T>,
    /// `−λ_max(Pᵢ·Aᵢᵢ + Aᵢᵢᵀ·Pᵢ + Vᵢᵢ + Wᵢᵢ)`.
    pub diagonal_slack: Vec<T>,
    /// `λ_min` of each coupling block matrix; zero where the block is absent.
    pub coupling_slack: DMatrix<T>,
    /// `λ_min(Vᵢᵢ − Σ_{j≠i} Vⱼᵢ)`.
    pub v_dominance_slack: Vec<T>,
    /// `λ_min(Wᵢᵢ − Σ_{j≠i} Wᵢⱼ)`.
    pub w_dominance_slack: Vec<T>,
}

impl<T: Scalar> WitnessCheck<T> {
    /// Smallest slack over the strict dominance constraints.
    pub fn min_dominance_slack(&self) -> T {
        self.v_dominance_slack
            .iter()
            .chain(&self.w_dominance_slack)
            .copied()
            .fold(T::max_value().unwrap_or_else(T::one), |a, b| a.min(b))
    }
}

fn coupling_matrix<T: Scalar>(w: &DMatrix<T>, pa: &DMatrix<T>, v: &DMatrix<T>) -> DMatrix<T> {
    let (ki, kj) = (w.nrows(), v.nrows());
    let mut m = DMatrix::zeros(ki + kj, ki + kj);
    m.view_mut((0, 0), (ki, ki)).copy_from(w);
    m.view_mut((ki, ki), (kj, kj)).copy_from(v);
    m.view_mut((0, ki), (ki, kj)).copy_from(&(-pa));
    m.view_mut((ki, 0), (kj, ki)).copy_from(&(-pa.transpose()));
    m
}

/// Checks every witness inequality by eigenvalue computations.
pub fn verify_general_witnesses<T: Scalar>(
    p: &PartitionedMatrix<T>,
    w: &WitnessSet<T>,
    margin: T,
) -> Result<WitnessCheck<T>> {
    w.check_dimensions(p.partition())?;
    let n = p.num_blocks();
    let mut holds = true;
    let mut p_slack = Vec::with_capacity(n);
    let mut diagonal_slack = Vec::with_capacity(n);
    let mut v_dominance_slack = Vec::with_capacity(n);
    let mut w_dominance_slack = Vec::with_capacity(n);
    let mut coupling_slack = DMatrix::zeros(n, n);

    for i in 0..n {
        let pi = &w.p[i];
        let s = lambda_min(pi)?;
        holds &= s > floor(margin, &[pi]);
        p_slack.push(s);

        let pa = pi * p.block0(i, i);
        let lyap = &pa + pa.transpose();
        let s = -lambda_max(&(&lyap + &w.v[i][i] + &w.w[i][i]))?;
        holds &= s >= -floor(margin, &[&pa, &w.v[i][i], &w.w[i][i]]);
        diagonal_slack.push(s);

        let others = (0..n).filter(|&j| j != i);
        let v_sum = others
            .clone()
            .fold(DMatrix::zeros(pi.nrows(), pi.nrows()), |acc, j| {
                acc + &w.v[j][i]
            });
        let w_sum = others.fold(DMatrix::zeros(pi.nrows(), pi.nrows()), |acc, j| {
            acc + &w.w[i][j]
        });
        let s = lambda_min(&(&w.v[i][i] - &v_sum))?;
        holds &= s > floor(margin, &[&w.v[i][i], &v_sum]);
        v_dominance_slack.push(s);
        let s = lambda_min(&(&w.w[i][i] - &w_sum))?;
        holds &= s > floor(margin, &[&w.w[i][i], &w_sum]);
        w_dominance_slack.push(s);

        for j in (0..n).filter(|&j| j != i) {
            if p.is_zero_block0(i, j)
                && w.w[i][j].iter().all(|x| x.is_zero())
                && w.v[i][j].iter().all(|x| x.is_zero())
            {
                continue;
            }
            let pa = pi * p.block0(i, j);
            let s = lambda_min(&coupling_matrix(&w.w[i][j], &pa, &w.v[i][j]))?;
            holds &= s >= -floor(margin, &[&w.w[i][j], &pa, &w.v[i][j]]);
            coupling_slack[(i, j)] = s;
        }
    }
    Ok(WitnessCheck {
        holds,
        p_slack,
        diagonal_slack,
        coupling_slack,
        v_dominance_slack,
        w_dominance_slack,
    })
}

/// The three terms whose sum is `P·A + Aᵀ·P` for any witness set:
/// the embedded diagonal inequalities, minus the embedded dominance
/// differences, plus the embedded coupling matrices (with signs flipped).
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovDecomposition<T: Scalar> {
    pub diagonal_term: DMatrix<T>,
    pub dominance_term: DMatrix<T>,
    pub coupling_term: DMatrix<T>,
}

impl<T: Scalar> LyapunovDecomposition<T> {
    pub fn total(&self) -> DMatrix<T> {
        &self.diagonal_term + &self.dominance_term + &self.coupling_term
    }
}

pub fn lyapunov_decomposition<T: Scalar>(
    p: &PartitionedMatrix<T>,
    w: &WitnessSet<T>,
) -> Result<LyapunovDecomposition<T>> {
    let part = p.partition();
    w.check_dimensions(part)?;
    let n = part.len();
    let order = part.total();
    let mut diagonal_term = DMatrix::zeros(order, order);
    let mut dominance_term = DMatrix::zeros(order, order);
    let mut coupling_term = DMatrix::zeros(order, order);

    for i in 0..n {
        let (oi, ki) = (part.offset0(i), part.size0(i));
        let pa = &w.p[i] * p.block0(i, i);
        let diag = &pa + pa.transpose() + &w.v[i][i] + &w.w[i][i];
        diagonal_term.view_mut((oi, oi), (ki, ki)).copy_from(&diag);

        let mut dom = &w.v[i][i] + &w.w[i][i];
        for j in (0..n).filter(|&j| j != i) {
            dom -= &w.w[i][j] + &w.v[j][i];
        }
        dominance_term
            .view_mut((oi, oi), (ki, ki))
            .copy_from(&(-dom));

        for j in (0..n).filter(|&j| j != i) {
            let (oj, kj) = (part.offset0(j), part.size0(j));
            let pa = &w.p[i] * p.block0(i, j);
            let mut v = coupling_term.view_mut((oi, oi), (ki, ki));
            v -= &w.w[i][j];
            let mut v = coupling_term.view_mut((oj, oj), (kj, kj));
            v -= &w.v[i][j];
            let mut v = coupling_term.view_mut((oi, oj), (ki, kj));
            v += &pa;
            let mut v = coupling_term.view_mut((oj, oi), (kj, ki));
            v += pa.transpose();
        }
    }
    Ok(LyapunovDecomposition {
        diagonal_term,
        dominance_term,
        coupling_term,
    })
}

/// Result of the constructive route from a Hurwitz block comparison matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Prop4Construction<T: Scalar> {
    pub witnesses: WitnessSet<T>,
    /// `γᵢⱼ = σ̄(Aᵢⱼ)·eᵢ/dⱼ` off the diagonal, `γᵢᵢ = hᵢ·eᵢ/dᵢ` on it, where
    /// `hᵢ = ‖(sI − Aᵢᵢ)⁻¹‖_H∞⁻¹`.
    pub gamma: GammaMatrix<T>,
    /// `σ̄(Rᵢ) / (hᵢ·dᵢ/eᵢ)` with `Rᵢ = Σ_{j≠i} Aᵢⱼ·Aᵢⱼᵀ/γᵢⱼ`; always below one.
    pub coupling_ratio: Vec<T>,
    /// Extra weight `τᵢ` on the right-hand side of each Riccati equation.
    pub shift: Vec<T>,
    pub riccati_residuals: Vec<T>,
}

/// Builds witnesses `(P, W, V)` from positive scalings of the Hurwitz block
/// comparison matrix.
///
/// Each `Pᵢ` is the stabilizing solution of
/// `Pᵢ·Aᵢᵢ + Aᵢᵢᵀ·Pᵢ + Pᵢ·Rᵢ·Pᵢ + (1 + τᵢ)·γᵢᵢ·I = 0`; then
/// `Wᵢⱼ = Pᵢ·Aᵢⱼ·Aᵢⱼᵀ·Pᵢ/γᵢⱼ`, `Vᵢⱼ = γᵢⱼ·I`, `Vᵢᵢ = γᵢᵢ·I` and
/// `Wᵢᵢ = Σ_{j≠i} Wᵢⱼ + τᵢ·γᵢᵢ·I`.
pub fn prop4_construct<T: Scalar>(
    p: &PartitionedMatrix<T>,
    scalings: &ScalingPair<T>,
    opts: &CertifyOptions<T>,
) -> Result<Prop4Construction<T>> {
    let n = p.num_blocks();
    if scalings.d.len() != n || scalings.e.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "scalings must have length {n}"
        )));
    }
    if scalings
        .d
        .iter()
        .chain(scalings.e.iter())
        .any(|x| x.partial_cmp(&T::zero()) != Some(std::cmp::Ordering::Greater))
    {
        return Err(Error::ComparisonNotHurwitz);
    }
    let cmp = block_comparison(p, &opts.hinf)?;
    if cmp
        .diagonal
        .iter()
        .any(|s| matches!(s, DiagonalSource::UnstableBlock))
        || !check_scaled_dominance(&cmp.matrix, &scalings.d, DominanceMode::Row)?
        || !check_scaled_dominance(&cmp.matrix, &scalings.e, DominanceMode::Column)?
    {
        return Err(Error::ComparisonNotHurwitz);
    }
    let (d, e) = (&scalings.d, &scalings.e);

    let mut gamma = DMatrix::zeros(n, n);
    for i in 0..n {
        gamma[(i, i)] = cmp.diagonal_gain(i) * e[i] / d[i];
        for j in (0..n).filter(|&j| j != i) {
            gamma[(i, j)] = cmp.matrix[(i, j)] * e[i] / d[j];
        }
    }

    let two = T::lit(2.0);
    let per_block = (0..n)
        .into_par_iter()
        .map(|i| {
            let a = p.block0(i, i);
            let k = a.nrows();
            let h = cmp.diagonal_gain(i);
            let r = coupling_weight(p, &gamma, i);
            let bound = h * d[i] / e[i];
            let spread = if r.iter().all(|x| x.is_zero()) {
                T::zero()
            } else {
                lambda_max(&r)?
            };
            if spread >= bound {
                return Err(Error::NumericalFailure(format!(
                    "coupling bound violated in block {} ({spread:e} >= {bound:e})",
                    i + 1
                )));
            }
            let tau = if spread.is_zero() {
                T::one()
            } else {
                ((bound / spread - T::one()) / two).min(T::one())
            };
            let q = DMatrix::identity(k, k) * (gamma[(i, i)] * (T::one() + tau));
            let pi = solve_care_positive(&a, &r, &q, opts.care)?
                .ok_or(Error::RiccatiFailure { block: i + 1 })?;
            let (res, scale) = care_residual(&a, &r, &q, &pi);
            Ok((
                pi,
                spread / bound,
                tau,
                res / scale.max(T::default_epsilon()),
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut ps = Vec::with_capacity(n);
    let mut coupling_ratio = Vec::with_capacity(n);
    let mut shift = Vec::with_capacity(n);
    let mut riccati_residuals = Vec::with_capacity(n);
    for (pi, ratio, tau, res) in per_block {
        ps.push(pi);
        coupling_ratio.push(ratio);
        shift.push(tau);
        riccati_residuals.push(res);
    }

    let sizes = p.partition().sizes();
    let mut w = vec![Vec::with_capacity(n); n];
    let mut v = vec![Vec::with_capacity(n); n];
    for i in 0..n {
        let ki = sizes[i];
        for j in 0..n {
            let kj = sizes[j];
            if i == j || gamma[(i, j)].is_zero() || p.is_zero_block0(i, j) {
                w[i].push(DMatrix::zeros(ki, ki));
                v[i].push(DMatrix::zeros(kj, kj));
            } else {
                let pa = &ps[i] * p.block0(i, j);
                w[i].push(crate::linalg::symmetrize(
                    &(&pa * pa.transpose() / gamma[(i, j)]),
                ));
                v[i].push(DMatrix::identity(kj, kj) * gamma[(i, j)]);
            }
        }
        let ki_eye = DMatrix::<T>::identity(ki, ki);
        let w_sum = (0..n)
            .filter(|&j| j != i)
            .fold(DMatrix::zeros(ki, ki), |acc, j| acc + &w[i][j]);
        w[i][i] = w_sum + &ki_eye * (shift[i] * gamma[(i, i)]);
        v[i][i] = ki_eye * gamma[(i, i)];
    }

    Ok(Prop4Construction {
        witnesses: WitnessSet { p: ps, w, v },
        gamma: GammaMatrix {
            gamma,
            strategy: Method::Prop4,
        },
        coupling_ratio,
        shift,
        riccati_residuals,
    })
}
