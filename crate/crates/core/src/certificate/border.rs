//! Border block diagonal matrices: couplings only in the first block row and
//! column. For these, the conditions
//!
//! - `Q₁·A₁₁ + A₁₁ᵀ·Q₁ + Σ_{j>1} Yⱼ ≺ 0`,
//! - `Qⱼ·Aⱼⱼ + Aⱼⱼᵀ·Qⱼ + Zⱼ ⪯ 0` for `j > 1`,
//! - `[[Yⱼ, −Q₁·A₁ⱼ − Aⱼ₁ᵀ·Qⱼ], [−A₁ⱼᵀ·Q₁ − Qⱼ·Aⱼ₁, Zⱼ]] ≻ 0` for `j > 1`
//!
//! with `Qᵢ ≻ 0` are necessary and sufficient for block-diagonal stability.

use nalgebra::DMatrix;

use super::{floor, lambda_max, lambda_min, WitnessSet};
use crate::error::{Error, Result};
use crate::partition::PartitionedMatrix;
use crate::Scalar;

/// `y[j − 2]` and `z[j − 2]` hold `Yⱼ` (`k₁×k₁`) and `Zⱼ` (`kⱼ×kⱼ`) for `j = 2..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BorderWitnesses<T: Scalar> {
    pub q: Vec<DMatrix<T>>,
    pub y: Vec<DMatrix<T>>,
    pub z: Vec<DMatrix<T>>,
}

/// Fails with the first (1-based) block that breaks the border structure.
pub fn check_border_structure<T: Scalar>(p: &PartitionedMatrix<T>) -> Result<()> {
    let n = p.num_blocks();
    for i in 1..n {
        for j in (1..n).filter(|&j| j != i) {
            if !p.is_zero_block0(i, j) {
                return Err(Error::NotBorderBlockDiagonal { i: i + 1, j: j + 1 });
            }
        }
    }
    Ok(())
}

fn check_dimensions<T: Scalar>(p: &PartitionedMatrix<T>, w: &BorderWitnesses<T>) -> Result<()> {
    let part = p.partition();
    let n = part.len();
    let k1 = part.size0(0);
    let ok = w.q.len() == n
        && w.y.len() + 1 == n
        && w.z.len() + 1 == n
        && (0..n).all(|i| w.q[i].shape() == (part.size0(i), part.size0(i)))
        && (1..n).all(|j| {
            w.y[j - 1].shape() == (k1, k1) && w.z[j - 1].shape() == (part.size0(j), part.size0(j))
        });
    if ok {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(
            "border witnesses do not match the partition".into(),
        ))
    }
}

fn coupling<T: Scalar>(p: &PartitionedMatrix<T>, w: &BorderWitnesses<T>, j: usize) -> DMatrix<T> {
    &w.q[0] * p.block0(0, j) + p.block0(j, 0).transpose() * &w.q[j]
}

fn head_operator<T: Scalar>(
    p: &PartitionedMatrix<T>,
    w: &BorderWitnesses<T>,
) -> (DMatrix<T>, DMatrix<T>, DMatrix<T>) {
    let qa = &w.q[0] * p.block0(0, 0);
    let y_sum =
        w.y.iter()
            .fold(DMatrix::zeros(qa.nrows(), qa.nrows()), |acc, y| acc + y);
    (&qa + qa.transpose() + &y_sum, qa, y_sum)
}

fn tail_operator<T: Scalar>(
    p: &PartitionedMatrix<T>,
    w: &BorderWitnesses<T>,
    j: usize,
) -> (DMatrix<T>, DMatrix<T>) {
    let qa = &w.q[j] * p.block0(j, j);
    (&qa + qa.transpose() + &w.z[j - 1], qa)
}

/// Verifies the border conditions by eigenvalue computations.
pub fn verify_bbd_witnesses<T: Scalar>(
    p: &PartitionedMatrix<T>,
    w: &BorderWitnesses<T>,
    margin: T,
) -> Result<bool> {
    check_border_structure(p)?;
    check_dimensions(p, w)?;
    let n = p.num_blocks();
    for q in &w.q {
        if lambda_min(q)? <= floor(margin, &[q]) {
            return Ok(false);
        }
    }
    let (head, qa, y_sum) = head_operator(p, w);
    if lambda_max(&head)? >= -floor(margin, &[&qa, &y_sum]) {
        return Ok(false);
    }
    for j in 1..n {
        let (tail, qa) = tail_operator(p, w, j);
        if lambda_max(&tail)? > floor(margin, &[&qa, &w.z[j - 1]]) {
            return Ok(false);
        }
        let c = coupling(p, w, j);
        let (k1, kj) = (c.nrows(), c.ncols());
        let mut m = DMatrix::zeros(k1 + kj, k1 + kj);
        m.view_mut((0, 0), (k1, k1)).copy_from(&w.y[j - 1]);
        m.view_mut((k1, k1), (kj, kj)).copy_from(&w.z[j - 1]);
        m.view_mut((0, k1), (k1, kj)).copy_from(&(-&c));
        m.view_mut((k1, 0), (kj, k1)).copy_from(&(-c.transpose()));
        if lambda_min(&m)? <= floor(margin, &[&w.y[j - 1], &w.z[j - 1], &c]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Border witnesses induced by a general witness set: `Qᵢ = Pᵢ`,
/// `Yⱼ = W₁ⱼ + Vⱼ₁ + δ·I`, `Zⱼ = Wⱼ₁ + V₁ⱼ + δ·I`. The shift `δ` spends half of
/// the slack left in the first two families to make the coupling matrices
/// strictly positive definite.
pub fn border_witnesses_from<T: Scalar>(
    p: &PartitionedMatrix<T>,
    ws: &WitnessSet<T>,
) -> Result<BorderWitnesses<T>> {
    check_border_structure(p)?;
    let n = p.num_blocks();
    if ws.p.len() != n || ws.w.len() != n || ws.v.len() != n {
        return Err(Error::DimensionMismatch(
            "witness set does not match the partition".into(),
        ));
    }
    let y: Vec<_> = (1..n).map(|j| &ws.w[0][j] + &ws.v[j][0]).collect();
    let z: Vec<_> = (1..n).map(|j| &ws.w[j][0] + &ws.v[0][j]).collect();
    let mut out = BorderWitnesses {
        q: ws.p.clone(),
        y,
        z,
    };
    if n == 1 {
        return Ok(out);
    }
    check_dimensions(p, &out)?;

    let two = T::lit(2.0);
    let head_slack = -lambda_max(&head_operator(p, &out).0)?;
    let mut delta = head_slack / (two * T::from_usize(n - 1).expect("block count"));
    for j in 1..n {
        let tail_slack = -lambda_max(&tail_operator(p, &out, j).0)?;
        delta = delta.min(tail_slack / two);
    }
    let delta = delta.max(T::zero());
    let k1 = p.partition().size0(0);
    for j in 1..n {
        let kj = p.partition().size0(j);
        out.y[j - 1] += DMatrix::identity(k1, k1) * delta;
        out.z[j - 1] += DMatrix::identity(kj, kj) * delta;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::{prop4_construct, CertifyOptions};
    use crate::comparison::{block_comparison, metzler_scalings};
    use crate::partition::make_partitioned;

    fn arrow() -> PartitionedMatrix<f64> {
        let a = DMatrix::from_row_slice(
            5,
            5,
            &[
                -6.0, 1.0, 0.5, 0.3, -0.4, //
                0.0, -5.0, 0.2, 0.1, 0.6, //
                0.4, -0.3, -4.0, 0.0, 0.0, //
                0.2, 0.1, 0.0, -3.0, 0.0, //
                -0.5, 0.2, 0.0, 0.0, -7.0,
            ],
        );
        make_partitioned(a, &[2, 1, 1, 1]).unwrap()
    }

    #[test]
    fn induced_witnesses_pass() {
        let p = arrow();
        let opts = CertifyOptions::default();
        let cmp = block_comparison(&p, &opts.hinf).unwrap();
        let s = metzler_scalings(&cmp.matrix, opts.hurwitz_margin)
            .unwrap()
            .unwrap();
        let c = prop4_construct(&p, &s, &opts).unwrap();
        let bw = border_witnesses_from(&p, &c.witnesses).unwrap();
        assert!(verify_bbd_witnesses(&p, &bw, 1e-9).unwrap());
        let mut flipped = bw.clone();
        flipped.z[1] = -&flipped.z[1];
        assert!(!verify_bbd_witnesses(&p, &flipped, 1e-9).unwrap());
    }

    #[test]
    fn decoupled_border_with_lyapunov_blocks() {
        let a = DMatrix::from_row_slice(3, 3, &[-2.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -3.0]);
        let p = make_partitioned(a, &[1, 1, 1]).unwrap();
        let q: Vec<_> = (0..3)
            .map(|i| {
                let aii = p.block0(i, i);
                crate::linalg::solve_lyapunov(&aii.transpose(), &DMatrix::identity(1, 1)).unwrap()
            })
            .collect();
        let eps = DMatrix::from_element(1, 1, 1e-3);
        let bw = BorderWitnesses {
            q,
            y: vec![eps.clone(); 2],
            z: vec![eps; 2],
        };
        assert!(verify_bbd_witnesses(&p, &bw, 1e-9).unwrap());
    }

    #[test]
    fn rejects_non_border_structure() {
        let a = DMatrix::from_row_slice(3, 3, &[-2.0, 0.0, 0.0, 0.0, -1.0, 0.5, 0.0, 0.0, -3.0]);
        let p = make_partitioned(a, &[1, 1, 1]).unwrap();
        assert_eq!(
            check_border_structure(&p).unwrap_err(),
            Error::NotBorderBlockDiagonal { i: 2, j: 3 }
        );
    }
}
