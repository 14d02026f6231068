//! Reference matrices used in tests, benchmarks and the CLI fixture corpus.

use nalgebra::DMatrix;

use crate::partition::{make_partitioned, PartitionedMatrix};

fn square(n: usize, rows: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(n, n, rows)
}

fn two_by_two(rows: &[f64]) -> PartitionedMatrix<f64> {
    make_partitioned(square(4, rows), &[2, 2]).expect("fixture partition")
}

/// `[[-8, 8], [5, -8]]`.
pub fn counterexample_block() -> DMatrix<f64> {
    square(2, &[-8.0, 8.0, 5.0, -8.0])
}

/// `[[7, 7], [7, 11]]`.
pub fn counterexample_q1() -> DMatrix<f64> {
    square(2, &[7.0, 7.0, 7.0, 11.0])
}

/// `[[B, δI], [δI, B]]` with `B` from [`counterexample_block`], partition `{2, 2}`.
pub fn counterexample(delta: f64) -> PartitionedMatrix<f64> {
    let a = crate::certificate::counterexample_matrix(&counterexample_block(), delta);
    make_partitioned(a, &[2, 2]).expect("fixture partition")
}

/// Passes test A only.
pub fn only_a() -> PartitionedMatrix<f64> {
    two_by_two(&[
        -67.0, -30.0, 2.0, 8.0, //
        20.0, -27.0, 2.0, 5.0, //
        14.0, -10.0, -57.0, 40.0, //
        -3.0, 10.0, 50.0, -27.0,
    ])
}

/// Passes test B only.
pub fn only_b() -> PartitionedMatrix<f64> {
    two_by_two(&[
        -30.0, 30.0, 0.0, 2.0, //
        50.0, -61.0, -6.0, -8.0, //
        3.0, -10.0, -53.0, -40.0, //
        13.0, 13.0, 10.0, -73.0,
    ])
}

/// Passes test C only.
pub fn only_c() -> PartitionedMatrix<f64> {
    two_by_two(&[
        -60.0, 30.0, 6.0, 6.0, //
        20.0, -20.0, 0.0, 7.0, //
        7.0, 2.0, -90.0, 20.0, //
        7.0, -5.0, 0.0, -20.0,
    ])
}

/// Block lower-triangular 6×6 matrix with partition `{2, 3, 1}`.
pub fn triangular() -> PartitionedMatrix<f64> {
    let a = square(
        6,
        &[
            -6.0, 4.0, 0.0, 0.0, 0.0, 0.0, //
            8.0, -7.0, 0.0, 0.0, 0.0, 0.0, //
            4.0, 6.0, -1.0, -2.0, 4.0, 0.0, //
            7.0, -2.0, 3.0, -1.0, 6.0, 0.0, //
            1.0, 2.0, 1.0, 0.0, -7.0, 0.0, //
            -1.0, 7.0, 4.0, 6.0, -5.0, -2.0,
        ],
    );
    make_partitioned(a, &[2, 3, 1]).expect("fixture partition")
}

/// Reference block comparison matrix of [`triangular`], rounded to four decimals.
pub fn triangular_comparison_reference() -> DMatrix<f64> {
    square(
        3,
        &[
            -0.7799, 0.0, 0.0, 8.4427, -0.5282, 0.0, 7.0711, 8.7750, -2.0,
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_well_formed() {
        for p in [only_a(), only_b(), only_c(), counterexample(1.63)] {
            assert_eq!(p.partition().sizes(), &[2, 2]);
        }
        assert_eq!(triangular().partition().sizes(), &[2, 3, 1]);
        assert_eq!(counterexample(1.0).matrix()[(0, 2)], 1.0);
    }
}
