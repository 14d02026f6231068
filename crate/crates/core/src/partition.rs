//! Block partitions `α = {k₁, …, kₙ}` and matrices viewed through them.
//!
//! Block indices are 1-based in the public API.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::block_diagonal;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    total: usize,
}

impl BlockPartition {
    pub fn new(sizes: &[usize]) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::InvalidPartition);
        }
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut total = 0;
        for &k in sizes {
            offsets.push(total);
            total += k;
        }
        Ok(Self {
            sizes: sizes.to_vec(),
            offsets,
            total,
        })
    }

    /// Every block of size one.
    pub fn scalar(order: usize) -> Result<Self> {
        Self::new(&vec![1; order])
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Number of blocks `n`.
    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    /// Matrix order `N = Σ kᵢ`.
    pub fn total(&self) -> usize {
        self.total
    }

    /// Size of block `i` (0-based).
    pub(crate) fn size0(&self, i: usize) -> usize {
        self.sizes[i]
    }

    /// First row of block `i` (0-based).
    pub(crate) fn offset0(&self, i: usize) -> usize {
        self.offsets[i]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedMatrix<T: Scalar> {
    matrix: DMatrix<T>,
    partition: BlockPartition,
}

impl<T: Scalar> PartitionedMatrix<T> {
    pub fn new(matrix: DMatrix<T>, partition: BlockPartition) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NonSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if partition.total() != matrix.nrows() {
            return Err(Error::SizeMismatch {
                sum: partition.total(),
                order: matrix.nrows(),
            });
        }
        Ok(Self { matrix, partition })
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    pub fn num_blocks(&self) -> usize {
        self.partition.len()
    }

    /// Copy of block `(i, j)`, 1-based.
    pub fn block(&self, i: usize, j: usize) -> Result<DMatrix<T>> {
        let n = self.num_blocks();
        if i == 0 || j == 0 || i > n || j > n {
            return Err(Error::IndexOutOfRange { i, j, n });
        }
        Ok(self.block0(i - 1, j - 1))
    }

    pub(crate) fn block0(&self, i: usize, j: usize) -> DMatrix<T> {
        let p = &self.partition;
        self.matrix
            .view((p.offset0(i), p.offset0(j)), (p.size0(i), p.size0(j)))
            .clone_owned()
    }

    /// `true` when every entry of block `(i, j)` (0-based) is exactly zero.
    pub(crate) fn is_zero_block0(&self, i: usize, j: usize) -> bool {
        let p = &self.partition;
        self.matrix
            .view((p.offset0(i), p.offset0(j)), (p.size0(i), p.size0(j)))
            .iter()
            .all(|x| x.is_zero())
    }

    pub fn diagonal_blocks(&self) -> Vec<DMatrix<T>> {
        (0..self.num_blocks()).map(|i| self.block0(i, i)).collect()
    }

    pub fn into_parts(self) -> (DMatrix<T>, BlockPartition) {
        (self.matrix, self.partition)
    }
}

/// Views `a` through the partition given by `sizes`.
pub fn make_partitioned<T: Scalar>(a: DMatrix<T>, sizes: &[usize]) -> Result<PartitionedMatrix<T>> {
    if a.nrows() != a.ncols() {
        return Err(Error::NonSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    PartitionedMatrix::new(a, BlockPartition::new(sizes)?)
}

/// `diag{B₁, …, Bₙ}` with zeros off the diagonal blocks.
pub fn assemble_block_diagonal<T: Scalar>(blocks: &[DMatrix<T>]) -> Result<DMatrix<T>> {
    if blocks.is_empty() {
        return Err(Error::InvalidPartition);
    }
    for (index, b) in blocks.iter().enumerate() {
        if b.nrows() != b.ncols() || b.nrows() == 0 {
            return Err(Error::NonSquareBlock { index: index + 1 });
        }
    }
    Ok(block_diagonal(blocks))
}
