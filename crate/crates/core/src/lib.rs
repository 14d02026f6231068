//! Block-diagonal stability certificates for partitioned matrices.
//!
//! The crate decides whether a Hurwitz matrix `A`, split into an `n×n` grid of
//! blocks, admits a block-diagonal `P ≻ 0` with `P·A + Aᵀ·P ≺ 0`. Large
//! problems are decoupled into one small Riccati equation per diagonal block,
//! or reduced to an `n×n` comparison matrix built from resolvent `H∞` norms.

pub mod certificate;
pub mod comparison;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod partition;
mod scalar;

pub use certificate::{
    certify, full_report, Certificate, CertifyOptions, Method, Strategy, TestReport,
};
pub use comparison::{
    block_comparison, metzler_scalings, scalar_comparison, ComparisonMatrix, ScalingPair,
};
pub use error::{Error, Result};
pub use linalg::{hinf_norm_resolvent, ExtendedReal, HinfOptions, HinfResult};
pub use partition::{make_partitioned, BlockPartition, PartitionedMatrix};
pub use scalar::Scalar;

pub type Matrix = nalgebra::DMatrix<f64>;
pub type Matrix32 = nalgebra::DMatrix<f32>;
pub type Partitioned = PartitionedMatrix<f64>;
pub type Partitioned32 = PartitionedMatrix<f32>;
pub type Certificate64 = Certificate<f64>;
pub type Certificate32 = Certificate<f32>;
