//! Sparse linear algebra for graph neural networks.
//!
//! The crate is layered the same way the kernels are used:
//!
//! - [`sparse`]: CSR and row-major dense matrices, semirings, graph normalization.
//! - [`kernels`]: SpMM (trusted and fixed-K specialized variants), SDDMM and FusedMM,
//!   parallelized over nnz-balanced row blocks.
//! - [`autotune`]: SIMD width probing, the K sweep and the process-wide
//!   tuned/trusted dispatch toggle.
//! - [`gnn`]: two-layer GCN, GraphSAGE (sum/mean) and GIN training whose
//!   backward pass reuses epoch-invariant matrices from a [`gnn::TrainingCache`].
//! - [`data`]: Matrix Market and plain-text loaders plus a seeded
//!   planted-partition generator.
//! - [`verify`]: the self-check suites behind `sparsegnn verify`.

pub mod autotune;
pub mod data;
mod error;
pub mod gnn;
pub mod kernels;
mod scalar;
pub mod sparse;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{bitwise_eq, first_bit_difference, Scalar};
pub use sparse::{CsrMatrix, DenseMatrix, ReduceOp, Semiring};
