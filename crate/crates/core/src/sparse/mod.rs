//! Matrix types shared by every other module.

mod csr;
pub(crate) mod dense;
mod graph;
mod semiring;

pub use csr::CsrMatrix;
pub use dense::DenseMatrix;
pub use graph::normalize_adjacency;
pub use semiring::{ReduceOp, Semiring};
