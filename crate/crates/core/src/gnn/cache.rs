use crate::autotune::DispatchState;
use crate::error::{Error, Result};
use crate::kernels::{self, KernelKind};
use crate::scalar::Scalar;
use crate::sparse::{normalize_adjacency, CsrMatrix, DenseMatrix, ReduceOp};

use super::ModelKind;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CacheCounters {
    pub transpose_builds: usize,
    pub normalize_builds: usize,
    pub cache_hits: usize,
}

/// Epoch-invariant matrices for one training run.
///
/// `a_hat` is the normalized adjacency for GCN and the raw adjacency for the
/// other models. With caching on, its transpose is built on the first
/// backward pass and kept, and never built at all when `a_hat` is symmetric.
/// With caching off it is rebuilt on every backward pass.
#[derive(Debug, Clone)]
pub struct TrainingCache<T> {
    a_hat: CsrMatrix<T>,
    a_hat_t: Option<CsrMatrix<T>>,
    degrees: Vec<usize>,
    symmetric: bool,
    use_cache: bool,
    dispatch: DispatchState,
    counters: CacheCounters,
}

impl<T: Scalar> TrainingCache<T> {
    pub fn build(kind: ModelKind, adjacency: &CsrMatrix<T>, use_cache: bool, use_tuned: bool) -> Result<Self> {
        if adjacency.n_rows() != adjacency.n_cols() {
            return Err(Error::Shape(format!(
                "adjacency must be square, got {}x{}",
                adjacency.n_rows(),
                adjacency.n_cols()
            )));
        }
        let mut counters = CacheCounters::default();
        let a_hat = if kind == ModelKind::Gcn {
            counters.normalize_builds += 1;
            normalize_adjacency(adjacency, true)?
        } else {
            adjacency.clone()
        };
        Ok(TrainingCache {
            degrees: a_hat.row_degrees(),
            symmetric: a_hat.is_symmetric(),
            a_hat,
            a_hat_t: None,
            use_cache,
            dispatch: DispatchState::new(use_tuned),
            counters,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.a_hat.n_rows()
    }

    pub fn a_hat(&self) -> &CsrMatrix<T> {
        &self.a_hat
    }

    /// The materialized transpose, if one has been built.
    pub fn a_hat_t(&self) -> Option<&CsrMatrix<T>> {
        self.a_hat_t.as_ref()
    }

    /// Stored entries per row of `a_hat`.
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn use_cache(&self) -> bool {
        self.use_cache
    }

    pub fn use_tuned(&self) -> bool {
        self.dispatch.tuned_enabled
    }

    pub fn counters(&self) -> CacheCounters {
        self.counters
    }

    /// Makes the transpose available for one backward pass.
    pub(crate) fn prepare_backward(&mut self) {
        if !self.use_cache {
            self.a_hat_t = Some(self.a_hat.transpose());
            self.counters.transpose_builds += 1;
        } else if self.symmetric || self.a_hat_t.is_some() {
            self.counters.cache_hits += 1;
        } else {
            self.a_hat_t = Some(self.a_hat.transpose());
            self.counters.transpose_builds += 1;
        }
    }

    /// The matrix standing in for `a_hatᵀ`. Call [`Self::prepare_backward`]
    /// first.
    pub(crate) fn backward_operand(&self) -> &CsrMatrix<T> {
        if self.use_cache && self.symmetric {
            &self.a_hat
        } else {
            self.a_hat_t.as_ref().expect("prepare_backward not called")
        }
    }

    pub(crate) fn kernel(&self, k: usize, reduce: ReduceOp) -> KernelKind {
        self.dispatch.resolve(k, reduce)
    }

    /// `a_hat · h` under `reduce` on this run's kernel choice.
    pub(crate) fn propagate(&self, h: &DenseMatrix<T>, reduce: ReduceOp) -> Result<DenseMatrix<T>> {
        kernels::spmm_with(&self.a_hat, h, reduce, self.kernel(h.n_cols(), reduce))
    }

    /// `a_hatᵀ · d` (sum), for the backward pass.
    pub(crate) fn propagate_back(&self, d: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        let m = self.backward_operand();
        kernels::spmm_with(m, d, ReduceOp::Sum, self.kernel(d.n_cols(), ReduceOp::Sum))
    }
}
