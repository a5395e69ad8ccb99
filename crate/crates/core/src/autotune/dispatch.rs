//! Process-wide switch between tuned and trusted SpMM.
//!
//! Disabling the switch is the library analogue of "unpatching": every later
//! `spmm` call runs the trusted kernel. Results never change, only the kernel
//! that produces them.

use std::sync::atomic::{AtomicBool, Ordering};

use crate::kernels::{KernelKind, SPECIALIZATION_SET};
use crate::sparse::ReduceOp;

static TUNED_ENABLED: AtomicBool = AtomicBool::new(true);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DispatchState {
    pub tuned_enabled: bool,
    pub specialization_set: &'static [usize],
}

impl DispatchState {
    pub fn new(tuned_enabled: bool) -> Self {
        DispatchState {
            tuned_enabled,
            specialization_set: &SPECIALIZATION_SET,
        }
    }

    /// Kernel for a dense operand of width `k` under `reduce`. Anything
    /// without a specialization resolves to the trusted kernel.
    pub fn resolve(&self, k: usize, reduce: ReduceOp) -> KernelKind {
        if self.tuned_enabled && reduce == ReduceOp::Sum && self.specialization_set.contains(&k) {
            KernelKind::Specialized(k)
        } else {
            KernelKind::Trusted
        }
    }
}

pub fn set_dispatch(enabled: bool) {
    TUNED_ENABLED.store(enabled, Ordering::SeqCst);
}

pub fn get_dispatch() -> DispatchState {
    DispatchState::new(TUNED_ENABLED.load(Ordering::SeqCst))
}

pub fn resolve_kernel(k: usize, reduce: ReduceOp) -> KernelKind {
    get_dispatch().resolve(k, reduce)
}
