//! Hardware probing, the K sweep, and the tuned/trusted dispatch switch.

mod dispatch;
mod hardware;
pub(crate) mod report;
mod tuning;

pub use dispatch::{get_dispatch, resolve_kernel, set_dispatch, DispatchState};
pub use hardware::{detect_hardware, hardware, HardwareProfile};
pub use report::{load_report, parse_report, render_report, save_report};
pub use tuning::{candidate_ks, median, run_tuning, time_spmm, TuningEntry, TuningReport};

/// Embedding sizes swept by the tuner.
pub const SWEEP_SET: [usize; 7] = crate::kernels::SPECIALIZATION_SET;
