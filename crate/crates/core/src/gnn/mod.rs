//! Two-layer GNN node classification on top of the sparse kernels.
//!
//! Every model is "propagate with the graph, project with a weight matrix"
//! twice, with ReLU in between and raw logits out:
//!
//! | kind        | layer                                   |
//! |-------------|-----------------------------------------|
//! | `gcn`       | `Â · (H W)` (projection first)          |
//! | `sage-sum`  | `spmm(A, H, sum) W_n + H W_s`           |
//! | `sage-mean` | `spmm(A, H, mean) W_n + H W_s`          |
//! | `gin`       | `((1 + ε) H + spmm(A, H, sum)) W`       |
//!
//! The backward pass needs `Mᵀ` for every propagation `C = M · H`
//! (`dH = Mᵀ · dC`). [`TrainingCache`] builds the normalized adjacency once
//! per run and its transpose at most once, or not at all when the matrix is
//! symmetric.

mod cache;
mod loss;
mod model;
mod propagate;
mod stats;
mod train;

pub use cache::{CacheCounters, TrainingCache};
pub use loss::{accuracy, softmax_xent};
pub use model::{GnnModel, Gradients, ModelKind};
pub use propagate::{backward, forward, Tape};
pub use stats::{load_stats, parse_stats, render_stats, save_stats, TrainStats, STATS_HEADER};
pub use train::{train, EpochStats, TrainOptions, TrainOutcome};
