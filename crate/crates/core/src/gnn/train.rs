use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::kernels::with_threads;
use crate::scalar::Scalar;
use crate::sparse::{CsrMatrix, DenseMatrix};

use super::{accuracy, backward, forward, softmax_xent, GnnModel, TrainingCache};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainOptions {
    pub epochs: usize,
    pub lr: f64,
    /// Worker threads for the kernels; 0 uses the ambient rayon pool.
    pub threads: usize,
    pub use_tuned: bool,
    pub use_cache: bool,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            epochs: 100,
            lr: 0.05,
            threads: 0,
            use_tuned: true,
            use_cache: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    /// 1-based.
    pub epoch: usize,
    /// Loss of this epoch's forward pass, before the update.
    pub loss: f64,
    pub train_accuracy: f64,
    pub epoch_time: Duration,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome<T> {
    pub model: GnnModel<T>,
    pub stats: Vec<EpochStats>,
    pub cache: TrainingCache<T>,
}

impl<T> TrainOutcome<T> {
    pub fn mean_epoch_time(&self) -> Duration {
        mean_duration(self.stats.iter().map(|s| s.epoch_time))
    }
}

pub(crate) fn mean_duration(times: impl ExactSizeIterator<Item = Duration>) -> Duration {
    let n = times.len();
    if n == 0 {
        return Duration::ZERO;
    }
    let total: u128 = times.map(|d| d.as_nanos()).sum();
    Duration::from_nanos((total / n as u128) as u64)
}

/// Full-batch gradient descent for `opts.epochs` epochs.
///
/// The adjacency is normalized (GCN) or copied once before the first epoch;
/// each epoch then runs forward, loss, backward and an SGD step.
pub fn train<T: Scalar>(
    model: GnnModel<T>,
    adjacency: &CsrMatrix<T>,
    features: &DenseMatrix<T>,
    labels: &[usize],
    mask: &[bool],
    opts: &TrainOptions,
) -> Result<TrainOutcome<T>> {
    if opts.epochs == 0 {
        return Err(Error::Config("epochs must be at least 1".into()));
    }
    if !opts.lr.is_finite() {
        return Err(Error::Config(format!("learning rate {} is not finite", opts.lr)));
    }
    let lr = T::from_f64_lossy(opts.lr);
    with_threads(opts.threads, move || {
        let mut model = model;
        let mut cache = TrainingCache::build(model.kind, adjacency, opts.use_cache, opts.use_tuned)?;
        let mut stats = Vec::with_capacity(opts.epochs);
        for epoch in 1..=opts.epochs {
            let start = Instant::now();
            let (logits, tape) = forward(&model, &cache, features)?;
            let (loss, grad) = softmax_xent(&logits, labels, mask)?;
            if !loss.is_finite() {
                return Err(Error::Diverged { epoch });
            }
            let train_accuracy = accuracy(&logits, labels, mask)?;
            let grads = backward(&model, &mut cache, &tape, &grad)?;
            model.sgd_step(&grads, lr)?;
            stats.push(EpochStats {
                epoch,
                loss: loss.to_f64().unwrap_or(f64::NAN),
                train_accuracy,
                epoch_time: start.elapsed(),
            });
        }
        Ok(TrainOutcome { model, stats, cache })
    })
}
