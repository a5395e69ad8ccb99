use std::time::{Duration, Instant};

use crate::autotune::{hardware, HardwareProfile, SWEEP_SET};
use crate::error::{Error, Result};
use crate::kernels::{is_specialized, spmm_with, with_threads, KernelKind};
use crate::scalar::{first_bit_difference, Scalar};
use crate::sparse::{CsrMatrix, DenseMatrix, ReduceOp};

/// Seed for the dense operand of each sweep point (mixed with K).
const OPERAND_SEED: u64 = 0x005e_ed0f_7e57;

#[derive(Debug, Clone, PartialEq)]
pub struct TuningEntry {
    pub k: usize,
    pub t_trusted: Duration,
    pub t_specialized: Duration,
    /// `t_trusted / t_specialized`
    pub speedup: f64,
}

impl TuningEntry {
    pub fn new(k: usize, t_trusted: Duration, t_specialized: Duration) -> Self {
        TuningEntry {
            k,
            t_trusted,
            t_specialized,
            speedup: t_trusted.as_secs_f64() / t_specialized.as_secs_f64(),
        }
    }
}

/// Speedup of the specialized kernels over the trusted kernel across a K
/// sweep, with the best K picked out.
#[derive(Debug, Clone, PartialEq)]
pub struct TuningReport {
    pub entries: Vec<TuningEntry>,
    pub best_k: usize,
    pub profile: HardwareProfile,
    pub graph_id: String,
    /// Requested K values that had no specialization and were not timed.
    pub skipped: Vec<usize>,
}

impl TuningReport {
    /// Assembles a report, choosing `best_k` as the entry with the largest
    /// speedup (ties go to the smaller K).
    pub fn from_entries(
        entries: Vec<TuningEntry>,
        profile: HardwareProfile,
        graph_id: impl Into<String>,
    ) -> Result<Self> {
        let best_k = best_k(&entries).ok_or_else(|| Error::Config("tuning produced no entries".into()))?;
        Ok(TuningReport {
            entries,
            best_k,
            profile,
            graph_id: graph_id.into(),
            skipped: Vec::new(),
        })
    }
}

pub(crate) fn best_k(entries: &[TuningEntry]) -> Option<usize> {
    let mut best: Option<&TuningEntry> = None;
    for e in entries {
        best = match best {
            Some(b) if e.speedup < b.speedup || (e.speedup == b.speedup && e.k >= b.k) => Some(b),
            _ => Some(e),
        };
    }
    best.map(|e| e.k)
}

/// Sweep members in `[k_min, k_max]` that are multiples of the profile's VLEN.
pub fn candidate_ks(profile: &HardwareProfile, k_min: usize, k_max: usize) -> Vec<usize> {
    SWEEP_SET
        .iter()
        .copied()
        .filter(|&k| k >= k_min && k <= k_max && k % profile.vlen == 0)
        .collect()
}

/// Median of a set of timings (mean of the two middle values for even counts).
pub fn median(times: &mut [Duration]) -> Duration {
    assert!(!times.is_empty());
    times.sort_unstable();
    let n = times.len();
    if n % 2 == 1 {
        times[n / 2]
    } else {
        (times[n / 2 - 1] + times[n / 2]) / 2
    }
}

/// One warmup call, then `reps` timed calls on the ambient pool. Returns the
/// median time (at least 1 ns) and the warmup output.
pub fn time_spmm<T: Scalar>(
    a: &CsrMatrix<T>,
    b: &DenseMatrix<T>,
    reduce: ReduceOp,
    kind: KernelKind,
    reps: usize,
) -> Result<(Duration, DenseMatrix<T>)> {
    if reps == 0 {
        return Err(Error::Config("need at least one timed repetition".into()));
    }
    let first = spmm_with(a, b, reduce, kind)?;
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        let out = spmm_with(a, b, reduce, kind)?;
        times.push(start.elapsed().max(Duration::from_nanos(1)));
        drop(out);
    }
    Ok((median(&mut times), first))
}

/// Times the trusted and specialized Sum kernels on `a` for every K in `ks`.
///
/// K values without a specialization are listed in `skipped`. Each sweep
/// point also checks that both kernels agree bit for bit and fails with
/// [`Error::KernelMismatch`] otherwise.
pub fn run_tuning<T: Scalar>(a: &CsrMatrix<T>, ks: &[usize], reps: usize, threads: usize) -> Result<TuningReport> {
    if ks.is_empty() {
        return Err(Error::Config("no K values to tune".into()));
    }
    if reps < 3 {
        return Err(Error::Config(format!("need at least 3 timing repetitions, got {reps}")));
    }
    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    for &k in ks {
        if !is_specialized(k) {
            skipped.push(k);
            continue;
        }
        let b = DenseMatrix::random_uniform(a.n_cols(), k, OPERAND_SEED ^ k as u64);
        let entry = with_threads(threads, || -> Result<TuningEntry> {
            let (t_trusted, reference) = time_spmm(a, &b, ReduceOp::Sum, KernelKind::Trusted, reps)?;
            let (t_specialized, tuned) = time_spmm(a, &b, ReduceOp::Sum, KernelKind::Specialized(k), reps)?;
            if let Some(index) = first_bit_difference(reference.data(), tuned.data()) {
                return Err(Error::KernelMismatch { k, index });
            }
            Ok(TuningEntry::new(k, t_trusted, t_specialized))
        })?;
        entries.push(entry);
    }
    let mut report = TuningReport::from_entries(entries, hardware().clone(), "")?;
    report.skipped = skipped;
    Ok(report)
}
