//! Row-block scheduling shared by every kernel.
//!
//! Output rows are cut into contiguous blocks holding roughly equal numbers of
//! nonzeros. A block is handled start to finish by one worker, so each output
//! row has exactly one writer and is accumulated in a fixed order whatever
//! the thread count.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rayon::ThreadPool;

/// Blocks per worker; more than one absorbs skewed degree distributions.
const BLOCKS_PER_THREAD: usize = 4;

/// Row boundaries `[0 = b0 <= b1 <= ... <= b_parts = n_rows]` such that each
/// block holds about `nnz / parts` nonzeros.
pub fn balanced_splits(row_ptr: &[u64], parts: usize) -> Vec<usize> {
    let n_rows = row_ptr.len().saturating_sub(1);
    let parts = parts.clamp(1, n_rows.max(1));
    let nnz = row_ptr.last().copied().unwrap_or(0) as u128;
    let mut bounds = Vec::with_capacity(parts + 1);
    bounds.push(0);
    for p in 1..parts {
        let target = (nnz * p as u128 / parts as u128) as u64;
        let r = row_ptr.partition_point(|&x| x < target).min(n_rows);
        let prev = *bounds.last().unwrap();
        bounds.push(r.max(prev));
    }
    bounds.push(n_rows);
    bounds
}

fn blocks() -> usize {
    rayon::current_num_threads() * BLOCKS_PER_THREAD
}

/// Runs `f(row, out_row)` for every row of a dense `width`-column output.
pub(crate) fn par_rows<T, F>(row_ptr: &[u64], out: &mut [T], width: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync,
{
    if width == 0 {
        return;
    }
    let bounds = balanced_splits(row_ptr, blocks());
    let mut pieces = Vec::with_capacity(bounds.len());
    let mut rest = out;
    for w in bounds.windows(2) {
        let (head, tail) = rest.split_at_mut((w[1] - w[0]) * width);
        pieces.push((w[0], head));
        rest = tail;
    }
    pieces.into_par_iter().for_each(|(first, block)| {
        for (k, out_row) in block.chunks_exact_mut(width).enumerate() {
            f(first + k, out_row);
        }
    });
}

/// Runs `f(row, row_values)` over the value array of a CSR matrix with the
/// given `row_ptr`.
pub(crate) fn par_csr_rows<T, F>(row_ptr: &[u64], values: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync,
{
    let bounds = balanced_splits(row_ptr, blocks());
    let mut pieces = Vec::with_capacity(bounds.len());
    let mut rest = values;
    for w in bounds.windows(2) {
        let len = (row_ptr[w[1]] - row_ptr[w[0]]) as usize;
        let (head, tail) = rest.split_at_mut(len);
        pieces.push((w[0], w[1], head));
        rest = tail;
    }
    pieces.into_par_iter().for_each(|(first, last, block)| {
        let base = row_ptr[first] as usize;
        for i in first..last {
            let r = row_ptr[i] as usize - base..row_ptr[i + 1] as usize - base;
            f(i, &mut block[r]);
        }
    });
}

/// Number of hardware threads, or 1 when it cannot be queried.
pub fn available_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn pool(threads: usize) -> Arc<ThreadPool> {
    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<ThreadPool>>>> = OnceLock::new();
    let mut pools = POOLS
        .get_or_init(Default::default)
        .lock()
        .unwrap_or_else(|e| e.into_inner());
    pools
        .entry(threads)
        .or_insert_with(|| {
            Arc::new(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .thread_name(move |i| format!("sparsegnn-{threads}-{i}"))
                    .build()
                    .expect("failed to start kernel thread pool"),
            )
        })
        .clone()
}

/// Runs `f` with every kernel inside it using `threads` workers.
/// `threads == 0` keeps the ambient pool (all cores by default).
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    if threads == 0 {
        f()
    } else {
        pool(threads).install(f)
    }
}
