//! Row routines behind `spmm`.
//!
//! Both tiers accumulate each output element as
//! `((0 + a0*b0) + a1*b1) + ...` over the row's nonzeros in column order,
//! which is what makes their `Sum` outputs bitwise identical.

use crate::scalar::Scalar;
use crate::sparse::{CsrMatrix, DenseMatrix, ReduceOp, Semiring};

use super::parallel::par_rows;

/// Generic kernel: any K, any reduction, plain loop over K.
pub(super) fn trusted<T: Scalar>(a: &CsrMatrix<T>, b: &DenseMatrix<T>, reduce: ReduceOp, out: &mut [T]) {
    let k = b.n_cols();
    let b = b.data();
    par_rows(a.row_ptr(), out, k, |i, out_row| {
        let (cols, vals) = a.row(i);
        let pairs = cols
            .iter()
            .zip(vals)
            .map(|(&c, &v)| (v, &b[c as usize * k..(c as usize + 1) * k]));
        reduce_row(pairs, reduce, cols.len(), out_row, |v, x| v * x);
    });
}

/// Generic kernel with a user combine callback applied per element.
pub(super) fn with_combine<T: Scalar>(a: &CsrMatrix<T>, b: &DenseMatrix<T>, sr: &Semiring<T>, out: &mut [T]) {
    let k = b.n_cols();
    let b = b.data();
    par_rows(a.row_ptr(), out, k, |i, out_row| {
        let (cols, vals) = a.row(i);
        let pairs = cols
            .iter()
            .zip(vals)
            .map(|(&c, &v)| (v, &b[c as usize * k..(c as usize + 1) * k]));
        reduce_row(pairs, sr.reduce(), cols.len(), out_row, |v, x| sr.combine(v, x));
    });
}

/// Folds `op(scale, x)` over the given `(scale, dense row)` pairs into a
/// zero-initialized `out_row`.
#[inline]
pub(super) fn reduce_row<'b, T, I, F>(pairs: I, reduce: ReduceOp, degree: usize, out_row: &mut [T], op: F)
where
    T: Scalar,
    I: Iterator<Item = (T, &'b [T])>,
    F: Fn(T, T) -> T,
{
    match reduce {
        ReduceOp::Sum | ReduceOp::Mean => {
            for (v, brow) in pairs {
                for (o, &x) in out_row.iter_mut().zip(brow) {
                    *o += op(v, x);
                }
            }
            if reduce == ReduceOp::Mean && degree > 0 {
                let d = T::from_count(degree);
                for o in out_row.iter_mut() {
                    *o = *o / d;
                }
            }
        }
        ReduceOp::Min | ReduceOp::Max => {
            let take_min = reduce == ReduceOp::Min;
            let mut pairs = pairs;
            if let Some((v, brow)) = pairs.next() {
                for (o, &x) in out_row.iter_mut().zip(brow) {
                    *o = op(v, x);
                }
            }
            for (v, brow) in pairs {
                for (o, &x) in out_row.iter_mut().zip(brow) {
                    let y = op(v, x);
                    if (take_min && y < *o) || (!take_min && y > *o) {
                        *o = y;
                    }
                }
            }
        }
    }
}

/// Register-blocked Sum kernel for a compile-time `K = LANES * BLOCKS`.
fn fixed<T: Scalar, const K: usize, const LANES: usize, const BLOCKS: usize>(a: &CsrMatrix<T>, b: &[T], out: &mut [T]) {
    const { assert!(LANES * BLOCKS == K) };
    par_rows(a.row_ptr(), out, K, |i, out_row| {
        let (cols, vals) = a.row(i);
        for (blk, dst) in out_row.chunks_exact_mut(LANES).enumerate() {
            let mut acc = [T::zero(); LANES];
            let base = blk * LANES;
            for (&c, &v) in cols.iter().zip(vals) {
                let seg: &[T; LANES] = b[c as usize * K + base..][..LANES].try_into().unwrap();
                for (o, &x) in acc.iter_mut().zip(seg) {
                    *o += v * x;
                }
            }
            dst.copy_from_slice(&acc);
        }
    });
}

macro_rules! fixed_table {
    ($k:expr, $lanes:expr, $a:expr, $b:expr, $out:expr; $($K:literal),+) => {
        match $k {
            $($K => match $lanes {
                4 => fixed::<T, $K, 4, { $K / 4 }>($a, $b, $out),
                8 => fixed::<T, $K, 8, { $K / 8 }>($a, $b, $out),
                _ => fixed::<T, $K, 16, { $K / 16 }>($a, $b, $out),
            },)+
            _ => unreachable!("K={} has no compiled specialization", $k),
        }
    };
}

/// Runs the specialization for `k` (a member of the specialization set)
/// with the given lane width (4, 8 or 16).
pub(super) fn specialized<T: Scalar>(a: &CsrMatrix<T>, b: &DenseMatrix<T>, k: usize, lanes: usize, out: &mut [T]) {
    debug_assert_eq!(b.n_cols(), k);
    fixed_table!(k, lanes, a, b.data(), out; 16, 32, 64, 128, 256, 512, 1024);
}
