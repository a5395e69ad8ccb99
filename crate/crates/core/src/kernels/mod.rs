//! SpMM, SDDMM and FusedMM.
//!
//! SpMM comes in two tiers. The trusted kernel handles any K and any
//! [`ReduceOp`] with a plain loop over K. Specialized kernels exist for the
//! fixed K values in [`SPECIALIZATION_SET`], handle only `Sum`, keep the whole
//! output row in a local accumulator array and walk it in chunks of the probed
//! SIMD lane count. Both tiers accumulate in the same order, so switching
//! between them never changes a result bit.
//!
//! All kernels run on the ambient rayon pool; wrap calls in [`with_threads`]
//! to pin the worker count.

mod fused;
mod parallel;
mod spmm;

use std::fmt;

use crate::autotune;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sparse::{CsrMatrix, DenseMatrix, ReduceOp, Semiring};

pub use fused::{fusedmm, sddmm};
pub use parallel::{available_threads, balanced_splits, with_threads};

/// Embedding sizes with a compiled specialized kernel.
pub const SPECIALIZATION_SET: [usize; 7] = [16, 32, 64, 128, 256, 512, 1024];

pub fn is_specialized(k: usize) -> bool {
    SPECIALIZATION_SET.contains(&k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    Trusted,
    Specialized(usize),
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelKind::Trusted => f.write_str("trusted"),
            KernelKind::Specialized(k) => write!(f, "specialized(K={k})"),
        }
    }
}

fn check_spmm_shapes<T: Scalar>(a: &CsrMatrix<T>, b: &DenseMatrix<T>) -> Result<()> {
    if a.n_cols() != b.n_rows() {
        return Err(Error::dimension("spmm", a.shape(), b.shape()));
    }
    Ok(())
}

/// Sparse-dense product `A · B` under `reduce`, routed through the global
/// dispatch state (see [`autotune::set_dispatch`]).
pub fn spmm<T: Scalar>(a: &CsrMatrix<T>, b: &DenseMatrix<T>, reduce: ReduceOp) -> Result<DenseMatrix<T>> {
    let kind = autotune::resolve_kernel(b.n_cols(), reduce);
    spmm_with(a, b, reduce, kind)
}

/// Sparse-dense product on an explicitly chosen kernel.
pub fn spmm_with<T: Scalar>(
    a: &CsrMatrix<T>,
    b: &DenseMatrix<T>,
    reduce: ReduceOp,
    kind: KernelKind,
) -> Result<DenseMatrix<T>> {
    check_spmm_shapes(a, b)?;
    let mut out = DenseMatrix::zeros(a.n_rows(), b.n_cols());
    match kind {
        KernelKind::Trusted => spmm::trusted(a, b, reduce, out.data_mut()),
        KernelKind::Specialized(k) => {
            if !is_specialized(k) {
                return Err(Error::Dispatch(format!("no specialized kernel for K={k}")));
            }
            if b.n_cols() != k {
                return Err(Error::Dispatch(format!(
                    "specialized kernel K={k} called with a dense operand of width {}",
                    b.n_cols()
                )));
            }
            if reduce != ReduceOp::Sum {
                return Err(Error::Dispatch(format!(
                    "specialized kernels only implement sum, not {reduce}"
                )));
            }
            spmm::specialized(a, b, k, autotune::hardware().vlen, out.data_mut());
        }
    }
    Ok(out)
}

/// SpMM under an arbitrary semiring. The default (multiplying) combine goes
/// through [`spmm`]; a custom combine always runs on the trusted tier.
pub fn spmm_semiring<T: Scalar>(a: &CsrMatrix<T>, b: &DenseMatrix<T>, sr: &Semiring<T>) -> Result<DenseMatrix<T>> {
    if sr.is_default_combine() {
        return spmm(a, b, sr.reduce());
    }
    check_spmm_shapes(a, b)?;
    let mut out = DenseMatrix::zeros(a.n_rows(), b.n_cols());
    spmm::with_combine(a, b, sr, out.data_mut());
    Ok(out)
}

/// Specialized SpMM with an explicit lane width, for tests and benchmarks that
/// compare chunkings without touching the hardware probe.
#[doc(hidden)]
pub fn spmm_specialized_lanes<T: Scalar>(a: &CsrMatrix<T>, b: &DenseMatrix<T>, lanes: usize) -> Result<DenseMatrix<T>> {
    check_spmm_shapes(a, b)?;
    let k = b.n_cols();
    if !is_specialized(k) || !matches!(lanes, 4 | 8 | 16) {
        return Err(Error::Dispatch(format!(
            "no specialized kernel for K={k}, lanes={lanes}"
        )));
    }
    let mut out = DenseMatrix::zeros(a.n_rows(), k);
    spmm::specialized(a, b, k, lanes, out.data_mut());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitwise_eq;

    fn dense(rows: &[&[f64]]) -> DenseMatrix<f64> {
        DenseMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn identity_law() {
        let b = dense(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let c = spmm_with(&CsrMatrix::identity(2), &b, ReduceOp::Sum, KernelKind::Trusted).unwrap();
        assert_eq!(c, b);
    }

    #[test]
    fn small_product() {
        let a = CsrMatrix::from_coo(2, 2, &[(0, 1, 2.0), (1, 0, 3.0)]).unwrap();
        let b = dense(&[&[1.0, 1.0], &[2.0, 2.0]]);
        let c = spmm_with(&a, &b, ReduceOp::Sum, KernelKind::Trusted).unwrap();
        assert_eq!(c, dense(&[&[4.0, 4.0], &[3.0, 3.0]]));
    }

    #[test]
    fn min_max_mean() {
        let a = CsrMatrix::from_coo(1, 2, &[(0, 0, 1.0), (0, 1, 1.0)]).unwrap();
        let b = dense(&[&[2.0, 8.0], &[4.0, 2.0]]);
        let run = |r| spmm_with(&a, &b, r, KernelKind::Trusted).unwrap();
        assert_eq!(run(ReduceOp::Min), dense(&[&[2.0, 2.0]]));
        assert_eq!(run(ReduceOp::Max), dense(&[&[4.0, 8.0]]));
        assert_eq!(run(ReduceOp::Mean), dense(&[&[3.0, 5.0]]));
    }

    #[test]
    fn empty_rows_are_zero_for_every_reduction() {
        let a = CsrMatrix::from_coo(2, 2, &[(0, 0, -1.0)]).unwrap();
        let b = dense(&[&[2.0, 3.0], &[4.0, 5.0]]);
        for r in ReduceOp::ALL {
            let c = spmm_with(&a, &b, r, KernelKind::Trusted).unwrap();
            assert_eq!(c.row(1), &[0.0, 0.0], "{r}");
            assert!(c.data().iter().all(|x| x.is_finite()));
        }
    }

    #[test]
    fn min_max_with_negative_products() {
        let a = CsrMatrix::from_coo(1, 2, &[(0, 0, -1.0), (0, 1, 2.0)]).unwrap();
        let b = dense(&[&[3.0], &[-1.0]]);
        assert_eq!(
            spmm_with(&a, &b, ReduceOp::Min, KernelKind::Trusted).unwrap().data(),
            &[-3.0]
        );
        assert_eq!(
            spmm_with(&a, &b, ReduceOp::Max, KernelKind::Trusted).unwrap().data(),
            &[-2.0]
        );
    }

    #[test]
    fn shape_mismatch_names_both_shapes() {
        let a = CsrMatrix::<f32>::identity(3);
        let b = DenseMatrix::zeros(2, 4);
        let err = spmm(&a, &b, ReduceOp::Sum).unwrap_err();
        assert!(
            err.to_string().contains("(3, 3)") && err.to_string().contains("(2, 4)"),
            "{err}"
        );
    }

    #[test]
    fn specialized_contract_violations() {
        let a = CsrMatrix::<f32>::identity(4);
        let b48 = DenseMatrix::zeros(4, 48);
        let b32 = DenseMatrix::zeros(4, 32);
        assert!(matches!(
            spmm_with(&a, &b48, ReduceOp::Sum, KernelKind::Specialized(32)),
            Err(Error::Dispatch(_))
        ));
        assert!(matches!(
            spmm_with(&a, &b48, ReduceOp::Sum, KernelKind::Specialized(48)),
            Err(Error::Dispatch(_))
        ));
        assert!(matches!(
            spmm_with(&a, &b32, ReduceOp::Max, KernelKind::Specialized(32)),
            Err(Error::Dispatch(_))
        ));
        assert!(spmm_with(&a, &b32, ReduceOp::Sum, KernelKind::Specialized(32)).is_ok());
    }

    #[test]
    fn specialized_matches_trusted_for_every_lane_width() {
        let n = 40;
        let mut triples = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if (i * 7 + j * 3) % 5 == 0 {
                    triples.push((i, j, 0.1f32 * ((i + 2 * j) % 9) as f32 - 0.3));
                }
            }
        }
        let a = CsrMatrix::from_coo(n, n, &triples).unwrap();
        for k in SPECIALIZATION_SET {
            let data: Vec<f32> = (0..n * k).map(|t| ((t * 31 % 17) as f32 - 8.0) / 7.0).collect();
            let b = DenseMatrix::from_vec(n, k, data).unwrap();
            let trusted = spmm_with(&a, &b, ReduceOp::Sum, KernelKind::Trusted).unwrap();
            for lanes in [4, 8, 16] {
                let s = spmm_specialized_lanes(&a, &b, lanes).unwrap();
                assert!(bitwise_eq(s.data(), trusted.data()), "K={k} lanes={lanes}");
            }
        }
    }

    #[test]
    fn custom_combine() {
        let a = CsrMatrix::from_coo(1, 2, &[(0, 0, 1.0), (0, 1, 2.0)]).unwrap();
        let b = dense(&[&[1.0], &[5.0]]);
        let sr = Semiring::with_combine(ReduceOp::Max, |e: f64, x: f64| e + x);
        assert_eq!(spmm_semiring(&a, &b, &sr).unwrap().data(), &[7.0]);
    }

    #[test]
    fn sddmm_examples() {
        let x = dense(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let s = sddmm(&CsrMatrix::identity(2), &x, &x).unwrap();
        assert_eq!(s.values(), &[5.0, 25.0]);
        let empty = sddmm(&CsrMatrix::empty(2, 2), &x, &x).unwrap();
        assert_eq!(empty.nnz(), 0);
        assert!(sddmm(&CsrMatrix::identity(3), &x, &x).is_err());
    }

    #[test]
    fn fusedmm_diagonal_closed_form() {
        let x = dense(&[&[1.0, 2.0], &[3.0, -1.0], &[0.5, 0.5]]);
        let f = fusedmm(&CsrMatrix::identity(3), &x, &x, &Semiring::default()).unwrap();
        for i in 0..3 {
            let d: f64 = x.row(i).iter().map(|v| v * v).sum();
            for j in 0..2 {
                assert_eq!(f.get(i, j), d * x.get(i, j));
            }
        }
        let z = fusedmm(&CsrMatrix::empty(3, 3), &x, &x, &Semiring::default()).unwrap();
        assert!(z.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn fusedmm_custom_combine_scales_rows() {
        let p = CsrMatrix::from_coo(1, 2, &[(0, 0, 1.0), (0, 1, 1.0)]).unwrap();
        let x = dense(&[&[1.0]]);
        let y = dense(&[&[2.0], &[-3.0]]);
        // combine = edge + dot: s_00 = 1 + 2, s_01 = 1 - 3
        let sr = Semiring::with_combine(ReduceOp::Sum, |e: f64, d: f64| e + d);
        let f = fusedmm(&p, &x, &y, &sr).unwrap();
        assert_eq!(f.data(), &[3.0 * 2.0 + (-2.0) * -3.0]);
    }
}
