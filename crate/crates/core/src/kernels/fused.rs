use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sparse::dense::dot;
use crate::sparse::{CsrMatrix, DenseMatrix, Semiring};

use super::parallel::{par_csr_rows, par_rows};
use super::spmm::reduce_row;

fn check_sampled_shapes<T: Scalar>(
    op: &'static str,
    p: &CsrMatrix<T>,
    x: &DenseMatrix<T>,
    y: &DenseMatrix<T>,
) -> Result<()> {
    if p.n_rows() != x.n_rows() {
        return Err(Error::dimension(op, p.shape(), x.shape()));
    }
    if p.n_cols() != y.n_rows() || x.n_cols() != y.n_cols() {
        return Err(Error::dimension(op, x.shape(), y.shape()));
    }
    Ok(())
}

/// Sampled dense-dense product: keeps `p`'s pattern and stores
/// `P[i,j] * dot(X[i,:], Y[j,:])` at every stored position.
pub fn sddmm<T: Scalar>(p: &CsrMatrix<T>, x: &DenseMatrix<T>, y: &DenseMatrix<T>) -> Result<CsrMatrix<T>> {
    check_sampled_shapes("sddmm", p, x, y)?;
    let mut values = vec![T::zero(); p.nnz()];
    par_csr_rows(p.row_ptr(), &mut values, |i, out| {
        let (cols, vals) = p.row(i);
        let xi = x.row(i);
        for ((o, &j), &pv) in out.iter_mut().zip(cols).zip(vals) {
            *o = pv * dot(xi, y.row(j as usize));
        }
    });
    Ok(p.with_values(values))
}

/// SDDMM followed by SpMM in one pass over `p`.
///
/// Row `i` of the result reduces `s_ij * Y[j,:]` over the stored `j`, where
/// `s_ij = sr.combine(P[i,j], dot(X[i,:], Y[j,:]))`. With the default
/// semiring this equals `spmm(sddmm(p, x, y), y, sr.reduce())` without
/// materializing the sampled matrix.
pub fn fusedmm<T: Scalar>(
    p: &CsrMatrix<T>,
    x: &DenseMatrix<T>,
    y: &DenseMatrix<T>,
    sr: &Semiring<T>,
) -> Result<DenseMatrix<T>> {
    check_sampled_shapes("fusedmm", p, x, y)?;
    let k = y.n_cols();
    let mut out = DenseMatrix::zeros(p.n_rows(), k);
    par_rows(p.row_ptr(), out.data_mut(), k, |i, out_row| {
        let (cols, vals) = p.row(i);
        let xi = x.row(i);
        let pairs = cols.iter().zip(vals).map(|(&j, &pv)| {
            let yj = y.row(j as usize);
            (sr.combine(pv, dot(xi, yj)), yj)
        });
        reduce_row(pairs, sr.reduce(), cols.len(), out_row, |s, v| s * v);
    });
    Ok(out)
}
