use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sparse::CsrMatrix;

/// Symmetric GCN normalization `D̃^{-1/2} Ã D̃^{-1/2}` with `Ã = A + I` when
/// `add_self_loops` is set, `Ã = A` otherwise. `d̃(i)` is the row sum of `Ã`;
/// rows whose degree is zero come out as zero rows.
pub fn normalize_adjacency<T: Scalar>(a: &CsrMatrix<T>, add_self_loops: bool) -> Result<CsrMatrix<T>> {
    if a.n_rows() != a.n_cols() {
        return Err(Error::Shape(format!(
            "normalize_adjacency needs a square matrix, got {}x{}",
            a.n_rows(),
            a.n_cols()
        )));
    }
    let n = a.n_rows();
    let tilde = if add_self_loops { with_self_loops(a) } else { a.clone() };

    let degree: Vec<T> = (0..n)
        .map(|i| {
            let mut s = T::zero();
            for &v in tilde.row(i).1 {
                s += v;
            }
            s
        })
        .collect();

    let mut values = Vec::with_capacity(tilde.nnz());
    for i in 0..n {
        let (cols, vals) = tilde.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            let d = degree[i] * degree[j as usize];
            values.push(if d > T::zero() { v / d.sqrt() } else { T::zero() });
        }
    }
    Ok(tilde.with_values(values))
}

/// `A + I`, merging into existing diagonal entries.
fn with_self_loops<T: Scalar>(a: &CsrMatrix<T>) -> CsrMatrix<T> {
    let n = a.n_rows();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(a.nnz() + n);
    let mut values = Vec::with_capacity(a.nnz() + n);
    row_ptr.push(0u64);
    for i in 0..n {
        let (cols, vals) = a.row(i);
        let diag = i as u32;
        let mut placed = false;
        for (&c, &v) in cols.iter().zip(vals) {
            if !placed && c >= diag {
                if c == diag {
                    col_idx.push(c);
                    values.push(v + T::one());
                    placed = true;
                    continue;
                }
                col_idx.push(diag);
                values.push(T::one());
                placed = true;
            }
            col_idx.push(c);
            values.push(v);
        }
        if !placed {
            col_idx.push(diag);
            values.push(T::one());
        }
        row_ptr.push(col_idx.len() as u64);
    }
    CsrMatrix::from_parts_unchecked(n, n, row_ptr, col_idx, values)
}
