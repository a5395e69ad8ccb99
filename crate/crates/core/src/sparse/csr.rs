//! Compressed sparse row storage.
//!
//! Column indices are `u32` and row offsets `u64`: a graph may have more than
//! 2^32 edges but never more than 2^32 nodes.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sparse::DenseMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<u64>,
    col_idx: Vec<u32>,
    values: Vec<T>,
}

fn check_dims(n_rows: usize, n_cols: usize) -> Result<()> {
    if n_rows > u32::MAX as usize || n_cols > u32::MAX as usize {
        return Err(Error::Shape(format!(
            "{n_rows}x{n_cols} exceeds the 32-bit index range"
        )));
    }
    Ok(())
}

impl<T: Scalar> CsrMatrix<T> {
    /// Builds a matrix from raw CSR arrays, rejecting anything that violates
    /// the CSR invariants.
    pub fn from_parts(
        n_rows: usize,
        n_cols: usize,
        row_ptr: Vec<u64>,
        col_idx: Vec<u32>,
        values: Vec<T>,
    ) -> Result<Self> {
        check_dims(n_rows, n_cols)?;
        let m = CsrMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        };
        m.validate()?;
        Ok(m)
    }

    pub(crate) fn from_parts_unchecked(
        n_rows: usize,
        n_cols: usize,
        row_ptr: Vec<u64>,
        col_idx: Vec<u32>,
        values: Vec<T>,
    ) -> Self {
        let m = CsrMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        };
        debug_assert!(m.validate().is_ok(), "{:?}", m.validate());
        m
    }

    /// An `n_rows x n_cols` matrix with no stored entries.
    pub fn empty(n_rows: usize, n_cols: usize) -> Self {
        Self::from_parts_unchecked(n_rows, n_cols, vec![0; n_rows + 1], Vec::new(), Vec::new())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_parts_unchecked(
            n,
            n,
            (0..=n as u64).collect(),
            (0..n as u32).collect(),
            vec![T::one(); n],
        )
    }

    /// Builds a matrix from coordinate triples. Duplicate coordinates are
    /// summed in input order; columns end up sorted within each row.
    pub fn from_coo(n_rows: usize, n_cols: usize, triples: &[(usize, usize, T)]) -> Result<Self> {
        check_dims(n_rows, n_cols)?;
        if let Some(&(row, col, value)) = triples.iter().find(|&&(r, c, _)| r >= n_rows || c >= n_cols) {
            return Err(Error::IndexOutOfRange {
                row,
                col,
                value: value.to_string(),
                n_rows,
                n_cols,
            });
        }

        // Counting sort by row keeps input order within a row, so the stable
        // column sort below preserves the input order of duplicates.
        let mut counts = vec![0u64; n_rows + 1];
        for &(r, _, _) in triples {
            counts[r + 1] += 1;
        }
        for i in 0..n_rows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut by_row: Vec<(u32, T)> = vec![(0, T::zero()); triples.len()];
        for &(r, c, v) in triples {
            by_row[next[r] as usize] = (c as u32, v);
            next[r] += 1;
        }

        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        let mut col_idx = Vec::with_capacity(triples.len());
        let mut values = Vec::with_capacity(triples.len());
        row_ptr.push(0u64);
        for r in 0..n_rows {
            let row = &mut by_row[counts[r] as usize..counts[r + 1] as usize];
            row.sort_by_key(|&(c, _)| c);
            let mut k = 0;
            while k < row.len() {
                let c = row[k].0;
                let mut acc = T::zero();
                while k < row.len() && row[k].0 == c {
                    acc += row[k].1;
                    k += 1;
                }
                col_idx.push(c);
                values.push(acc);
            }
            row_ptr.push(col_idx.len() as u64);
        }
        Ok(Self::from_parts_unchecked(n_rows, n_cols, row_ptr, col_idx, values))
    }

    /// Checks every CSR invariant in one pass.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidCsr(msg));
        if self.row_ptr.len() != self.n_rows + 1 {
            return bad(format!(
                "row_ptr has length {}, expected {}",
                self.row_ptr.len(),
                self.n_rows + 1
            ));
        }
        if self.row_ptr[0] != 0 {
            return bad(format!("row_ptr[0] = {}", self.row_ptr[0]));
        }
        if self.col_idx.len() != self.values.len() {
            return bad(format!(
                "{} column indices but {} values",
                self.col_idx.len(),
                self.values.len()
            ));
        }
        if self.row_ptr[self.n_rows] != self.col_idx.len() as u64 {
            return bad(format!(
                "row_ptr ends at {} but nnz is {}",
                self.row_ptr[self.n_rows],
                self.col_idx.len()
            ));
        }
        for i in 0..self.n_rows {
            let (start, end) = (self.row_ptr[i], self.row_ptr[i + 1]);
            if start > end {
                return bad(format!("row_ptr decreases at row {i}"));
            }
            let cols = &self.col_idx[start as usize..end as usize];
            for (k, &c) in cols.iter().enumerate() {
                if c as usize >= self.n_cols {
                    return bad(format!("row {i}: column {c} >= n_cols {}", self.n_cols));
                }
                if k > 0 && cols[k - 1] >= c {
                    return bad(format!("row {i}: columns not strictly increasing at {c}"));
                }
            }
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_rows, self.n_cols)
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row_ptr(&self) -> &[u64] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[u32] {
        &self.col_idx
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn row_range(&self, i: usize) -> Range<usize> {
        self.row_ptr[i] as usize..self.row_ptr[i + 1] as usize
    }

    /// Column indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[u32], &[T]) {
        let r = self.row_range(i);
        (&self.col_idx[r.clone()], &self.values[r])
    }

    /// Stored value at `(i, j)`, if present.
    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        let (cols, vals) = self.row(i);
        cols.binary_search(&(j as u32)).ok().map(|k| vals[k])
    }

    /// Number of stored entries per row.
    pub fn row_degrees(&self) -> Vec<usize> {
        self.row_ptr.windows(2).map(|w| (w[1] - w[0]) as usize).collect()
    }

    /// Counting-sort transpose. Rows are visited in order, so every output
    /// row comes out with strictly increasing columns.
    pub fn transpose(&self) -> Self {
        let nnz = self.nnz();
        let mut row_ptr = vec![0u64; self.n_cols + 1];
        for &c in &self.col_idx {
            row_ptr[c as usize + 1] += 1;
        }
        for j in 0..self.n_cols {
            row_ptr[j + 1] += row_ptr[j];
        }
        let mut next: Vec<u64> = row_ptr[..self.n_cols].to_vec();
        let mut col_idx = vec![0u32; nnz];
        let mut values = vec![T::zero(); nnz];
        for i in 0..self.n_rows {
            for k in self.row_range(i) {
                let c = self.col_idx[k] as usize;
                let dst = next[c] as usize;
                col_idx[dst] = i as u32;
                values[dst] = self.values[k];
                next[c] += 1;
            }
        }
        Self::from_parts_unchecked(self.n_cols, self.n_rows, row_ptr, col_idx, values)
    }

    /// True when the matrix is square and `A[i,j]` and `A[j,i]` are stored
    /// together with bitwise-equal values. Runs without building a transpose.
    pub fn is_symmetric(&self) -> bool {
        if self.n_rows != self.n_cols {
            return false;
        }
        (0..self.n_rows).all(|i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).all(|(&j, &v)| {
                self.get(j as usize, i)
                    .is_some_and(|w| w.to_bits_u64() == v.to_bits_u64())
            })
        })
    }

    /// Same pattern, values transformed by `f`.
    pub fn map_values(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Same pattern with the given values; `values.len()` must equal `nnz`.
    pub(crate) fn with_values(&self, values: Vec<T>) -> Self {
        assert_eq!(values.len(), self.nnz());
        Self {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values,
        }
    }

    /// Coordinate triples in row-major order.
    pub fn to_coo(&self) -> Vec<(usize, usize, T)> {
        (0..self.n_rows)
            .flat_map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals).map(move |(&c, &v)| (i, c as usize, v))
            })
            .collect()
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut d = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for (i, j, v) in self.to_coo() {
            d.set(i, j, v);
        }
        d
    }

    /// Converts the element type, e.g. an `f64` graph for an `f32` run.
    pub fn cast<U: Scalar>(&self) -> CsrMatrix<U> {
        CsrMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self
                .values
                .iter()
                .map(|v| U::from_f64_lossy(v.to_f64().unwrap_or(f64::NAN)))
                .collect(),
        }
    }
}
