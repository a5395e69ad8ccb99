use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix. Element `(i, j)` lives at `data[i * n_cols + j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    n_rows: usize,
    n_cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        DenseMatrix {
            n_rows,
            n_cols,
            data: vec![T::zero(); n_rows * n_cols],
        }
    }

    /// Entries uniform in [-1, 1) from a ChaCha8 stream seeded with `seed`.
    pub fn random_uniform(n_rows: usize, n_cols: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..n_rows * n_cols)
            .map(|_| T::from_f64_lossy(rng.random_range(-1.0..1.0)))
            .collect();
        DenseMatrix { n_rows, n_cols, data }
    }

    pub fn from_vec(n_rows: usize, n_cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != n_rows * n_cols {
            return Err(Error::Shape(format!(
                "{} elements cannot fill a {n_rows}x{n_cols} matrix",
                data.len()
            )));
        }
        Ok(DenseMatrix { n_rows, n_cols, data })
    }

    /// Builds from nested rows; all rows must have the same length.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * n_cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n_cols {
                return Err(Error::Shape(format!(
                    "row {i} has {} columns, expected {n_cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(DenseMatrix {
            n_rows: rows.len(),
            n_cols,
            data,
        })
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

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n_cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn map(&self, f: impl Fn(T) -> T + Sync) -> Self {
        DenseMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    /// Elementwise `f(self, other)`; shapes must agree.
    pub fn zip_map(&self, other: &Self, op: &'static str, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::dimension(op, self.shape(), other.shape()));
        }
        Ok(DenseMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                out.data[j * self.n_rows + i] = self.data[i * self.n_cols + j];
            }
        }
        out
    }

    /// `self · other`. Each output row is accumulated sequentially by one
    /// worker, so the result does not depend on the thread count.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.n_cols != other.n_rows {
            return Err(Error::dimension("matmul", self.shape(), other.shape()));
        }
        let mut out = Self::zeros(self.n_rows, other.n_cols);
        if other.n_cols == 0 {
            return Ok(out);
        }
        out.data
            .par_chunks_mut(other.n_cols)
            .enumerate()
            .for_each(|(i, out_row)| {
                for (p, &a) in self.row(i).iter().enumerate() {
                    for (o, &b) in out_row.iter_mut().zip(other.row(p)) {
                        *o += a * b;
                    }
                }
            });
        Ok(out)
    }

    /// `selfᵀ · other` without materializing the transpose.
    pub fn matmul_tn(&self, other: &Self) -> Result<Self> {
        if self.n_rows != other.n_rows {
            return Err(Error::dimension("matmul_tn", self.shape(), other.shape()));
        }
        let mut out = Self::zeros(self.n_cols, other.n_cols);
        if other.n_cols == 0 {
            return Ok(out);
        }
        out.data
            .par_chunks_mut(other.n_cols)
            .enumerate()
            .for_each(|(p, out_row)| {
                for r in 0..self.n_rows {
                    let a = self.data[r * self.n_cols + p];
                    for (o, &b) in out_row.iter_mut().zip(other.row(r)) {
                        *o += a * b;
                    }
                }
            });
        Ok(out)
    }

    /// `self · otherᵀ` without materializing the transpose.
    pub fn matmul_nt(&self, other: &Self) -> Result<Self> {
        if self.n_cols != other.n_cols {
            return Err(Error::dimension("matmul_nt", self.shape(), other.shape()));
        }
        let mut out = Self::zeros(self.n_rows, other.n_rows);
        if other.n_rows == 0 {
            return Ok(out);
        }
        out.data
            .par_chunks_mut(other.n_rows)
            .enumerate()
            .for_each(|(i, out_row)| {
                let a = self.row(i);
                for (q, o) in out_row.iter_mut().enumerate() {
                    *o = dot(a, other.row(q));
                }
            });
        Ok(out)
    }

    /// Largest absolute elementwise difference; `None` on a shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> Option<T> {
        if self.shape() != other.shape() {
            return None;
        }
        Some(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| (a - b).abs())
                .fold(T::zero(), T::max),
        )
    }

    pub fn cast<U: Scalar>(&self) -> DenseMatrix<U> {
        DenseMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data: self
                .data
                .iter()
                .map(|v| U::from_f64_lossy(v.to_f64().unwrap_or(f64::NAN)))
                .collect(),
        }
    }
}

/// Sequential left-to-right dot product.
#[inline]
pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}
