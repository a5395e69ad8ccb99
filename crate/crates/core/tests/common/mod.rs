//! Brute-force reference implementations shared by the integration tests.
//! Everything here works on plain `Vec<Vec<f64>>` and never calls the
//! library's kernels.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparsegnn::{CsrMatrix, DenseMatrix, ReduceOp, Scalar};

pub type Mat = Vec<Vec<f64>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_triples(rng: &mut ChaCha8Rng, n: usize, m: usize, density: f64) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..m {
            if rng.random_bool(density) {
                let v: f64 = rng.random_range(-1.0..1.0);
                out.push((i, j, if v == 0.0 { 0.5 } else { v }));
            }
        }
    }
    out
}

pub fn random_csr<T: Scalar>(rng: &mut ChaCha8Rng, n: usize, m: usize, density: f64) -> CsrMatrix<T> {
    let triples: Vec<(usize, usize, T)> = random_triples(rng, n, m, density)
        .into_iter()
        .map(|(i, j, v)| (i, j, T::from_f64_lossy(v)))
        .collect();
    CsrMatrix::from_coo(n, m, &triples).unwrap()
}

pub fn random_dense<T: Scalar>(rng: &mut ChaCha8Rng, n: usize, k: usize) -> DenseMatrix<T> {
    let data = (0..n * k)
        .map(|_| T::from_f64_lossy(rng.random_range(-1.0..1.0)))
        .collect();
    DenseMatrix::from_vec(n, k, data).unwrap()
}

pub fn to_mat<T: Scalar>(d: &DenseMatrix<T>) -> Mat {
    (0..d.n_rows())
        .map(|i| d.row(i).iter().map(|v| v.to_f64().unwrap()).collect())
        .collect()
}

pub fn csr_to_mat<T: Scalar>(a: &CsrMatrix<T>) -> Mat {
    let mut m = vec![vec![0.0; a.n_cols()]; a.n_rows()];
    for (i, j, v) in a.to_coo() {
        m[i][j] = v.to_f64().unwrap();
    }
    m
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let k = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            let mut out = vec![0.0; k];
            for (j, &aij) in row.iter().enumerate() {
                for c in 0..k {
                    out[c] += aij * b[j][c];
                }
            }
            out
        })
        .collect()
}

pub fn transpose(a: &Mat) -> Mat {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// `(Σ_j a_ij b_jk, Σ_j |a_ij b_jk|)` by triple loop.
pub fn dense_spmm_sum(a: &Mat, b: &Mat) -> (Mat, Mat) {
    let k = b.first().map_or(0, Vec::len);
    let mut sum = vec![vec![0.0; k]; a.len()];
    let mut mag = vec![vec![0.0; k]; a.len()];
    for (i, row) in a.iter().enumerate() {
        for (j, &aij) in row.iter().enumerate() {
            for c in 0..k {
                sum[i][c] += aij * b[j][c];
                mag[i][c] += (aij * b[j][c]).abs();
            }
        }
    }
    (sum, mag)
}

/// Reduction of `combine(a_ij, b_jk)` over stored entries, in `T` arithmetic,
/// visiting each row's entries in column order.
pub fn brute_reduce<T: Scalar>(
    a: &CsrMatrix<T>,
    b: &DenseMatrix<T>,
    reduce: ReduceOp,
    combine: impl Fn(T, T) -> T,
) -> DenseMatrix<T> {
    let k = b.n_cols();
    let mut out = DenseMatrix::zeros(a.n_rows(), k);
    for i in 0..a.n_rows() {
        let entries: Vec<(usize, T)> = a
            .to_coo()
            .into_iter()
            .filter(|e| e.0 == i)
            .map(|e| (e.1, e.2))
            .collect();
        if entries.is_empty() {
            continue;
        }
        for c in 0..k {
            let vals: Vec<T> = entries.iter().map(|&(j, v)| combine(v, b.get(j, c))).collect();
            let r = match reduce {
                ReduceOp::Sum => vals.iter().fold(T::zero(), |acc, &v| acc + v),
                ReduceOp::Mean => vals.iter().fold(T::zero(), |acc, &v| acc + v) / T::from_count(vals.len()),
                ReduceOp::Min => vals[1..].iter().fold(vals[0], |acc, &v| acc.min(v)),
                ReduceOp::Max => vals[1..].iter().fold(vals[0], |acc, &v| acc.max(v)),
            };
            out.set(i, c, r);
        }
    }
    out
}

/// `max |got - want| / scale` with a zero scale requiring exact equality.
pub fn scaled_error(got: &Mat, want: &Mat, scale: &Mat) -> f64 {
    let mut worst: f64 = 0.0;
    for ((g, w), s) in got.iter().zip(want).zip(scale) {
        for ((&g, &w), &s) in g.iter().zip(w).zip(s) {
            let d = (g - w).abs();
            if d.is_nan() {
                return f64::INFINITY;
            }
            worst = worst.max(if s > 0.0 {
                d / s
            } else if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            });
        }
    }
    worst
}

/// `D^{-1/2} (A + I) D^{-1/2}` as a dense matrix, degrees taken from `A + I`.
pub fn dense_gcn_norm(a: &Mat) -> Mat {
    let n = a.len();
    let mut t = a.clone();
    for (i, row) in t.iter_mut().enumerate() {
        row[i] += 1.0;
    }
    let deg: Vec<f64> = t.iter().map(|r| r.iter().sum()).collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if t[i][j] == 0.0 {
                        0.0
                    } else {
                        t[i][j] / (deg[i] * deg[j]).sqrt()
                    }
                })
                .collect()
        })
        .collect()
}

pub fn relu(m: &Mat) -> Mat {
    m.iter().map(|r| r.iter().map(|v| v.max(0.0)).collect()).collect()
}

/// Masked mean softmax cross-entropy and its gradient.
pub fn xent(logits: &Mat, labels: &[usize], mask: &[bool]) -> (f64, Mat) {
    let count = mask.iter().filter(|&&m| m).count() as f64;
    let mut loss = 0.0;
    let mut grad = vec![vec![0.0; logits[0].len()]; logits.len()];
    for (i, z) in logits.iter().enumerate() {
        if !mask[i] {
            continue;
        }
        let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
        let s: f64 = e.iter().sum();
        loss += s.ln() - (z[labels[i]] - max);
        for (c, g) in grad[i].iter_mut().enumerate() {
            *g = (e[c] / s - if c == labels[i] { 1.0 } else { 0.0 }) / count;
        }
    }
    (loss / count, grad)
}

/// Two-layer GCN trained with plain gradient descent on dense matrices.
/// Returns per-epoch losses, final train accuracy, and the final weights.
#[allow(clippy::too_many_arguments)]
pub fn dense_gcn_train(
    a: &Mat,
    x: &Mat,
    labels: &[usize],
    mask: &[bool],
    mut w1: Mat,
    mut w2: Mat,
    epochs: usize,
    lr: f64,
) -> (Vec<f64>, f64, Mat, Mat) {
    let a_hat = dense_gcn_norm(a);
    let a_hat_t = transpose(&a_hat);
    let mut losses = Vec::new();
    let mut acc = 0.0;
    for _ in 0..epochs {
        let p1 = matmul(&a_hat, &matmul(x, &w1));
        let h = relu(&p1);
        let logits = matmul(&a_hat, &matmul(&h, &w2));
        let (loss, dl) = xent(&logits, labels, mask);
        losses.push(loss);
        acc = dense_accuracy(&logits, labels, mask);
        let dz2 = matmul(&a_hat_t, &dl);
        let dw2 = matmul(&transpose(&h), &dz2);
        let dh = matmul(&dz2, &transpose(&w2));
        let dp1: Mat = dh
            .iter()
            .zip(&p1)
            .map(|(d, p)| d.iter().zip(p).map(|(&d, &p)| if p > 0.0 { d } else { 0.0 }).collect())
            .collect();
        let dz1 = matmul(&a_hat_t, &dp1);
        let dw1 = matmul(&transpose(x), &dz1);
        for (w, g) in w1.iter_mut().flatten().zip(dw1.iter().flatten()) {
            *w -= lr * g;
        }
        for (w, g) in w2.iter_mut().flatten().zip(dw2.iter().flatten()) {
            *w -= lr * g;
        }
    }
    (losses, acc, w1, w2)
}

pub fn dense_accuracy(logits: &Mat, labels: &[usize], mask: &[bool]) -> f64 {
    let mut hits = 0;
    let mut seen = 0;
    for (i, z) in logits.iter().enumerate() {
        if !mask[i] {
            continue;
        }
        seen += 1;
        let best = (1..z.len()).fold(0, |b, j| if z[j] > z[b] { j } else { b });
        if best == labels[i] {
            hits += 1;
        }
    }
    hits as f64 / seen as f64
}
