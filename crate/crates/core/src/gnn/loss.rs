use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sparse::DenseMatrix;

fn check_targets<T: Scalar>(logits: &DenseMatrix<T>, labels: &[usize], mask: &[bool]) -> Result<()> {
    let n = logits.n_rows();
    if labels.len() != n || mask.len() != n {
        return Err(Error::Shape(format!(
            "{n} logit rows but {} labels and {} mask entries",
            labels.len(),
            mask.len()
        )));
    }
    let classes = logits.n_cols();
    if let Some((i, &l)) = labels.iter().enumerate().find(|&(i, &l)| mask[i] && l >= classes) {
        return Err(Error::Shape(format!(
            "label {l} of node {i} out of range for {classes} classes"
        )));
    }
    Ok(())
}

/// Mean cross-entropy of softmax(logits) over the masked rows, and its
/// gradient with respect to the logits (zero on unmasked rows).
pub fn softmax_xent<T: Scalar>(
    logits: &DenseMatrix<T>,
    labels: &[usize],
    mask: &[bool],
) -> Result<(T, DenseMatrix<T>)> {
    check_targets(logits, labels, mask)?;
    let count = mask.iter().filter(|&&m| m).count();
    if count == 0 {
        return Err(Error::EmptyMask);
    }
    let inv = T::one() / T::from_count(count);
    let mut grad = DenseMatrix::zeros(logits.n_rows(), logits.n_cols());
    let mut total = T::zero();
    for i in (0..logits.n_rows()).filter(|&i| mask[i]) {
        let z = logits.row(i);
        let max = z.iter().copied().fold(T::neg_infinity(), T::max);
        let g = grad.row_mut(i);
        let mut sum = T::zero();
        for (gj, &zj) in g.iter_mut().zip(z) {
            *gj = (zj - max).exp();
            sum += *gj;
        }
        total += sum.ln() - (z[labels[i]] - max);
        for gj in g.iter_mut() {
            *gj = *gj / sum * inv;
        }
        g[labels[i]] -= inv;
    }
    Ok((total * inv, grad))
}

/// Fraction of masked rows whose argmax (first maximum) equals the label.
pub fn accuracy<T: Scalar>(logits: &DenseMatrix<T>, labels: &[usize], mask: &[bool]) -> Result<f64> {
    check_targets(logits, labels, mask)?;
    let mut seen = 0usize;
    let mut hits = 0usize;
    for i in (0..logits.n_rows()).filter(|&i| mask[i]) {
        seen += 1;
        let row = logits.row(i);
        let best = (1..row.len()).fold(0, |b, j| if row[j] > row[b] { j } else { b });
        if best == labels[i] {
            hits += 1;
        }
    }
    if seen == 0 {
        return Err(Error::EmptyMask);
    }
    Ok(hits as f64 / seen as f64)
}
