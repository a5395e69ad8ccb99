use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sparse::{DenseMatrix, ReduceOp};

use super::{GnnModel, Gradients, ModelKind, TrainingCache};

/// Activations stashed by [`forward`] for the matching [`backward`].
#[derive(Debug, Clone)]
pub struct Tape<'x, T> {
    kind: ModelKind,
    input: &'x DenseMatrix<T>,
    /// Layer-1 aggregate: neighbour aggregate for SAGE, `(1+ε)X + AX` for GIN.
    agg1: Option<DenseMatrix<T>>,
    pre1: DenseMatrix<T>,
    hidden: DenseMatrix<T>,
    agg2: Option<DenseMatrix<T>>,
}

impl<T: Scalar> Tape<'_, T> {
    pub fn n_nodes(&self) -> usize {
        self.input.n_rows()
    }

    /// Layer-1 pre-activation (before ReLU).
    pub fn pre_activation(&self) -> &DenseMatrix<T> {
        &self.pre1
    }

    pub fn hidden(&self) -> &DenseMatrix<T> {
        &self.hidden
    }
}

fn add<T: Scalar>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    a.zip_map(b, "add", |x, y| x + y)
}

fn relu<T: Scalar>(m: &DenseMatrix<T>) -> DenseMatrix<T> {
    m.map(|v| if v > T::zero() { v } else { T::zero() })
}

/// `d ⊙ relu'(pre)`.
fn relu_back<T: Scalar>(d: &DenseMatrix<T>, pre: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    d.zip_map(pre, "relu backward", |g, p| if p > T::zero() { g } else { T::zero() })
}

/// `(1 + ε) h + a_hat · h`.
fn gin_aggregate<T: Scalar>(cache: &TrainingCache<T>, h: &DenseMatrix<T>, eps: T) -> Result<DenseMatrix<T>> {
    let neigh = cache.propagate(h, ReduceOp::Sum)?;
    let scale = T::one() + eps;
    h.zip_map(&neigh, "gin aggregate", |x, n| scale * x + n)
}

fn frobenius_dot<T: Scalar>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> T {
    a.data()
        .iter()
        .zip(b.data())
        .fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

fn self_weights<T>(w: &Option<DenseMatrix<T>>) -> Result<&DenseMatrix<T>> {
    w.as_ref()
        .ok_or_else(|| Error::Shape("GraphSAGE model is missing its self weights".into()))
}

/// Runs the model on `x` and returns `nodes x classes` logits plus the tape.
pub fn forward<'x, T: Scalar>(
    model: &GnnModel<T>,
    cache: &TrainingCache<T>,
    x: &'x DenseMatrix<T>,
) -> Result<(DenseMatrix<T>, Tape<'x, T>)> {
    if x.n_rows() != cache.n_nodes() {
        return Err(Error::dimension("forward", cache.a_hat().shape(), x.shape()));
    }
    if x.n_cols() != model.in_features {
        return Err(Error::dimension("forward", x.shape(), model.w1.shape()));
    }
    let reduce = model.kind.reduce();
    let (agg1, pre1) = match model.kind {
        ModelKind::Gcn => (None, cache.propagate(&x.matmul(&model.w1)?, reduce)?),
        ModelKind::SageSum | ModelKind::SageMean => {
            let n1 = cache.propagate(x, reduce)?;
            let p1 = add(&n1.matmul(&model.w1)?, &x.matmul(self_weights(&model.self1)?)?)?;
            (Some(n1), p1)
        }
        ModelKind::Gin => {
            let s1 = gin_aggregate(cache, x, model.eps)?;
            let p1 = s1.matmul(&model.w1)?;
            (Some(s1), p1)
        }
    };
    let hidden = relu(&pre1);
    let (agg2, logits) = match model.kind {
        ModelKind::Gcn => (None, cache.propagate(&hidden.matmul(&model.w2)?, reduce)?),
        ModelKind::SageSum | ModelKind::SageMean => {
            let n2 = cache.propagate(&hidden, reduce)?;
            let out = add(&n2.matmul(&model.w2)?, &hidden.matmul(self_weights(&model.self2)?)?)?;
            (Some(n2), out)
        }
        ModelKind::Gin => {
            let s2 = gin_aggregate(cache, &hidden, model.eps)?;
            let out = s2.matmul(&model.w2)?;
            (Some(s2), out)
        }
    };
    let tape = Tape {
        kind: model.kind,
        input: x,
        agg1,
        pre1,
        hidden,
        agg2,
    };
    Ok((logits, tape))
}

/// Reverse pass of one propagation `C = a_hat · H` under the model's reduce.
fn propagate_back<T: Scalar>(cache: &TrainingCache<T>, reduce: ReduceOp, d: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    match reduce {
        ReduceOp::Sum => cache.propagate_back(d),
        ReduceOp::Mean => {
            let mut scaled = d.clone();
            for (i, &deg) in cache.degrees().iter().enumerate() {
                let row = scaled.row_mut(i);
                if deg == 0 {
                    row.fill(T::zero());
                } else {
                    let inv = T::one() / T::from_count(deg);
                    row.iter_mut().for_each(|v| *v *= inv);
                }
            }
            cache.propagate_back(&scaled)
        }
        other => Err(Error::Config(format!("no backward rule for {other} aggregation"))),
    }
}

/// Gradients of the loss with respect to every parameter, given the gradient
/// with respect to the logits.
pub fn backward<T: Scalar>(
    model: &GnnModel<T>,
    cache: &mut TrainingCache<T>,
    tape: &Tape<'_, T>,
    grad_logits: &DenseMatrix<T>,
) -> Result<Gradients<T>> {
    if tape.n_nodes() != cache.n_nodes() {
        return Err(Error::Tape(format!(
            "tape covers {} nodes, graph has {}",
            tape.n_nodes(),
            cache.n_nodes()
        )));
    }
    if tape.kind != model.kind {
        return Err(Error::Tape(format!(
            "tape recorded by a {} model, not {}",
            tape.kind, model.kind
        )));
    }
    if grad_logits.shape() != (cache.n_nodes(), model.classes) {
        return Err(Error::dimension(
            "backward",
            grad_logits.shape(),
            (cache.n_nodes(), model.classes),
        ));
    }
    cache.prepare_backward();
    let cache = &*cache;
    let reduce = model.kind.reduce();
    let x = tape.input;
    let missing = || Error::Tape("tape is missing an aggregate".into());

    let grads = match model.kind {
        ModelKind::Gcn => {
            let dz2 = propagate_back(cache, reduce, grad_logits)?;
            let w2 = tape.hidden.matmul_tn(&dz2)?;
            let dh = dz2.matmul_nt(&model.w2)?;
            let dz1 = propagate_back(cache, reduce, &relu_back(&dh, &tape.pre1)?)?;
            let w1 = x.matmul_tn(&dz1)?;
            Gradients {
                kind: model.kind,
                w1,
                w2,
                self1: None,
                self2: None,
                eps: T::zero(),
            }
        }
        ModelKind::SageSum | ModelKind::SageMean => {
            let n1 = tape.agg1.as_ref().ok_or_else(missing)?;
            let n2 = tape.agg2.as_ref().ok_or_else(missing)?;
            let w2 = n2.matmul_tn(grad_logits)?;
            let s2 = tape.hidden.matmul_tn(grad_logits)?;
            let dn2 = grad_logits.matmul_nt(&model.w2)?;
            let dh = add(
                &grad_logits.matmul_nt(self_weights(&model.self2)?)?,
                &propagate_back(cache, reduce, &dn2)?,
            )?;
            let dp1 = relu_back(&dh, &tape.pre1)?;
            let w1 = n1.matmul_tn(&dp1)?;
            let s1 = x.matmul_tn(&dp1)?;
            Gradients {
                kind: model.kind,
                w1,
                w2,
                self1: Some(s1),
                self2: Some(s2),
                eps: T::zero(),
            }
        }
        ModelKind::Gin => {
            let s1 = tape.agg1.as_ref().ok_or_else(missing)?;
            let s2 = tape.agg2.as_ref().ok_or_else(missing)?;
            let scale = T::one() + model.eps;
            let w2 = s2.matmul_tn(grad_logits)?;
            let ds2 = grad_logits.matmul_nt(&model.w2)?;
            let mut eps = frobenius_dot(&ds2, &tape.hidden);
            let neigh = propagate_back(cache, reduce, &ds2)?;
            let dh = ds2.zip_map(&neigh, "gin backward", |d, n| scale * d + n)?;
            let dp1 = relu_back(&dh, &tape.pre1)?;
            let w1 = s1.matmul_tn(&dp1)?;
            let ds1 = dp1.matmul_nt(&model.w1)?;
            eps += frobenius_dot(&ds1, x);
            Gradients {
                kind: model.kind,
                w1,
                w2,
                self1: None,
                self2: None,
                eps,
            }
        }
    };
    Ok(grads)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gnn::softmax_xent;
    use crate::sparse::CsrMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn relu_dense(m: &DenseMatrix<f64>) -> DenseMatrix<f64> {
        m.map(|v| v.max(0.0))
    }

    fn random_dense(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DenseMatrix<f64> {
        DenseMatrix::from_vec(r, c, (0..r * c).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
    }

    #[test]
    fn single_isolated_node_gcn_is_an_mlp() {
        let a = CsrMatrix::<f64>::empty(1, 1);
        let cache = TrainingCache::build(ModelKind::Gcn, &a, true, true).unwrap();
        let model = GnnModel::new(ModelKind::Gcn, 3, 4, 2, 9);
        let x = DenseMatrix::from_vec(1, 3, vec![0.5, -1.0, 2.0]).unwrap();
        let (logits, _) = forward(&model, &cache, &x).unwrap();
        let expect = relu_dense(&x.matmul(&model.w1).unwrap()).matmul(&model.w2).unwrap();
        assert!(logits.max_abs_diff(&expect).unwrap() < 1e-15);
    }

    #[test]
    fn gin_without_edges_is_an_mlp() {
        let a = CsrMatrix::<f64>::empty(4, 4);
        let cache = TrainingCache::build(ModelKind::Gin, &a, true, true).unwrap();
        let model = GnnModel::new(ModelKind::Gin, 3, 5, 2, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_dense(&mut rng, 4, 3);
        let (logits, _) = forward(&model, &cache, &x).unwrap();
        let expect = relu_dense(&x.matmul(&model.w1).unwrap()).matmul(&model.w2).unwrap();
        assert!(logits.max_abs_diff(&expect).unwrap() < 1e-15);
    }

    #[test]
    fn two_node_path_matches_dense_reference() {
        let a = CsrMatrix::from_coo(2, 2, &[(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let cache = TrainingCache::build(ModelKind::Gcn, &a, true, true).unwrap();
        let mut model = GnnModel::new(ModelKind::Gcn, 2, 2, 2, 0);
        model.w1 = DenseMatrix::from_rows(&[[1.0, -0.5], [0.25, 2.0]]).unwrap();
        model.w2 = DenseMatrix::from_rows(&[[0.5, 1.0], [-1.0, 0.75]]).unwrap();
        let x = DenseMatrix::from_rows(&[[1.0, 2.0], [-3.0, 0.5]]).unwrap();
        // A + I is all ones with degree 2, so Â is 0.5 everywhere.
        let a_hat = DenseMatrix::from_rows(&[[0.5, 0.5], [0.5, 0.5]]).unwrap();
        let h1 = relu_dense(&a_hat.matmul(&x.matmul(&model.w1).unwrap()).unwrap());
        let expect = a_hat.matmul(&h1.matmul(&model.w2).unwrap()).unwrap();
        let (logits, _) = forward(&model, &cache, &x).unwrap();
        assert!(logits.max_abs_diff(&expect).unwrap() < 1e-10);
    }

    #[test]
    fn zero_upstream_gradient_gives_zero_gradients() {
        let a = CsrMatrix::from_coo(3, 3, &[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random_dense(&mut rng, 3, 4);
        for kind in ModelKind::ALL {
            let mut cache = TrainingCache::build(kind, &a, true, true).unwrap();
            let model = GnnModel::new(kind, 4, 3, 2, 5);
            let (_, tape) = forward(&model, &cache, &x).unwrap();
            let g = backward(&model, &mut cache, &tape, &DenseMatrix::zeros(3, 2)).unwrap();
            for (name, values) in g.parameters() {
                assert!(values.iter().all(|&v| v == 0.0), "{kind} {name}");
            }
        }
    }

    #[test]
    fn stale_tape_is_rejected() {
        let small = CsrMatrix::<f64>::identity(2);
        let big = CsrMatrix::<f64>::identity(3);
        let model = GnnModel::new(ModelKind::Gcn, 2, 2, 2, 0);
        let cache = TrainingCache::build(ModelKind::Gcn, &small, true, true).unwrap();
        let x = DenseMatrix::zeros(2, 2);
        let (_, tape) = forward(&model, &cache, &x).unwrap();
        let mut other = TrainingCache::build(ModelKind::Gcn, &big, true, true).unwrap();
        let err = backward(&model, &mut other, &tape, &DenseMatrix::zeros(3, 2)).unwrap_err();
        assert!(matches!(err, Error::Tape(_)));
    }

    #[test]
    fn wrong_feature_width_is_a_dimension_error() {
        let a = CsrMatrix::<f64>::identity(2);
        let cache = TrainingCache::build(ModelKind::SageMean, &a, true, true).unwrap();
        let model = GnnModel::new(ModelKind::SageMean, 3, 2, 2, 0);
        let x = DenseMatrix::zeros(2, 2);
        assert!(matches!(forward(&model, &cache, &x), Err(Error::Dimension { .. })));
    }

    #[test]
    fn gcn_on_symmetric_graph_skips_the_transpose() {
        let a = CsrMatrix::from_coo(3, 3, &[(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0), (2, 1, 1.0)]).unwrap();
        let mut cache = TrainingCache::build(ModelKind::Gcn, &a, true, true).unwrap();
        let model = GnnModel::new(ModelKind::Gcn, 2, 2, 2, 0);
        let x = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap();
        let (logits, tape) = forward(&model, &cache, &x).unwrap();
        let (_, g) = softmax_xent(&logits, &[0, 1, 0], &[true; 3]).unwrap();
        backward(&model, &mut cache, &tape, &g).unwrap();
        assert_eq!(cache.counters().transpose_builds, 0);
    }
}
