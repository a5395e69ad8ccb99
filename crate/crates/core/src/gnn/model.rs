use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sparse::{DenseMatrix, ReduceOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Gcn,
    SageSum,
    SageMean,
    Gin,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Gcn, ModelKind::SageSum, ModelKind::SageMean, ModelKind::Gin];

    /// Reduction used when aggregating neighbours.
    pub fn reduce(self) -> ReduceOp {
        match self {
            ModelKind::SageMean => ReduceOp::Mean,
            _ => ReduceOp::Sum,
        }
    }

    pub fn has_self_weights(self) -> bool {
        matches!(self, ModelKind::SageSum | ModelKind::SageMean)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Gcn => "gcn",
            ModelKind::SageSum => "sage-sum",
            ModelKind::SageMean => "sage-mean",
            ModelKind::Gin => "gin",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gcn" => Ok(ModelKind::Gcn),
            "sage-sum" | "sage_sum" | "sage" => Ok(ModelKind::SageSum),
            "sage-mean" | "sage_mean" => Ok(ModelKind::SageMean),
            "gin" => Ok(ModelKind::Gin),
            other => Err(Error::Config(format!(
                "unknown model '{other}' (expected gcn, sage-sum, sage-mean or gin)"
            ))),
        }
    }
}

/// Weights of a two-layer model.
///
/// `w1` is `in_features x hidden` and `w2` is `hidden x classes`. GraphSAGE
/// models add self weights of the same shapes (`w1`/`w2` then act on the
/// aggregated neighbours). GIN shares one `eps` across both layers.
#[derive(Debug, Clone, PartialEq)]
pub struct GnnModel<T> {
    pub kind: ModelKind,
    pub in_features: usize,
    pub hidden: usize,
    pub classes: usize,
    pub w1: DenseMatrix<T>,
    pub w2: DenseMatrix<T>,
    pub self1: Option<DenseMatrix<T>>,
    pub self2: Option<DenseMatrix<T>>,
    pub eps: T,
}

fn glorot<T: Scalar>(rng: &mut ChaCha8Rng, fan_in: usize, fan_out: usize) -> DenseMatrix<T> {
    let limit = (6.0 / (fan_in + fan_out).max(1) as f64).sqrt();
    let data = (0..fan_in * fan_out)
        .map(|_| T::from_f64_lossy(rng.random_range(-limit..=limit)))
        .collect();
    DenseMatrix::from_vec(fan_in, fan_out, data).expect("sized to fit")
}

impl<T: Scalar> GnnModel<T> {
    /// Uniform Glorot initialization from a fixed seed; `eps` starts at 0.
    pub fn new(kind: ModelKind, in_features: usize, hidden: usize, classes: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w1 = glorot(&mut rng, in_features, hidden);
        let w2 = glorot(&mut rng, hidden, classes);
        let (self1, self2) = if kind.has_self_weights() {
            (
                Some(glorot(&mut rng, in_features, hidden)),
                Some(glorot(&mut rng, hidden, classes)),
            )
        } else {
            (None, None)
        };
        GnnModel {
            kind,
            in_features,
            hidden,
            classes,
            w1,
            w2,
            self1,
            self2,
            eps: T::zero(),
        }
    }

    /// Named views of every trainable parameter, in a fixed order.
    pub fn parameters(&self) -> Vec<(&'static str, &[T])> {
        let mut out = vec![("w1", self.w1.data()), ("w2", self.w2.data())];
        if let (Some(s1), Some(s2)) = (&self.self1, &self.self2) {
            out.push(("self1", s1.data()));
            out.push(("self2", s2.data()));
        }
        if self.kind == ModelKind::Gin {
            out.push(("eps", std::slice::from_ref(&self.eps)));
        }
        out
    }

    pub fn parameters_mut(&mut self) -> Vec<(&'static str, &mut [T])> {
        let mut out = vec![("w1", self.w1.data_mut()), ("w2", self.w2.data_mut())];
        if let (Some(s1), Some(s2)) = (&mut self.self1, &mut self.self2) {
            out.push(("self1", s1.data_mut()));
            out.push(("self2", s2.data_mut()));
        }
        if self.kind == ModelKind::Gin {
            out.push(("eps", std::slice::from_mut(&mut self.eps)));
        }
        out
    }

    /// Plain gradient descent: `w <- w - lr * g` for every parameter.
    pub fn sgd_step(&mut self, grads: &Gradients<T>, lr: T) -> Result<()> {
        let grads = grads.parameters();
        let params = self.parameters_mut();
        if params.len() != grads.len() {
            return Err(Error::Shape(format!(
                "{} gradient tensors for {} parameters",
                grads.len(),
                params.len()
            )));
        }
        for ((name, w), (_, g)) in params.into_iter().zip(grads) {
            if w.len() != g.len() {
                return Err(Error::Shape(format!(
                    "gradient for {name} has {} entries, parameter has {}",
                    g.len(),
                    w.len()
                )));
            }
            for (wi, &gi) in w.iter_mut().zip(g) {
                *wi -= lr * gi;
            }
        }
        Ok(())
    }
}

/// Gradients laid out like [`GnnModel`]'s parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients<T> {
    pub kind: ModelKind,
    pub w1: DenseMatrix<T>,
    pub w2: DenseMatrix<T>,
    pub self1: Option<DenseMatrix<T>>,
    pub self2: Option<DenseMatrix<T>>,
    pub eps: T,
}

impl<T: Scalar> Gradients<T> {
    pub fn parameters(&self) -> Vec<(&'static str, &[T])> {
        let mut out = vec![("w1", self.w1.data()), ("w2", self.w2.data())];
        if let (Some(s1), Some(s2)) = (&self.self1, &self.self2) {
            out.push(("self1", s1.data()));
            out.push(("self2", s2.data()));
        }
        if self.kind == ModelKind::Gin {
            out.push(("eps", std::slice::from_ref(&self.eps)));
        }
        out
    }
}
