use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::Error;
use crate::scalar::Scalar;

/// How the scaled neighbour rows of one output row are folded together.
///
/// Every reduction yields an all-zero row for a row with no stored entries.
/// `Min` and `Max` seed from the first scaled row rather than from an
/// infinity, so outputs stay finite. `Mean` is `Sum` divided by the row's
/// nonzero count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReduceOp {
    Sum,
    Min,
    Max,
    Mean,
}

impl ReduceOp {
    pub const ALL: [ReduceOp; 4] = [ReduceOp::Sum, ReduceOp::Min, ReduceOp::Max, ReduceOp::Mean];

    pub fn as_str(self) -> &'static str {
        match self {
            ReduceOp::Sum => "sum",
            ReduceOp::Min => "min",
            ReduceOp::Max => "max",
            ReduceOp::Mean => "mean",
        }
    }
}

impl fmt::Display for ReduceOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReduceOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "sum" => Ok(ReduceOp::Sum),
            "min" => Ok(ReduceOp::Min),
            "max" => Ok(ReduceOp::Max),
            "mean" => Ok(ReduceOp::Mean),
            other => Err(Error::Config(format!(
                "unknown reduction '{other}' (expected sum, min, max or mean)"
            ))),
        }
    }
}

type CombineFn<T> = dyn Fn(T, T) -> T + Send + Sync;

/// A `(combine, reduce)` pair.
///
/// `combine(edge_value, x)` replaces the multiplication of a stored sparse
/// value with a dense operand. In [`crate::kernels::spmm_semiring`] `x` is a
/// single dense element; in [`crate::kernels::fusedmm`] it is the sampled dot
/// product of the two dense rows, and the combined scalar then scales the
/// neighbour row.
#[derive(Clone)]
pub struct Semiring<T> {
    combine: Option<Arc<CombineFn<T>>>,
    reduce: ReduceOp,
}

impl<T: Scalar> Semiring<T> {
    /// Multiplication with the given reduction.
    pub fn new(reduce: ReduceOp) -> Self {
        Semiring { combine: None, reduce }
    }

    pub fn with_combine(reduce: ReduceOp, combine: impl Fn(T, T) -> T + Send + Sync + 'static) -> Self {
        Semiring {
            combine: Some(Arc::new(combine)),
            reduce,
        }
    }

    pub fn reduce(&self) -> ReduceOp {
        self.reduce
    }

    pub fn is_default_combine(&self) -> bool {
        self.combine.is_none()
    }

    #[inline]
    pub fn combine(&self, edge_value: T, x: T) -> T {
        match &self.combine {
            None => edge_value * x,
            Some(f) => f(edge_value, x),
        }
    }
}

impl<T: Scalar> Default for Semiring<T> {
    fn default() -> Self {
        Semiring::new(ReduceOp::Sum)
    }
}

impl<T> fmt::Debug for Semiring<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Semiring")
            .field("combine", &if self.combine.is_some() { "custom" } else { "mul" })
            .field("reduce", &self.reduce)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for op in ReduceOp::ALL {
            assert_eq!(op.as_str().parse::<ReduceOp>().unwrap(), op);
        }
        assert!("avg".parse::<ReduceOp>().is_err());
    }

    #[test]
    fn default_combine_multiplies() {
        let s = Semiring::<f32>::default();
        assert_eq!(s.combine(3.0, 4.0), 12.0);
        assert_eq!(s.reduce(), ReduceOp::Sum);
        let add = Semiring::<f32>::with_combine(ReduceOp::Max, |a, b| a + b);
        assert_eq!(add.combine(3.0, 4.0), 7.0);
        assert!(!add.is_default_combine());
    }
}
