//! Graph and feature I/O plus synthetic datasets.

mod mtx;
mod synth;
mod text;

pub use mtx::{load_mtx, parse_mtx, render_mtx, save_mtx};
pub use synth::{synth_planted, PlantedPartition};
pub use text::{
    load_features, load_labels, load_mask, parse_features, parse_labels, parse_mask, render_features, render_labels,
    render_mask, save_features, save_labels, save_mask,
};

use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sparse::{CsrMatrix, DenseMatrix};

/// A node-classification problem on one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    pub adjacency: CsrMatrix<T>,
    pub features: DenseMatrix<T>,
    pub labels: Vec<usize>,
    pub train_mask: Vec<bool>,
    pub name: String,
}

impl<T: Scalar> Dataset<T> {
    pub fn node_count(&self) -> usize {
        self.adjacency.n_rows()
    }

    pub fn class_count(&self) -> usize {
        self.labels.iter().max().map_or(0, |&m| m + 1)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.adjacency.n_rows();
        if self.adjacency.n_cols() != n {
            return Err(Error::Shape(format!(
                "adjacency is {}x{}, expected square",
                n,
                self.adjacency.n_cols()
            )));
        }
        for (what, len) in [
            ("feature rows", self.features.n_rows()),
            ("labels", self.labels.len()),
            ("mask entries", self.train_mask.len()),
        ] {
            if len != n {
                return Err(Error::Shape(format!("{len} {what} for a graph with {n} nodes")));
            }
        }
        Ok(())
    }

    /// Loads graph, features and labels from files. Without a mask file every
    /// node is a training node.
    pub fn load(graph: &Path, features: &Path, labels: &Path, mask: Option<&Path>) -> Result<Self> {
        let adjacency = load_mtx(graph)?;
        let features = load_features(features)?;
        let labels = load_labels(labels)?;
        let train_mask = match mask {
            Some(m) => load_mask(m)?,
            None => vec![true; adjacency.n_rows()],
        };
        let ds = Dataset {
            adjacency,
            features,
            labels,
            train_mask,
            name: graph.display().to_string(),
        };
        ds.validate()?;
        Ok(ds)
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
