//! Seeded planted-partition graphs.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`), whose output stream is
//! fixed by its algorithm and seed on every platform. Edges are drawn block by
//! block with geometric skips between successes, so generation costs
//! O(nodes + edges) rather than O(nodes²).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sparse::{CsrMatrix, DenseMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedPartition {
    pub n: usize,
    pub classes: usize,
    /// Edge probability for a pair in the same class.
    pub p_intra: f64,
    /// Edge probability for a pair in different classes.
    pub p_inter: f64,
    pub feat_dim: usize,
    /// Standard deviation of the Gaussian noise added to one-hot features.
    pub noise: f64,
    pub seed: u64,
}

impl Default for PlantedPartition {
    fn default() -> Self {
        PlantedPartition {
            n: 400,
            classes: 4,
            p_intra: 0.1,
            p_inter: 0.01,
            feat_dim: 16,
            noise: 0.1,
            seed: 0,
        }
    }
}

impl PlantedPartition {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.classes == 0 || self.n < self.classes {
            return bad(format!(
                "need 1 <= classes <= n, got classes={} n={}",
                self.classes, self.n
            ));
        }
        if self.n > u32::MAX as usize {
            return bad(format!("n={} exceeds the 32-bit index range", self.n));
        }
        for (name, p) in [("p_intra", self.p_intra), ("p_inter", self.p_inter)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name}={p} is not a probability"));
            }
        }
        if self.p_inter >= self.p_intra {
            return bad(format!(
                "p_inter={} must be below p_intra={}",
                self.p_inter, self.p_intra
            ));
        }
        if self.feat_dim < self.classes {
            return bad(format!(
                "feat_dim={} must be at least classes={}",
                self.feat_dim, self.classes
            ));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return bad(format!("noise={} must be finite and non-negative", self.noise));
        }
        Ok(())
    }

    /// First node of each class, plus `n` at the end. Classes are contiguous
    /// and differ in size by at most one.
    pub fn class_starts(&self) -> Vec<usize> {
        (0..=self.classes).map(|c| c * self.n / self.classes).collect()
    }

    /// Mean and variance of the undirected edge count.
    pub fn edge_count_moments(&self) -> (f64, f64) {
        let starts = self.class_starts();
        let sizes: Vec<f64> = starts.windows(2).map(|w| (w[1] - w[0]) as f64).collect();
        let intra: f64 = sizes.iter().map(|s| s * (s - 1.0) / 2.0).sum();
        let total = self.n as f64 * (self.n as f64 - 1.0) / 2.0;
        let inter = total - intra;
        let mean = intra * self.p_intra + inter * self.p_inter;
        let var = intra * self.p_intra * (1.0 - self.p_intra) + inter * self.p_inter * (1.0 - self.p_inter);
        (mean, var)
    }
}

/// Number of failures before the next success of a Bernoulli(p) trial,
/// `0 < p < 1`, given `log_q = ln(1 - p)`.
fn geometric_skip(rng: &mut ChaCha8Rng, log_q: f64) -> u64 {
    let u: f64 = rng.random();
    ((1.0 - u).ln() / log_q).floor() as u64
}

/// Visits the indices `0..total` that succeed with probability `p`.
fn bernoulli_indices(rng: &mut ChaCha8Rng, total: u64, p: f64, mut visit: impl FnMut(u64)) {
    if p <= 0.0 || total == 0 {
        return;
    }
    if p >= 1.0 {
        (0..total).for_each(visit);
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut idx = geometric_skip(rng, log_q);
    while idx < total {
        visit(idx);
        idx = idx.saturating_add(1 + geometric_skip(rng, log_q));
    }
}

/// Undirected edges `(u, v)` with `u > v`, in generation order.
fn planted_edges(cfg: &PlantedPartition, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let starts = cfg.class_starts();
    let mut edges = Vec::new();
    for a in 0..cfg.classes {
        let (sa, na) = (starts[a], starts[a + 1] - starts[a]);
        // Within a class: pair index t enumerates (v, w), w < v, row by row.
        let pairs = (na as u64) * (na as u64).saturating_sub(1) / 2;
        bernoulli_indices(rng, pairs, cfg.p_intra, |t| {
            let v = ((1.0 + (1.0 + 8.0 * t as f64).sqrt()) / 2.0).floor() as u64;
            let v = if v * (v - 1) / 2 > t {
                v - 1
            } else if (v + 1) * v / 2 <= t {
                v + 1
            } else {
                v
            };
            let w = t - v * (v - 1) / 2;
            edges.push((sa + v as usize, sa + w as usize));
        });
        for b in a + 1..cfg.classes {
            let (sb, nb) = (starts[b], starts[b + 1] - starts[b]);
            bernoulli_indices(rng, (na * nb) as u64, cfg.p_inter, |t| {
                let (i, j) = ((t / nb as u64) as usize, (t % nb as u64) as usize);
                edges.push((sb + j, sa + i));
            });
        }
    }
    edges
}

/// Generates a planted-partition node-classification dataset.
///
/// Nodes are split into contiguous, evenly sized classes. Each unordered pair
/// is joined with `p_intra` (same class) or `p_inter` (different classes);
/// the adjacency is symmetric with unit weights and no self-loops. Features
/// are the one-hot class vector padded to `feat_dim` plus `noise · N(0, 1)`
/// per entry. Every node is in the training mask.
pub fn synth_planted<T: Scalar>(cfg: &PlantedPartition) -> Result<Dataset<T>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let edges = planted_edges(cfg, &mut rng);
    let mut triples = Vec::with_capacity(2 * edges.len());
    for &(u, v) in &edges {
        triples.push((u, v, T::one()));
        triples.push((v, u, T::one()));
    }
    let adjacency = CsrMatrix::from_coo(cfg.n, cfg.n, &triples)?;

    let starts = cfg.class_starts();
    let labels: Vec<usize> = (0..cfg.classes)
        .flat_map(|c| std::iter::repeat_n(c, starts[c + 1] - starts[c]))
        .collect();
    let mut data = Vec::with_capacity(cfg.n * cfg.feat_dim);
    for &label in &labels {
        for d in 0..cfg.feat_dim {
            let z: f64 = rng.sample(StandardNormal);
            let base = if d == label { 1.0 } else { 0.0 };
            data.push(T::from_f64_lossy(base + cfg.noise * z));
        }
    }
    let features = DenseMatrix::from_vec(cfg.n, cfg.feat_dim, data)?;

    Ok(Dataset {
        adjacency,
        features,
        labels,
        train_mask: vec![true; cfg.n],
        name: format!("planted-n{}-c{}-seed{}", cfg.n, cfg.classes, cfg.seed),
    })
}
