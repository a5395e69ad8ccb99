use std::env;
use std::path::Path;

use sparsegnn::data::{load_mtx, synth_planted, Dataset, PlantedPartition};
use sparsegnn::kernels::available_threads;
use sparsegnn::{CsrMatrix, Error, Result, Scalar};

use crate::args::GraphSource;

pub const THREADS_ENV: &str = "SPARSEGNN_THREADS";

/// Thread count: flag, then `SPARSEGNN_THREADS`, then all cores.
pub fn resolve_threads(flag: Option<usize>) -> Result<usize> {
    let threads = match (flag, env::var(THREADS_ENV)) {
        (Some(t), _) => t,
        (None, Ok(v)) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{THREADS_ENV}='{v}' is not a thread count")))?,
        _ => available_threads(),
    };
    if threads == 0 {
        return Err(Error::Config("thread count must be at least 1".into()));
    }
    Ok(threads)
}

/// Parses `key=value` pairs into a planted-partition configuration. Keys not
/// given keep their defaults; `seed` falls back to `default_seed`.
pub fn parse_synth(spec: &str, default_seed: u64) -> Result<PlantedPartition> {
    let mut cfg = PlantedPartition {
        seed: default_seed,
        ..PlantedPartition::default()
    };
    for pair in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("synthetic spec entry '{pair}' is not key=value")))?;
        let bad = || Error::Config(format!("bad value '{value}' for synthetic parameter '{key}'"));
        let count = || value.parse::<usize>().map_err(|_| bad());
        let real = || value.parse::<f64>().map_err(|_| bad());
        match key {
            "n" => cfg.n = count()?,
            "c" | "classes" => cfg.classes = count()?,
            "p_intra" => cfg.p_intra = real()?,
            "p_inter" => cfg.p_inter = real()?,
            "f" | "feat_dim" => cfg.feat_dim = count()?,
            "noise" => cfg.noise = real()?,
            "seed" => cfg.seed = value.parse().map_err(|_| bad())?,
            other => return Err(Error::Config(format!("unknown synthetic parameter '{other}'"))),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Identifier recorded in reports: the file path or the synthetic spec.
pub fn graph_id(source: &GraphSource) -> String {
    match (&source.graph, &source.synth) {
        (Some(path), _) => path.display().to_string(),
        (None, Some(spec)) => format!("synth:{spec}"),
        (None, None) => String::new(),
    }
}

pub fn load_graph<T: Scalar>(source: &GraphSource, seed: u64) -> Result<CsrMatrix<T>> {
    match (&source.graph, &source.synth) {
        (Some(path), _) => load_mtx(path),
        (None, Some(spec)) => Ok(synth_planted::<T>(&parse_synth(spec, seed)?)?.adjacency),
        (None, None) => Err(Error::Config("one of --graph or --synth is required".into())),
    }
}

pub fn load_dataset<T: Scalar>(
    source: &GraphSource,
    features: Option<&Path>,
    labels: Option<&Path>,
    mask: Option<&Path>,
    seed: u64,
) -> Result<Dataset<T>> {
    match (&source.graph, &source.synth) {
        (Some(graph), _) => {
            let features = features.ok_or_else(|| Error::Config("--graph needs --features".into()))?;
            let labels = labels.ok_or_else(|| Error::Config("--graph needs --labels".into()))?;
            Dataset::load(graph, features, labels, mask)
        }
        (None, Some(spec)) => synth_planted(&parse_synth(spec, seed)?),
        (None, None) => Err(Error::Config("one of --graph or --synth is required".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synth_spec_overrides_defaults() {
        let cfg = parse_synth("n=100, c=2,p_intra=0.5,f=4", 9).unwrap();
        assert_eq!((cfg.n, cfg.classes, cfg.feat_dim, cfg.seed), (100, 2, 4, 9));
        assert_eq!(cfg.p_intra, 0.5);
        assert_eq!(cfg.p_inter, PlantedPartition::default().p_inter);
        assert_eq!(parse_synth("seed=3", 9).unwrap().seed, 3);
    }

    #[test]
    fn bad_synth_specs() {
        assert!(parse_synth("n", 0).is_err());
        assert!(parse_synth("n=abc", 0).is_err());
        assert!(parse_synth("colour=red", 0).is_err());
        assert!(parse_synth("p_intra=0.01,p_inter=0.1", 0).is_err());
    }
}
