use sparsegnn::gnn::{save_stats, train, GnnModel, TrainOptions, TrainStats};
use sparsegnn::{Error, Result, Scalar};

use super::ms;
use crate::args::TrainArgs;
use crate::input::load_dataset;

pub fn run<T: Scalar>(args: &TrainArgs, threads: usize) -> Result<()> {
    if args.hidden == 0 {
        return Err(Error::Config("--hidden must be at least 1".into()));
    }
    let ds = load_dataset::<T>(
        &args.source,
        args.features.as_deref(),
        args.labels.as_deref(),
        args.mask.as_deref(),
        args.seed,
    )?;
    let classes = ds.class_count();
    let train_nodes = ds.train_mask.iter().filter(|&&m| m).count();
    println!(
        "dataset: {} nodes, {} nonzeros, {} features, {classes} classes, {train_nodes} training nodes ({})",
        ds.node_count(),
        ds.adjacency.nnz(),
        ds.features.n_cols(),
        T::NAME
    );
    println!(
        "model: {} hidden={} epochs={} lr={} tuned={} cache={} threads: {threads}",
        args.model, args.hidden, args.epochs, args.lr, !args.no_tuned, !args.no_cache
    );

    let model = GnnModel::new(args.model, ds.features.n_cols(), args.hidden, classes, args.seed);
    let opts = TrainOptions {
        epochs: args.epochs,
        lr: args.lr,
        threads,
        use_tuned: !args.no_tuned,
        use_cache: !args.no_cache,
    };
    let out = train(model, &ds.adjacency, &ds.features, &ds.labels, &ds.train_mask, &opts)?;

    if !args.quiet {
        for s in &out.stats {
            println!(
                "epoch {:>4}  loss {:.6}  train_acc {:.4}  time {} ms",
                s.epoch,
                s.loss,
                s.train_accuracy,
                ms(s.epoch_time)
            );
        }
    }
    let last = out.stats.last().expect("at least one epoch");
    let counters = out.cache.counters();
    println!("final loss {:.6}  train accuracy {:.4}", last.loss, last.train_accuracy);
    println!("mean epoch time {} ms", ms(out.mean_epoch_time()));
    println!(
        "cache: transpose_builds={} normalize_builds={} cache_hits={}",
        counters.transpose_builds, counters.normalize_builds, counters.cache_hits
    );
    if let Some(path) = &args.stats {
        save_stats(&TrainStats::new(out.stats.clone(), counters), path)?;
        println!("stats written to {}", path.display());
    }
    Ok(())
}
