use sparsegnn::autotune::{hardware, run_tuning, save_report, SWEEP_SET};
use sparsegnn::{Result, Scalar};

use super::ms;
use crate::args::TuneArgs;
use crate::input::{graph_id, load_graph};

pub fn run<T: Scalar>(args: &TuneArgs, threads: usize) -> Result<()> {
    let a = load_graph::<T>(&args.source, args.seed)?;
    let ks = args.ks.clone().unwrap_or_else(|| SWEEP_SET.to_vec());
    let id = graph_id(&args.source);
    println!("hardware: {}", hardware());
    println!(
        "graph: {id} ({} nodes, {} nonzeros, {}), threads: {threads}",
        a.n_rows(),
        a.nnz(),
        T::NAME
    );

    let mut report = run_tuning(&a, &ks, args.reps, threads)?;
    report.graph_id = id;

    println!(
        "{:>6} {:>14} {:>18} {:>9}",
        "K", "trusted ms", "specialized ms", "speedup"
    );
    for e in &report.entries {
        println!(
            "{:>6} {:>14} {:>18} {:>9.3}",
            e.k,
            ms(e.t_trusted),
            ms(e.t_specialized),
            e.speedup
        );
    }
    for k in &report.skipped {
        println!("K={k} skipped: no specialized kernel");
    }
    save_report(&report, &args.out)?;
    println!("best_k {}", report.best_k);
    println!("report written to {}", args.out.display());
    Ok(())
}
