use sparsegnn::autotune::time_spmm;
use sparsegnn::kernels::{is_specialized, with_threads, KernelKind};
use sparsegnn::{first_bit_difference, DenseMatrix, Error, ReduceOp, Result, Scalar};

use super::ms;
use crate::args::BenchArgs;
use crate::input::{graph_id, load_graph};

pub fn run<T: Scalar>(args: &BenchArgs, threads: usize) -> Result<()> {
    if args.k == 0 {
        return Err(Error::Config("--k must be at least 1".into()));
    }
    let a = load_graph::<T>(&args.source, args.seed)?;
    let b = DenseMatrix::<T>::random_uniform(a.n_cols(), args.k, args.seed);
    println!(
        "graph: {} ({} nodes, {} nonzeros, {}), K={}, reduce={}, threads: {threads}",
        graph_id(&args.source),
        a.n_rows(),
        a.nnz(),
        T::NAME,
        args.k,
        args.reduce
    );

    let tuned = if args.no_tuned {
        None
    } else if args.reduce != ReduceOp::Sum {
        println!("note: specialized kernels implement sum only; timing the trusted kernel");
        None
    } else if !is_specialized(args.k) {
        println!(
            "note: no specialized kernel for K={}; timing the trusted kernel",
            args.k
        );
        None
    } else {
        Some(KernelKind::Specialized(args.k))
    };

    with_threads(threads, || {
        let (t_trusted, reference) = time_spmm(&a, &b, args.reduce, KernelKind::Trusted, args.reps)?;
        println!("trusted        median {} ms", ms(t_trusted));
        let Some(kind) = tuned else {
            return Ok(());
        };
        let (t_special, mut out) = time_spmm(&a, &b, args.reduce, kind, args.reps)?;
        if args.inject_mismatch {
            if let Some(v) = out.data_mut().first_mut() {
                *v += T::one();
            }
        }
        if let Some(index) = first_bit_difference(reference.data(), out.data()) {
            return Err(Error::KernelMismatch { k: args.k, index });
        }
        println!("specialized    median {} ms", ms(t_special));
        println!("outputs bitwise equal");
        println!("speedup {:.3}", t_trusted.as_secs_f64() / t_special.as_secs_f64());
        Ok(())
    })
}
