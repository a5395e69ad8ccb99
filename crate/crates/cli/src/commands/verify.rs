use sparsegnn::kernels::with_threads;
use sparsegnn::verify::{run_all, VerifyConfig};
use sparsegnn::Result;

use crate::args::VerifyArgs;

/// Returns whether every suite passed.
pub fn run(args: &VerifyArgs, threads: usize) -> Result<bool> {
    let cfg = VerifyConfig {
        max_n: args.max_n,
        seed: args.seed,
        inject_failure: args.inject_failure.clone(),
    };
    println!("verify: max_n={} seed={} threads: {threads}", cfg.max_n, cfg.seed);
    let reports = with_threads(threads, || run_all(&cfg))?;
    for r in &reports {
        println!("{r}");
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    if failed.is_empty() {
        println!("all {} suites passed", reports.len());
    } else {
        println!("failed suites: {}", failed.join(", "));
    }
    Ok(failed.is_empty())
}
