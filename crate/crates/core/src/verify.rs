//! Self-check suites run by `sparsegnn verify`.
//!
//! Each suite draws seeded random cases, compares library output against a
//! brute-force oracle or against another code path, and reports pass/fail.
//! Sizes scale with [`VerifyConfig::max_n`]; case counts do not.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gnn::{self, GnnModel, ModelKind, TrainingCache};
use crate::kernels::{self, with_threads, KernelKind, SPECIALIZATION_SET};
use crate::scalar::{first_bit_difference, Scalar};
use crate::sparse::{CsrMatrix, DenseMatrix, ReduceOp, Semiring};

pub const SUITES: [&str; 5] = [
    "dense-oracle",
    "kernel-equivalence",
    "determinism",
    "gradient-check",
    "fusedmm",
];

/// Relative tolerance of 32-bit SpMM against the oracle.
pub const TOL_F32: f64 = 1e-4;
/// Relative tolerance of 64-bit SpMM against the oracle.
pub const TOL_F64: f64 = 1e-10;
/// Relative tolerance between analytic and finite-difference gradients.
pub const TOL_GRAD: f64 = 1e-6;
/// Central finite-difference step.
pub const FD_STEP: f64 = 1e-5;
/// Relative tolerance of fused against composed SDDMM + SpMM (32-bit).
pub const TOL_FUSED: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyConfig {
    /// Upper bound on random matrix dimensions.
    pub max_n: usize,
    pub seed: u64,
    /// Name of a suite to force into failure, for exercising the failure path.
    pub inject_failure: Option<String>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            max_n: 512,
            seed: 0,
            inject_failure: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<20} {:<4} {:>5} cases {:>10.3} ms  {}",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.cases,
            self.elapsed.as_secs_f64() * 1e3,
            self.detail
        )
    }
}

/// Random `n_rows x n_cols` matrix with each entry present with probability
/// `density` and values uniform in (-1, 1), never exactly zero.
pub fn random_csr(rng: &mut ChaCha8Rng, n_rows: usize, n_cols: usize, density: f64) -> CsrMatrix<f64> {
    let mut triples = Vec::new();
    for i in 0..n_rows {
        for j in 0..n_cols {
            if rng.random_bool(density) {
                triples.push((i, j, nonzero(rng)));
            }
        }
    }
    CsrMatrix::from_coo(n_rows, n_cols, &triples).expect("indices in range")
}

pub fn random_dense(rng: &mut ChaCha8Rng, n_rows: usize, n_cols: usize) -> DenseMatrix<f64> {
    let data = (0..n_rows * n_cols).map(|_| rng.random_range(-1.0..1.0)).collect();
    DenseMatrix::from_vec(n_rows, n_cols, data).expect("sized to fit")
}

fn nonzero(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let v: f64 = rng.random_range(-1.0..1.0);
        if v != 0.0 {
            return v;
        }
    }
}

/// Triple-loop product in f64 over the dense expansion of `a`, plus the
/// magnitude sum `Σ_j |a_ij b_jk|` used to scale the error.
fn dense_product<T: Scalar>(a: &CsrMatrix<T>, b: &DenseMatrix<T>) -> (Vec<f64>, Vec<f64>) {
    let a = a.to_dense();
    let (n, m, k) = (a.n_rows(), a.n_cols(), b.n_cols());
    let mut out = vec![0.0; n * k];
    let mut mag = vec![0.0; n * k];
    for i in 0..n {
        for j in 0..m {
            let aij = a.get(i, j).to_f64().unwrap_or(f64::NAN);
            if aij == 0.0 {
                continue;
            }
            for c in 0..k {
                let p = aij * b.get(j, c).to_f64().unwrap_or(f64::NAN);
                out[i * k + c] += p;
                mag[i * k + c] += p.abs();
            }
        }
    }
    (out, mag)
}

/// `f64::max` that propagates NaN instead of discarding it.
fn max_or_nan(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Largest `|got - want| / scale` over all entries; a zero scale demands an
/// exact match.
fn worst_relative<T: Scalar>(got: &[T], want: &[f64], scale: &[f64]) -> f64 {
    got.iter()
        .zip(want.iter().zip(scale))
        .map(|(&g, (&w, &s))| {
            let diff = (g.to_f64().unwrap_or(f64::NAN) - w).abs();
            if s > 0.0 {
                diff / s
            } else if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, max_or_nan)
}

/// Min or max over stored entries by direct enumeration, in `T` arithmetic.
fn brute_extremum<T: Scalar>(a: &CsrMatrix<T>, b: &DenseMatrix<T>, reduce: ReduceOp) -> Vec<T> {
    let k = b.n_cols();
    let mut out = vec![T::zero(); a.n_rows() * k];
    for (i, j, v) in a.to_coo() {
        let first = a.row(i).0[0] as usize == j;
        for c in 0..k {
            let p = v * b.get(j, c);
            let o = &mut out[i * k + c];
            *o = if first {
                p
            } else if reduce == ReduceOp::Min {
                o.min(p)
            } else {
                o.max(p)
            };
        }
    }
    out
}

struct Outcome {
    cases: usize,
    failure: Option<String>,
    detail: String,
}

fn oracle_case<T: Scalar>(a: &CsrMatrix<T>, b: &DenseMatrix<T>, tol: f64) -> Result<Option<String>> {
    let sum = kernels::spmm(a, b, ReduceOp::Sum)?;
    let (want, mag) = dense_product(a, b);
    let err = worst_relative(sum.data(), &want, &mag);
    if err.is_nan() || err > tol {
        return Ok(Some(format!("{} sum relative error {err:e} > {tol:e}", T::NAME)));
    }
    for reduce in [ReduceOp::Min, ReduceOp::Max] {
        let got = kernels::spmm(a, b, reduce)?;
        if let Some(idx) = first_bit_difference(got.data(), &brute_extremum(a, b, reduce)) {
            return Ok(Some(format!(
                "{} {reduce} differs from brute force at element {idx}",
                T::NAME
            )));
        }
    }
    let mean = kernels::spmm(a, b, ReduceOp::Mean)?;
    let degrees = a.row_degrees();
    let k = b.n_cols();
    let by_degree: Vec<T> = sum
        .data()
        .iter()
        .enumerate()
        .map(|(idx, &s)| match degrees[idx / k] {
            0 => T::zero(),
            d => s / T::from_count(d),
        })
        .collect();
    if let Some(idx) = first_bit_difference(mean.data(), &by_degree) {
        return Ok(Some(format!("{} mean is not sum/degree at element {idx}", T::NAME)));
    }
    Ok(None)
}

fn dense_oracle(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    const CASES: usize = 200;
    let mut worst_nnz = 0;
    for case in 0..CASES {
        let n = rng.random_range(1..=cfg.max_n);
        let m = rng.random_range(1..=cfg.max_n);
        let k = rng.random_range(1..=128);
        let density = rng.random_range(0.0..=0.1);
        let a = random_csr(rng, n, m, density);
        let b = random_dense(rng, m, k);
        worst_nnz = worst_nnz.max(a.nnz());
        let failure = match oracle_case(&a, &b, TOL_F64)? {
            Some(f) => Some(f),
            None => oracle_case(&a.cast::<f32>(), &b.cast::<f32>(), TOL_F32)?,
        };
        if let Some(f) = failure {
            return Ok(Outcome {
                cases: case + 1,
                failure: Some(format!("case {case} ({n}x{m}, K={k}): {f}")),
                detail: String::new(),
            });
        }
    }
    Ok(Outcome {
        cases: CASES,
        failure: None,
        detail: format!("largest nnz {worst_nnz}"),
    })
}

fn kernel_equivalence(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    const GRAPHS: usize = 10;
    let mut cases = 0;
    for k in SPECIALIZATION_SET {
        for g in 0..GRAPHS {
            cases += 1;
            let n = rng.random_range(1..=cfg.max_n);
            let density = rng.random_range(0.0..=0.1);
            let a = random_csr(rng, n, n, density).cast::<f32>();
            let b = random_dense(rng, n, k).cast::<f32>();
            let trusted = kernels::spmm_with(&a, &b, ReduceOp::Sum, KernelKind::Trusted)?;
            for lanes in [4, 8, 16] {
                let fast = kernels::spmm_specialized_lanes(&a, &b, lanes)?;
                if let Some(idx) = first_bit_difference(trusted.data(), fast.data()) {
                    return Ok(Outcome {
                        cases,
                        failure: Some(format!(
                            "K={k} lanes={lanes} graph {g}: first difference at element {idx}"
                        )),
                        detail: String::new(),
                    });
                }
            }
        }
    }
    Ok(Outcome {
        cases,
        failure: None,
        detail: format!("K in {SPECIALIZATION_SET:?}"),
    })
}

fn determinism(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    const CASES: usize = 20;
    const THREADS: [usize; 4] = [1, 2, 4, 8];
    for case in 0..CASES {
        let n = rng.random_range(1..=cfg.max_n);
        let k = *[1, 7, 16, 32, 64, 100].get(case % 6).unwrap_or(&16);
        let density = rng.random_range(0.0..=0.1);
        let a = random_csr(rng, n, n, density).cast::<f32>();
        let b = random_dense(rng, n, k).cast::<f32>();
        for reduce in ReduceOp::ALL {
            let runs = THREADS
                .iter()
                .map(|&t| with_threads(t, || kernels::spmm(&a, &b, reduce)))
                .collect::<Result<Vec<_>>>()?;
            for (t, run) in THREADS.iter().zip(&runs).skip(1) {
                if let Some(idx) = first_bit_difference(runs[0].data(), run.data()) {
                    return Ok(Outcome {
                        cases: case + 1,
                        failure: Some(format!(
                            "case {case} {reduce}: 1 vs {t} threads differ at element {idx}"
                        )),
                        detail: String::new(),
                    });
                }
            }
        }
    }
    Ok(Outcome {
        cases: CASES,
        failure: None,
        detail: format!("threads {THREADS:?}"),
    })
}

/// Loss of `model` on a fixed problem, and whether every hidden
/// pre-activation kept the sign pattern `signs`.
fn loss_and_signs(
    model: &GnnModel<f64>,
    cache: &TrainingCache<f64>,
    x: &DenseMatrix<f64>,
    labels: &[usize],
    mask: &[bool],
) -> Result<(f64, Vec<bool>)> {
    let (logits, tape) = gnn::forward(model, cache, x)?;
    let (loss, _) = gnn::softmax_xent(&logits, labels, mask)?;
    Ok((loss, tape.pre_activation().data().iter().map(|&p| p > 0.0).collect()))
}

/// `|analytic - numeric| / max(|analytic|, |numeric|, 1e-4)`.
pub fn gradient_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-4)
}

/// Checks every parameter of every model kind against central differences
/// on one random graph. Entries whose perturbation flips a ReLU are skipped,
/// since the loss is not differentiable across the kink. Returns
/// `(checked, skipped, failure)`.
pub fn gradient_check_case(rng: &mut ChaCha8Rng, n: usize) -> Result<(usize, usize, Option<String>)> {
    let (features, hidden, classes) = (3, 4, 3);
    let a = random_csr(rng, n, n, 0.3).map_values(f64::abs);
    let x = random_dense(rng, n, features);
    let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..classes)).collect();
    let mut mask: Vec<bool> = (0..n).map(|_| rng.random_bool(0.7)).collect();
    mask[0] = true;
    let (mut checked, mut skipped) = (0, 0);
    for kind in ModelKind::ALL {
        let mut model = GnnModel::new(kind, features, hidden, classes, rng.random());
        if kind == ModelKind::Gin {
            model.eps = rng.random_range(-0.5..0.5);
        }
        let mut cache = TrainingCache::build(kind, &a, true, false)?;
        let (logits, tape) = gnn::forward(&model, &cache, &x)?;
        let (_, g) = gnn::softmax_xent(&logits, &labels, &mask)?;
        let grads = gnn::backward(&model, &mut cache, &tape, &g)?;
        let base_signs: Vec<bool> = tape.pre_activation().data().iter().map(|&p| p > 0.0).collect();
        let analytic: Vec<(&'static str, Vec<f64>)> = grads
            .parameters()
            .into_iter()
            .map(|(name, v)| (name, v.to_vec()))
            .collect();
        for (p, (name, values)) in analytic.iter().enumerate() {
            for (idx, &an) in values.iter().enumerate() {
                let eval = |delta: f64| -> Result<(f64, Vec<bool>)> {
                    let mut m = model.clone();
                    m.parameters_mut()[p].1[idx] += delta;
                    loss_and_signs(&m, &cache, &x, &labels, &mask)
                };
                let (fp, sp) = eval(FD_STEP)?;
                let (fm, sm) = eval(-FD_STEP)?;
                if sp != base_signs || sm != base_signs {
                    skipped += 1;
                    continue;
                }
                checked += 1;
                let numeric = (fp - fm) / (2.0 * FD_STEP);
                let err = gradient_error(an, numeric);
                if err.is_nan() || err > TOL_GRAD {
                    return Ok((
                        checked,
                        skipped,
                        Some(format!(
                            "{kind} {name}[{idx}]: analytic {an:e} vs numeric {numeric:e} (rel {err:e})"
                        )),
                    ));
                }
            }
        }
    }
    Ok((checked, skipped, None))
}

fn gradient_check(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    const GRAPHS: usize = 4;
    let (mut checked, mut skipped) = (0, 0);
    for g in 0..GRAPHS {
        let n = rng.random_range(8..=16).min(cfg.max_n.max(1));
        let (c, s, failure) = gradient_check_case(rng, n)?;
        checked += c;
        skipped += s;
        if let Some(f) = failure {
            return Ok(Outcome {
                cases: g + 1,
                failure: Some(format!("graph {g} (n={n}): {f}")),
                detail: String::new(),
            });
        }
    }
    Ok(Outcome {
        cases: GRAPHS,
        failure: None,
        detail: format!("{checked} entries checked, {skipped} skipped at ReLU kinks"),
    })
}

fn fusedmm_suite(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    const CASES: usize = 50;
    for case in 0..CASES {
        let n = rng.random_range(1..=cfg.max_n.min(256));
        let m = rng.random_range(1..=cfg.max_n.min(256));
        let k = rng.random_range(1..=64);
        let density = rng.random_range(0.0..=0.1);
        let p = random_csr(rng, n, m, density).cast::<f32>();
        let x = random_dense(rng, n, k).cast::<f32>();
        let y = random_dense(rng, m, k).cast::<f32>();
        let s = kernels::sddmm(&p, &x, &y)?;
        for reduce in ReduceOp::ALL {
            let fused = kernels::fusedmm(&p, &x, &y, &Semiring::new(reduce))?;
            let composed = kernels::spmm_with(&s, &y, reduce, KernelKind::Trusted)?;
            let worst = fused
                .data()
                .iter()
                .zip(composed.data())
                .map(|(&f, &c)| (f64::from(f) - f64::from(c)).abs() / f64::from(c.abs()).max(1e-6))
                .fold(0.0, max_or_nan);
            if worst.is_nan() || worst > TOL_FUSED {
                return Ok(Outcome {
                    cases: case + 1,
                    failure: Some(format!(
                        "case {case} {reduce}: relative error {worst:e} > {TOL_FUSED:e}"
                    )),
                    detail: String::new(),
                });
            }
        }
    }
    Ok(Outcome {
        cases: CASES,
        failure: None,
        detail: "all four reductions".into(),
    })
}

type SuiteFn = fn(&VerifyConfig, &mut ChaCha8Rng) -> Result<Outcome>;

/// Runs one suite by name.
pub fn run_suite(name: &str, cfg: &VerifyConfig) -> Result<SuiteReport> {
    let (name, run): (&'static str, SuiteFn) = match name {
        "dense-oracle" => ("dense-oracle", dense_oracle),
        "kernel-equivalence" => ("kernel-equivalence", kernel_equivalence),
        "determinism" => ("determinism", determinism),
        "gradient-check" => ("gradient-check", gradient_check),
        "fusedmm" => ("fusedmm", fusedmm_suite),
        other => return Err(Error::Config(format!("unknown verification suite '{other}'"))),
    };
    if cfg.max_n == 0 {
        return Err(Error::Config("max_n must be at least 1".into()));
    }
    // Each suite gets its own stream so suites are reproducible in isolation.
    let salt = SUITES.iter().position(|s| *s == name).unwrap_or(0) as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (salt << 32));
    let start = Instant::now();
    let mut outcome = run(cfg, &mut rng)?;
    if cfg.inject_failure.as_deref() == Some(name) {
        outcome.failure = Some("injected failure".into());
    }
    let passed = outcome.failure.is_none();
    Ok(SuiteReport {
        name,
        passed,
        cases: outcome.cases,
        detail: outcome.failure.unwrap_or(outcome.detail),
        elapsed: start.elapsed(),
    })
}

/// Runs every suite in [`SUITES`] order.
pub fn run_all(cfg: &VerifyConfig) -> Result<Vec<SuiteReport>> {
    if let Some(name) = &cfg.inject_failure {
        if !SUITES.contains(&name.as_str()) {
            return Err(Error::Config(format!("unknown verification suite '{name}'")));
        }
    }
    SUITES.iter().map(|s| run_suite(s, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyConfig {
        VerifyConfig {
            max_n: 24,
            ..VerifyConfig::default()
        }
    }

    #[test]
    fn small_run_passes() {
        for r in run_all(&small()).unwrap() {
            assert!(r.passed, "{r}");
        }
    }

    #[test]
    fn injected_failure_names_the_suite() {
        let cfg = VerifyConfig {
            inject_failure: Some("determinism".into()),
            ..small()
        };
        let failed: Vec<_> = run_all(&cfg)
            .unwrap()
            .into_iter()
            .filter(|r| !r.passed)
            .map(|r| r.name)
            .collect();
        assert_eq!(failed, ["determinism"]);
    }

    #[test]
    fn unknown_suite_is_a_config_error() {
        assert!(run_suite("nope", &small()).is_err());
        let cfg = VerifyConfig {
            inject_failure: Some("nope".into()),
            ..small()
        };
        assert!(run_all(&cfg).is_err());
    }

    #[test]
    fn relative_error_scaling() {
        assert_eq!(worst_relative(&[1.0f64, 0.0], &[1.0, 0.0], &[2.0, 0.0]), 0.0);
        assert_eq!(worst_relative(&[1.5f64], &[1.0], &[2.0]), 0.25);
        assert_eq!(worst_relative(&[1e-30f64], &[0.0], &[0.0]), f64::INFINITY);
        assert!(worst_relative(&[f64::NAN, 1.0], &[1.0, 1.0], &[1.0, 1.0]).is_nan());
        assert!(worst_relative(&[1.0, f64::NAN], &[1.0, 1.0], &[1.0, 1.0]).is_nan());
    }
}
