mod common;

use common::*;
use rand::Rng;
use sparsegnn::gnn::{backward, forward, softmax_xent, GnnModel, ModelKind, TrainingCache};
use sparsegnn::{CsrMatrix, DenseMatrix};

const STEP: f64 = 1e-5;
const TOL: f64 = 1e-6;

struct Problem {
    a: CsrMatrix<f64>,
    x: DenseMatrix<f64>,
    labels: Vec<usize>,
    mask: Vec<bool>,
}

fn problem(seed: u64, n: usize, symmetric: bool) -> Problem {
    let mut r = rng(seed);
    let mut triples: Vec<(usize, usize, f64)> = random_triples(&mut r, n, n, 0.25)
        .into_iter()
        .filter(|t| t.0 != t.1)
        .map(|(i, j, v)| (i, j, v.abs()))
        .collect();
    if symmetric {
        let mirrored: Vec<_> = triples.iter().map(|&(i, j, v)| (j, i, v)).collect();
        triples.extend(mirrored);
    }
    let a = CsrMatrix::from_coo(n, n, &triples).unwrap();
    let x = random_dense(&mut r, n, 5);
    let labels = (0..n).map(|_| r.random_range(0..3)).collect();
    let mut mask: Vec<bool> = (0..n).map(|_| r.random_bool(0.6)).collect();
    mask[n - 1] = true;
    Problem { a, x, labels, mask }
}

fn loss(model: &GnnModel<f64>, cache: &TrainingCache<f64>, p: &Problem) -> (f64, Vec<bool>) {
    let (logits, tape) = forward(model, cache, &p.x).unwrap();
    let signs = tape.pre_activation().data().iter().map(|&v| v > 0.0).collect();
    (softmax_xent(&logits, &p.labels, &p.mask).unwrap().0, signs)
}

/// Returns the number of entries compared.
fn check(kind: ModelKind, p: &Problem, seed: u64) -> usize {
    let mut model = GnnModel::new(kind, 5, 6, 3, seed);
    if kind == ModelKind::Gin {
        model.eps = 0.3;
    }
    let mut cache = TrainingCache::build(kind, &p.a, true, true).unwrap();
    let (logits, tape) = forward(&model, &cache, &p.x).unwrap();
    let (_, g) = softmax_xent(&logits, &p.labels, &p.mask).unwrap();
    let grads = backward(&model, &mut cache, &tape, &g).unwrap();
    let (_, base_signs) = loss(&model, &cache, p);

    let analytic: Vec<Vec<f64>> = grads.parameters().iter().map(|(_, v)| v.to_vec()).collect();
    assert_eq!(analytic.len(), model.parameters().len());
    let mut compared = 0;
    for (pi, values) in analytic.iter().enumerate() {
        assert_eq!(values.len(), model.parameters()[pi].1.len());
        for (idx, &an) in values.iter().enumerate() {
            let shifted = |d: f64| {
                let mut m = model.clone();
                m.parameters_mut()[pi].1[idx] += d;
                loss(&m, &cache, p)
            };
            let ((fp, sp), (fm, sm)) = (shifted(STEP), shifted(-STEP));
            if sp != base_signs || sm != base_signs {
                continue;
            }
            let numeric = (fp - fm) / (2.0 * STEP);
            let rel = (an - numeric).abs() / an.abs().max(numeric.abs()).max(1e-4);
            let name = model.parameters()[pi].0;
            assert!(rel <= TOL, "{kind} {name}[{idx}]: {an} vs {numeric} (rel {rel:e})");
            compared += 1;
        }
    }
    compared
}

#[test]
fn analytic_gradients_match_central_differences() {
    for (seed, n) in [(1, 8), (2, 11), (3, 16)] {
        for symmetric in [false, true] {
            let p = problem(seed, n, symmetric);
            for kind in ModelKind::ALL {
                let total: usize = GnnModel::<f64>::new(kind, 5, 6, 3, 0)
                    .parameters()
                    .iter()
                    .map(|p| p.1.len())
                    .sum();
                let compared = check(kind, &p, seed + 10);
                assert!(
                    compared * 10 >= total * 9,
                    "{kind}: only {compared} of {total} entries comparable"
                );
            }
        }
    }
}

#[test]
fn sage_mean_with_isolated_nodes() {
    let a = CsrMatrix::from_coo(8, 8, &[(0, 1, 1.0), (1, 0, 1.0), (2, 0, 1.0), (2, 1, 1.0)]).unwrap();
    let mut r = rng(8);
    let p = Problem {
        a,
        x: random_dense(&mut r, 8, 5),
        labels: (0..8).map(|i| i % 3).collect(),
        mask: vec![true; 8],
    };
    assert!(check(ModelKind::SageMean, &p, 4) > 0);
}

#[test]
fn cached_and_rebuilt_transposes_give_identical_gradients() {
    let p = problem(6, 12, false);
    for kind in ModelKind::ALL {
        let model = GnnModel::new(kind, 5, 6, 3, 1);
        let mut grads = Vec::new();
        for use_cache in [true, false] {
            let mut cache = TrainingCache::build(kind, &p.a, use_cache, true).unwrap();
            let (logits, tape) = forward(&model, &cache, &p.x).unwrap();
            let (_, g) = softmax_xent(&logits, &p.labels, &p.mask).unwrap();
            grads.push(backward(&model, &mut cache, &tape, &g).unwrap());
        }
        assert_eq!(grads[0], grads[1], "{kind}");
    }
}
