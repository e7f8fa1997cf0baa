//! Online perceptron and the shared linear-model parameter block.

use serde::{Deserialize, Serialize};

use crate::classifiers::{Hyperparams, Samples};
use crate::error::Result;
use crate::rng::{derive_seed, rng_from};

/// w . x + b decision rule, shared by the perceptron and the SVM.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LinearParams {
    pub w: Vec<f64>,
    pub b: f64,
}

pub(crate) fn decision_values(p: &LinearParams, x: &Samples) -> Vec<f64> {
    (0..x.n)
        .map(|i| crate::linalg::dot(&p.w, x.row(i)) + p.b)
        .collect()
}

/// Classic online perceptron, labels mapped to -1/+1. Runs up to
/// `percep_epochs` sweeps over a seeded shuffle of the data and keeps
/// the weights of the best epoch by training accuracy. The loss trace
/// records the per-epoch training error rate.
pub(crate) fn train(
    x: &Samples,
    y: &[u32],
    h: &Hyperparams,
    seed: u64,
) -> Result<(LinearParams, Vec<f64>)> {
    use rand::seq::SliceRandom;
    let d = x.d;
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut best = (f64::INFINITY, w.clone(), b);
    let mut trace = Vec::with_capacity(h.percep_epochs);
    let mut order: Vec<usize> = (0..x.n).collect();
    let mut rng = rng_from(derive_seed(seed, &["percep"]));

    for _ in 0..h.percep_epochs {
        order.shuffle(&mut rng);
        let mut mistakes = 0usize;
        for &i in &order {
            let target = if y[i] == 1 { 1.0 } else { -1.0 };
            let score = crate::linalg::dot(&w, x.row(i)) + b;
            if target * score <= 0.0 {
                mistakes += 1;
                for (wj, xj) in w.iter_mut().zip(x.row(i)) {
                    *wj += target * xj;
                }
                b += target;
            }
        }
        let err = mistakes as f64 / x.n as f64;
        trace.push(err);
        if err < best.0 {
            best = (err, w.clone(), b);
        }
        if mistakes == 0 {
            break;
        }
    }
    Ok((LinearParams { w: best.1, b: best.2 }, trace))
}
