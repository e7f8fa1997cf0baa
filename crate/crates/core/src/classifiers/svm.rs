//! Soft-margin linear SVM trained by SMO on the exact dual.
//!
//! The bias is handled through the equality constraint sum(alpha*y) = 0
//! (maximal-violating-pair working set), not by weight-regularizing an
//! appended constant feature; this keeps the textbook max-margin
//! solution on toy instances and makes the rescaling law exact: scaling
//! all features by `a` while dividing C by a^2 leaves decisions
//! unchanged. For the linear kernel the weight vector is maintained
//! incrementally, so gradients cost O(d) per update.

use crate::classifiers::perceptron::LinearParams;
use crate::classifiers::{Hyperparams, Samples};
use crate::error::{Error, Result};

pub(crate) fn train(
    x: &Samples,
    y: &[u32],
    h: &Hyperparams,
    _seed: u64,
) -> Result<(LinearParams, Vec<f64>)> {
    let n = x.n;
    let c = h.svm_c;
    let tol = h.svm_tol;
    let labels: Vec<f64> = y.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
    let diag: Vec<f64> = (0..n)
        .map(|i| crate::linalg::dot(x.row(i), x.row(i)))
        .collect();

    let mut alpha = vec![0.0f64; n];
    let mut w = vec![0.0f64; x.d];
    // gradient of the dual objective (to minimize): G_i = y_i w.x_i - 1
    let mut grad = vec![-1.0f64; n];
    let mut trace = Vec::new();

    let mut iterations = 0usize;
    loop {
        // maximal violating pair (LIBSVM WSS1)
        let mut i_up = usize::MAX;
        let mut g_max = f64::NEG_INFINITY;
        let mut j_low = usize::MAX;
        let mut g_min = f64::INFINITY;
        for t in 0..n {
            let yt = labels[t];
            // "up" set: can increase alpha*y
            if (yt > 0.0 && alpha[t] < c) || (yt < 0.0 && alpha[t] > 0.0) {
                let v = -yt * grad[t];
                if v > g_max {
                    g_max = v;
                    i_up = t;
                }
            }
            // "low" set: can decrease alpha*y
            if (yt > 0.0 && alpha[t] > 0.0) || (yt < 0.0 && alpha[t] < c) {
                let v = -yt * grad[t];
                if v < g_min {
                    g_min = v;
                    j_low = t;
                }
            }
        }
        if i_up == usize::MAX || j_low == usize::MAX || g_max - g_min < tol {
            break;
        }
        if iterations >= h.svm_max_passes * n {
            break; // budget guard; KKT violation already below a few tol
        }

        let (i, j) = (i_up, j_low);
        let yi = labels[i];
        let yj = labels[j];
        let kij = crate::linalg::dot(x.row(i), x.row(j));
        let eta = (diag[i] + diag[j] - 2.0 * kij).max(1e-12);

        // minimize along the pair direction, respecting the box
        let delta = (g_max - g_min) / eta; // step in alpha_i*y_i
        let mut step = delta;
        // max step before alpha_i leaves its box (moving alpha_i*y_i up)
        let cap_i = if yi > 0.0 { c - alpha[i] } else { alpha[i] };
        // alpha_j*y_j decreases by the same amount
        let cap_j = if yj > 0.0 { alpha[j] } else { c - alpha[j] };
        step = step.min(cap_i).min(cap_j);
        if step <= 0.0 {
            break;
        }

        // step is the change of alpha_i*y_i; alpha_j*y_j moves opposite
        alpha[i] += yi * step;
        alpha[j] -= yj * step;
        let dai = step;
        let daj = -step;

        // w and gradient updates
        for (wk, xk) in w.iter_mut().zip(x.row(i)) {
            *wk += dai * xk;
        }
        for (wk, xk) in w.iter_mut().zip(x.row(j)) {
            *wk += daj * xk;
        }
        for t in 0..n {
            let kti = crate::linalg::dot(x.row(t), x.row(i));
            let ktj = crate::linalg::dot(x.row(t), x.row(j));
            grad[t] += labels[t] * (dai * kti + daj * ktj);
        }

        iterations += 1;
        if iterations % n.max(1) == 0 {
            trace.push(dual_objective(&alpha, &w));
        }
    }

    // bias from the KKT conditions: average y_i - w.x_i over free
    // support vectors, falling back to the violating-pair midpoint
    let mut b_sum = 0.0;
    let mut b_count = 0usize;
    for t in 0..n {
        if alpha[t] > 1e-9 && alpha[t] < c - 1e-9 {
            b_sum += labels[t] - crate::linalg::dot(&w, x.row(t));
            b_count += 1;
        }
    }
    let b = if b_count > 0 {
        b_sum / b_count as f64
    } else {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for t in 0..n {
            let v = labels[t] - crate::linalg::dot(&w, x.row(t));
            if (labels[t] > 0.0 && alpha[t] < c - 1e-9) || (labels[t] < 0.0 && alpha[t] > 1e-9) {
                hi = hi.min(v);
            }
            if (labels[t] > 0.0 && alpha[t] > 1e-9) || (labels[t] < 0.0 && alpha[t] < c - 1e-9) {
                lo = lo.max(v);
            }
        }
        if lo.is_finite() && hi.is_finite() {
            0.5 * (lo + hi)
        } else if lo.is_finite() {
            lo
        } else if hi.is_finite() {
            hi
        } else {
            0.0
        }
    };

    trace.push(dual_objective(&alpha, &w));
    if !trace.iter().all(|v| v.is_finite()) {
        return Err(Error::Training {
            classifier: "svm".into(),
            reason: "dual objective diverged".into(),
        });
    }
    Ok((LinearParams { w, b }, trace))
}

/// Dual objective sum(alpha) - 0.5 ||w||^2 (to maximize).
pub fn dual_objective(alpha: &[f64], w: &[f64]) -> f64 {
    alpha.iter().sum::<f64>() - 0.5 * crate::linalg::dot(w, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::test_data::separable_band;
    use crate::classifiers::{
        decision_values, predict, train as train_any, ClassifierKind, ClassifierSpec, ModelParams,
    };

    fn four_point_instance() -> (Samples, Vec<u32>) {
        // symmetric, hand-solvable: max margin hyperplane x0 = 0,
        // w* = (1, 0), b* = 0, margin 1, primal objective 0.5
        let x = Samples::new(
            vec![-1.0, 0.0, -1.0, 1.0, 1.0, 0.0, 1.0, 1.0],
            4,
            2,
        )
        .unwrap();
        (x, vec![0, 0, 1, 1])
    }

    fn spec_with_c(c: f64) -> ClassifierSpec {
        let mut spec = ClassifierSpec::new(ClassifierKind::Svm);
        spec.hyperparams.svm_c = c;
        spec.hyperparams.svm_tol = 1e-8;
        spec
    }

    #[test]
    fn four_point_max_margin_recovered() {
        let (x, y) = four_point_instance();
        let model = train_any(&spec_with_c(1e4), &x, &y, 0).unwrap();
        let ModelParams::Linear(p) = &model.params else {
            panic!()
        };
        assert!((p.w[0] - 1.0).abs() < 1e-3, "w0 = {}", p.w[0]);
        assert!(p.w[1].abs() < 1e-3, "w1 = {}", p.w[1]);
        assert!(p.b.abs() < 1e-3, "b = {}", p.b);
        assert_eq!(predict(&model, &x).unwrap(), y);
        // margin = 2/||w||: within 1e-3 of 2
        let norm = (p.w[0] * p.w[0] + p.w[1] * p.w[1]).sqrt();
        assert!((2.0 / norm - 2.0).abs() < 1e-2);
    }

    #[test]
    fn dual_objective_reaches_hand_optimum() {
        // hard-margin optimum: D* = 0.5 ||w*||^2 = 0.5
        let (x, y) = four_point_instance();
        let model = train_any(&spec_with_c(1e4), &x, &y, 0).unwrap();
        let d_star = 0.5;
        let achieved = *model.train_meta.loss_trace.last().unwrap();
        assert!(
            (achieved - d_star).abs() / d_star < 1e-3,
            "dual {achieved} vs optimum {d_star}"
        );
    }

    #[test]
    fn support_vector_scores_sit_on_the_margin() {
        let (x, y) = four_point_instance();
        let model = train_any(&spec_with_c(1e4), &x, &y, 0).unwrap();
        let scores = decision_values(&model, &x).unwrap();
        for s in scores {
            assert!((s.abs() - 1.0).abs() < 1e-3, "score {s}");
        }
    }

    #[test]
    fn rescaling_law_is_exact() {
        let (x, y) = separable_band(60, 3, 0.2, 77);
        let (probe, _) = separable_band(40, 3, 0.05, 78);
        let a = 3.5;
        let model1 = train_any(&spec_with_c(1.0), &x, &y, 0).unwrap();
        let scale = |s: &Samples| {
            Samples::new(s.x.iter().map(|v| v * a).collect(), s.n, s.d).unwrap()
        };
        let model2 = train_any(&spec_with_c(1.0 / (a * a)), &scale(&x), &y, 0).unwrap();
        assert_eq!(
            predict(&model1, &probe).unwrap(),
            predict(&model2, &scale(&probe)).unwrap()
        );
    }

    #[test]
    fn boundary_tie_goes_to_label_one() {
        let (x, y) = four_point_instance();
        let model = train_any(&spec_with_c(1e4), &x, &y, 0).unwrap();
        // probe exactly on the decision boundary x0 = 0
        let probe = Samples::new(vec![0.0, 0.5], 1, 2).unwrap();
        let s = decision_values(&model, &probe).unwrap()[0];
        if s == 0.0 {
            assert_eq!(predict(&model, &probe).unwrap(), vec![1]);
        } else {
            // numerically off the exact boundary; the contract is the
            // sign rule, which predict() applies by construction
            assert_eq!(predict(&model, &probe).unwrap()[0], u32::from(s >= 0.0));
        }
    }
}
