//! Fully-connected networks: one or two hidden layers, tanh ("TG") or
//! identity ("PN") hidden activations, sigmoid output, cross-entropy
//! loss, full-batch gradient descent with momentum.
//!
//! "Two layer" / "three layer" in the classifier names count hidden
//! layers as 1 and 2 respectively; the purelin variants are affine
//! networks trained the same way, kept as distinct classifiers on
//! purpose.

use serde::{Deserialize, Serialize};

use crate::classifiers::{ClassifierKind, Hyperparams, Samples};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HiddenActivation {
    Tanh,
    Identity,
}

impl HiddenActivation {
    fn apply(&self, v: f64) -> f64 {
        match self {
            HiddenActivation::Tanh => v.tanh(),
            HiddenActivation::Identity => v,
        }
    }

    /// Derivative expressed through the activation output.
    fn derivative_from_output(&self, out: f64) -> f64 {
        match self {
            HiddenActivation::Tanh => 1.0 - out * out,
            HiddenActivation::Identity => 1.0,
        }
    }
}

/// One dense layer, row-major weights `[n_out x n_in]`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Dense {
    pub w: Vec<f64>,
    pub b: Vec<f64>,
    pub n_in: usize,
    pub n_out: usize,
}

impl Dense {
    fn forward(&self, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for o in 0..self.n_out {
            let row = &self.w[o * self.n_in..(o + 1) * self.n_in];
            out.push(crate::linalg::dot(row, input) + self.b[o]);
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MlpParams {
    pub layers: Vec<Dense>,
    pub hidden: HiddenActivation,
}

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

impl MlpParams {
    /// Network output in (0, 1) for one sample.
    pub fn forward(&self, input: &[f64]) -> f64 {
        let mut cur = input.to_vec();
        let mut next = Vec::new();
        let last = self.layers.len() - 1;
        for (li, layer) in self.layers.iter().enumerate() {
            layer.forward(&cur, &mut next);
            if li < last {
                for v in next.iter_mut() {
                    *v = self.hidden.apply(*v);
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        sigmoid(cur[0])
    }

    fn architecture(kind: ClassifierKind, d: usize, width: usize) -> (Vec<usize>, HiddenActivation) {
        let (hidden_layers, act) = match kind {
            ClassifierKind::Mlp2Tg => (1, HiddenActivation::Tanh),
            ClassifierKind::Mlp2Pn => (1, HiddenActivation::Identity),
            ClassifierKind::Mlp3Tg => (2, HiddenActivation::Tanh),
            ClassifierKind::Mlp3Pn => (2, HiddenActivation::Identity),
            other => unreachable!("not an MLP kind: {other:?}"),
        };
        let mut sizes = vec![d];
        sizes.extend(std::iter::repeat(width).take(hidden_layers));
        sizes.push(1);
        (sizes, act)
    }

    fn init(sizes: &[usize], hidden: HiddenActivation, seed: u64) -> MlpParams {
        use rand::Rng;
        let mut rng = rng_from(seed);
        let layers = sizes
            .windows(2)
            .map(|io| {
                let (n_in, n_out) = (io[0], io[1]);
                let limit = (6.0 / (n_in + n_out) as f64).sqrt();
                Dense {
                    w: (0..n_in * n_out)
                        .map(|_| rng.random_range(-limit..limit))
                        .collect(),
                    b: vec![0.0; n_out],
                    n_in,
                    n_out,
                }
            })
            .collect();
        MlpParams { layers, hidden }
    }
}

/// Mean cross-entropy and parameter gradients over a batch.
///
/// Gradients are returned in the same layout as the parameters:
/// per layer, weights then biases.
fn loss_and_gradients(
    net: &MlpParams,
    x: &Samples,
    y: &[u32],
    grads: &mut [Vec<f64>],
) -> f64 {
    for g in grads.iter_mut() {
        g.iter_mut().for_each(|v| *v = 0.0);
    }
    let n_layers = net.layers.len();
    let mut total_loss = 0.0;

    // per-sample forward caches
    let mut activations: Vec<Vec<f64>> = Vec::with_capacity(n_layers + 1);
    for i in 0..x.n {
        activations.clear();
        activations.push(x.row(i).to_vec());
        for (li, layer) in net.layers.iter().enumerate() {
            let mut out = Vec::new();
            layer.forward(activations.last().unwrap(), &mut out);
            if li < n_layers - 1 {
                for v in out.iter_mut() {
                    *v = net.hidden.apply(*v);
                }
            }
            activations.push(out);
        }
        let logit = activations[n_layers][0];
        let p = sigmoid(logit);
        let target = y[i] as f64;
        // numerically-safe BCE via the logit
        total_loss += softplus(logit) - target * logit;

        // backward: delta on the pre-activation of the output layer
        let mut delta = vec![p - target];
        for li in (0..n_layers).rev() {
            let layer = &net.layers[li];
            let input = &activations[li];
            let g = &mut grads[li];
            // weight grads: delta (n_out) x input (n_in); bias grads appended
            for o in 0..layer.n_out {
                let base = o * layer.n_in;
                for (k, inp) in input.iter().enumerate() {
                    g[base + k] += delta[o] * inp;
                }
                g[layer.n_in * layer.n_out + o] += delta[o];
            }
            if li == 0 {
                break;
            }
            // propagate: delta_prev = (W^T delta) * act'(hidden output)
            let mut prev = vec![0.0; layer.n_in];
            for o in 0..layer.n_out {
                let row = &layer.w[o * layer.n_in..(o + 1) * layer.n_in];
                for (k, r) in row.iter().enumerate() {
                    prev[k] += r * delta[o];
                }
            }
            for (k, p) in prev.iter_mut().enumerate() {
                *p *= net.hidden.derivative_from_output(activations[li][k]);
            }
            delta = prev;
        }
    }

    let scale = 1.0 / x.n as f64;
    for g in grads.iter_mut() {
        g.iter_mut().for_each(|v| *v *= scale);
    }
    total_loss * scale
}

fn softplus(v: f64) -> f64 {
    if v > 30.0 {
        v
    } else if v < -30.0 {
        0.0
    } else {
        (1.0 + v.exp()).ln()
    }
}

pub(crate) fn train(
    kind: ClassifierKind,
    x: &Samples,
    y: &[u32],
    h: &Hyperparams,
    seed: u64,
) -> Result<(MlpParams, Vec<f64>)> {
    let (sizes, act) = MlpParams::architecture(kind, x.d, h.hidden_width);
    let mut net = MlpParams::init(&sizes, act, derive_seed(seed, &["mlp", kind.name()]));
    let mut grads: Vec<Vec<f64>> = net
        .layers
        .iter()
        .map(|l| vec![0.0; l.n_in * l.n_out + l.n_out])
        .collect();
    let mut velocity: Vec<Vec<f64>> = grads.iter().map(|g| vec![0.0; g.len()]).collect();
    let mut trace = Vec::with_capacity(h.mlp_epochs);

    for _ in 0..h.mlp_epochs {
        let loss = loss_and_gradients(&net, x, y, &mut grads);
        if !loss.is_finite() {
            return Err(Error::Training {
                classifier: kind.name().into(),
                reason: "loss diverged".into(),
            });
        }
        trace.push(loss);
        for (li, layer) in net.layers.iter_mut().enumerate() {
            let g = &grads[li];
            let v = &mut velocity[li];
            let nw = layer.n_in * layer.n_out;
            for k in 0..nw {
                v[k] = h.momentum * v[k] - h.learning_rate * g[k];
                layer.w[k] += v[k];
            }
            for o in 0..layer.n_out {
                v[nw + o] = h.momentum * v[nw + o] - h.learning_rate * g[nw + o];
                layer.b[o] += v[nw + o];
            }
        }
    }
    Ok((net, trace))
}

pub(crate) fn decision_values(p: &MlpParams, x: &Samples) -> Vec<f64> {
    (0..x.n).map(|i| p.forward(x.row(i)) - 0.5).collect()
}

/// Analytic-vs-numeric gradient comparison on a small network of the
/// requested kind; returns the maximum relative error. Central
/// differences with h = 1e-5.
pub fn mlp_gradient_check(kind: ClassifierKind, x: &Samples, y: &[u32], seed: u64) -> f64 {
    let width = 3;
    let (sizes, act) = MlpParams::architecture(kind, x.d, width);
    let net = MlpParams::init(&sizes, act, derive_seed(seed, &["gradcheck"]));
    let mut grads: Vec<Vec<f64>> = net
        .layers
        .iter()
        .map(|l| vec![0.0; l.n_in * l.n_out + l.n_out])
        .collect();
    let analytic_loss = loss_and_gradients(&net, x, y, &mut grads);
    debug_assert!(analytic_loss.is_finite());

    let h = 1e-5;
    let mut max_rel = 0.0f64;
    let mut scratch = net.clone();
    for li in 0..net.layers.len() {
        let nw = net.layers[li].n_in * net.layers[li].n_out;
        let nparams = nw + net.layers[li].n_out;
        for k in 0..nparams {
            let read = |s: &MlpParams| {
                if k < nw {
                    s.layers[li].w[k]
                } else {
                    s.layers[li].b[k - nw]
                }
            };
            let write = |s: &mut MlpParams, v: f64| {
                if k < nw {
                    s.layers[li].w[k] = v;
                } else {
                    s.layers[li].b[k - nw] = v;
                }
            };
            let orig = read(&net);
            write(&mut scratch, orig + h);
            let up = batch_loss(&scratch, x, y);
            write(&mut scratch, orig - h);
            let down = batch_loss(&scratch, x, y);
            write(&mut scratch, orig);
            let numeric = (up - down) / (2.0 * h);
            let analytic = grads[li][k];
            let rel = (analytic - numeric).abs() / (analytic.abs() + numeric.abs() + 1e-8);
            max_rel = max_rel.max(rel);
        }
    }
    max_rel
}

fn batch_loss(net: &MlpParams, x: &Samples, y: &[u32]) -> f64 {
    let mut total = 0.0;
    for i in 0..x.n {
        // reuse the numerically-safe form through the logit
        let mut cur = x.row(i).to_vec();
        let mut next = Vec::new();
        let last = net.layers.len() - 1;
        for (li, layer) in net.layers.iter().enumerate() {
            layer.forward(&cur, &mut next);
            if li < last {
                for v in next.iter_mut() {
                    *v = net.hidden.apply(*v);
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        total += softplus(cur[0]) - y[i] as f64 * cur[0];
    }
    total / x.n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::test_data::{gaussian_blobs, separable_band};
    use crate::classifiers::{predict, train as train_any, ClassifierSpec};

    #[test]
    fn tanh_network_gradients_match_finite_differences() {
        let (x, y) = gaussian_blobs(5, 2, 1.0, 1.0, 3);
        let err = mlp_gradient_check(ClassifierKind::Mlp2Tg, &x, &y, 7);
        assert!(err < 1e-5, "max relative gradient error {err}");
    }

    #[test]
    fn linear_network_gradients_match_finite_differences() {
        let (x, y) = gaussian_blobs(5, 2, 1.0, 1.0, 4);
        let err = mlp_gradient_check(ClassifierKind::Mlp3Pn, &x, &y, 8);
        assert!(err < 1e-6, "max relative gradient error {err}");
    }

    #[test]
    fn three_layer_tanh_gradients_match_finite_differences() {
        let (x, y) = gaussian_blobs(5, 2, 1.0, 1.0, 5);
        let err = mlp_gradient_check(ClassifierKind::Mlp3Tg, &x, &y, 9);
        assert!(err < 1e-5, "max relative gradient error {err}");
    }

    #[test]
    fn loss_decreases_on_separable_data() {
        let (x, y) = separable_band(60, 2, 0.5, 31);
        let mut spec = ClassifierSpec::new(ClassifierKind::Mlp2Tg);
        spec.hyperparams.mlp_epochs = 200;
        let model = train_any(&spec, &x, &y, 2).unwrap();
        let trace = &model.train_meta.loss_trace;
        assert!(trace.last().unwrap() < &trace[0], "loss did not decrease");
        let pred = predict(&model, &x).unwrap();
        let acc = pred.iter().zip(&y).filter(|(p, t)| p == t).count() as f64 / y.len() as f64;
        assert!(acc > 0.9, "training accuracy {acc}");
    }
}
