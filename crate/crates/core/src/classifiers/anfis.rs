//! First-order Sugeno ANFIS with grid partition: 2 membership functions
//! per input, 2^d rules, hybrid learning. Each epoch solves the rule
//! consequents by ridge least squares given the current memberships,
//! then takes one gradient step on the premise (membership) parameters
//! against the squared error.
//!
//! Three membership families: Gaussian, power-sigmoid (product of two
//! opposing sigmoids), and trapezoid. Inputs are guarded to d <= 8;
//! beyond that the rule grid explodes.

use serde::{Deserialize, Serialize};

use crate::classifiers::{ClassifierKind, Hyperparams, Samples};
use crate::error::{Error, Result};
use crate::linalg;

pub const MFS_PER_INPUT: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MembershipKind {
    Gaussian,
    PowerSigmoid,
    Trapezoid,
}

impl MembershipKind {
    fn param_count(&self) -> usize {
        match self {
            MembershipKind::Gaussian => 2,
            MembershipKind::PowerSigmoid => 4,
            MembershipKind::Trapezoid => 4,
        }
    }

    /// Membership value, always in [0, 1].
    fn value(&self, params: &[f64], x: f64) -> f64 {
        match self {
            MembershipKind::Gaussian => {
                let (c, sigma) = (params[0], params[1]);
                (-(x - c) * (x - c) / (2.0 * sigma * sigma)).exp()
            }
            MembershipKind::PowerSigmoid => {
                let (a1, c1, a2, c2) = (params[0], params[1], params[2], params[3]);
                sigmoid(a1 * (x - c1)) * sigmoid(-a2 * (x - c2))
            }
            MembershipKind::Trapezoid => {
                let (a, b, c, d) = (params[0], params[1], params[2], params[3]);
                if x < a || x > d {
                    0.0
                } else if x < b {
                    (x - a) / (b - a).max(1e-12)
                } else if x <= c {
                    1.0
                } else {
                    (d - x) / (d - c).max(1e-12)
                }
            }
        }
    }

    /// d(mu)/d(param_k) at x.
    fn gradient(&self, params: &[f64], x: f64, out: &mut [f64]) {
        match self {
            MembershipKind::Gaussian => {
                let (c, sigma) = (params[0], params[1]);
                let mu = self.value(params, x);
                out[0] = mu * (x - c) / (sigma * sigma);
                out[1] = mu * (x - c) * (x - c) / (sigma * sigma * sigma);
            }
            MembershipKind::PowerSigmoid => {
                let (a1, c1, a2, c2) = (params[0], params[1], params[2], params[3]);
                let s1 = sigmoid(a1 * (x - c1));
                let s2 = sigmoid(-a2 * (x - c2));
                let ds1 = s1 * (1.0 - s1);
                let ds2 = s2 * (1.0 - s2);
                out[0] = ds1 * (x - c1) * s2;
                out[1] = -a1 * ds1 * s2;
                out[2] = -s1 * ds2 * (x - c2);
                out[3] = s1 * ds2 * a2;
            }
            MembershipKind::Trapezoid => {
                let (a, b, c, d) = (params[0], params[1], params[2], params[3]);
                out.iter_mut().for_each(|v| *v = 0.0);
                if x >= a && x < b {
                    let den = (b - a).max(1e-12);
                    out[0] = (x - b) / (den * den);
                    out[1] = -(x - a) / (den * den);
                } else if x > c && x <= d {
                    let den = (d - c).max(1e-12);
                    out[2] = (d - x) / (den * den);
                    out[3] = (x - c) / (den * den);
                }
            }
        }
    }
}

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AnfisParams {
    pub kind: MembershipKind,
    pub d: usize,
    /// Premise parameters: `[input][mf][param]` flattened.
    pub premise: Vec<f64>,
    /// Rule consequents: `[rule][d + 1]` flattened.
    pub consequents: Vec<f64>,
}

impl AnfisParams {
    fn n_rules(&self) -> usize {
        1 << self.d
    }

    fn premise_slice(&self, input: usize, mf: usize) -> &[f64] {
        let pc = self.kind.param_count();
        let base = (input * MFS_PER_INPUT + mf) * pc;
        &self.premise[base..base + pc]
    }

    /// Normalized firing strengths for one sample; falls back to the
    /// uniform distribution when no rule fires (possible when every
    /// trapezoid support excludes x).
    pub fn normalized_firing(&self, row: &[f64]) -> Vec<f64> {
        let r = self.n_rules();
        let mut mu = vec![0.0; self.d * MFS_PER_INPUT];
        for i in 0..self.d {
            for m in 0..MFS_PER_INPUT {
                mu[i * MFS_PER_INPUT + m] = self.kind.value(self.premise_slice(i, m), row[i]);
            }
        }
        let mut w = vec![1.0; r];
        for (rule, wr) in w.iter_mut().enumerate() {
            for i in 0..self.d {
                let m = (rule >> i) & 1;
                *wr *= mu[i * MFS_PER_INPUT + m];
            }
        }
        let total: f64 = w.iter().sum();
        if total > 1e-300 {
            for wr in w.iter_mut() {
                *wr /= total;
            }
        } else {
            w.iter_mut().for_each(|wr| *wr = 1.0 / r as f64);
        }
        w
    }

    /// Sugeno output: sum_r wbar_r (theta_r . [x, 1]).
    pub fn forward(&self, row: &[f64]) -> f64 {
        let wbar = self.normalized_firing(row);
        let stride = self.d + 1;
        wbar.iter()
            .enumerate()
            .map(|(r, &wr)| {
                let theta = &self.consequents[r * stride..(r + 1) * stride];
                wr * (linalg::dot(&theta[..self.d], row) + theta[self.d])
            })
            .sum()
    }
}

fn init_premise(kind: MembershipKind, x: &Samples) -> Vec<f64> {
    let pc = kind.param_count();
    let mut premise = Vec::with_capacity(x.d * MFS_PER_INPUT * pc);
    for i in 0..x.d {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for s in 0..x.n {
            let v = x.row(s)[i];
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let range = (hi - lo).max(1e-6);
        for m in 0..MFS_PER_INPUT {
            let frac = if m == 0 { 0.25 } else { 0.75 };
            let center = lo + frac * range;
            match kind {
                MembershipKind::Gaussian => {
                    premise.extend_from_slice(&[center, range / 3.0]);
                }
                MembershipKind::PowerSigmoid => {
                    let slope = 10.0 / range;
                    let (c1, c2) = if m == 0 {
                        (lo - 0.2 * range, lo + 0.5 * range)
                    } else {
                        (lo + 0.5 * range, hi + 0.2 * range)
                    };
                    premise.extend_from_slice(&[slope, c1, slope, c2]);
                }
                MembershipKind::Trapezoid => {
                    let (a, b, c, d) = if m == 0 {
                        (
                            lo - 0.3 * range,
                            lo - 0.1 * range,
                            lo + 0.3 * range,
                            lo + 0.65 * range,
                        )
                    } else {
                        (
                            lo + 0.35 * range,
                            lo + 0.7 * range,
                            hi + 0.1 * range,
                            hi + 0.3 * range,
                        )
                    };
                    premise.extend_from_slice(&[a, b, c, d]);
                }
            }
        }
    }
    premise
}

pub(crate) fn kind_to_membership(kind: ClassifierKind) -> MembershipKind {
    match kind {
        ClassifierKind::Anfis1 => MembershipKind::Gaussian,
        ClassifierKind::Anfis2 => MembershipKind::PowerSigmoid,
        ClassifierKind::Anfis3 => MembershipKind::Trapezoid,
        other => unreachable!("not an ANFIS kind: {other:?}"),
    }
}

/// Ridge least-squares solve of the rule consequents given fixed
/// premise parameters. Returns mean squared error of the fit.
fn solve_consequents(model: &mut AnfisParams, x: &Samples, y: &[u32]) -> f64 {
    let r = model.n_rules();
    let stride = model.d + 1;
    let cols = r * stride;
    let mut design = vec![0.0; x.n * cols];
    for s in 0..x.n {
        let row = x.row(s);
        let wbar = model.normalized_firing(row);
        for (rule, &wr) in wbar.iter().enumerate() {
            let base = s * cols + rule * stride;
            for j in 0..model.d {
                design[base + j] = wr * row[j];
            }
            design[base + model.d] = wr;
        }
    }
    let targets: Vec<f64> = y.iter().map(|&l| l as f64).collect();
    model.consequents = linalg::ridge_least_squares(&design, x.n, cols, &targets, 1e-6);
    let mut mse = 0.0;
    for s in 0..x.n {
        let err = model.forward(x.row(s)) - targets[s];
        mse += err * err;
    }
    mse / x.n as f64
}

/// Mean squared error gradient with respect to the premise parameters,
/// consequents held fixed.
fn premise_gradient(model: &AnfisParams, x: &Samples, y: &[u32]) -> Vec<f64> {
    let pc = model.kind.param_count();
    let r = model.n_rules();
    let stride = model.d + 1;
    let mut grad = vec![0.0; model.premise.len()];
    let mut mf_grad = vec![0.0; pc];

    for s in 0..x.n {
        let row = x.row(s);
        // memberships and raw firings
        let mut mu = vec![0.0; model.d * MFS_PER_INPUT];
        for i in 0..model.d {
            for m in 0..MFS_PER_INPUT {
                mu[i * MFS_PER_INPUT + m] =
                    model.kind.value(model.premise_slice(i, m), row[i]);
            }
        }
        let mut w = vec![1.0; r];
        for (rule, wr) in w.iter_mut().enumerate() {
            for i in 0..model.d {
                *wr *= mu[i * MFS_PER_INPUT + ((rule >> i) & 1)];
            }
        }
        let total: f64 = w.iter().sum();
        if total <= 1e-300 {
            continue; // uniform fallback region: treat as flat
        }
        let rule_outputs: Vec<f64> = (0..r)
            .map(|rule| {
                let theta = &model.consequents[rule * stride..(rule + 1) * stride];
                linalg::dot(&theta[..model.d], row) + theta[model.d]
            })
            .collect();
        let f: f64 = w
            .iter()
            .zip(&rule_outputs)
            .map(|(&wr, &g)| wr * g)
            .sum::<f64>()
            / total;
        let dl_df = 2.0 * (f - y[s] as f64) / x.n as f64;

        // dL/dw_r = dl_df * (g_r - f) / total
        // dw_r/dmu(i, m) = prod of the other inputs' memberships when
        // rule r uses mf m on input i; accumulated per (i, m) below.
        for i in 0..model.d {
            for m in 0..MFS_PER_INPUT {
                let mut dl_dmu = 0.0;
                for rule in 0..r {
                    if (rule >> i) & 1 != m {
                        continue;
                    }
                    // product excluding input i
                    let mut others = 1.0;
                    for j in 0..model.d {
                        if j != i {
                            others *= mu[j * MFS_PER_INPUT + ((rule >> j) & 1)];
                        }
                    }
                    dl_dmu += dl_df * (rule_outputs[rule] - f) / total * others;
                }
                model
                    .kind
                    .gradient(model.premise_slice(i, m), row[i], &mut mf_grad);
                let base = (i * MFS_PER_INPUT + m) * pc;
                for (k, &g) in mf_grad.iter().enumerate() {
                    grad[base + k] += dl_dmu * g;
                }
            }
        }
    }
    grad
}

/// Keep premise parameters in their valid region after a step.
fn project_premise(model: &mut AnfisParams) {
    let pc = model.kind.param_count();
    for chunk in model.premise.chunks_mut(pc) {
        match model.kind {
            MembershipKind::Gaussian => {
                chunk[1] = chunk[1].max(1e-3);
            }
            MembershipKind::PowerSigmoid => {
                chunk[0] = chunk[0].max(1e-2);
                chunk[2] = chunk[2].max(1e-2);
            }
            MembershipKind::Trapezoid => {
                // enforce a <= b <= c <= d with minimal gaps
                chunk[1] = chunk[1].max(chunk[0] + 1e-3);
                chunk[2] = chunk[2].max(chunk[1]);
                chunk[3] = chunk[3].max(chunk[2] + 1e-3);
            }
        }
    }
}

pub(crate) fn train(
    kind: ClassifierKind,
    x: &Samples,
    y: &[u32],
    h: &Hyperparams,
    _seed: u64,
) -> Result<(AnfisParams, Vec<f64>)> {
    if x.d > h.anfis_max_inputs {
        return Err(Error::domain(format!(
            "ANFIS input dimension {} exceeds the rule-explosion guard ({})",
            x.d, h.anfis_max_inputs
        )));
    }
    let mf = kind_to_membership(kind);
    let mut model = AnfisParams {
        kind: mf,
        d: x.d,
        premise: init_premise(mf, x),
        consequents: vec![0.0; (1 << x.d) * (x.d + 1)],
    };
    let mut trace = Vec::with_capacity(h.anfis_epochs);
    for _ in 0..h.anfis_epochs {
        let mse = solve_consequents(&mut model, x, y);
        if !mse.is_finite() {
            return Err(Error::Training {
                classifier: kind.name().into(),
                reason: "squared error diverged".into(),
            });
        }
        trace.push(mse);
        let grad = premise_gradient(&model, x, y);
        // normalized step so the learning rate is scale-free
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm > 1e-12 {
            let step = h.anfis_premise_lr / norm.max(1.0);
            for (p, g) in model.premise.iter_mut().zip(&grad) {
                *p -= step * g;
            }
        }
        project_premise(&mut model);
    }
    // final consequent solve against the settled premises
    let mse = solve_consequents(&mut model, x, y);
    trace.push(mse);
    Ok((model, trace))
}

pub(crate) fn decision_values(p: &AnfisParams, x: &Samples) -> Vec<f64> {
    (0..x.n).map(|i| p.forward(x.row(i)) - 0.5).collect()
}

/// Finite-difference check of the premise gradient for a small Gaussian
/// ANFIS; returns the maximum relative error. Consequents are fitted
/// once and held fixed, matching what `premise_gradient` differentiates.
pub fn anfis_premise_gradient_check(x: &Samples, y: &[u32]) -> f64 {
    let mf = MembershipKind::Gaussian;
    let mut model = AnfisParams {
        kind: mf,
        d: x.d,
        premise: init_premise(mf, x),
        consequents: vec![0.0; (1 << x.d) * (x.d + 1)],
    };
    solve_consequents(&mut model, x, y);
    let analytic = premise_gradient(&model, x, y);

    let mse_of = |m: &AnfisParams| -> f64 {
        let mut acc = 0.0;
        for s in 0..x.n {
            let e = m.forward(x.row(s)) - y[s] as f64;
            acc += e * e;
        }
        acc / x.n as f64
    };
    let h = 1e-5;
    let mut max_rel = 0.0f64;
    for k in 0..model.premise.len() {
        let orig = model.premise[k];
        model.premise[k] = orig + h;
        let up = mse_of(&model);
        model.premise[k] = orig - h;
        let down = mse_of(&model);
        model.premise[k] = orig;
        let numeric = (up - down) / (2.0 * h);
        let rel = (analytic[k] - numeric).abs() / (analytic[k].abs() + numeric.abs() + 1e-8);
        max_rel = max_rel.max(rel);
    }
    max_rel
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::test_data::{gaussian_blobs, separable_band};
    use crate::classifiers::{predict, train as train_any, ClassifierSpec};

    #[test]
    fn premise_gradients_match_finite_differences() {
        let (x, y) = gaussian_blobs(10, 2, 1.0, 1.0, 71);
        let err = anfis_premise_gradient_check(&x, &y);
        assert!(err < 1e-4, "max relative premise gradient error {err}");
    }

    #[test]
    fn firing_strengths_are_normalized_and_non_negative() {
        let (x, y) = gaussian_blobs(30, 3, 1.0, 1.0, 73);
        for kind in [
            ClassifierKind::Anfis1,
            ClassifierKind::Anfis2,
            ClassifierKind::Anfis3,
        ] {
            let mut spec = ClassifierSpec::new(kind);
            spec.hyperparams.anfis_epochs = 3;
            let model = train_any(&spec, &x, &y, 1).unwrap();
            let crate::classifiers::ModelParams::Anfis(p) = &model.params else {
                panic!()
            };
            for i in 0..x.n {
                let wbar = p.normalized_firing(x.row(i));
                assert!(wbar.iter().all(|&w| w >= 0.0), "{}", kind.name());
                let sum: f64 = wbar.iter().sum();
                assert!((sum - 1.0).abs() < 1e-9, "{}: sum {sum}", kind.name());
            }
        }
    }

    #[test]
    fn separable_data_classified_above_chance() {
        let (x, y) = separable_band(60, 3, 0.6, 79);
        for kind in [
            ClassifierKind::Anfis1,
            ClassifierKind::Anfis2,
            ClassifierKind::Anfis3,
        ] {
            let mut spec = ClassifierSpec::new(kind);
            spec.hyperparams.anfis_epochs = 10;
            let model = train_any(&spec, &x, &y, 3).unwrap();
            let pred = predict(&model, &x).unwrap();
            let acc = pred.iter().zip(&y).filter(|(p, t)| p == t).count() as f64
                / y.len() as f64;
            assert!(acc > 0.8, "{}: accuracy {acc}", kind.name());
        }
    }

    #[test]
    fn rule_explosion_guard() {
        let (x, y) = gaussian_blobs(10, 9, 1.0, 1.0, 81);
        let err = train_any(&ClassifierSpec::new(ClassifierKind::Anfis1), &x, &y, 0);
        assert!(matches!(err, Err(Error::Domain(_))));
    }
}
