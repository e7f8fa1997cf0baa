//! Twelve classical two-class classifiers behind one train/predict
//! contract: Gaussian Bayes, linear SVM, perceptron, four MLP variants,
//! RBF network, three ANFIS variants, and a fuzzy-C-means neuro-fuzzy
//! hybrid.
//!
//! Training is deterministic given (spec, data, seed); a trained model
//! is immutable, serializable, and prediction is reentrant. Decision
//! values are monotone with the predicted label: score >= 0 means
//! label 1 (ties resolve to 1, by contract).

mod anfis;
mod bayes;
mod fcm;
mod mlp;
mod perceptron;
mod rbf;
mod svm;

pub use anfis::anfis_premise_gradient_check;
pub use fcm::fuzzy_c_means;
pub use mlp::mlp_gradient_check;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Table of supported classifier kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    /// Gaussian Bayes with full per-class covariance.
    Bayes,
    /// Soft-margin linear support vector machine.
    Svm,
    /// Single-layer online perceptron.
    Percep,
    /// One hidden layer, tanh activation.
    Mlp2Tg,
    /// One hidden layer, identity activation.
    Mlp2Pn,
    /// Two hidden layers, tanh activation.
    Mlp3Tg,
    /// Two hidden layers, identity activation.
    Mlp3Pn,
    /// Radial basis function network with k-means centers.
    Rbf,
    /// Sugeno ANFIS, Gaussian membership functions.
    Anfis1,
    /// Sugeno ANFIS, power-sigmoid membership functions.
    Anfis2,
    /// Sugeno ANFIS, trapezoid membership functions.
    Anfis3,
    /// Fuzzy-C-means memberships feeding a tanh MLP.
    Nfcm,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 12] = [
        ClassifierKind::Bayes,
        ClassifierKind::Svm,
        ClassifierKind::Percep,
        ClassifierKind::Mlp2Tg,
        ClassifierKind::Mlp2Pn,
        ClassifierKind::Mlp3Tg,
        ClassifierKind::Mlp3Pn,
        ClassifierKind::Rbf,
        ClassifierKind::Anfis1,
        ClassifierKind::Anfis2,
        ClassifierKind::Anfis3,
        ClassifierKind::Nfcm,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ClassifierKind::Bayes => "bayes",
            ClassifierKind::Svm => "svm",
            ClassifierKind::Percep => "percep",
            ClassifierKind::Mlp2Tg => "mlp2tg",
            ClassifierKind::Mlp2Pn => "mlp2pn",
            ClassifierKind::Mlp3Tg => "mlp3tg",
            ClassifierKind::Mlp3Pn => "mlp3pn",
            ClassifierKind::Rbf => "rbf",
            ClassifierKind::Anfis1 => "anfis1",
            ClassifierKind::Anfis2 => "anfis2",
            ClassifierKind::Anfis3 => "anfis3",
            ClassifierKind::Nfcm => "nfcm",
        }
    }

    /// ANFIS trainers enumerate 2^d rules and train one rule consequent
    /// per input combination; selection budgets shrink accordingly.
    pub fn is_anfis(&self) -> bool {
        matches!(
            self,
            ClassifierKind::Anfis1 | ClassifierKind::Anfis2 | ClassifierKind::Anfis3
        )
    }
}

/// Hyperparameters for all kinds, echoed verbatim into reports. Only
/// the fields relevant to a given kind are read by its trainer.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct Hyperparams {
    pub hidden_width: usize,
    pub mlp_epochs: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub svm_c: f64,
    pub svm_tol: f64,
    pub svm_max_passes: usize,
    pub percep_epochs: usize,
    pub rbf_centers: usize,
    pub anfis_epochs: usize,
    pub anfis_premise_lr: f64,
    pub anfis_max_inputs: usize,
    pub fcm_clusters: usize,
    pub fcm_fuzzifier: f64,
    pub bayes_ridge: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            hidden_width: 10,
            mlp_epochs: 500,
            learning_rate: 0.01,
            momentum: 0.9,
            svm_c: 1.0,
            svm_tol: 1e-4,
            svm_max_passes: 10_000,
            percep_epochs: 200,
            rbf_centers: 10,
            anfis_epochs: 50,
            anfis_premise_lr: 0.01,
            anfis_max_inputs: 8,
            fcm_clusters: 4,
            fcm_fuzzifier: 2.0,
            bayes_ridge: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ClassifierSpec {
    pub kind: ClassifierKind,
    pub hyperparams: Hyperparams,
}

impl ClassifierSpec {
    pub fn new(kind: ClassifierKind) -> Self {
        ClassifierSpec {
            kind,
            hyperparams: Hyperparams::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let h = &self.hyperparams;
        if h.hidden_width == 0 {
            return Err(Error::config("hyperparams.hidden_width", "must be >= 1"));
        }
        if !(h.svm_c > 0.0) {
            return Err(Error::config("hyperparams.svm_c", "must be positive"));
        }
        if h.rbf_centers == 0 {
            return Err(Error::config("hyperparams.rbf_centers", "must be >= 1"));
        }
        if h.fcm_clusters < 2 {
            return Err(Error::config("hyperparams.fcm_clusters", "must be >= 2"));
        }
        if !(h.fcm_fuzzifier > 1.0) {
            return Err(Error::config("hyperparams.fcm_fuzzifier", "must be > 1"));
        }
        if !(h.bayes_ridge >= 0.0) {
            return Err(Error::config("hyperparams.bayes_ridge", "must be >= 0"));
        }
        Ok(())
    }
}

/// Row-major sample block handed to trainers.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub x: Vec<f64>,
    pub n: usize,
    pub d: usize,
}

impl Samples {
    pub fn new(x: Vec<f64>, n: usize, d: usize) -> Result<Self> {
        if x.len() != n * d {
            return Err(Error::structural(format!(
                "sample block has {} values for {n} x {d}",
                x.len()
            )));
        }
        Ok(Samples { x, n, d })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::structural("ragged sample rows"));
        }
        let mut x = Vec::with_capacity(n * d);
        for r in rows {
            x.extend_from_slice(r);
        }
        Ok(Samples { x, n, d })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.d..(i + 1) * self.d]
    }
}

/// Per-kind fitted parameters.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelParams {
    Bayes(bayes::BayesParams),
    Linear(perceptron::LinearParams),
    Mlp(mlp::MlpParams),
    Rbf(rbf::RbfParams),
    Anfis(anfis::AnfisParams),
    Nfcm(fcm::NfcmParams),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TrainMeta {
    pub n_features: usize,
    pub class_priors: [f64; 2],
    /// Per-epoch training criterion (loss or error rate), kind-specific.
    pub loss_trace: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TrainedModel {
    pub spec: ClassifierSpec,
    pub params: ModelParams,
    pub train_meta: TrainMeta,
}

fn check_training_inputs(x: &Samples, y: &[u32]) -> Result<[f64; 2]> {
    if x.n != y.len() {
        return Err(Error::structural(format!(
            "{} rows but {} labels",
            x.n,
            y.len()
        )));
    }
    if x.n == 0 || x.d == 0 {
        return Err(Error::structural("empty training set"));
    }
    if x.x.iter().any(|v| !v.is_finite()) {
        return Err(Error::structural("non-finite feature value in training set"));
    }
    let n1 = y.iter().filter(|&&l| l == 1).count();
    let n0 = y.len() - n1;
    if n0 == 0 || n1 == 0 {
        return Err(Error::Training {
            classifier: "any".into(),
            reason: "training set contains a single class".into(),
        });
    }
    if y.iter().any(|&l| l > 1) {
        return Err(Error::structural("labels must be 0 or 1"));
    }
    Ok([n0 as f64 / x.n as f64, n1 as f64 / x.n as f64])
}

/// Train a classifier. Identical (spec, data, seed) yield identical
/// models and predictions.
pub fn train(spec: &ClassifierSpec, x: &Samples, y: &[u32], seed: u64) -> Result<TrainedModel> {
    spec.validate()?;
    let priors = check_training_inputs(x, y)?;
    let h = &spec.hyperparams;
    let (params, loss_trace) = match spec.kind {
        ClassifierKind::Bayes => {
            let p = bayes::train(x, y, h.bayes_ridge)?;
            (ModelParams::Bayes(p), Vec::new())
        }
        ClassifierKind::Svm => {
            let (p, trace) = svm::train(x, y, h, seed)?;
            (ModelParams::Linear(p), trace)
        }
        ClassifierKind::Percep => {
            let (p, trace) = perceptron::train(x, y, h, seed)?;
            (ModelParams::Linear(p), trace)
        }
        ClassifierKind::Mlp2Tg | ClassifierKind::Mlp2Pn | ClassifierKind::Mlp3Tg
        | ClassifierKind::Mlp3Pn => {
            let (p, trace) = mlp::train(spec.kind, x, y, h, seed)?;
            (ModelParams::Mlp(p), trace)
        }
        ClassifierKind::Rbf => {
            let (p, trace) = rbf::train(x, y, h, seed)?;
            (ModelParams::Rbf(p), trace)
        }
        ClassifierKind::Anfis1 | ClassifierKind::Anfis2 | ClassifierKind::Anfis3 => {
            let (p, trace) = anfis::train(spec.kind, x, y, h, seed)?;
            (ModelParams::Anfis(p), trace)
        }
        ClassifierKind::Nfcm => {
            let (p, trace) = fcm::train_nfcm(x, y, h, seed)?;
            (ModelParams::Nfcm(p), trace)
        }
    };
    Ok(TrainedModel {
        spec: spec.clone(),
        params,
        train_meta: TrainMeta {
            n_features: x.d,
            class_priors: priors,
            loss_trace,
        },
    })
}

/// Real-valued decision scores; score >= 0 corresponds to label 1.
pub fn decision_values(model: &TrainedModel, x: &Samples) -> Result<Vec<f64>> {
    if x.d != model.train_meta.n_features {
        return Err(Error::structural(format!(
            "model expects {} features, got {}",
            model.train_meta.n_features, x.d
        )));
    }
    let scores = match &model.params {
        ModelParams::Bayes(p) => bayes::decision_values(p, x),
        ModelParams::Linear(p) => perceptron::decision_values(p, x),
        ModelParams::Mlp(p) => mlp::decision_values(p, x),
        ModelParams::Rbf(p) => rbf::decision_values(p, x),
        ModelParams::Anfis(p) => anfis::decision_values(p, x),
        ModelParams::Nfcm(p) => fcm::decision_values(p, x),
    };
    Ok(scores)
}

/// Hard labels; ties at score 0 go to label 1.
pub fn predict(model: &TrainedModel, x: &Samples) -> Result<Vec<u32>> {
    Ok(decision_values(model, x)?
        .into_iter()
        .map(|s| u32::from(s >= 0.0))
        .collect())
}


#[cfg(test)]
mod tests {
    use super::*;
    use test_data::*;

    #[test]
    fn every_kind_trains_and_beats_chance_on_separable_data() {
        let (x, y) = separable_band(60, 3, 0.5, 11);
        for kind in ClassifierKind::ALL {
            let mut spec = ClassifierSpec::new(kind);
            // keep the slow trainers quick in this smoke test
            spec.hyperparams.mlp_epochs = 120;
            spec.hyperparams.anfis_epochs = 10;
            let model = train(&spec, &x, &y, 5).unwrap_or_else(|e| {
                panic!("{} failed to train: {e}", kind.name());
            });
            let pred = predict(&model, &x).unwrap();
            let acc = pred
                .iter()
                .zip(&y)
                .filter(|(p, t)| p == t)
                .count() as f64
                / y.len() as f64;
            assert!(
                acc >= 0.5,
                "{}: training accuracy {acc} below chance",
                kind.name()
            );
            assert!(
                model.train_meta.loss_trace.iter().all(|v| v.is_finite()),
                "{}: non-finite loss trace",
                kind.name()
            );
        }
    }

    #[test]
    fn single_class_training_rejected() {
        let (x, _) = separable_band(20, 2, 0.5, 3);
        let y = vec![0u32; 20];
        for kind in [ClassifierKind::Bayes, ClassifierKind::Svm, ClassifierKind::Anfis1] {
            assert!(train(&ClassifierSpec::new(kind), &x, &y, 0).is_err());
        }
    }

    #[test]
    fn dimension_mismatch_rejected_on_predict() {
        let (x, y) = separable_band(30, 3, 0.5, 7);
        let model = train(&ClassifierSpec::new(ClassifierKind::Bayes), &x, &y, 0).unwrap();
        let (probe, _) = separable_band(4, 2, 0.5, 8);
        assert!(predict(&model, &probe).is_err());
    }

    #[test]
    fn determinism_same_seed_same_predictions() {
        let (x, y) = gaussian_blobs(40, 4, 1.0, 1.0, 21);
        let (probe, _) = gaussian_blobs(10, 4, 1.0, 1.0, 22);
        for kind in ClassifierKind::ALL {
            let mut spec = ClassifierSpec::new(kind);
            spec.hyperparams.mlp_epochs = 60;
            spec.hyperparams.anfis_epochs = 5;
            let (x4, y4) = if kind.is_anfis() {
                // keep the rule count manageable
                (x.clone(), y.clone())
            } else {
                (x.clone(), y.clone())
            };
            let m1 = train(&spec, &x4, &y4, 33).unwrap();
            let m2 = train(&spec, &x4, &y4, 33).unwrap();
            assert_eq!(
                predict(&m1, &probe).unwrap(),
                predict(&m2, &probe).unwrap(),
                "{} not deterministic",
                kind.name()
            );
        }
    }

    #[test]
    fn model_serialization_roundtrip_preserves_predictions() {
        let (x, y) = gaussian_blobs(30, 3, 1.5, 1.0, 41);
        let (probe, _) = gaussian_blobs(15, 3, 1.5, 1.0, 42);
        for kind in ClassifierKind::ALL {
            let mut spec = ClassifierSpec::new(kind);
            spec.hyperparams.mlp_epochs = 40;
            spec.hyperparams.anfis_epochs = 4;
            let model = train(&spec, &x, &y, 9).unwrap();
            let json = serde_json::to_string(&model).unwrap();
            let back: TrainedModel = serde_json::from_str(&json).unwrap();
            assert_eq!(back, model, "{} changed through serde", kind.name());
            assert_eq!(
                predict(&model, &probe).unwrap(),
                predict(&back, &probe).unwrap()
            );
        }
    }

    #[test]
    fn decision_values_sign_matches_predict() {
        let (x, y) = gaussian_blobs(50, 3, 1.0, 1.0, 61);
        let (probe, _) = gaussian_blobs(100, 3, 0.5, 1.5, 62);
        for kind in [
            ClassifierKind::Bayes,
            ClassifierKind::Svm,
            ClassifierKind::Percep,
            ClassifierKind::Mlp2Tg,
            ClassifierKind::Rbf,
            ClassifierKind::Anfis1,
            ClassifierKind::Nfcm,
        ] {
            let mut spec = ClassifierSpec::new(kind);
            spec.hyperparams.mlp_epochs = 60;
            spec.hyperparams.anfis_epochs = 5;
            let model = train(&spec, &x, &y, 13).unwrap();
            let scores = decision_values(&model, &probe).unwrap();
            let labels = predict(&model, &probe).unwrap();
            for (s, l) in scores.iter().zip(labels.iter()) {
                assert_eq!(u32::from(*s >= 0.0), *l, "{}", kind.name());
            }
        }
    }
}
