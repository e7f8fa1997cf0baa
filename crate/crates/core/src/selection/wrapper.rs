//! Wrapper criterion: trained-classifier accuracy on a feature subset.
//!
//! Two protocols: `InnerCv` cross-validates inside the training split
//! (test rows never influence selection), while `PaperFaithful` trains
//! on the training split and scores directly on the held-out third,
//! mirroring the original protocol. Evaluations are memoized by subset;
//! the cache behaves as one logically-atomic map, so searches are
//! deterministic regardless of evaluation interleaving.

use std::collections::HashMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::classifiers::{self, ClassifierSpec, Samples};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::parallel::*;
use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "snake_case")]
pub enum WrapperProtocol {
    /// Stratified k-fold cross-validation within the training rows.
    InnerCv { folds: usize },
    /// Train on the training rows, score on the held-out test rows.
    PaperFaithful,
}

/// Gather a row subset x column subset into a dense block.
fn gather(matrix: &FeatureMatrix, rows: &[usize], cols: &[usize]) -> Samples {
    let mut x = Vec::with_capacity(rows.len() * cols.len());
    for &r in rows {
        let row = matrix.row(r);
        for &c in cols {
            x.push(row[c]);
        }
    }
    Samples {
        x,
        n: rows.len(),
        d: cols.len(),
    }
}

fn gather_labels(matrix: &FeatureMatrix, rows: &[usize]) -> Vec<u32> {
    rows.iter().map(|&r| matrix.labels[r]).collect()
}

fn accuracy_fraction(pred: &[u32], truth: &[u32]) -> f64 {
    pred.iter().zip(truth).filter(|(p, t)| p == t).count() as f64 / truth.len().max(1) as f64
}

/// Deterministic stratified fold assignment for the given rows.
fn stratified_folds(labels: &[u32], rows: &[usize], folds: usize, seed: u64) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut rng = crate::rng::rng_from(derive_seed(seed, &["wrapper", "folds"]));
    let mut assignment = vec![0usize; rows.len()];
    for class in 0..2u32 {
        let mut members: Vec<usize> = (0..rows.len())
            .filter(|&i| labels[rows[i]] == class)
            .collect();
        members.shuffle(&mut rng);
        for (pos, &i) in members.iter().enumerate() {
            assignment[i] = pos % folds;
        }
    }
    assignment
}

/// One criterion evaluation, uncached.
pub fn wrapper_criterion(
    matrix: &FeatureMatrix,
    subset: &[usize],
    spec: &ClassifierSpec,
    protocol: WrapperProtocol,
    train_rows: &[usize],
    test_rows: &[usize],
    seed: u64,
) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::domain("wrapper criterion needs a non-empty subset"));
    }
    let with_context = |e: Error| Error::Training {
        classifier: spec.kind.name().into(),
        reason: format!("subset {subset:?}: {e}"),
    };
    match protocol {
        WrapperProtocol::PaperFaithful => {
            let x_train = gather(matrix, train_rows, subset);
            let y_train = gather_labels(matrix, train_rows);
            let model =
                classifiers::train(spec, &x_train, &y_train, seed).map_err(with_context)?;
            let x_test = gather(matrix, test_rows, subset);
            let y_test = gather_labels(matrix, test_rows);
            let pred = classifiers::predict(&model, &x_test)?;
            Ok(accuracy_fraction(&pred, &y_test))
        }
        WrapperProtocol::InnerCv { folds } => {
            let folds = folds.max(2);
            let assignment = stratified_folds(&matrix.labels, train_rows, folds, seed);
            let mut correct = 0usize;
            let mut total = 0usize;
            for fold in 0..folds {
                let tr: Vec<usize> = train_rows
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| assignment[*i] != fold)
                    .map(|(_, &r)| r)
                    .collect();
                let te: Vec<usize> = train_rows
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| assignment[*i] == fold)
                    .map(|(_, &r)| r)
                    .collect();
                if te.is_empty() {
                    continue;
                }
                let y_tr = gather_labels(matrix, &tr);
                if y_tr.iter().all(|&l| l == 0) || y_tr.iter().all(|&l| l == 1) {
                    continue; // degenerate fold split
                }
                let x_tr = gather(matrix, &tr, subset);
                let model = classifiers::train(
                    spec,
                    &x_tr,
                    &y_tr,
                    derive_seed(seed, &["wrapper", "fold", &fold.to_string()]),
                )
                .map_err(with_context)?;
                let x_te = gather(matrix, &te, subset);
                let y_te = gather_labels(matrix, &te);
                let pred = classifiers::predict(&model, &x_te)?;
                correct += pred.iter().zip(&y_te).filter(|(p, t)| p == t).count();
                total += y_te.len();
            }
            if total == 0 {
                return Err(Error::domain("cross-validation produced no test rows"));
            }
            Ok(correct as f64 / total as f64)
        }
    }
}

/// Anything that can score a feature subset. The wrapper evaluator is
/// the production implementation; tests plug in synthetic value
/// functions (additive, monotone) to compare the searches against
/// exhaustive optima cheaply.
pub trait SubsetCriterion: Sync {
    fn eval(&self, subset: &[usize]) -> Result<f64>;

    fn eval_batch(&self, subsets: &[Vec<usize>]) -> Result<Vec<f64>> {
        subsets.iter().map(|s| self.eval(s)).collect()
    }

    /// Classifier recorded on returned subsets.
    fn classifier_kind(&self) -> crate::classifiers::ClassifierKind;
}

/// Memoizing evaluator shared by the search algorithms.
pub struct SubsetEvaluator<'a> {
    pub matrix: &'a FeatureMatrix,
    pub spec: ClassifierSpec,
    pub protocol: WrapperProtocol,
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
    pub seed: u64,
    cache: Mutex<HashMap<Vec<usize>, f64>>,
    evaluations: std::sync::atomic::AtomicUsize,
}

impl<'a> SubsetEvaluator<'a> {
    pub fn new(
        matrix: &'a FeatureMatrix,
        spec: ClassifierSpec,
        protocol: WrapperProtocol,
        train_rows: Vec<usize>,
        test_rows: Vec<usize>,
        seed: u64,
    ) -> Self {
        SubsetEvaluator {
            matrix,
            spec,
            protocol,
            train_rows,
            test_rows,
            seed,
            cache: Mutex::new(HashMap::new()),
            evaluations: std::sync::atomic::AtomicUsize::new(0),
        }
    }

    /// Trainings actually performed (cache misses).
    pub fn evaluation_count(&self) -> usize {
        self.evaluations.load(std::sync::atomic::Ordering::Relaxed)
    }

    pub fn criterion(&self, subset: &[usize]) -> Result<f64> {
        let mut key = subset.to_vec();
        key.sort_unstable();
        if let Some(&hit) = self.cache.lock().unwrap().get(&key) {
            return Ok(hit);
        }
        let value = wrapper_criterion(
            self.matrix,
            &key,
            &self.spec,
            self.protocol,
            &self.train_rows,
            &self.test_rows,
            self.seed,
        )?;
        self.evaluations
            .fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        self.cache.lock().unwrap().insert(key, value);
        Ok(value)
    }

    /// Evaluate many subsets, cache-aware and in parallel. Results are
    /// positionally aligned with the input.
    pub fn criterion_batch(&self, subsets: &[Vec<usize>]) -> Result<Vec<f64>> {
        let results: Vec<Result<f64>> =
            subsets.par_iter().map(|s| self.criterion(s)).collect();
        results.into_iter().collect()
    }
}

impl SubsetCriterion for SubsetEvaluator<'_> {
    fn eval(&self, subset: &[usize]) -> Result<f64> {
        self.criterion(subset)
    }

    fn eval_batch(&self, subsets: &[Vec<usize>]) -> Result<Vec<f64>> {
        self.criterion_batch(subsets)
    }

    fn classifier_kind(&self) -> crate::classifiers::ClassifierKind {
        self.spec.kind
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::ClassifierKind;
    use crate::selection::ranking::tests::matrix_from_columns;

    fn split(n: usize) -> (Vec<usize>, Vec<usize>) {
        // interleaved 2/3-1/3 split keeping classes balanced
        let train: Vec<usize> = (0..n).filter(|i| i % 3 != 2).collect();
        let test: Vec<usize> = (0..n).filter(|i| i % 3 == 2).collect();
        (train, test)
    }

    fn labelled_matrix(n_per_class: usize, gap: f64, seed: u64) -> FeatureMatrix {
        use rand_distr::{Distribution, Normal};
        let mut rng = crate::rng::rng_from(seed);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let n = 2 * n_per_class;
        let labels: Vec<u32> = (0..n).map(|i| (i % 2) as u32).collect();
        let sep: Vec<f64> = labels
            .iter()
            .map(|&l| if l == 1 { gap } else { 0.0 } + normal.sample(&mut rng))
            .collect();
        let noise: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
        matrix_from_columns(&[sep, noise], labels)
    }

    #[test]
    fn perfectly_separating_feature_scores_one() {
        let labels: Vec<u32> = (0..30).map(|i| (i % 2) as u32).collect();
        let perfect: Vec<f64> = labels.iter().map(|&l| l as f64 * 10.0 - 5.0).collect();
        let m = matrix_from_columns(&[perfect], labels);
        let (train, test) = split(30);
        let acc = wrapper_criterion(
            &m,
            &[0],
            &ClassifierSpec::new(ClassifierKind::Bayes),
            WrapperProtocol::PaperFaithful,
            &train,
            &test,
            0,
        )
        .unwrap();
        assert_eq!(acc, 1.0);
    }

    #[test]
    fn shuffled_labels_score_near_chance() {
        use rand::seq::SliceRandom;
        let mut accs = Vec::new();
        for seed in 0..20 {
            let mut m = labelled_matrix(250, 2.0, seed);
            let mut rng = crate::rng::rng_from(1000 + seed);
            m.labels.shuffle(&mut rng);
            let (train, test) = split(m.n_rows);
            let acc = wrapper_criterion(
                &m,
                &[0, 1],
                &ClassifierSpec::new(ClassifierKind::Bayes),
                WrapperProtocol::PaperFaithful,
                &train,
                &test,
                seed,
            )
            .unwrap();
            accs.push(acc);
        }
        let mean = accs.iter().sum::<f64>() / accs.len() as f64;
        assert!((mean - 0.5).abs() < 0.1, "permutation-null accuracy {mean}");
    }

    #[test]
    fn determinism_and_cache_consistency() {
        let m = labelled_matrix(60, 1.5, 5);
        let (train, test) = split(m.n_rows);
        let eval = SubsetEvaluator::new(
            &m,
            ClassifierSpec::new(ClassifierKind::Bayes),
            WrapperProtocol::InnerCv { folds: 3 },
            train.clone(),
            test.clone(),
            9,
        );
        let a = eval.criterion(&[0, 1]).unwrap();
        let b = eval.criterion(&[1, 0]).unwrap(); // same set, different order
        assert_eq!(a, b);
        assert_eq!(eval.evaluation_count(), 1, "second call must hit the cache");

        let eval2 = SubsetEvaluator::new(
            &m,
            ClassifierSpec::new(ClassifierKind::Bayes),
            WrapperProtocol::InnerCv { folds: 3 },
            train,
            test,
            9,
        );
        assert_eq!(a, eval2.criterion(&[0, 1]).unwrap());
    }

    #[test]
    fn inner_cv_never_touches_test_rows() {
        // poison the test rows: if CV used them, accuracy would crater
        let mut m = labelled_matrix(60, 4.0, 7);
        let (train, test) = split(m.n_rows);
        for &r in &test {
            let v = m.values[r * m.n_cols] * -100.0;
            m.values[r * m.n_cols] = v;
            m.labels[r] = 1 - m.labels[r];
        }
        let acc = wrapper_criterion(
            &m,
            &[0],
            &ClassifierSpec::new(ClassifierKind::Bayes),
            WrapperProtocol::InnerCv { folds: 3 },
            &train,
            &test,
            3,
        )
        .unwrap();
        assert!(acc > 0.9, "inner CV accuracy {acc} should ignore test rows");
    }

    #[test]
    fn empty_subset_rejected() {
        let m = labelled_matrix(10, 1.0, 1);
        let (train, test) = split(m.n_rows);
        assert!(wrapper_criterion(
            &m,
            &[],
            &ClassifierSpec::new(ClassifierKind::Bayes),
            WrapperProtocol::PaperFaithful,
            &train,
            &test,
            0,
        )
        .is_err());
    }
}
