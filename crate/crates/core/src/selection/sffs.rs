//! Floating sequential forward selection and the exhaustive oracle.

use crate::error::Result;
use crate::selection::wrapper::SubsetCriterion;
use crate::selection::{FeatureSubset, SearchMethod};

/// Best subset of each size seen so far.
#[derive(Default)]
struct BestBySize {
    entries: Vec<Option<(f64, Vec<usize>)>>,
}

impl BestBySize {
    fn update(&mut self, criterion: f64, subset: &[usize]) -> bool {
        let size = subset.len();
        if self.entries.len() <= size {
            self.entries.resize(size + 1, None);
        }
        let mut sorted = subset.to_vec();
        sorted.sort_unstable();
        let better = match &self.entries[size] {
            None => true,
            Some((best, held)) => {
                criterion > *best || (criterion == *best && sorted < *held)
            }
        };
        if better {
            self.entries[size] = Some((criterion, sorted));
        }
        better
    }

    fn best(&self, size: usize) -> Option<&(f64, Vec<usize>)> {
        self.entries.get(size).and_then(|e| e.as_ref())
    }
}

/// Pudil-style floating search: greedy additions, each followed by
/// backward removals for as long as a removal beats the best-known
/// subset of the smaller size. Runs `extra` additions past `k` so late
/// removals can still improve the size-k record, then returns the best
/// size-k subset encountered. Criterion evaluations are cached by the
/// evaluator, so revisited subsets cost nothing.
pub fn sffs<C: SubsetCriterion>(
    evaluator: &C,
    pool: &[usize],
    k: usize,
    extra: usize,
) -> Result<FeatureSubset> {
    assert!(k >= 1, "subset size must be at least 1");
    let k = k.min(pool.len());
    if k == pool.len() {
        let mut indices = pool.to_vec();
        indices.sort_unstable();
        let criterion = evaluator.eval(&indices)?;
        return Ok(FeatureSubset {
            indices,
            criterion,
            classifier: evaluator.classifier_kind(),
            method: SearchMethod::Sffs,
        });
    }

    let target_max = (k + extra).min(pool.len());
    let mut best = BestBySize::default();
    let mut current: Vec<usize> = Vec::new();
    // generous guard; caching makes revisits free, so this only trips
    // on pathological oscillation
    let mut steps_left = 50 * pool.len() * (k + extra + 1);

    while current.len() < target_max && steps_left > 0 {
        steps_left -= 1;

        // forward: add the best candidate
        let candidates: Vec<Vec<usize>> = pool
            .iter()
            .filter(|c| !current.contains(c))
            .map(|&c| {
                let mut s = current.clone();
                s.push(c);
                s.sort_unstable();
                s
            })
            .collect();
        if candidates.is_empty() {
            break;
        }
        let scores = evaluator.eval_batch(&candidates)?;
        let mut pick = 0usize;
        for i in 1..candidates.len() {
            if scores[i] > scores[pick]
                || (scores[i] == scores[pick] && candidates[i] < candidates[pick])
            {
                pick = i;
            }
        }
        current = candidates[pick].clone();
        best.update(scores[pick], &current);

        // backward: drop features while that improves the smaller size
        while current.len() > 2 && steps_left > 0 {
            steps_left -= 1;
            let removals: Vec<Vec<usize>> = (0..current.len())
                .map(|omit| {
                    current
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != omit)
                        .map(|(_, &v)| v)
                        .collect()
                })
                .collect();
            let scores = evaluator.eval_batch(&removals)?;
            let mut pick = 0usize;
            for i in 1..removals.len() {
                if scores[i] > scores[pick]
                    || (scores[i] == scores[pick] && removals[i] < removals[pick])
                {
                    pick = i;
                }
            }
            let smaller = removals[pick].len();
            let improves = match best.best(smaller) {
                Some((b, _)) => scores[pick] > *b,
                None => true,
            };
            if improves {
                best.update(scores[pick], &removals[pick]);
                current = removals[pick].clone();
            } else {
                break;
            }
        }
    }

    let (criterion, indices) = best
        .best(k)
        .cloned()
        .expect("forward pass always reaches size k");
    Ok(FeatureSubset {
        indices,
        criterion,
        classifier: evaluator.classifier_kind(),
        method: SearchMethod::Sffs,
    })
}

/// Exhaustive search over all k-combinations. Only sane for small
/// pools; serves as the optimality oracle for the heuristic searches.
pub fn exhaustive_select<C: SubsetCriterion>(
    evaluator: &C,
    pool: &[usize],
    k: usize,
) -> Result<FeatureSubset> {
    let k = k.min(pool.len());
    let mut combos: Vec<Vec<usize>> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    combinations(pool, k, 0, &mut stack, &mut combos);
    for c in combos.iter_mut() {
        c.sort_unstable();
    }
    let scores = evaluator.eval_batch(&combos)?;
    let mut pick = 0usize;
    for i in 1..combos.len() {
        if scores[i] > scores[pick] || (scores[i] == scores[pick] && combos[i] < combos[pick]) {
            pick = i;
        }
    }
    Ok(FeatureSubset {
        indices: combos[pick].clone(),
        criterion: scores[pick],
        classifier: evaluator.classifier_kind(),
        method: SearchMethod::Exhaustive,
    })
}

fn combinations(
    pool: &[usize],
    k: usize,
    start: usize,
    stack: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if stack.len() == k {
        out.push(stack.clone());
        return;
    }
    let needed = k - stack.len();
    for i in start..=pool.len().saturating_sub(needed) {
        stack.push(pool[i]);
        combinations(pool, k, i + 1, stack, out);
        stack.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{ClassifierKind, ClassifierSpec};
    use crate::selection::ranking::tests::matrix_from_columns;
    use crate::selection::wrapper::{SubsetEvaluator, WrapperProtocol};

    /// Matrix whose columns have separability v[i]: wrapping Bayes over
    /// additive independent signal columns approximates an additive
    /// criterion; for the small exact tests below we instead check
    /// against the exhaustive oracle on the same evaluator.
    fn planted_matrix(strengths: &[f64], n_per_class: usize, seed: u64) -> crate::features::FeatureMatrix {
        use rand_distr::{Distribution, Normal};
        let mut rng = crate::rng::rng_from(seed);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let n = 2 * n_per_class;
        let labels: Vec<u32> = (0..n).map(|i| (i % 2) as u32).collect();
        let cols: Vec<Vec<f64>> = strengths
            .iter()
            .map(|&s| {
                labels
                    .iter()
                    .map(|&l| if l == 1 { s } else { 0.0 } + normal.sample(&mut rng))
                    .collect()
            })
            .collect();
        matrix_from_columns(&cols, labels)
    }

    fn make_eval<'a>(
        m: &'a crate::features::FeatureMatrix,
        seed: u64,
    ) -> SubsetEvaluator<'a> {
        let train: Vec<usize> = (0..m.n_rows).filter(|i| i % 3 != 2).collect();
        let test: Vec<usize> = (0..m.n_rows).filter(|i| i % 3 == 2).collect();
        SubsetEvaluator::new(
            m,
            ClassifierSpec::new(ClassifierKind::Bayes),
            WrapperProtocol::InnerCv { folds: 3 },
            train,
            test,
            seed,
        )
    }

    #[test]
    fn k_equals_pool_returns_pool() {
        let m = planted_matrix(&[1.0, 0.5, 0.2], 30, 1);
        let eval = make_eval(&m, 1);
        let result = sffs(&eval, &[0, 1, 2], 3, 2).unwrap();
        assert_eq!(result.indices, vec![0, 1, 2]);
    }

    #[test]
    fn sffs_matches_exhaustive_on_small_pools() {
        for seed in 0..5 {
            let m = planted_matrix(&[2.0, 1.5, 1.2, 0.9, 0.6, 0.3, 0.1, 0.0], 40, 100 + seed);
            let eval = make_eval(&m, seed);
            let pool: Vec<usize> = (0..8).collect();
            let best = exhaustive_select(&eval, &pool, 3).unwrap();
            let found = sffs(&eval, &pool, 3, 3).unwrap();
            assert!(
                found.criterion >= 0.99 * best.criterion,
                "seed {seed}: sffs {} vs optimum {}",
                found.criterion,
                best.criterion
            );
        }
    }

    /// Deterministic value function: sum of fixed per-feature values.
    pub(crate) struct AdditiveCriterion(pub Vec<f64>);

    impl crate::selection::SubsetCriterion for AdditiveCriterion {
        fn eval(&self, subset: &[usize]) -> crate::error::Result<f64> {
            Ok(subset.iter().map(|&i| self.0[i]).sum())
        }

        fn classifier_kind(&self) -> ClassifierKind {
            ClassifierKind::Bayes
        }
    }

    #[test]
    fn additive_criterion_picks_the_largest() {
        let values = AdditiveCriterion(vec![0.3, 0.9, 0.1, 0.8, 0.5, 0.2]);
        let found = sffs(&values, &[0, 1, 2, 3, 4, 5], 3, 2).unwrap();
        assert_eq!(found.indices, vec![1, 3, 4]);
        assert!((found.criterion - 2.2).abs() < 1e-12);
    }

    #[test]
    fn non_negative_additive_result_never_below_best_single() {
        use rand::Rng;
        for seed in 0..20 {
            let mut rng = crate::rng::rng_from(300 + seed);
            let values: Vec<f64> = (0..10).map(|_| rng.random_range(0.0..1.0)).collect();
            let best_single = values.iter().cloned().fold(0.0f64, f64::max);
            let criterion = AdditiveCriterion(values);
            let pool: Vec<usize> = (0..10).collect();
            let found = sffs(&criterion, &pool, 3, 2).unwrap();
            assert!(found.criterion >= best_single);
        }
    }

    #[test]
    fn result_never_below_best_single_on_monotone_instances() {
        let m = planted_matrix(&[2.2, 1.8, 1.1, 0.4, 0.2], 50, 77);
        let eval = make_eval(&m, 3);
        let pool: Vec<usize> = (0..5).collect();
        let singles: Vec<Vec<usize>> = pool.iter().map(|&c| vec![c]).collect();
        let single_scores = eval.criterion_batch(&singles).unwrap();
        let best_single = single_scores.iter().cloned().fold(0.0f64, f64::max);
        let found = sffs(&eval, &pool, 3, 2).unwrap();
        assert!(
            found.criterion >= best_single,
            "sffs {} below best single {best_single}",
            found.criterion
        );
    }
}
