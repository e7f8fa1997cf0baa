//! Genetic wrapper search over fixed-size feature subsets.
//!
//! Individuals are k-subsets of the pool. Tournament selection (size
//! 3), union-repair crossover that preserves the parents' intersection,
//! single-swap mutation, and elitism. The best-ever individual is
//! tracked across generations and returned, so the reported criterion
//! is non-decreasing in the generation count.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rng::{derive_seed, rng_from};
use crate::selection::wrapper::SubsetCriterion;
use crate::selection::{FeatureSubset, SearchMethod};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaParams {
    pub population: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    pub elite: usize,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            population: 50,
            generations: 40,
            crossover_prob: 0.9,
            mutation_prob: 0.05,
            elite: 2,
        }
    }
}

fn random_subset(pool: &[usize], k: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<usize> {
    let mut shuffled = pool.to_vec();
    shuffled.shuffle(rng);
    let mut subset: Vec<usize> = shuffled.into_iter().take(k).collect();
    subset.sort_unstable();
    subset
}

/// Child from the union of two parents: the intersection is kept, the
/// remainder is filled by a shuffled draw from the symmetric difference.
fn crossover(
    a: &[usize],
    b: &[usize],
    k: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Vec<usize> {
    let mut child: Vec<usize> = a.iter().filter(|v| b.contains(v)).copied().collect();
    let mut rest: Vec<usize> = a
        .iter()
        .chain(b.iter())
        .filter(|v| !child.contains(v))
        .copied()
        .collect();
    rest.sort_unstable();
    rest.dedup();
    rest.shuffle(rng);
    for v in rest {
        if child.len() == k {
            break;
        }
        child.push(v);
    }
    child.sort_unstable();
    child
}

fn mutate(subset: &mut Vec<usize>, pool: &[usize], rng: &mut rand_chacha::ChaCha8Rng) {
    let outside: Vec<usize> = pool.iter().filter(|v| !subset.contains(v)).copied().collect();
    if outside.is_empty() || subset.is_empty() {
        return;
    }
    let out_pos = rng.random_range(0..subset.len());
    let in_val = outside[rng.random_range(0..outside.len())];
    subset[out_pos] = in_val;
    subset.sort_unstable();
}

pub fn genetic_select<C: SubsetCriterion>(
    evaluator: &C,
    pool: &[usize],
    k: usize,
    ga: &GaParams,
    seed: u64,
) -> Result<FeatureSubset> {
    assert!(ga.population >= 4, "population must be at least 4");
    let k = k.min(pool.len());
    let mut rng = rng_from(derive_seed(seed, &["ga"]));

    let mut population: Vec<Vec<usize>> = (0..ga.population)
        .map(|_| random_subset(pool, k, &mut rng))
        .collect();
    let mut fitness = evaluator.eval_batch(&population)?;

    let better = |fa: f64, sa: &[usize], fb: f64, sb: &[usize]| {
        fa > fb || (fa == fb && sa < sb)
    };
    let mut best_idx = 0usize;
    for i in 1..population.len() {
        if better(fitness[i], &population[i], fitness[best_idx], &population[best_idx]) {
            best_idx = i;
        }
    }
    let mut best_ever = (fitness[best_idx], population[best_idx].clone());

    for _gen in 0..ga.generations {
        // rank for elitism: indices sorted by fitness desc, lexicographic
        let mut ranking: Vec<usize> = (0..population.len()).collect();
        ranking.sort_by(|&a, &b| {
            fitness[b]
                .partial_cmp(&fitness[a])
                .unwrap()
                .then(population[a].cmp(&population[b]))
        });

        let mut next: Vec<Vec<usize>> = ranking
            .iter()
            .take(ga.elite.min(population.len()))
            .map(|&i| population[i].clone())
            .collect();

        while next.len() < ga.population {
            let tournament = |rng: &mut rand_chacha::ChaCha8Rng| -> usize {
                let mut winner = rng.random_range(0..population.len());
                for _ in 1..3 {
                    let challenger = rng.random_range(0..population.len());
                    if better(
                        fitness[challenger],
                        &population[challenger],
                        fitness[winner],
                        &population[winner],
                    ) {
                        winner = challenger;
                    }
                }
                winner
            };
            let pa = tournament(&mut rng);
            let pb = tournament(&mut rng);
            let mut child = if rng.random_range(0.0..1.0) < ga.crossover_prob {
                crossover(&population[pa], &population[pb], k, &mut rng)
            } else {
                population[pa].clone()
            };
            if rng.random_range(0.0..1.0) < ga.mutation_prob {
                mutate(&mut child, pool, &mut rng);
            }
            next.push(child);
        }

        population = next;
        fitness = evaluator.eval_batch(&population)?;
        for i in 0..population.len() {
            if better(fitness[i], &population[i], best_ever.0, &best_ever.1) {
                best_ever = (fitness[i], population[i].clone());
            }
        }
    }

    Ok(FeatureSubset {
        indices: best_ever.1,
        criterion: best_ever.0,
        classifier: evaluator.classifier_kind(),
        method: SearchMethod::Genetic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{ClassifierKind, ClassifierSpec};
    use crate::selection::ranking::tests::matrix_from_columns;
    use crate::selection::sffs::exhaustive_select;
    use crate::selection::wrapper::{SubsetEvaluator, WrapperProtocol};

    fn planted(strengths: &[f64], n_per_class: usize, seed: u64) -> crate::features::FeatureMatrix {
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

    fn make_eval<'a>(m: &'a crate::features::FeatureMatrix, seed: u64) -> SubsetEvaluator<'a> {
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
    fn zero_generations_returns_best_of_initial_population() {
        let m = planted(&[2.0, 1.0, 0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 0.0, 0.0], 30, 5);
        let eval = make_eval(&m, 1);
        let pool: Vec<usize> = (0..10).collect();
        let ga = GaParams {
            population: 10,
            generations: 0,
            ..GaParams::default()
        };
        let result = genetic_select(&eval, &pool, 3, &ga, 7).unwrap();
        assert_eq!(result.indices.len(), 3);
        assert!(result.criterion > 0.0);
    }

    #[test]
    fn finds_near_optimal_subsets_mostly() {
        let m = planted(&[2.5, 2.0, 1.6, 0.6, 0.4, 0.3, 0.2, 0.1, 0.05, 0.0], 40, 8);
        let eval = make_eval(&m, 2);
        let pool: Vec<usize> = (0..10).collect();
        let optimum = exhaustive_select(&eval, &pool, 3).unwrap();
        let ga = GaParams {
            population: 30,
            generations: 25,
            ..GaParams::default()
        };
        let mut hits = 0;
        for seed in 0..20 {
            let found = genetic_select(&eval, &pool, 3, &ga, seed).unwrap();
            if found.criterion >= 0.95 * optimum.criterion {
                hits += 1;
            }
        }
        assert!(hits >= 19, "GA reached 95% of optimum in only {hits}/20 runs");
    }

    #[test]
    fn deterministic_under_fixed_seed() {
        let m = planted(&[1.5, 1.0, 0.5, 0.2, 0.1, 0.0], 30, 9);
        let eval = make_eval(&m, 3);
        let pool: Vec<usize> = (0..6).collect();
        let ga = GaParams {
            population: 12,
            generations: 8,
            ..GaParams::default()
        };
        let a = genetic_select(&eval, &pool, 3, &ga, 42).unwrap();
        let b = genetic_select(&eval, &pool, 3, &ga, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn crossover_preserves_intersection_and_size() {
        let mut rng = crate::rng::rng_from(4);
        let a = vec![1, 2, 3, 4];
        let b = vec![3, 4, 5, 6];
        for _ in 0..50 {
            let child = crossover(&a, &b, 4, &mut rng);
            assert_eq!(child.len(), 4);
            assert!(child.contains(&3) && child.contains(&4));
            assert!(child.iter().all(|v| a.contains(v) || b.contains(v)));
        }
    }
}
