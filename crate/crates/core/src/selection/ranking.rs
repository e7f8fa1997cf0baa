//! Classifier-independent ranking with correlation demotion.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::features::FeatureMatrix;
use crate::parallel::*;
use crate::selection::separability::{bhattacharyya_1d, mahalanobis_1d, scatter_1d};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RankedFeatures {
    /// Column indices sorted by demoted score, descending; ties break
    /// toward the lower column index.
    pub order: Vec<usize>,
    /// Demoted combined score per entry of `order`.
    pub scores: Vec<f64>,
    /// Raw (mahalanobis, bhattacharyya, scatter) per entry of `order`.
    pub components: Vec<[f64; 3]>,
}

/// Rank all columns of the matrix.
pub fn rank_independent(matrix: &FeatureMatrix, demote_exponent: f64) -> Result<RankedFeatures> {
    let cols: Vec<usize> = (0..matrix.n_cols).collect();
    rank_columns(matrix, &cols, demote_exponent)
}

/// Rank a column subset (e.g. one feature group). Returned indices
/// refer to the original matrix.
pub fn rank_columns(
    matrix: &FeatureMatrix,
    cols: &[usize],
    demote_exponent: f64,
) -> Result<RankedFeatures> {
    let labels = &matrix.labels;
    let raw: Vec<Result<[f64; 3]>> = cols
        .par_iter()
        .map(|&c| {
            let col = matrix.column(c);
            Ok([
                mahalanobis_1d(&col, labels)?,
                bhattacharyya_1d(&col, labels)?,
                scatter_1d(&col, labels)?,
            ])
        })
        .collect();
    let mut components = Vec::with_capacity(cols.len());
    for r in raw {
        components.push(r?);
    }

    // min-max normalize each measure across features, then sum
    let mut combined = vec![0.0f64; cols.len()];
    for m in 0..3 {
        let lo = components.iter().map(|c| c[m]).fold(f64::INFINITY, f64::min);
        let hi = components
            .iter()
            .map(|c| c[m])
            .fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            for (acc, c) in combined.iter_mut().zip(&components) {
                *acc += (c[m] - lo) / (hi - lo);
            }
        }
    }

    // sort descending, ties toward lower column index
    let mut order: Vec<usize> = (0..cols.len()).collect();
    order.sort_by(|&a, &b| {
        combined[b]
            .partial_cmp(&combined[a])
            .unwrap()
            .then(cols[a].cmp(&cols[b]))
    });

    // one top-down demotion pass over standardized columns: each
    // feature loses score by its strongest |correlation| against any
    // feature ranked above it (in the pre-demotion order)
    let standardized: Vec<Option<Vec<f64>>> = cols
        .par_iter()
        .map(|&c| standardize(&matrix.column(c)))
        .collect();

    let mut demoted = vec![0.0f64; cols.len()];
    for (pos, &i) in order.iter().enumerate() {
        let mut max_abs_rho = 0.0f64;
        if let Some(zi) = &standardized[i] {
            let above = &order[..pos];
            let rhos: Vec<f64> = above
                .par_iter()
                .map(|&j| match &standardized[j] {
                    Some(zj) => zi.iter().zip(zj).map(|(a, b)| a * b).sum::<f64>().abs(),
                    None => 0.0,
                })
                .collect();
            max_abs_rho = rhos.into_iter().fold(0.0f64, f64::max).min(1.0);
        }
        demoted[i] = combined[i] * (1.0 - max_abs_rho).max(0.0).powf(demote_exponent);
    }

    // re-sort by demoted score
    let mut final_order: Vec<usize> = (0..cols.len()).collect();
    final_order.sort_by(|&a, &b| {
        demoted[b]
            .partial_cmp(&demoted[a])
            .unwrap()
            .then(cols[a].cmp(&cols[b]))
    });

    Ok(RankedFeatures {
        order: final_order.iter().map(|&i| cols[i]).collect(),
        scores: final_order.iter().map(|&i| demoted[i]).collect(),
        components: final_order.iter().map(|&i| components[i]).collect(),
    })
}

/// Zero-mean unit-norm version of a column (so dot = Pearson rho), or
/// `None` for constant columns, which are treated as uncorrelated.
fn standardize(col: &[f64]) -> Option<Vec<f64>> {
    let n = col.len() as f64;
    let mean = col.iter().sum::<f64>() / n;
    let mut centered: Vec<f64> = col.iter().map(|v| v - mean).collect();
    let norm = centered.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        centered.iter_mut().for_each(|v| *v /= norm);
        Some(centered)
    } else {
        None
    }
}

/// First `n` entries of the ranking (all of it when shorter).
pub fn shortlist(ranked: &RankedFeatures, n: usize) -> Vec<usize> {
    ranked.order.iter().take(n).copied().collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::features::{FeatureDescriptor, FeatureGroup, Normalization};

    /// Hand-built matrix: columns with prescribed values.
    pub(crate) fn matrix_from_columns(columns: &[Vec<f64>], labels: Vec<u32>) -> FeatureMatrix {
        let n_rows = labels.len();
        let n_cols = columns.len();
        let mut values = vec![0.0; n_rows * n_cols];
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), n_rows);
            for (r, v) in col.iter().enumerate() {
                values[r * n_cols + c] = *v;
            }
        }
        FeatureMatrix {
            values,
            n_rows,
            n_cols,
            descriptors: (0..n_cols)
                .map(|c| {
                    FeatureDescriptor::new(
                        FeatureGroup::Statistic,
                        "synthetic",
                        vec![c],
                        &[("col", c.to_string())],
                    )
                })
                .collect(),
            labels,
            normalization: Normalization::Raw,
            degenerate_cells: 0,
        }
    }

    fn gaussian_col(gap: f64, n: usize, seed: u64) -> Vec<f64> {
        use rand_distr::{Distribution, Normal};
        let mut rng = crate::rng::rng_from(seed);
        let normal = Normal::new(0.0, 1.0).unwrap();
        (0..2 * n)
            .map(|i| {
                let center = if i < n { 0.0 } else { gap };
                center + normal.sample(&mut rng)
            })
            .collect()
    }

    #[test]
    fn duplicate_of_top_feature_is_demoted_to_zero() {
        let n = 40;
        let labels: Vec<u32> = (0..2 * n).map(|i| u32::from(i >= n)).collect();
        let strong = gaussian_col(4.0, n, 1);
        let duplicate = strong.clone();
        let weak = gaussian_col(0.8, n, 2);
        let weaker = gaussian_col(0.4, n, 3);
        let m = matrix_from_columns(&[strong, duplicate, weak, weaker], labels);
        let ranked = rank_independent(&m, 1.0).unwrap();
        // column 0 wins the tie with its duplicate 1; after demotion the
        // duplicate scores 0 and falls below every feature that kept a
        // positive score
        assert_eq!(ranked.order[0], 0);
        let dup_pos = ranked.order.iter().position(|&c| c == 1).unwrap();
        assert_eq!(ranked.scores[dup_pos], 0.0);
        for (pos, &col) in ranked.order.iter().enumerate() {
            if ranked.scores[pos] > 0.0 {
                assert!(
                    pos < dup_pos,
                    "column {col} with positive score ranked below the duplicate"
                );
            }
        }
    }

    #[test]
    fn all_constant_columns_rank_in_index_order() {
        let labels = vec![0, 0, 1, 1];
        let cols: Vec<Vec<f64>> = (0..5).map(|c| vec![c as f64; 4]).collect();
        let m = matrix_from_columns(&cols, labels);
        let ranked = rank_independent(&m, 1.0).unwrap();
        assert_eq!(ranked.order, vec![0, 1, 2, 3, 4]);
        assert!(ranked.scores.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn five_feature_matrix_matches_hand_computed_order() {
        // separabilities by construction: col0 strongest ... col4 pure noise
        let n = 20;
        let labels: Vec<u32> = (0..2 * n).map(|i| u32::from(i >= n)).collect();
        let cols = vec![
            gaussian_col(5.0, n, 10),
            gaussian_col(3.0, n, 11),
            gaussian_col(2.0, n, 12),
            gaussian_col(1.0, n, 13),
            gaussian_col(0.0, n, 14),
        ];
        let m = matrix_from_columns(&cols, labels.clone());
        let ranked = rank_independent(&m, 1.0).unwrap();

        // hand-computed combined scores (same formulas, independent code)
        let mut combined = vec![0.0; 5];
        let measures: Vec<[f64; 3]> = (0..5)
            .map(|c| {
                [
                    mahalanobis_1d(&cols[c], &labels).unwrap(),
                    bhattacharyya_1d(&cols[c], &labels).unwrap(),
                    scatter_1d(&cols[c], &labels).unwrap(),
                ]
            })
            .collect();
        for mi in 0..3 {
            let lo = measures.iter().map(|m| m[mi]).fold(f64::INFINITY, f64::min);
            let hi = measures.iter().map(|m| m[mi]).fold(f64::NEG_INFINITY, f64::max);
            for c in 0..5 {
                combined[c] += (measures[c][mi] - lo) / (hi - lo);
            }
        }
        let mut want: Vec<usize> = (0..5).collect();
        want.sort_by(|&a, &b| combined[b].partial_cmp(&combined[a]).unwrap());
        // low correlation between independent draws: demotion must not
        // reshuffle the order
        assert_eq!(ranked.order, want);
    }

    #[test]
    fn ranking_invariant_under_affine_column_rescaling() {
        let n = 30;
        let labels: Vec<u32> = (0..2 * n).map(|i| u32::from(i >= n)).collect();
        let cols = vec![
            gaussian_col(2.5, n, 21),
            gaussian_col(1.5, n, 22),
            gaussian_col(0.7, n, 23),
        ];
        let m1 = matrix_from_columns(&cols, labels.clone());
        let rescaled: Vec<Vec<f64>> = cols
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let a = [2.0, -0.5, 100.0][i];
                let b = [5.0, -1.0, 0.0][i];
                c.iter().map(|v| a * v + b).collect()
            })
            .collect();
        let m2 = matrix_from_columns(&rescaled, labels);
        let r1 = rank_independent(&m1, 1.0).unwrap();
        let r2 = rank_independent(&m2, 1.0).unwrap();
        assert_eq!(r1.order, r2.order);
        for (a, b) in r1.scores.iter().zip(&r2.scores) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn shortlist_clamps_and_prefixes() {
        let labels = vec![0, 0, 1, 1];
        let cols: Vec<Vec<f64>> = (0..6)
            .map(|c| vec![0.0, 0.1, c as f64, c as f64 + 0.1])
            .collect();
        let m = matrix_from_columns(&cols, labels);
        let ranked = rank_independent(&m, 1.0).unwrap();
        assert_eq!(shortlist(&ranked, 200).len(), 6);
        let four = shortlist(&ranked, 4);
        assert_eq!(four, ranked.order[..4].to_vec());
    }
}
