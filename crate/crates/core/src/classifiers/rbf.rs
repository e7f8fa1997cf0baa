//! Radial basis function network: seeded k-means centers, a shared
//! Gaussian width from the mean nearest-center distance, and a linear
//! readout fitted by least squares on +-1 targets.

use serde::{Deserialize, Serialize};

use crate::classifiers::{Hyperparams, Samples};
use crate::error::Result;
use crate::linalg;
use crate::rng::{derive_seed, rng_from};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RbfParams {
    pub centers: Vec<f64>,
    pub k: usize,
    pub d: usize,
    pub width: f64,
    /// Readout weights over [phi_1..phi_k, 1].
    pub readout: Vec<f64>,
}

/// Lloyd's k-means with distinct seeded initial centers. Returns
/// (centers, per-iteration objective); the objective never increases.
pub(crate) fn kmeans(
    x: &Samples,
    k: usize,
    seed: u64,
    max_iters: usize,
) -> (Vec<f64>, Vec<f64>) {
    use rand::seq::SliceRandom;
    let k = k.min(x.n);
    let mut order: Vec<usize> = (0..x.n).collect();
    let mut rng = rng_from(seed);
    order.shuffle(&mut rng);
    let mut centers: Vec<f64> = Vec::with_capacity(k * x.d);
    for &i in order.iter().take(k) {
        centers.extend_from_slice(x.row(i));
    }

    let mut assignment = vec![0usize; x.n];
    let mut objective = Vec::new();
    for _ in 0..max_iters {
        // assignment step
        let mut total = 0.0;
        for i in 0..x.n {
            let row = x.row(i);
            let mut best = (f64::INFINITY, 0usize);
            for c in 0..k {
                let dist = sq_dist(row, &centers[c * x.d..(c + 1) * x.d]);
                if dist < best.0 {
                    best = (dist, c);
                }
            }
            assignment[i] = best.1;
            total += best.0;
        }
        if objective.last().is_some_and(|&prev: &f64| (prev - total).abs() < 1e-12) {
            objective.push(total);
            break;
        }
        objective.push(total);
        // update step; empty clusters keep their previous center
        let mut sums = vec![0.0; k * x.d];
        let mut counts = vec![0usize; k];
        for i in 0..x.n {
            let c = assignment[i];
            counts[c] += 1;
            for (s, v) in sums[c * x.d..(c + 1) * x.d].iter_mut().zip(x.row(i)) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                for j in 0..x.d {
                    centers[c * x.d + j] = sums[c * x.d + j] / counts[c] as f64;
                }
            }
        }
    }
    (centers, objective)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn train(
    x: &Samples,
    y: &[u32],
    h: &Hyperparams,
    seed: u64,
) -> Result<(RbfParams, Vec<f64>)> {
    let (centers, objective) = kmeans(x, h.rbf_centers, derive_seed(seed, &["rbf", "kmeans"]), 100);
    let k = centers.len() / x.d;

    // shared width: mean distance from each center to its nearest peer
    let width = if k > 1 {
        let mut acc = 0.0;
        for c in 0..k {
            let mut nearest = f64::INFINITY;
            for o in 0..k {
                if o != c {
                    nearest = nearest.min(sq_dist(
                        &centers[c * x.d..(c + 1) * x.d],
                        &centers[o * x.d..(o + 1) * x.d],
                    ));
                }
            }
            acc += nearest.sqrt();
        }
        (acc / k as f64).max(1e-6)
    } else {
        1.0
    };

    // design matrix [phi, 1], least-squares readout on +-1 targets
    let cols = k + 1;
    let mut design = vec![0.0; x.n * cols];
    for i in 0..x.n {
        for c in 0..k {
            design[i * cols + c] = gaussian_phi(
                x.row(i),
                &centers[c * x.d..(c + 1) * x.d],
                width,
            );
        }
        design[i * cols + k] = 1.0;
    }
    let targets: Vec<f64> = y.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
    let readout = linalg::ridge_least_squares(&design, x.n, cols, &targets, 1e-8);

    Ok((
        RbfParams {
            centers,
            k,
            d: x.d,
            width,
            readout,
        },
        objective,
    ))
}

fn gaussian_phi(x: &[f64], center: &[f64], width: f64) -> f64 {
    (-sq_dist(x, center) / (2.0 * width * width)).exp()
}

pub(crate) fn decision_values(p: &RbfParams, x: &Samples) -> Vec<f64> {
    (0..x.n)
        .map(|i| {
            let row = x.row(i);
            let mut acc = p.readout[p.k];
            for c in 0..p.k {
                acc += p.readout[c]
                    * gaussian_phi(row, &p.centers[c * p.d..(c + 1) * p.d], p.width);
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::test_data::gaussian_blobs;
    use crate::classifiers::{predict, train as train_any, ClassifierKind, ClassifierSpec};

    #[test]
    fn kmeans_objective_never_increases() {
        let (x, _) = gaussian_blobs(100, 3, 2.0, 1.0, 51);
        let (_, objective) = kmeans(&x, 5, 3, 100);
        for w in objective.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "objective increased: {w:?}");
        }
    }

    #[test]
    fn well_separated_blobs_classified() {
        let (x, y) = gaussian_blobs(150, 2, 3.0, 0.8, 53);
        let model = train_any(&ClassifierSpec::new(ClassifierKind::Rbf), &x, &y, 4).unwrap();
        let pred = predict(&model, &x).unwrap();
        let acc = pred.iter().zip(&y).filter(|(p, t)| p == t).count() as f64 / y.len() as f64;
        assert!(acc > 0.95, "training accuracy {acc}");
    }

    #[test]
    fn more_centers_than_samples_is_clamped() {
        let (x, y) = gaussian_blobs(3, 2, 2.0, 0.5, 55);
        let model = train_any(&ClassifierSpec::new(ClassifierKind::Rbf), &x, &y, 4).unwrap();
        assert!(predict(&model, &x).is_ok());
    }
}
