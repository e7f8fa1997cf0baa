//! Fuzzy C-means clustering and the neuro-fuzzy hybrid classifier:
//! per-sample cluster memberships are appended to the inputs of a tanh
//! MLP.

use serde::{Deserialize, Serialize};

use crate::classifiers::mlp::{self, MlpParams};
use crate::classifiers::{ClassifierKind, Hyperparams, Samples};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from};

/// Fuzzy C-means: returns (centers `[c x d]`, memberships `[n x c]`,
/// objective trace). Memberships of every sample sum to 1.
pub fn fuzzy_c_means(
    x: &Samples,
    c: usize,
    fuzzifier: f64,
    seed: u64,
    max_iters: usize,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    if c < 2 || c > x.n {
        return Err(Error::domain(format!(
            "cluster count {c} outside 2..={}",
            x.n
        )));
    }
    if !(fuzzifier > 1.0) {
        return Err(Error::domain("fuzzifier must be > 1"));
    }
    use rand::Rng;
    let mut rng = rng_from(seed);
    // random membership init, rows normalized
    let mut u = vec![0.0f64; x.n * c];
    for row in u.chunks_mut(c) {
        let mut total = 0.0;
        for v in row.iter_mut() {
            *v = rng.random_range(0.01..1.0);
            total += *v;
        }
        for v in row.iter_mut() {
            *v /= total;
        }
    }

    let mut centers = vec![0.0; c * x.d];
    let mut objective = Vec::new();
    let exponent = 2.0 / (fuzzifier - 1.0);
    for _ in 0..max_iters {
        // centers from memberships
        for k in 0..c {
            let mut denom = 0.0f64;
            let mut num = vec![0.0; x.d];
            for i in 0..x.n {
                let w = u[i * c + k].powf(fuzzifier);
                denom += w;
                for (nj, xj) in num.iter_mut().zip(x.row(i)) {
                    *nj += w * xj;
                }
            }
            for j in 0..x.d {
                centers[k * x.d + j] = num[j] / denom.max(1e-300);
            }
        }
        // memberships from centers
        let mut obj = 0.0;
        for i in 0..x.n {
            let row = x.row(i);
            let dists: Vec<f64> = (0..c)
                .map(|k| sq_dist(row, &centers[k * x.d..(k + 1) * x.d]))
                .collect();
            if let Some(zero) = dists.iter().position(|&d| d < 1e-300) {
                for k in 0..c {
                    u[i * c + k] = if k == zero { 1.0 } else { 0.0 };
                }
                continue;
            }
            for k in 0..c {
                let mut inv = 0.0;
                for dj in &dists {
                    inv += (dists[k] / dj).powf(exponent / 2.0);
                }
                u[i * c + k] = 1.0 / inv;
            }
            for k in 0..c {
                obj += u[i * c + k].powf(fuzzifier) * dists[k];
            }
        }
        let converged = objective
            .last()
            .is_some_and(|prev: &f64| (prev - obj).abs() < 1e-9 * prev.abs().max(1.0));
        objective.push(obj);
        if converged {
            break;
        }
    }
    Ok((centers, u, objective))
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Memberships of new points with respect to fitted centers.
pub fn fcm_memberships(centers: &[f64], c: usize, d: usize, row: &[f64], fuzzifier: f64) -> Vec<f64> {
    let exponent = 2.0 / (fuzzifier - 1.0);
    let dists: Vec<f64> = (0..c)
        .map(|k| sq_dist(row, &centers[k * d..(k + 1) * d]))
        .collect();
    if let Some(zero) = dists.iter().position(|&v| v < 1e-300) {
        return (0..c).map(|k| if k == zero { 1.0 } else { 0.0 }).collect();
    }
    (0..c)
        .map(|k| {
            let mut inv = 0.0;
            for dj in &dists {
                inv += (dists[k] / dj).powf(exponent / 2.0);
            }
            1.0 / inv
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct NfcmParams {
    pub centers: Vec<f64>,
    pub c: usize,
    pub d: usize,
    pub fuzzifier: f64,
    pub mlp: MlpParams,
}

fn augment(x: &Samples, centers: &[f64], c: usize, fuzzifier: f64) -> Samples {
    let d_aug = x.d + c;
    let mut out = Vec::with_capacity(x.n * d_aug);
    for i in 0..x.n {
        let row = x.row(i);
        out.extend_from_slice(row);
        out.extend(fcm_memberships(centers, c, x.d, row, fuzzifier));
    }
    Samples {
        x: out,
        n: x.n,
        d: d_aug,
    }
}

pub(crate) fn train_nfcm(
    x: &Samples,
    y: &[u32],
    h: &Hyperparams,
    seed: u64,
) -> Result<(NfcmParams, Vec<f64>)> {
    let c = h.fcm_clusters.min(x.n);
    let (centers, _, mut trace) = fuzzy_c_means(
        x,
        c,
        h.fcm_fuzzifier,
        derive_seed(seed, &["nfcm", "fcm"]),
        200,
    )?;
    let augmented = augment(x, &centers, c, h.fcm_fuzzifier);
    let (net, mlp_trace) = mlp::train(ClassifierKind::Mlp2Tg, &augmented, y, h, seed)?;
    trace.extend(mlp_trace);
    Ok((
        NfcmParams {
            centers,
            c,
            d: x.d,
            fuzzifier: h.fcm_fuzzifier,
            mlp: net,
        },
        trace,
    ))
}

pub(crate) fn decision_values(p: &NfcmParams, x: &Samples) -> Vec<f64> {
    (0..x.n)
        .map(|i| {
            let row = x.row(i);
            let mut augmented = row.to_vec();
            augmented.extend(fcm_memberships(&p.centers, p.c, p.d, row, p.fuzzifier));
            p.mlp.forward(&augmented) - 0.5
        })
        .collect()
}
