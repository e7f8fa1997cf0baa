//! Gaussian Bayes classifier with full per-class covariance.
//!
//! Each class gets a mean vector and a ridge-regularized covariance
//! (lambda * tr(Sigma)/d added to the diagonal); the decision is the
//! maximum log posterior with class-frequency priors.

use serde::{Deserialize, Serialize};

use crate::classifiers::Samples;
use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BayesParams {
    pub d: usize,
    pub means: [Vec<f64>; 2],
    /// Cholesky factors of the regularized class covariances.
    pub chol: [Vec<f64>; 2],
    pub logdet: [f64; 2],
    pub log_priors: [f64; 2],
}

pub(crate) fn train(x: &Samples, y: &[u32], ridge: f64) -> Result<BayesParams> {
    let d = x.d;
    let mut means = [Vec::new(), Vec::new()];
    let mut chol = [Vec::new(), Vec::new()];
    let mut logdet = [0.0; 2];
    let mut log_priors = [0.0; 2];
    for class in 0..2u32 {
        let rows: Vec<&[f64]> = (0..x.n).filter(|&i| y[i] == class).map(|i| x.row(i)).collect();
        if rows.len() < 2 {
            return Err(Error::Training {
                classifier: "bayes".into(),
                reason: format!("class {class} has fewer than 2 samples"),
            });
        }
        log_priors[class as usize] = (rows.len() as f64 / x.n as f64).ln();
        let (mean, mut cov) = linalg::mean_and_covariance(&rows, d, ridge.max(1e-12));
        // escalate the ridge until the factorization succeeds
        let mut factor = linalg::cholesky(&cov, d);
        let tr: f64 = (0..d).map(|i| cov[i * d + i]).sum::<f64>().max(1e-300);
        let mut bump = 1e-6 * tr / d as f64;
        while factor.is_none() {
            for i in 0..d {
                cov[i * d + i] += bump;
            }
            bump *= 10.0;
            factor = linalg::cholesky(&cov, d);
            if bump > 1e9 * tr {
                return Err(Error::Training {
                    classifier: "bayes".into(),
                    reason: "covariance could not be regularized".into(),
                });
            }
        }
        let l = factor.unwrap();
        logdet[class as usize] = linalg::cholesky_logdet(&l, d);
        means[class as usize] = mean;
        chol[class as usize] = l;
    }
    Ok(BayesParams {
        d,
        means,
        chol,
        logdet,
        log_priors,
    })
}

/// log p(class=1 | x) - log p(class=0 | x), up to the shared evidence.
pub(crate) fn decision_values(p: &BayesParams, x: &Samples) -> Vec<f64> {
    (0..x.n)
        .map(|i| {
            let row = x.row(i);
            log_unnormalized_posterior(p, row, 1) - log_unnormalized_posterior(p, row, 0)
        })
        .collect()
}

fn log_unnormalized_posterior(p: &BayesParams, row: &[f64], class: usize) -> f64 {
    let d = p.d;
    let centered: Vec<f64> = row
        .iter()
        .zip(p.means[class].iter())
        .map(|(a, b)| a - b)
        .collect();
    // Mahalanobis term via one triangular solve: L z = (x - mu)
    let l = &p.chol[class];
    let mut z = vec![0.0; d];
    for i in 0..d {
        let mut sum = centered[i];
        for k in 0..i {
            sum -= l[i * d + k] * z[k];
        }
        z[i] = sum / l[i * d + i];
    }
    let maha: f64 = z.iter().map(|v| v * v).sum();
    p.log_priors[class] - 0.5 * (p.logdet[class] + maha)
}
