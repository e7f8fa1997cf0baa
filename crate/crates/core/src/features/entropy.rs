//! Group 2 — entropy and complexity features.
//!
//! Per channel: Shannon, Renyi and Tsallis entropies over a fixed-bin
//! amplitude histogram, Lempel-Ziv (LZ76) complexity of the median-
//! binarized sequence (raw phrase count and normalized), and
//! approximate entropy. Across channels: a Gaussian approximation of
//! neural complexity from the channel covariance.

use crate::error::{Error, Result};
use crate::features::{EntropyConfig, FeatureDescriptor, FeatureGroup, TrialShape};
use crate::linalg;
use crate::signal::Trial;

pub(crate) fn descriptors(
    shape: TrialShape,
    cfg: &EntropyConfig,
    out: &mut Vec<FeatureDescriptor>,
) {
    let g = FeatureGroup::Entropy;
    for c in 0..shape.n_channels {
        out.push(FeatureDescriptor::new(
            g,
            "shannon",
            vec![c],
            &[("bins", cfg.histogram_bins.to_string())],
        ));
        for &q in &cfg.q_grid {
            out.push(FeatureDescriptor::new(
                g,
                "renyi",
                vec![c],
                &[("q", fmt_q(q)), ("bins", cfg.histogram_bins.to_string())],
            ));
        }
        for &q in &cfg.q_grid {
            out.push(FeatureDescriptor::new(
                g,
                "tsallis",
                vec![c],
                &[("q", fmt_q(q)), ("bins", cfg.histogram_bins.to_string())],
            ));
        }
        out.push(FeatureDescriptor::new(g, "lz76", vec![c], &[]));
        out.push(FeatureDescriptor::new(g, "lz76_norm", vec![c], &[]));
        out.push(FeatureDescriptor::new(
            g,
            "apen",
            vec![c],
            &[
                ("m", cfg.apen_m.to_string()),
                ("r_mult", fmt_q(cfg.apen_r_mult)),
            ],
        ));
    }
    out.push(FeatureDescriptor::new(
        g,
        "neural_complexity",
        (0..shape.n_channels).collect(),
        &[],
    ));
}

/// All entropy features of one trial with their descriptors.
pub fn extract_entropy(
    trial: &Trial,
    cfg: &EntropyConfig,
) -> Result<(Vec<f64>, Vec<FeatureDescriptor>)> {
    let mut values = Vec::new();
    let mut degenerate = 0;
    extract(trial, cfg, &mut values, &mut degenerate)?;
    let mut descs = Vec::new();
    descriptors(TrialShape::of(trial), cfg, &mut descs);
    Ok((values, descs))
}

pub(crate) fn extract(
    trial: &Trial,
    cfg: &EntropyConfig,
    out: &mut Vec<f64>,
    degenerate: &mut usize,
) -> Result<()> {
    let n = trial.window_len();
    if n < 32 {
        return Err(Error::domain(format!(
            "entropy features need a window of at least 32 samples, got {n}"
        )));
    }
    if let Some(q) = cfg.q_grid.iter().find(|q| (**q - 1.0).abs() < 1e-6) {
        return Err(Error::domain(format!(
            "q = {q} is too close to 1; the q->1 limit is Shannon entropy, reported separately"
        )));
    }
    if cfg.histogram_bins < 2 {
        return Err(Error::domain("histogram needs at least 2 bins"));
    }

    for ch in &trial.samples {
        let probs = histogram_probs(ch, cfg.histogram_bins);
        out.push(shannon(&probs));
        for &q in &cfg.q_grid {
            out.push(renyi(&probs, q));
        }
        for &q in &cfg.q_grid {
            out.push(tsallis(&probs, q));
        }
        let binary = median_binarize(ch);
        let phrases = lz76_phrase_count(&binary);
        out.push(phrases as f64);
        out.push(phrases as f64 * (n as f64).log2() / n as f64);
        let r = cfg.apen_r_mult * pop_std(ch);
        out.push(approximate_entropy(ch, cfg.apen_m, r));
    }
    out.push(neural_complexity(trial, degenerate));
    Ok(())
}

fn fmt_q(q: f64) -> String {
    if q == q.trunc() {
        format!("{}", q as i64)
    } else {
        format!("{q}")
    }
}

/// Probabilities of the occupied bins of a B-bin equal-width histogram
/// over [min, max]. A constant channel occupies a single bin.
pub fn histogram_probs(x: &[f64], bins: usize) -> Vec<f64> {
    let min = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(max > min) {
        return vec![1.0];
    }
    let mut counts = vec![0usize; bins];
    let scale = bins as f64 / (max - min);
    for &v in x {
        let b = (((v - min) * scale) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let n = x.len() as f64;
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| c as f64 / n)
        .collect()
}

/// Shannon entropy, natural log, zero-probability bins excluded.
pub fn shannon(probs: &[f64]) -> f64 {
    -probs.iter().map(|&p| p * p.ln()).sum::<f64>()
}

/// Renyi entropy H_q = ln(sum p^q) / (1 - q), q != 1.
pub fn renyi(probs: &[f64], q: f64) -> f64 {
    let s: f64 = probs.iter().map(|&p| p.powf(q)).sum();
    s.ln() / (1.0 - q)
}

/// Tsallis entropy S_q = (1 - sum p^q) / (q - 1), q != 1.
pub fn tsallis(probs: &[f64], q: f64) -> f64 {
    let s: f64 = probs.iter().map(|&p| p.powf(q)).sum();
    (1.0 - s) / (q - 1.0)
}

fn median_binarize(x: &[f64]) -> Vec<u8> {
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if sorted.len() % 2 == 0 {
        0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
    } else {
        sorted[sorted.len() / 2]
    };
    x.iter().map(|&v| u8::from(v > median)).collect()
}

/// LZ76 phrase count of a binary sequence (Kaspar-Schuster scan).
pub fn lz76_phrase_count(s: &[u8]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let mut c = 1usize;
    let mut l = 1usize;
    let mut i = 0usize;
    let mut k = 1usize;
    let mut k_max = 1usize;
    loop {
        if s[i + k - 1] == s[l + k - 1] {
            k += 1;
            if l + k > n {
                c += 1;
                break;
            }
        } else {
            if k > k_max {
                k_max = k;
            }
            i += 1;
            if i == l {
                c += 1;
                l += k_max;
                if l + 1 > n {
                    break;
                }
                i = 0;
                k = 1;
                k_max = 1;
            } else {
                k = 1;
            }
        }
    }
    c
}

/// Approximate entropy ApEn(m, r) with Chebyshev distance and
/// self-matches included; exactly 0 for constant signals.
pub fn approximate_entropy(x: &[f64], m: usize, r: f64) -> f64 {
    let n = x.len();
    if n < m + 2 {
        return 0.0;
    }
    let phi = |m: usize| -> f64 {
        let count = n - m + 1;
        let mut acc = 0.0;
        for i in 0..count {
            let mut matches = 0usize;
            'outer: for j in 0..count {
                for t in 0..m {
                    if (x[i + t] - x[j + t]).abs() > r {
                        continue 'outer;
                    }
                }
                matches += 1;
            }
            acc += ((matches as f64) / count as f64).ln();
        }
        acc / count as f64
    };
    phi(m) - phi(m + 1)
}

/// Gaussian neural complexity: sum over channels of the mutual
/// information between one channel and the rest, from covariance
/// log-determinants. Falls back to 0 for degenerate covariances.
fn neural_complexity(trial: &Trial, degenerate: &mut usize) -> f64 {
    let d = trial.n_channels();
    if d < 2 {
        return 0.0;
    }
    let rows: Vec<Vec<f64>> = (0..trial.window_len())
        .map(|t| trial.samples.iter().map(|ch| ch[t]).collect())
        .collect();
    let row_refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    let (_, cov) = linalg::mean_and_covariance(&row_refs, d, 1e-8);
    let Some(l_full) = linalg::cholesky(&cov, d) else {
        *degenerate += 1;
        return 0.0;
    };
    let logdet_full = linalg::cholesky_logdet(&l_full, d);
    let mut total = 0.0;
    for i in 0..d {
        let m = d - 1;
        let mut minor = vec![0.0; m * m];
        let mut ri = 0;
        for r in 0..d {
            if r == i {
                continue;
            }
            let mut ci = 0;
            for c in 0..d {
                if c == i {
                    continue;
                }
                minor[ri * m + ci] = cov[r * d + c];
                ci += 1;
            }
            ri += 1;
        }
        let Some(l_minor) = linalg::cholesky(&minor, m) else {
            *degenerate += 1;
            return 0.0;
        };
        let mi = 0.5
            * (cov[i * d + i].ln() + linalg::cholesky_logdet(&l_minor, m) - logdet_full);
        total += mi.max(0.0);
    }
    total
}

fn pop_std(x: &[f64]) -> f64 {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / x.len() as f64).sqrt()
}
