//! Univariate class-separability measures. All three are invariant
//! under affine rescaling of the feature column, and all cap their
//! degenerate zero-denominator cases at a large sentinel rather than
//! overflowing.

use crate::error::{Error, Result};

/// Sentinel for separable-but-degenerate columns (zero within-class
/// spread with distinct means).
pub const SENTINEL: f64 = 1e6;

const VAR_FLOOR: f64 = 1e-24;

struct ClassStats {
    n: [usize; 2],
    mean: [f64; 2],
    /// Population (1/n) variances.
    var: [f64; 2],
}

fn class_stats(col: &[f64], labels: &[u32]) -> Result<ClassStats> {
    if col.len() != labels.len() {
        return Err(Error::structural("column and labels differ in length"));
    }
    let mut n = [0usize; 2];
    let mut sum = [0.0f64; 2];
    for (&v, &l) in col.iter().zip(labels) {
        if l > 1 {
            return Err(Error::domain("separability measures need labels in {0, 1}"));
        }
        n[l as usize] += 1;
        sum[l as usize] += v;
    }
    if n[0] < 2 || n[1] < 2 {
        return Err(Error::domain(
            "both classes need at least 2 samples for separability measures",
        ));
    }
    let mean = [sum[0] / n[0] as f64, sum[1] / n[1] as f64];
    let mut var = [0.0f64; 2];
    for (&v, &l) in col.iter().zip(labels) {
        let c = l as usize;
        var[c] += (v - mean[c]) * (v - mean[c]);
    }
    var[0] /= n[0] as f64;
    var[1] /= n[1] as f64;
    Ok(ClassStats { n, mean, var })
}

/// (mu1 - mu2)^2 / pooled variance, class-size-weighted pooling.
pub fn mahalanobis_1d(col: &[f64], labels: &[u32]) -> Result<f64> {
    let s = class_stats(col, labels)?;
    let gap = s.mean[0] - s.mean[1];
    let pooled =
        (s.n[0] as f64 * s.var[0] + s.n[1] as f64 * s.var[1]) / (s.n[0] + s.n[1]) as f64;
    if pooled > 0.0 {
        Ok((gap * gap / pooled).min(SENTINEL))
    } else if gap == 0.0 {
        Ok(0.0)
    } else {
        Ok(SENTINEL)
    }
}

/// Gaussian Bhattacharyya distance:
/// (mu1-mu2)^2 / (4 (s1^2+s2^2)) + 0.5 ln((s1^2+s2^2)/(2 s1 s2)).
pub fn bhattacharyya_1d(col: &[f64], labels: &[u32]) -> Result<f64> {
    let s = class_stats(col, labels)?;
    // scale-aware variance floor keeps the measure affine-invariant
    let scale = (s.var[0] + s.var[1]).max(s.mean[0].abs() + s.mean[1].abs()).max(1.0);
    let floor = VAR_FLOOR * scale * scale;
    let v1 = s.var[0].max(floor);
    let v2 = s.var[1].max(floor);
    let gap = s.mean[0] - s.mean[1];
    let d = 0.25 * gap * gap / (v1 + v2) + 0.5 * ((v1 + v2) / (2.0 * (v1 * v2).sqrt())).ln();
    Ok(d.min(SENTINEL))
}

/// One-dimensional scatter ratio S_b / S_w with
/// S_b = sum_c n_c (mu_c - mu)^2 / N and S_w = sum_c n_c var_c / N.
pub fn scatter_1d(col: &[f64], labels: &[u32]) -> Result<f64> {
    let s = class_stats(col, labels)?;
    let n_total = (s.n[0] + s.n[1]) as f64;
    let grand = (s.n[0] as f64 * s.mean[0] + s.n[1] as f64 * s.mean[1]) / n_total;
    let s_b = (s.n[0] as f64 * (s.mean[0] - grand).powi(2)
        + s.n[1] as f64 * (s.mean[1] - grand).powi(2))
        / n_total;
    let s_w = (s.n[0] as f64 * s.var[0] + s.n[1] as f64 * s.var[1]) / n_total;
    if s_w > 0.0 {
        Ok((s_b / s_w).min(SENTINEL))
    } else if s_b == 0.0 {
        Ok(0.0)
    } else {
        Ok(SENTINEL)
    }
}
