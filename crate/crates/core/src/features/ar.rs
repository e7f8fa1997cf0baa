//! Group 3 — autoregressive model coefficients via Burg's method.
//!
//! Coefficients follow the predictor convention
//! `x[n] = a1 x[n-1] + ... + ap x[n-p] + e[n]`, so a synthetic AR
//! process is recovered with the same signs it was generated with.
//! Burg's recursion keeps every reflection coefficient inside (-1, 1),
//! which guarantees a stable all-pole model.

use crate::error::{Error, Result};
use crate::features::{ArConfig, FeatureDescriptor, FeatureGroup, TrialShape};
use crate::signal::Trial;

pub(crate) fn descriptors(shape: TrialShape, cfg: &ArConfig, out: &mut Vec<FeatureDescriptor>) {
    for c in 0..shape.n_channels {
        for &order in &cfg.orders {
            for idx in 1..=order {
                out.push(FeatureDescriptor::new(
                    FeatureGroup::Ar,
                    "ar_coef",
                    vec![c],
                    &[("order", order.to_string()), ("idx", idx.to_string())],
                ));
            }
        }
    }
}

/// AR coefficients of one order for every channel, with descriptors.
pub fn fit_ar(trial: &Trial, order: usize) -> Result<(Vec<f64>, Vec<FeatureDescriptor>)> {
    let cfg = ArConfig {
        orders: vec![order],
    };
    let mut values = Vec::new();
    let mut degenerate = 0;
    extract(trial, &cfg, &mut values, &mut degenerate)?;
    let mut descs = Vec::new();
    descriptors(TrialShape::of(trial), &cfg, &mut descs);
    Ok((values, descs))
}

pub(crate) fn extract(
    trial: &Trial,
    cfg: &ArConfig,
    out: &mut Vec<f64>,
    degenerate: &mut usize,
) -> Result<()> {
    let n = trial.window_len();
    for &order in &cfg.orders {
        if n <= 2 * order {
            return Err(Error::domain(format!(
                "AR order {order} needs more than {} samples, window has {n}",
                2 * order
            )));
        }
    }
    for ch in &trial.samples {
        for &order in &cfg.orders {
            match burg(ch, order) {
                Some(coeffs) => out.extend_from_slice(&coeffs),
                None => {
                    *degenerate += 1;
                    out.extend(std::iter::repeat(0.0).take(order));
                }
            }
        }
    }
    Ok(())
}

/// Burg's method. Returns predictor coefficients (see module docs) or
/// `None` for a zero-variance input.
pub fn burg(x: &[f64], order: usize) -> Option<Vec<f64>> {
    let n = x.len();
    assert!(n > order, "window too short for requested order");
    let mean = x.iter().sum::<f64>() / n as f64;
    let variance = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    if variance <= 0.0 {
        return None;
    }

    // prediction-error filter a[0..m], a[0] = 1 (sign convention of
    // A(z) = 1 + sum a_i z^-i); predictor coefficients are -a_i.
    let mut a = vec![0.0f64; order + 1];
    a[0] = 1.0;
    let mut fwd = x.to_vec(); // forward prediction error
    let mut bwd = x.to_vec(); // backward prediction error

    for m in 1..=order {
        // reflection coefficient from errors at offset [m..n) / [m-1..n-1)
        let mut num = 0.0;
        let mut den = 0.0;
        for t in m..n {
            num += fwd[t] * bwd[t - 1];
            den += fwd[t] * fwd[t] + bwd[t - 1] * bwd[t - 1];
        }
        let k = if den > 0.0 { -2.0 * num / den } else { 0.0 };

        // update filter: a'_i = a_i + k a_{m-i}
        let prev = a.clone();
        for i in 1..=m {
            a[i] = prev[i] + k * prev[m - i];
        }

        // update error sequences in place (backward pass order matters)
        for t in (m..n).rev() {
            let f = fwd[t];
            let b = bwd[t - 1];
            fwd[t] = f + k * b;
            bwd[t] = b + k * f;
        }
    }

    Some(a[1..].iter().map(|&v| -v).collect())
}

/// Stability check by the step-down (Schur-Cohn) recursion: the model
/// is stable iff every reflection coefficient has magnitude < 1. This
/// route is independent of Burg's construction.
pub fn is_stable_ar(predictor_coeffs: &[f64]) -> bool {
    let p = predictor_coeffs.len();
    // back to error-filter convention
    let mut a: Vec<f64> = predictor_coeffs.iter().map(|&v| -v).collect();
    for m in (1..=p).rev() {
        let k = a[m - 1];
        if k.abs() >= 1.0 {
            return false;
        }
        if m == 1 {
            break;
        }
        let denom = 1.0 - k * k;
        let prev = a.clone();
        for i in 0..m - 1 {
            a[i] = (prev[i] - k * prev[m - 2 - i]) / denom;
        }
    }
    true
}
