//! Group 5 — DCT-II and DST-I coefficients, orthonormal scaling.

use crate::error::{Error, Result};
use crate::features::{DctDstConfig, FeatureDescriptor, FeatureGroup, TrialShape};
use crate::signal::Trial;

pub(crate) fn descriptors(shape: TrialShape, cfg: &DctDstConfig, out: &mut Vec<FeatureDescriptor>) {
    let k = cfg.k.min(shape.window_len);
    for c in 0..shape.n_channels {
        for i in 0..k {
            out.push(FeatureDescriptor::new(
                FeatureGroup::DctDst,
                "dct",
                vec![c],
                &[("idx", i.to_string())],
            ));
        }
        for i in 0..k {
            out.push(FeatureDescriptor::new(
                FeatureGroup::DctDst,
                "dst",
                vec![c],
                &[("idx", i.to_string())],
            ));
        }
    }
}

pub(crate) fn extract(trial: &Trial, cfg: &DctDstConfig, out: &mut Vec<f64>) -> Result<()> {
    let k = cfg.k.min(trial.window_len());
    let (dct, dst) = dct_dst(trial, k)?;
    debug_assert_eq!(dct.len(), dst.len());
    let per_ch = k;
    for c in 0..trial.n_channels() {
        out.extend_from_slice(&dct[c * per_ch..(c + 1) * per_ch]);
        out.extend_from_slice(&dst[c * per_ch..(c + 1) * per_ch]);
    }
    Ok(())
}

/// First `k` DCT-II and DST-I coefficients per channel, channel-major.
pub fn dct_dst(trial: &Trial, k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = trial.window_len();
    if k == 0 || k > n {
        return Err(Error::domain(format!(
            "coefficient count must be in 1..={n}, got {k}"
        )));
    }
    let mut dct = Vec::with_capacity(trial.n_channels() * k);
    let mut dst = Vec::with_capacity(trial.n_channels() * k);
    for ch in &trial.samples {
        dct.extend(dct2(ch, k));
        dst.extend(dst1(ch, k));
    }
    Ok((dct, dst))
}

/// Orthonormal DCT-II: C[k] = s_k * sum_n x[n] cos(pi (2n+1) k / 2N).
pub fn dct2(x: &[f64], k: usize) -> Vec<f64> {
    let n = x.len();
    let scale0 = (1.0 / n as f64).sqrt();
    let scale = (2.0 / n as f64).sqrt();
    (0..k)
        .map(|ki| {
            let s: f64 = x
                .iter()
                .enumerate()
                .map(|(t, &v)| {
                    v * (std::f64::consts::PI * (2 * t + 1) as f64 * ki as f64
                        / (2 * n) as f64)
                        .cos()
                })
                .sum();
            s * if ki == 0 { scale0 } else { scale }
        })
        .collect()
}

/// Inverse of the orthonormal DCT-II (a DCT-III with matching scaling).
pub fn idct2(coeffs: &[f64], n: usize) -> Vec<f64> {
    let scale0 = (1.0 / n as f64).sqrt();
    let scale = (2.0 / n as f64).sqrt();
    (0..n)
        .map(|t| {
            coeffs
                .iter()
                .enumerate()
                .map(|(ki, &c)| {
                    let s = if ki == 0 { scale0 } else { scale };
                    s * c
                        * (std::f64::consts::PI * (2 * t + 1) as f64 * ki as f64
                            / (2 * n) as f64)
                            .cos()
                })
                .sum()
        })
        .collect()
}

/// Orthonormal DST-I: S[k] = sqrt(2/(N+1)) sum_n x[n] sin(pi (n+1)(k+1)/(N+1)).
/// The transform is involutory: applying it twice recovers the input.
pub fn dst1(x: &[f64], k: usize) -> Vec<f64> {
    let n = x.len();
    let scale = (2.0 / (n + 1) as f64).sqrt();
    (0..k)
        .map(|ki| {
            let s: f64 = x
                .iter()
                .enumerate()
                .map(|(t, &v)| {
                    v * (std::f64::consts::PI * (t + 1) as f64 * (ki + 1) as f64
                        / (n + 1) as f64)
                        .sin()
                })
                .sum();
            s * scale
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::test_util::{constant_trial, noise_trial};

    #[test]
    fn constant_signal_energy_in_dc_coefficient() {
        let c = 3.25;
        let n = 64;
        let trial = constant_trial(1, n, 128.0, c);
        let (dct, _) = dct_dst(&trial, n).unwrap();
        assert!((dct[0] - c * (n as f64).sqrt()).abs() < 1e-9);
        for (i, v) in dct.iter().enumerate().skip(1) {
            assert!(v.abs() < 1e-9, "coefficient {i} = {v}");
        }
    }

    #[test]
    fn full_dct_reconstructs() {
        let trial = noise_trial(1, 128, 128.0, 44);
        let x = &trial.samples[0];
        let coeffs = dct2(x, 128);
        let back = idct2(&coeffs, 128);
        for (a, b) in x.iter().zip(back.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn dst1_is_involutory() {
        let trial = noise_trial(1, 128, 128.0, 45);
        let x = &trial.samples[0];
        let coeffs = dst1(x, 128);
        let back = dst1(&coeffs, 128);
        for (a, b) in x.iter().zip(back.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn transforms_preserve_energy() {
        let trial = noise_trial(1, 96, 128.0, 46);
        let x = &trial.samples[0];
        let energy: f64 = x.iter().map(|v| v * v).sum();
        let e_dct: f64 = dct2(x, 96).iter().map(|v| v * v).sum();
        let e_dst: f64 = dst1(x, 96).iter().map(|v| v * v).sum();
        assert!((energy - e_dct).abs() / energy < 1e-12);
        assert!((energy - e_dst).abs() / energy < 1e-12);
    }

    #[test]
    fn out_of_range_k_rejected() {
        let trial = noise_trial(1, 32, 128.0, 0);
        assert!(dct_dst(&trial, 33).is_err());
        assert!(dct_dst(&trial, 0).is_err());
    }

    #[test]
    fn transform_of_zeros_is_zeros() {
        let trial = constant_trial(1, 32, 128.0, 0.0);
        let (dct, dst) = dct_dst(&trial, 32).unwrap();
        assert!(dct.iter().all(|&v| v == 0.0));
        assert!(dst.iter().all(|&v| v == 0.0));
    }
}
