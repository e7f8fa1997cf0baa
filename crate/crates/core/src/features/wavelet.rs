//! Group 6 — discrete wavelet transform coefficients.
//!
//! Periodized orthonormal DWT for Haar and Daubechies 2–5. The emitted
//! vector per channel is [approx(L), detail(L), detail(L-1), ...,
//! detail(1)], the standard pyramid layout. Windows whose length is not
//! divisible by 2^levels are extended periodically to the next multiple
//! before analysis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureDescriptor, FeatureGroup, TrialShape, WaveletConfig};
use crate::signal::Trial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveletFamily {
    Haar,
    Db2,
    Db3,
    Db4,
    Db5,
}

impl WaveletFamily {
    pub fn name(&self) -> &'static str {
        match self {
            WaveletFamily::Haar => "haar",
            WaveletFamily::Db2 => "db2",
            WaveletFamily::Db3 => "db3",
            WaveletFamily::Db4 => "db4",
            WaveletFamily::Db5 => "db5",
        }
    }

    /// Orthonormal scaling (low-pass) filter taps.
    pub fn lowpass(&self) -> Vec<f64> {
        match self {
            WaveletFamily::Haar => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                vec![s, s]
            }
            WaveletFamily::Db2 => {
                let s3 = 3.0f64.sqrt();
                let d = 4.0 * 2.0f64.sqrt();
                vec![(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d]
            }
            WaveletFamily::Db3 => vec![
                0.332_670_552_950_956_9,
                0.806_891_509_313_338_8,
                0.459_877_502_119_331_3,
                -0.135_011_020_010_390_84,
                -0.085_441_273_882_241_49,
                0.035_226_291_882_100_656,
            ],
            WaveletFamily::Db4 => vec![
                0.230_377_813_308_855_23,
                0.714_846_570_552_541_5,
                0.630_880_767_929_590_4,
                -0.027_983_769_416_983_85,
                -0.187_034_811_718_881_14,
                0.030_841_381_835_986_965,
                0.032_883_011_666_982_945,
                -0.010_597_401_784_997_278,
            ],
            WaveletFamily::Db5 => vec![
                0.160_102_397_974_125,
                0.603_829_269_797_472_9,
                0.724_308_528_438_574_4,
                0.138_428_145_901_103_42,
                -0.242_294_887_066_190_15,
                -0.032_244_869_585_029_52,
                0.077_571_493_840_065_15,
                -0.006_241_490_213_011_705,
                -0.012_580_751_999_015_526,
                0.003_335_725_285_001_549,
            ],
        }
    }

    /// Quadrature mirror high-pass: g[m] = (-1)^m h[L-1-m].
    pub fn highpass(&self) -> Vec<f64> {
        let h = self.lowpass();
        let l = h.len();
        (0..l)
            .map(|m| {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                sign * h[l - 1 - m]
            })
            .collect()
    }
}

/// Multi-level periodized analysis. Returns the pyramid
/// [approx(L), detail(L), ..., detail(1)].
pub fn dwt(x: &[f64], family: WaveletFamily, levels: usize) -> Vec<f64> {
    let h = family.lowpass();
    let g = family.highpass();
    let mut approx = x.to_vec();
    let mut details: Vec<Vec<f64>> = Vec::with_capacity(levels);
    for _ in 0..levels {
        let n = approx.len();
        let half = n / 2;
        let mut a_next = vec![0.0; half];
        let mut d_next = vec![0.0; half];
        for k in 0..half {
            let mut a = 0.0;
            let mut d = 0.0;
            for (m, (&hm, &gm)) in h.iter().zip(g.iter()).enumerate() {
                let idx = (2 * k + m) % n;
                a += hm * approx[idx];
                d += gm * approx[idx];
            }
            a_next[k] = a;
            d_next[k] = d;
        }
        details.push(d_next);
        approx = a_next;
    }
    let mut out = approx;
    for d in details.into_iter().rev() {
        out.extend(d);
    }
    out
}

/// Inverse of [`dwt`]: the synthesis operator is the transpose of the
/// orthonormal analysis operator.
pub fn idwt(coeffs: &[f64], family: WaveletFamily, levels: usize) -> Vec<f64> {
    let h = family.lowpass();
    let g = family.highpass();
    let n = coeffs.len();
    let deepest = n >> levels;
    let mut approx = coeffs[..deepest].to_vec();
    let mut offset = deepest;
    for level in (1..=levels).rev() {
        let half = n >> level;
        let detail = &coeffs[offset..offset + half];
        let out_len = half * 2;
        let mut next = vec![0.0; out_len];
        for k in 0..half {
            for (m, (&hm, &gm)) in h.iter().zip(g.iter()).enumerate() {
                let idx = (2 * k + m) % out_len;
                next[idx] += hm * approx[k] + gm * detail[k];
            }
        }
        approx = next;
        offset += half;
    }
    approx
}

/// Coefficient count per channel for a given window length.
fn padded_len(window_len: usize, levels: usize) -> usize {
    let block = 1usize << levels;
    window_len.div_ceil(block) * block
}

pub(crate) fn descriptors(shape: TrialShape, cfg: &WaveletConfig, out: &mut Vec<FeatureDescriptor>) {
    let n = padded_len(shape.window_len, cfg.levels);
    for c in 0..shape.n_channels {
        for family in &cfg.families {
            let deepest = n >> cfg.levels;
            for idx in 0..deepest {
                out.push(FeatureDescriptor::new(
                    FeatureGroup::Wavelet,
                    family.name(),
                    vec![c],
                    &[
                        ("level", cfg.levels.to_string()),
                        ("kind", "approx".into()),
                        ("idx", idx.to_string()),
                    ],
                ));
            }
            for level in (1..=cfg.levels).rev() {
                let len = n >> level;
                for idx in 0..len {
                    out.push(FeatureDescriptor::new(
                        FeatureGroup::Wavelet,
                        family.name(),
                        vec![c],
                        &[
                            ("level", level.to_string()),
                            ("kind", "detail".into()),
                            ("idx", idx.to_string()),
                        ],
                    ));
                }
            }
        }
    }
}

pub(crate) fn extract(trial: &Trial, cfg: &WaveletConfig, out: &mut Vec<f64>) -> Result<()> {
    let coeffs = wavelet_coeffs(trial, &cfg.families, cfg.levels)?;
    out.extend(coeffs);
    Ok(())
}

/// Full DWT pyramid per channel and family, channel-major.
pub fn wavelet_coeffs(
    trial: &Trial,
    families: &[WaveletFamily],
    levels: usize,
) -> Result<Vec<f64>> {
    if levels == 0 {
        return Err(Error::domain("wavelet decomposition needs at least 1 level"));
    }
    if families.is_empty() {
        return Err(Error::domain("no wavelet families requested"));
    }
    let n = padded_len(trial.window_len(), levels);
    if (n >> levels) == 0 {
        return Err(Error::domain(format!(
            "{levels} levels is too deep for a {}-sample window",
            trial.window_len()
        )));
    }
    let mut out = Vec::with_capacity(trial.n_channels() * families.len() * n);
    for ch in &trial.samples {
        let padded: Vec<f64> = if ch.len() == n {
            ch.clone()
        } else {
            (0..n).map(|i| ch[i % ch.len()]).collect()
        };
        for family in families {
            out.extend(dwt(&padded, *family, levels));
        }
    }
    Ok(out)
}
