//! Group 4 — signal energy in frequency bands.
//!
//! Periodogram energy per channel and band: the four classic EEG bands
//! (delta 0.5–4, theta 4–8, alpha 8–13, beta 13–22 Hz) plus contiguous
//! 2 Hz fine bins tiled over 0.5–45 Hz, so "energy around 10 Hz"-style
//! findings are expressible. A band [low, high) collects the bins with
//! low <= f < high; `high == fs/2` additionally takes the Nyquist bin,
//! so a disjoint cover of [0, fs/2] reproduces the total energy.

use crate::error::{Error, Result};
use crate::features::spectrum::periodogram_power;
use crate::features::{EnergyConfig, FeatureDescriptor, FeatureGroup, TrialShape};
use crate::signal::Trial;

/// The band list actually emitted: configured classic bands followed by
/// full-width fine bins inside `fine_range`.
pub fn band_layout(cfg: &EnergyConfig) -> Vec<(f64, f64)> {
    let mut bands = cfg.bands.clone();
    if cfg.fine_bin_hz > 0.0 {
        let (lo, hi) = cfg.fine_range;
        let mut start = lo;
        while start + cfg.fine_bin_hz <= hi + 1e-9 {
            bands.push((start, start + cfg.fine_bin_hz));
            start += cfg.fine_bin_hz;
        }
    }
    bands
}

fn fmt_hz(v: f64) -> String {
    if v == v.trunc() {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

pub(crate) fn descriptors(shape: TrialShape, cfg: &EnergyConfig, out: &mut Vec<FeatureDescriptor>) {
    let bands = band_layout(cfg);
    for c in 0..shape.n_channels {
        for &(lo, hi) in &bands {
            out.push(FeatureDescriptor::new(
                FeatureGroup::Energy,
                "band_energy",
                vec![c],
                &[("band", format!("{}-{}", fmt_hz(lo), fmt_hz(hi)))],
            ));
        }
    }
}

pub(crate) fn extract(trial: &Trial, cfg: &EnergyConfig, out: &mut Vec<f64>) -> Result<()> {
    let bands = band_layout(cfg);
    band_energy_into(trial, &bands, out)
}

/// Energies for an explicit band list, channel-major.
pub fn band_energy(trial: &Trial, bands: &[(f64, f64)]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(trial.n_channels() * bands.len());
    band_energy_into(trial, bands, &mut out)?;
    Ok(out)
}

fn band_energy_into(trial: &Trial, bands: &[(f64, f64)], out: &mut Vec<f64>) -> Result<()> {
    let nyquist = trial.fs / 2.0;
    for &(lo, hi) in bands {
        if !(lo >= 0.0 && lo < hi && hi <= nyquist + 1e-9) {
            return Err(Error::domain(format!(
                "band {lo}-{hi} Hz outside [0, {nyquist}]"
            )));
        }
    }
    let n = trial.window_len();
    let bin_hz = trial.fs / n as f64;
    for ch in &trial.samples {
        let power = periodogram_power(ch);
        for &(lo, hi) in bands {
            let mut e = 0.0;
            for (k, p) in power.iter().enumerate() {
                let f = k as f64 * bin_hz;
                let in_band = (f >= lo - 1e-12 && f < hi - 1e-12)
                    || ((hi - nyquist).abs() < 1e-9 && (f - nyquist).abs() < 1e-12);
                if in_band {
                    e += p;
                }
            }
            out.push(e);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::test_util::{noise_trial, sine_trial};

    #[test]
    fn default_layout_contains_classic_bands_and_832_columns_for_32ch() {
        let cfg = EnergyConfig::default();
        let bands = band_layout(&cfg);
        for classic in [(0.5, 4.0), (4.0, 8.0), (8.0, 13.0), (13.0, 22.0)] {
            assert!(bands.contains(&classic), "missing {classic:?}");
        }
        // 4 classic + 22 fine bins of 2 Hz inside [0.5, 45)
        assert_eq!(bands.len(), 26);
        let shape = TrialShape {
            n_channels: 32,
            window_len: 128,
            fs: 128.0,
        };
        let mut descs = Vec::new();
        descriptors(shape, &cfg, &mut descs);
        assert_eq!(descs.len(), 832);
    }

    #[test]
    fn pure_alpha_tone_concentrates_in_alpha_band() {
        let trial = sine_trial(1, 128, 128.0, 10.0);
        let e = band_energy(&trial, &[(8.0, 13.0)]).unwrap();
        let total: f64 = trial.samples[0].iter().map(|v| v * v).sum();
        assert!(e[0] / total >= 0.99, "alpha fraction {}", e[0] / total);
    }

    #[test]
    fn disjoint_cover_sums_to_total_energy() {
        let trial = noise_trial(2, 128, 128.0, 21);
        let cover: Vec<(f64, f64)> = (0..64).map(|i| (i as f64, (i + 1) as f64)).collect();
        let e = band_energy(&trial, &cover).unwrap();
        for (c, ch) in trial.samples.iter().enumerate() {
            let total: f64 = ch.iter().map(|v| v * v).sum();
            let sum: f64 = e[c * 64..(c + 1) * 64].iter().sum();
            assert!(
                (sum - total).abs() / total < 1e-6,
                "channel {c}: cover {sum} vs total {total}"
            );
        }
    }

    #[test]
    fn band_outside_nyquist_rejected() {
        let trial = noise_trial(1, 128, 128.0, 3);
        assert!(band_energy(&trial, &[(10.0, 70.0)]).is_err());
        assert!(band_energy(&trial, &[(13.0, 8.0)]).is_err());
    }

    #[test]
    fn zero_noise_sine_band_membership_via_synth() {
        // synthetic recording route: a clean 20 Hz tone lands in beta
        use crate::signal::{synth_recording, ChannelComponent, ClassModel, SynthSpec};
        let spec = SynthSpec {
            fs: 128.0,
            n_channels: 1,
            block_s: 1.0,
            blocks_per_class: 1,
            classes: vec![ClassModel {
                label: 0,
                components: vec![ChannelComponent::Sine {
                    freq_hz: 20.0,
                    amplitude: 1.0,
                    channels: None,
                }],
            }],
        };
        let rec = synth_recording(&spec, 5).unwrap();
        let trial = Trial {
            samples: rec.samples,
            fs: rec.fs,
            label: 0,
            origin: (0, 0),
        };
        let e = band_energy(&trial, &[(13.0, 22.0), (8.0, 13.0)]).unwrap();
        let total: f64 = trial.samples[0].iter().map(|v| v * v).sum();
        assert!(e[0] / total >= 0.99);
        assert!(e[1] / total <= 0.01);
    }
}
