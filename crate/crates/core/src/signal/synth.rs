//! Synthetic two-class recordings with known ground truth.
//!
//! Used as the oracle source for tests and the planted-signal
//! benchmark: class-dependent sinusoids (fixed or band-hopping), AR
//! processes with known coefficients, and white noise, laid out as
//! alternating task blocks the way cued recording sessions are.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from;
use crate::signal::Recording;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelComponent {
    /// Sinusoid at a fixed frequency; phase redrawn per block+channel.
    Sine {
        freq_hz: f64,
        amplitude: f64,
        #[serde(default)]
        channels: Option<Vec<usize>>,
    },
    /// Sinusoid whose frequency is redrawn uniformly inside a band for
    /// every block+channel. Band content is stable, individual spectral
    /// lines are not.
    BandSine {
        low_hz: f64,
        high_hz: f64,
        amplitude: f64,
        #[serde(default)]
        channels: Option<Vec<usize>>,
    },
    /// Autoregressive process x[n] = sum_i coeffs[i] x[n-i] + e[n].
    Ar {
        coeffs: Vec<f64>,
        noise_sigma: f64,
        #[serde(default)]
        channels: Option<Vec<usize>>,
    },
    /// White Gaussian noise.
    Noise {
        sigma: f64,
        #[serde(default)]
        channels: Option<Vec<usize>>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ClassModel {
    pub label: u32,
    pub components: Vec<ChannelComponent>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SynthSpec {
    pub fs: f64,
    pub n_channels: usize,
    /// Seconds per task block.
    pub block_s: f64,
    /// Task blocks per class, interleaved 0,1,0,1,...
    pub blocks_per_class: usize,
    pub classes: Vec<ClassModel>,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.fs > 0.0) {
            return Err(Error::config("fs", "must be positive"));
        }
        if self.n_channels == 0 {
            return Err(Error::config("n_channels", "must be at least 1"));
        }
        if !(self.block_s > 0.0) || self.blocks_per_class == 0 {
            return Err(Error::config(
                "block_s/blocks_per_class",
                "blocks must be non-empty",
            ));
        }
        if self.classes.is_empty() {
            return Err(Error::config("classes", "at least one class model required"));
        }
        for (ci, class) in self.classes.iter().enumerate() {
            for (ki, comp) in class.components.iter().enumerate() {
                let field = format!("classes[{ci}].components[{ki}]");
                match comp {
                    ChannelComponent::Sine { freq_hz, .. } => {
                        if !(*freq_hz > 0.0 && *freq_hz < self.fs / 2.0) {
                            return Err(Error::config(field, "frequency outside (0, fs/2)"));
                        }
                    }
                    ChannelComponent::BandSine { low_hz, high_hz, .. } => {
                        if !(*low_hz > 0.0 && low_hz < high_hz && *high_hz < self.fs / 2.0) {
                            return Err(Error::config(field, "band outside (0, fs/2)"));
                        }
                    }
                    ChannelComponent::Ar { coeffs, noise_sigma, .. } => {
                        if coeffs.is_empty() || !(*noise_sigma > 0.0) {
                            return Err(Error::config(field, "AR needs coefficients and noise"));
                        }
                    }
                    ChannelComponent::Noise { sigma, .. } => {
                        if !(*sigma >= 0.0) {
                            return Err(Error::config(field, "noise sigma must be >= 0"));
                        }
                    }
                }
                if let Some(chs) = component_channels(comp) {
                    if chs.iter().any(|&c| c >= self.n_channels) {
                        return Err(Error::config(field, "channel index out of range"));
                    }
                }
            }
        }
        Ok(())
    }
}

fn component_channels(comp: &ChannelComponent) -> Option<&Vec<usize>> {
    match comp {
        ChannelComponent::Sine { channels, .. }
        | ChannelComponent::BandSine { channels, .. }
        | ChannelComponent::Ar { channels, .. }
        | ChannelComponent::Noise { channels, .. } => channels.as_ref(),
    }
}

/// Generate a labeled recording from the spec. Identical seeds yield
/// identical recordings.
pub fn synth_recording(spec: &SynthSpec, seed: u64) -> Result<Recording> {
    spec.validate()?;
    let block_len = (spec.block_s * spec.fs).round() as usize;
    let n_blocks = spec.blocks_per_class * spec.classes.len();
    let total = block_len * n_blocks;
    let mut samples = vec![vec![0.0f64; total]; spec.n_channels];
    let mut labels = vec![0u32; total];
    let mut rng = rng_from(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");

    for block in 0..n_blocks {
        let class = &spec.classes[block % spec.classes.len()];
        let start = block * block_len;
        labels[start..start + block_len].fill(class.label);
        for comp in &class.components {
            let targets: Vec<usize> = match component_channels(comp) {
                Some(chs) => chs.clone(),
                None => (0..spec.n_channels).collect(),
            };
            match comp {
                ChannelComponent::Sine { freq_hz, amplitude, .. } => {
                    for &ch in &targets {
                        let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                        add_sine(&mut samples[ch][start..start + block_len], *freq_hz, *amplitude, phase, spec.fs);
                    }
                }
                ChannelComponent::BandSine { low_hz, high_hz, amplitude, .. } => {
                    for &ch in &targets {
                        let freq: f64 = rng.random_range(*low_hz..*high_hz);
                        let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                        add_sine(&mut samples[ch][start..start + block_len], freq, *amplitude, phase, spec.fs);
                    }
                }
                ChannelComponent::Ar { coeffs, noise_sigma, .. } => {
                    for &ch in &targets {
                        add_ar(
                            &mut samples[ch][start..start + block_len],
                            coeffs,
                            *noise_sigma,
                            &mut rng,
                            &normal,
                        );
                    }
                }
                ChannelComponent::Noise { sigma, .. } => {
                    for &ch in &targets {
                        for v in samples[ch][start..start + block_len].iter_mut() {
                            *v += sigma * normal.sample(&mut rng);
                        }
                    }
                }
            }
        }
    }

    let names = (0..spec.n_channels).map(|i| format!("ch{i}")).collect();
    Recording::new(samples, spec.fs, names, Some(labels))
}

fn add_sine(out: &mut [f64], freq: f64, amplitude: f64, phase: f64, fs: f64) {
    let w = std::f64::consts::TAU * freq / fs;
    for (i, v) in out.iter_mut().enumerate() {
        *v += amplitude * (w * i as f64 + phase).sin();
    }
}

/// Drive an AR recursion with fresh Gaussian noise; 200-sample burn-in
/// keeps the block near its stationary distribution.
fn add_ar(
    out: &mut [f64],
    coeffs: &[f64],
    sigma: f64,
    rng: &mut rand_chacha::ChaCha8Rng,
    normal: &Normal<f64>,
) {
    let p = coeffs.len();
    let burn = 200;
    let mut hist = vec![0.0f64; p];
    for i in 0..burn + out.len() {
        let mut x = sigma * normal.sample(rng);
        for (k, &a) in coeffs.iter().enumerate() {
            x += a * hist[k];
        }
        hist.rotate_right(1);
        hist[0] = x;
        if i >= burn {
            out[i - burn] += x;
        }
    }
}
