//! Multichannel recordings: loading, preprocessing, and windowing.

mod filter;
mod io;
mod segment;
mod synth;

pub use filter::bandpass;
pub use io::{load_recording, save_recording, FileFormat, LoadOptions};
pub use segment::{downsample, segment};
pub use synth::{synth_recording, ChannelComponent, ClassModel, SynthSpec};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniformly sampled multichannel recording with optional per-sample
/// class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    /// `samples[channel][t]`, all channels equal length.
    pub samples: Vec<Vec<f64>>,
    /// Sampling rate in Hz, strictly positive.
    pub fs: f64,
    pub channel_names: Vec<String>,
    /// Per-sample class id, same length as each channel when present.
    pub labels: Option<Vec<u32>>,
}

impl Recording {
    pub fn new(
        samples: Vec<Vec<f64>>,
        fs: f64,
        channel_names: Vec<String>,
        labels: Option<Vec<u32>>,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::structural("recording has no channels"));
        }
        let len = samples[0].len();
        if len == 0 {
            return Err(Error::structural("recording channels are empty"));
        }
        if samples.iter().any(|c| c.len() != len) {
            return Err(Error::structural("channels have unequal lengths"));
        }
        if !(fs > 0.0) {
            return Err(Error::domain(format!("sampling rate must be positive, got {fs}")));
        }
        if channel_names.len() != samples.len() {
            return Err(Error::structural(format!(
                "{} channel names for {} channels",
                channel_names.len(),
                samples.len()
            )));
        }
        if let Some(l) = &labels {
            if l.len() != len {
                return Err(Error::structural(format!(
                    "label length {} != sample length {len}",
                    l.len()
                )));
            }
        }
        Ok(Recording {
            samples,
            fs,
            channel_names,
            labels,
        })
    }

    pub fn n_channels(&self) -> usize {
        self.samples.len()
    }

    pub fn n_samples(&self) -> usize {
        self.samples[0].len()
    }

    pub fn duration_s(&self) -> f64 {
        self.n_samples() as f64 / self.fs
    }
}

/// One fixed-length window of all channels carrying a single label.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    /// `samples[channel][t]`, `window_len` samples per channel.
    pub samples: Vec<Vec<f64>>,
    pub fs: f64,
    /// Class id; 0 or 1 for two-class datasets.
    pub label: u32,
    /// (recording index, start sample) this window was cut from.
    pub origin: (usize, usize),
}

impl Trial {
    pub fn n_channels(&self) -> usize {
        self.samples.len()
    }

    pub fn window_len(&self) -> usize {
        self.samples[0].len()
    }
}

/// One two-class dataset: a subject's recordings plus the task pair
/// that defines classes 0 and 1.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DatasetSpec {
    pub id: String,
    /// Source recordings, loaded and concatenated trial-wise.
    pub paths: Vec<std::path::PathBuf>,
    /// The two distinct task ids mapped to class 0 and class 1.
    pub task_pair: (u32, u32),
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<()> {
        if self.task_pair.0 == self.task_pair.1 {
            return Err(Error::config(
                format!("datasets[{}].task_pair", self.id),
                "task pair must name two distinct tasks",
            ));
        }
        if self.paths.is_empty() {
            return Err(Error::config(
                format!("datasets[{}].paths", self.id),
                "at least one recording path required",
            ));
        }
        Ok(())
    }
}

/// Restrict trials to the dataset's task pair, relabeling to {0, 1}.
pub fn relabel_for_pair(trials: Vec<Trial>, pair: (u32, u32)) -> Vec<Trial> {
    trials
        .into_iter()
        .filter_map(|mut t| {
            if t.label == pair.0 {
                t.label = 0;
                Some(t)
            } else if t.label == pair.1 {
                t.label = 1;
                Some(t)
            } else {
                None
            }
        })
        .collect()
}
