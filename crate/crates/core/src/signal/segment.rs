//! Decimation and fixed-length windowing.

use crate::error::{Error, Result};
use crate::signal::{Recording, Trial};

/// Keep every (fs/target_fs)-th sample. The caller must have band-limited
/// the signal below `target_fs / 2` first (the 45 Hz band-pass already
/// covers a 128 Hz target).
pub fn downsample(rec: &Recording, target_fs: f64) -> Result<Recording> {
    if !(target_fs > 0.0) {
        return Err(Error::domain("target rate must be positive"));
    }
    let ratio = rec.fs / target_fs;
    let step = ratio.round() as usize;
    if step == 0 || (ratio - step as f64).abs() > 1e-9 {
        return Err(Error::domain(format!(
            "fs {} is not an integer multiple of target {target_fs}",
            rec.fs
        )));
    }
    let samples = rec
        .samples
        .iter()
        .map(|ch| ch.iter().step_by(step).copied().collect())
        .collect();
    let labels = rec
        .labels
        .as_ref()
        .map(|l| l.iter().step_by(step).copied().collect());
    Recording::new(samples, target_fs, rec.channel_names.clone(), labels)
}

/// Cut overlapping windows of `window_s` seconds every `hop_s` seconds.
///
/// Each trial takes the majority label inside its window; windows with
/// an exact label tie (task switch) are dropped. A recording shorter
/// than one window yields an empty list.
pub fn segment(rec: &Recording, window_s: f64, hop_s: f64) -> Result<Vec<Trial>> {
    if !(window_s > 0.0) || !(hop_s > 0.0) || hop_s > window_s {
        return Err(Error::domain(format!(
            "need window_s > 0 and 0 < hop_s <= window_s; got window={window_s}, hop={hop_s}"
        )));
    }
    let labels = rec
        .labels
        .as_ref()
        .ok_or_else(|| Error::domain("segmentation requires per-sample labels"))?;
    let window = (window_s * rec.fs).round() as usize;
    let hop = (hop_s * rec.fs).round() as usize;
    if window == 0 || hop == 0 {
        return Err(Error::domain("window and hop must span at least one sample"));
    }
    let n = rec.n_samples();
    if n < window {
        return Ok(Vec::new());
    }
    let count = (n - window) / hop + 1;
    let mut trials = Vec::with_capacity(count);
    for w in 0..count {
        let start = w * hop;
        let Some(label) = majority_label(&labels[start..start + window]) else {
            continue; // exact tie at a task switch
        };
        let samples = rec
            .samples
            .iter()
            .map(|ch| ch[start..start + window].to_vec())
            .collect();
        trials.push(Trial {
            samples,
            fs: rec.fs,
            label,
            origin: (0, start),
        });
    }
    Ok(trials)
}

/// Majority label of a window, `None` on an exact tie for first place.
fn majority_label(labels: &[u32]) -> Option<u32> {
    let mut counts: std::collections::BTreeMap<u32, usize> = std::collections::BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_insert(0) += 1;
    }
    let best = counts.values().copied().max()?;
    let mut winners = counts.iter().filter(|(_, &c)| c == best);
    let (&label, _) = winners.next()?;
    if winners.next().is_some() {
        None
    } else {
        Some(label)
    }
}
