//! Train/test splitting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitMode {
    /// Seeded shuffle per class; preserves the class ratio within one
    /// sample.
    StratifiedRandom,
    /// Training rows are a prefix of time order.
    Chronological,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SplitPlan {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub mode: SplitMode,
    pub ratio: f64,
    pub seed: u64,
}

/// Split N labeled trials into train/test by `ratio`.
pub fn make_split(labels: &[u32], ratio: f64, mode: SplitMode, seed: u64) -> Result<SplitPlan> {
    let n = labels.len();
    if n < 6 {
        return Err(Error::domain(format!("need at least 6 trials, got {n}")));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::domain(format!("split ratio {ratio} outside (0, 1)")));
    }
    let classes: std::collections::BTreeSet<u32> = labels.iter().copied().collect();
    if classes.len() < 2 {
        return Err(Error::domain("both classes must be present to split"));
    }

    let (mut train, mut test) = (Vec::new(), Vec::new());
    match mode {
        SplitMode::Chronological => {
            let cut = (ratio * n as f64).round() as usize;
            train.extend(0..cut);
            test.extend(cut..n);
        }
        SplitMode::StratifiedRandom => {
            use rand::seq::SliceRandom;
            let mut rng = crate::rng::rng_from(crate::rng::derive_seed(seed, &["split"]));
            for &class in &classes {
                let mut members: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
                members.shuffle(&mut rng);
                let cut = (ratio * members.len() as f64).round() as usize;
                train.extend(&members[..cut]);
                test.extend(&members[cut..]);
            }
            train.sort_unstable();
            test.sort_unstable();
        }
    }
    if train.is_empty() || test.is_empty() {
        return Err(Error::domain("split produced an empty side"));
    }
    Ok(SplitPlan {
        train,
        test,
        mode,
        ratio,
        seed,
    })
}

/// Remove test rows whose source window overlaps any training window of
/// the same recording. `origins` are (recording, start sample) per
/// trial; `window_len` is the shared window length in samples.
pub fn drop_overlapping_test(
    plan: &mut SplitPlan,
    origins: &[(usize, usize)],
    window_len: usize,
) {
    let train_windows: Vec<(usize, usize)> = plan.train.iter().map(|&i| origins[i]).collect();
    plan.test.retain(|&t| {
        let (rec, start) = origins[t];
        !train_windows.iter().any(|&(r, s)| {
            r == rec && start < s + window_len && s < start + window_len
        })
    });
}

/// 100 * matches / N.
pub fn accuracy(pred: &[u32], truth: &[u32]) -> Result<f64> {
    if pred.len() != truth.len() || truth.is_empty() {
        return Err(Error::structural(format!(
            "prediction length {} vs truth length {}",
            pred.len(),
            truth.len()
        )));
    }
    Ok(100.0 * pred.iter().zip(truth).filter(|(p, t)| p == t).count() as f64
        / truth.len() as f64)
}
