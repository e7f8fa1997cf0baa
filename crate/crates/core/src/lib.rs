//! Benchmarking toolkit for classical EEG features and classifiers.
//!
//! The pipeline mirrors a standard BCI evaluation protocol:
//!
//! 1. [`signal`] — load multichannel recordings, band-pass filter
//!    (0.5–45 Hz), downsample to 128 Hz, and cut 1 s windows with
//!    0.5 s overlap.
//! 2. [`features`] — extract six classical feature groups per window
//!    (statistics, entropies, AR coefficients, band energies, DCT/DST,
//!    wavelets) and z-score normalize.
//! 3. [`selection`] — rank features with classifier-independent
//!    separability measures, then run a classifier-dependent wrapper
//!    search (floating forward selection or a genetic algorithm) over
//!    the 200 best-ranked features.
//! 4. [`classifiers`] — twelve classical classifiers behind one
//!    train/predict contract, from Gaussian Bayes to ANFIS variants.
//! 5. [`evaluation`] — 2/3–1/3 train/test protocol, accuracy grids per
//!    (dataset, classifier, feature set), and report emission.
//!
//! Data-parallel inner loops (feature extraction across windows,
//! wrapper criterion evaluations, benchmark cells) run on rayon when
//! the `parallel` feature is enabled (default) and fall back to plain
//! sequential iterators otherwise. Results are identical either way:
//! all randomness flows through per-task seeds, never shared state.

pub mod cache;
pub mod classifiers;
pub mod config;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod parallel;
pub mod selection;
pub mod signal;

mod linalg;
mod rng;

pub use error::{Error, Result};
