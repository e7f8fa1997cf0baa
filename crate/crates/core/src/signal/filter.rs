//! Zero-phase Butterworth band-pass filtering.
//!
//! The band-pass is realized as a cascade of second-order sections: an
//! order-4 high-pass at the low edge followed by an order-16 low-pass
//! at the high edge, applied forward and backward (zero phase, squared
//! magnitude response). The steep low-pass is what the response
//! contract demands: a 0.5-45 Hz band must keep a 40 Hz tone within 5%
//! RMS while crushing 60 Hz mains below 10%, and with only two octaves
//! of transition a low-order roll-off cannot do both.

use crate::error::{Error, Result};
use crate::signal::Recording;

/// One second-order section in direct form II transposed.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Biquad {
    b0: f64,
    b1: f64,
    b2: f64,
    a1: f64,
    a2: f64,
}

impl Biquad {
    fn dc_gain(&self) -> f64 {
        (self.b0 + self.b1 + self.b2) / (1.0 + self.a1 + self.a2)
    }

    /// Largest pole magnitude of z^2 + a1 z + a2.
    fn pole_radius(&self) -> f64 {
        let disc = self.a1 * self.a1 - 4.0 * self.a2;
        if disc >= 0.0 {
            let s = disc.sqrt();
            ((self.a1.abs() + s) / 2.0).max(1e-12)
        } else {
            self.a2.abs().sqrt()
        }
    }

    /// Filter in place with steady-state initial conditions for the
    /// first sample, suppressing start-up transients.
    fn run(&self, x: &mut [f64]) {
        if x.is_empty() {
            return;
        }
        let g = self.dc_gain();
        let x0 = x[0];
        let mut z1 = (self.b1 + self.b2) * x0 - (self.a1 + self.a2) * g * x0;
        let mut z2 = self.b2 * x0 - self.a2 * g * x0;
        for v in x.iter_mut() {
            let xin = *v;
            let y = self.b0 * xin + z1;
            z1 = self.b1 * xin - self.a1 * y + z2;
            z2 = self.b2 * xin - self.a2 * y;
            *v = y;
        }
    }
}

/// Butterworth pole quality factors for an even-order filter.
fn butterworth_qs(order: usize) -> Vec<f64> {
    assert!(order >= 2 && order % 2 == 0, "even order required");
    (0..order / 2)
        .map(|i| {
            let theta = std::f64::consts::PI * (2 * i + 1) as f64 / (2 * order) as f64;
            1.0 / (2.0 * theta.cos())
        })
        .collect()
}

pub(crate) fn lowpass_sections(order: usize, fc: f64, fs: f64) -> Vec<Biquad> {
    let k = (std::f64::consts::PI * fc / fs).tan();
    butterworth_qs(order)
        .into_iter()
        .map(|q| {
            let norm = 1.0 / (1.0 + k / q + k * k);
            Biquad {
                b0: k * k * norm,
                b1: 2.0 * k * k * norm,
                b2: k * k * norm,
                a1: 2.0 * (k * k - 1.0) * norm,
                a2: (1.0 - k / q + k * k) * norm,
            }
        })
        .collect()
}

pub(crate) fn highpass_sections(order: usize, fc: f64, fs: f64) -> Vec<Biquad> {
    let k = (std::f64::consts::PI * fc / fs).tan();
    butterworth_qs(order)
        .into_iter()
        .map(|q| {
            let norm = 1.0 / (1.0 + k / q + k * k);
            Biquad {
                b0: norm,
                b1: -2.0 * norm,
                b2: norm,
                a1: 2.0 * (k * k - 1.0) * norm,
                a2: (1.0 - k / q + k * k) * norm,
            }
        })
        .collect()
}

/// Forward-backward filtering through a section cascade with mirrored
/// edge padding. Mirror (even) reflection keeps the local mean
/// continuous across the pad junctions; a point-reflected (odd) pad
/// would put a DC plateau of 2*x[end] next to the signal, which a
/// 0.5 Hz high-pass turns into a transient that long outlives the pad.
/// The pad must outlast the slowest pole's ringing, so its length comes
/// from the pole radii: 6 time constants, capped by the signal length.
pub(crate) fn filtfilt(sections: &[Biquad], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n < 2 {
        return x.to_vec();
    }
    let tau_max = sections
        .iter()
        .map(|s| {
            let r = s.pole_radius().min(0.999_999);
            -1.0 / r.ln()
        })
        .fold(1.0f64, f64::max);
    let padlen = ((6.0 * tau_max).ceil() as usize)
        .max(3 * (2 * sections.len() + 1))
        .min(n - 1);
    let mut buf = Vec::with_capacity(n + 2 * padlen);
    for i in (1..=padlen).rev() {
        buf.push(x[i]);
    }
    buf.extend_from_slice(x);
    for i in (1..=padlen).rev() {
        buf.push(x[n - 1 - i]);
    }
    for s in sections {
        s.run(&mut buf);
    }
    buf.reverse();
    for s in sections {
        s.run(&mut buf);
    }
    buf.reverse();
    buf[padlen..padlen + n].to_vec()
}

/// Zero-phase band-pass between `low` and `high` Hz (exclusive of DC
/// and Nyquist). Labels and channel names pass through unchanged.
pub fn bandpass(rec: &Recording, low: f64, high: f64) -> Result<Recording> {
    if !(low > 0.0 && low < high && high < rec.fs / 2.0) {
        return Err(Error::domain(format!(
            "band edges must satisfy 0 < low < high < fs/2; got low={low}, high={high}, fs={}",
            rec.fs
        )));
    }
    let mut sections = highpass_sections(4, low, rec.fs);
    sections.extend(lowpass_sections(16, high, rec.fs));
    let samples = rec
        .samples
        .iter()
        .map(|ch| filtfilt(&sections, ch))
        .collect();
    Ok(Recording {
        samples,
        fs: rec.fs,
        channel_names: rec.channel_names.clone(),
        labels: rec.labels.clone(),
    })
}
