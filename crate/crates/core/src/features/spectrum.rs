//! Shared periodogram helper on top of rustfft.

use std::cell::RefCell;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// One-sided periodogram power: `power[k] = w_k * |X[k]|^2 / n` for
/// k = 0..=n/2, with w_k = 2 except at DC and (for even n) Nyquist.
/// Summing all entries gives the signal energy `sum x[t]^2` (Parseval).
pub fn periodogram_power(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    PLANNER.with(|p| {
        let fft = p.borrow_mut().plan_fft_forward(n);
        fft.process(&mut buf);
    });
    let half = n / 2;
    (0..=half)
        .map(|k| {
            let w = if k == 0 || (n % 2 == 0 && k == half) {
                1.0
            } else {
                2.0
            };
            w * buf[k].norm_sqr() / n as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parseval_holds() {
        use rand::Rng;
        let mut rng = crate::rng::rng_from(3);
        let x: Vec<f64> = (0..128).map(|_| rng.random_range(-1.0..1.0)).collect();
        let energy: f64 = x.iter().map(|v| v * v).sum();
        let spectral: f64 = periodogram_power(&x).iter().sum();
        assert!((energy - spectral).abs() / energy < 1e-12);
    }

    #[test]
    fn pure_tone_lands_on_its_bin() {
        let fs = 128.0;
        let x: Vec<f64> = (0..128)
            .map(|i| (std::f64::consts::TAU * 10.0 * i as f64 / fs).sin())
            .collect();
        let p = periodogram_power(&x);
        let total: f64 = p.iter().sum();
        assert!(p[10] / total > 0.999, "bin 10 fraction {}", p[10] / total);
    }
}
