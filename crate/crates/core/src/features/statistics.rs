//! Group 1 — statistical features.
//!
//! Per channel: central moments (orders 1–5), sample variance, and the
//! Hjorth-style form factor built from first and second differences.
//! Per channel pair: Pearson correlation, joint central moments
//! E[(x−μx)^p (y−μy)^q] for p+q ≤ 5, and joint cumulants through order
//! 4. Joint cumulants of 3 and 4 channels are computed on a seeded
//! random sample of tuples; full enumeration of 4-channel combinations
//! is impractical on a 32-channel montage.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::features::{FeatureDescriptor, FeatureGroup, StatisticsConfig, TrialShape};
use crate::rng::{derive_seed, rng_from};
use crate::signal::Trial;

/// Pair exponents for joint central moments, ordered by total then p.
const JOINT_MOMENT_PQ: [(u32, u32); 10] = [
    (1, 1),
    (1, 2),
    (2, 1),
    (1, 3),
    (2, 2),
    (3, 1),
    (1, 4),
    (2, 3),
    (3, 2),
    (4, 1),
];

/// Pair exponents for joint cumulants through order 4.
const CUMULANT_PQ: [(u32, u32); 6] = [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (3, 1)];

/// Seeded sample of channel triples and quadruples; layout and values
/// use the identical sample.
fn sampled_tuples(shape: TrialShape, cfg: &StatisticsConfig) -> (Vec<[usize; 3]>, Vec<[usize; 4]>) {
    let n = shape.n_channels;
    let mut triples = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                triples.push([i, j, k]);
            }
        }
    }
    let mut quads = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    quads.push([i, j, k, l]);
                }
            }
        }
    }
    let mut rng = rng_from(derive_seed(cfg.seed, &["statistics", "tuples"]));
    if triples.len() > cfg.cumulant_triples {
        triples.shuffle(&mut rng);
        triples.truncate(cfg.cumulant_triples);
        triples.sort_unstable();
    }
    if quads.len() > cfg.cumulant_quads {
        quads.shuffle(&mut rng);
        quads.truncate(cfg.cumulant_quads);
        quads.sort_unstable();
    }
    (triples, quads)
}

pub(crate) fn descriptors(
    shape: TrialShape,
    cfg: &StatisticsConfig,
    out: &mut Vec<FeatureDescriptor>,
) {
    let g = FeatureGroup::Statistic;
    for c in 0..shape.n_channels {
        for order in 1..=5u32 {
            out.push(FeatureDescriptor::new(
                g,
                "moment",
                vec![c],
                &[("order", order.to_string())],
            ));
        }
        out.push(FeatureDescriptor::new(g, "variance", vec![c], &[]));
        out.push(FeatureDescriptor::new(g, "form_factor", vec![c], &[]));
    }
    for i in 0..shape.n_channels {
        for j in i + 1..shape.n_channels {
            out.push(FeatureDescriptor::new(g, "correlation", vec![i, j], &[]));
        }
    }
    for i in 0..shape.n_channels {
        for j in i + 1..shape.n_channels {
            for (p, q) in JOINT_MOMENT_PQ {
                out.push(FeatureDescriptor::new(
                    g,
                    "joint_moment",
                    vec![i, j],
                    &[("p", p.to_string()), ("q", q.to_string())],
                ));
            }
        }
    }
    for i in 0..shape.n_channels {
        for j in i + 1..shape.n_channels {
            for (p, q) in CUMULANT_PQ {
                out.push(FeatureDescriptor::new(
                    g,
                    "cumulant",
                    vec![i, j],
                    &[("orders", format!("{p},{q}"))],
                ));
            }
        }
    }
    let (triples, quads) = sampled_tuples(shape, cfg);
    for t in triples {
        for orders in ["1,1,1", "2,1,1", "1,2,1", "1,1,2"] {
            out.push(FeatureDescriptor::new(
                g,
                "cumulant",
                t.to_vec(),
                &[("orders", orders.to_string())],
            ));
        }
    }
    for q in quads {
        out.push(FeatureDescriptor::new(
            g,
            "cumulant",
            q.to_vec(),
            &[("orders", "1,1,1,1".to_string())],
        ));
    }
}

/// All statistical features of one trial with their descriptors.
pub fn extract_statistics(
    trial: &Trial,
    cfg: &StatisticsConfig,
) -> Result<(Vec<f64>, Vec<FeatureDescriptor>)> {
    let mut values = Vec::new();
    let mut degenerate = 0;
    extract(trial, cfg, &mut values, &mut degenerate)?;
    let mut descs = Vec::new();
    descriptors(TrialShape::of(trial), cfg, &mut descs);
    Ok((values, descs))
}

/// Centered channels plus reusable power arrays (x̃, x̃², x̃³, x̃⁴).
struct Centered {
    powers: Vec<[Vec<f64>; 4]>,
    /// Population covariance matrix.
    cov: Vec<f64>,
    n_channels: usize,
    n: usize,
}

impl Centered {
    fn new(trial: &Trial) -> Self {
        let n = trial.window_len();
        let nch = trial.n_channels();
        let powers: Vec<[Vec<f64>; 4]> = trial
            .samples
            .iter()
            .map(|ch| {
                let mean = ch.iter().sum::<f64>() / n as f64;
                let c1: Vec<f64> = ch.iter().map(|v| v - mean).collect();
                let c2: Vec<f64> = c1.iter().map(|v| v * v).collect();
                let c3: Vec<f64> = c1.iter().zip(&c2).map(|(a, b)| a * b).collect();
                let c4: Vec<f64> = c2.iter().map(|v| v * v).collect();
                [c1, c2, c3, c4]
            })
            .collect();
        let mut cov = vec![0.0; nch * nch];
        for i in 0..nch {
            for j in 0..=i {
                let v = dot(&powers[i][0], &powers[j][0]) / n as f64;
                cov[i * nch + j] = v;
                cov[j * nch + i] = v;
            }
        }
        Centered {
            powers,
            cov,
            n_channels: nch,
            n,
        }
    }

    /// Joint central moment E[x̃^p ỹ^q] (population).
    fn joint2(&self, i: usize, p: u32, j: usize, q: u32) -> f64 {
        dot(
            &self.powers[i][(p - 1) as usize],
            &self.powers[j][(q - 1) as usize],
        ) / self.n as f64
    }

    /// Joint central moment over three channels with given exponents.
    fn joint3(&self, idx: [usize; 3], exp: [u32; 3]) -> f64 {
        let a = &self.powers[idx[0]][(exp[0] - 1) as usize];
        let b = &self.powers[idx[1]][(exp[1] - 1) as usize];
        let c = &self.powers[idx[2]][(exp[2] - 1) as usize];
        let mut sum = 0.0;
        for t in 0..self.n {
            sum += a[t] * b[t] * c[t];
        }
        sum / self.n as f64
    }

    fn joint4(&self, idx: [usize; 4]) -> f64 {
        let a = &self.powers[idx[0]][0];
        let b = &self.powers[idx[1]][0];
        let c = &self.powers[idx[2]][0];
        let d = &self.powers[idx[3]][0];
        let mut sum = 0.0;
        for t in 0..self.n {
            sum += a[t] * b[t] * c[t] * d[t];
        }
        sum / self.n as f64
    }

    fn var(&self, i: usize) -> f64 {
        self.cov[i * self.n_channels + i]
    }

    fn cov2(&self, i: usize, j: usize) -> f64 {
        self.cov[i * self.n_channels + j]
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Joint cumulant of a channel pair with exponents (p, q), p + q <= 4,
/// from central moments.
fn pair_cumulant(cn: &Centered, i: usize, j: usize, p: u32, q: u32) -> f64 {
    match (p, q) {
        (1, 1) => cn.joint2(i, 1, j, 1),
        (2, 1) | (1, 2) => cn.joint2(i, p, j, q),
        (3, 1) => cn.joint2(i, 3, j, 1) - 3.0 * cn.var(i) * cn.cov2(i, j),
        (1, 3) => cn.joint2(i, 1, j, 3) - 3.0 * cn.var(j) * cn.cov2(i, j),
        (2, 2) => {
            cn.joint2(i, 2, j, 2)
                - cn.var(i) * cn.var(j)
                - 2.0 * cn.cov2(i, j) * cn.cov2(i, j)
        }
        _ => unreachable!("unsupported cumulant orders ({p},{q})"),
    }
}

/// Order-4 joint cumulant with one squared channel: kappa(x,x,y,z).
fn triple_cumulant4(cn: &Centered, sq: usize, a: usize, b: usize) -> f64 {
    cn.joint3([sq, a, b], [2, 1, 1])
        - cn.var(sq) * cn.cov2(a, b)
        - 2.0 * cn.cov2(sq, a) * cn.cov2(sq, b)
}

pub(crate) fn extract(
    trial: &Trial,
    cfg: &StatisticsConfig,
    out: &mut Vec<f64>,
    degenerate: &mut usize,
) -> Result<()> {
    let n = trial.window_len();
    if n < 8 {
        return Err(Error::domain(format!(
            "statistics need a window of at least 8 samples, got {n}"
        )));
    }
    let shape = TrialShape::of(trial);
    let cn = Centered::new(trial);

    // per channel
    for c in 0..shape.n_channels {
        let x = &cn.powers[c][0];
        // central moments 1..5 (population)
        out.push(x.iter().sum::<f64>() / n as f64); // ~0 by construction
        out.push(cn.joint2(c, 1, c, 1));
        out.push(cn.joint2(c, 1, c, 2));
        out.push(cn.joint2(c, 2, c, 2));
        out.push(cn.joint2(c, 2, c, 3));
        // sample variance (n-1)
        let var_s = cn.var(c) * n as f64 / (n - 1) as f64;
        out.push(var_s);
        out.push(form_factor(&trial.samples[c], degenerate));
    }
    // correlation
    for i in 0..shape.n_channels {
        for j in i + 1..shape.n_channels {
            let denom = (cn.var(i) * cn.var(j)).sqrt();
            if denom > 0.0 {
                out.push(cn.cov2(i, j) / denom);
            } else {
                *degenerate += 1;
                out.push(0.0);
            }
        }
    }
    // joint central moments
    for i in 0..shape.n_channels {
        for j in i + 1..shape.n_channels {
            for (p, q) in JOINT_MOMENT_PQ {
                out.push(cn.joint2(i, p, j, q));
            }
        }
    }
    // pair cumulants
    for i in 0..shape.n_channels {
        for j in i + 1..shape.n_channels {
            for (p, q) in CUMULANT_PQ {
                out.push(pair_cumulant(&cn, i, j, p, q));
            }
        }
    }
    // sampled triples and quadruples
    let (triples, quads) = sampled_tuples(shape, cfg);
    for [i, j, k] in triples {
        out.push(cn.joint3([i, j, k], [1, 1, 1]));
        out.push(triple_cumulant4(&cn, i, j, k));
        out.push(triple_cumulant4(&cn, j, i, k));
        out.push(triple_cumulant4(&cn, k, i, j));
    }
    for [i, j, k, l] in quads {
        let kappa = cn.joint4([i, j, k, l])
            - cn.cov2(i, j) * cn.cov2(k, l)
            - cn.cov2(i, k) * cn.cov2(j, l)
            - cn.cov2(i, l) * cn.cov2(j, k);
        out.push(kappa);
    }
    Ok(())
}

/// Hjorth-style form factor (sigma_dd / sigma_d) / (sigma_d / sigma_x)
/// with first differences as derivatives; 0 when any stage is constant.
fn form_factor(x: &[f64], degenerate: &mut usize) -> f64 {
    let d1: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let d2: Vec<f64> = d1.windows(2).map(|w| w[1] - w[0]).collect();
    let sx = pop_std(x);
    let sd = pop_std(&d1);
    let sdd = pop_std(&d2);
    if sx > 0.0 && sd > 0.0 {
        (sdd / sd) / (sd / sx)
    } else {
        *degenerate += 1;
        0.0
    }
}

fn pop_std(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / x.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::test_util::{constant_trial, noise_trial};

    // ------------------------------------------------------------------
    // Brute-force oracles: definitional central moments and the set-
    // partition (Moebius) form of joint cumulants over raw moments.
    // Independent of the central-moment shortcuts used by `extract`.
    // ------------------------------------------------------------------

    /// All partitions of {0..n-1} as restricted growth strings.
    fn partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
        let mut result = Vec::new();
        let mut assignment = vec![0usize; n];
        loop {
            let blocks = *assignment.iter().max().unwrap() + 1;
            let mut part = vec![Vec::new(); blocks];
            for (i, &b) in assignment.iter().enumerate() {
                part[b].push(i);
            }
            result.push(part);
            // next restricted growth string
            let mut i = n as isize - 1;
            loop {
                if i <= 0 {
                    return result;
                }
                let prefix_max = assignment[..i as usize].iter().copied().max().unwrap();
                if assignment[i as usize] <= prefix_max {
                    assignment[i as usize] += 1;
                    for j in (i as usize + 1)..n {
                        assignment[j] = 0;
                    }
                    break;
                }
                i -= 1;
            }
        }
    }

    /// Raw empirical moment E[prod of the given series].
    fn raw_moment(series: &[&[f64]]) -> f64 {
        let n = series[0].len();
        (0..n)
            .map(|t| series.iter().map(|s| s[t]).product::<f64>())
            .sum::<f64>()
            / n as f64
    }

    /// Joint cumulant via sum over set partitions of raw moments.
    fn cumulant_oracle(series: &[&[f64]]) -> f64 {
        let n = series.len();
        let mut total = 0.0;
        for part in partitions(n) {
            let blocks = part.len();
            let sign = if (blocks - 1) % 2 == 0 { 1.0 } else { -1.0 };
            let fact: f64 = (1..blocks).map(|k| k as f64).product();
            let mut term = sign * fact;
            for block in &part {
                let subset: Vec<&[f64]> = block.iter().map(|&i| series[i]).collect();
                term *= raw_moment(&subset);
            }
            total += term;
        }
        total
    }

    fn central_moment_oracle(x: &[f64], order: u32) -> f64 {
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        x.iter().map(|v| (v - mean).powi(order as i32)).sum::<f64>() / n
    }

    fn rand_series(n: usize, seed: u64) -> Vec<f64> {
        use rand::Rng;
        let mut rng = crate::rng::rng_from(seed);
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn partition_counts_are_bell_numbers() {
        assert_eq!(partitions(2).len(), 2);
        assert_eq!(partitions(3).len(), 5);
        assert_eq!(partitions(4).len(), 15);
    }

    #[test]
    fn central_moments_match_definition() {
        for seed in 0..20 {
            let n = 8 + (seed as usize % 25);
            let x = rand_series(n, seed);
            let trial = Trial {
                samples: vec![x.clone()],
                fs: 128.0,
                label: 0,
                origin: (0, 0),
            };
            let cn = Centered::new(&trial);
            let got = [
                cn.joint2(0, 1, 0, 1),
                cn.joint2(0, 1, 0, 2),
                cn.joint2(0, 2, 0, 2),
                cn.joint2(0, 2, 0, 3),
            ];
            for (k, g) in got.iter().enumerate() {
                let want = central_moment_oracle(&x, (k + 2) as u32);
                assert!(
                    (g - want).abs() < 1e-10,
                    "order {} mismatch: {g} vs {want}",
                    k + 2
                );
            }
        }
    }

    #[test]
    fn pair_cumulants_match_partition_oracle() {
        for seed in 0..20 {
            let n = 12 + (seed as usize % 21);
            let x = rand_series(n, 1000 + seed);
            let y = rand_series(n, 2000 + seed);
            let trial = Trial {
                samples: vec![x.clone(), y.clone()],
                fs: 128.0,
                label: 0,
                origin: (0, 0),
            };
            let cn = Centered::new(&trial);
            for (p, q) in CUMULANT_PQ {
                let mut series: Vec<&[f64]> = Vec::new();
                for _ in 0..p {
                    series.push(&x);
                }
                for _ in 0..q {
                    series.push(&y);
                }
                let want = cumulant_oracle(&series);
                let got = pair_cumulant(&cn, 0, 1, p, q);
                assert!(
                    (got - want).abs() < 1e-10,
                    "kappa({p},{q}) mismatch: {got} vs {want} (seed {seed})"
                );
            }
        }
    }

    #[test]
    fn triple_and_quad_cumulants_match_partition_oracle() {
        for seed in 0..10 {
            let n = 16 + (seed as usize % 17);
            let chans: Vec<Vec<f64>> = (0..4).map(|c| rand_series(n, seed * 10 + c)).collect();
            let trial = Trial {
                samples: chans.clone(),
                fs: 128.0,
                label: 0,
                origin: (0, 0),
            };
            let cn = Centered::new(&trial);

            let want3 = cumulant_oracle(&[&chans[0], &chans[1], &chans[2]]);
            let got3 = cn.joint3([0, 1, 2], [1, 1, 1]);
            assert!((got3 - want3).abs() < 1e-10, "kappa3 {got3} vs {want3}");

            let want4 = cumulant_oracle(&[&chans[0], &chans[0], &chans[1], &chans[2]]);
            let got4 = triple_cumulant4(&cn, 0, 1, 2);
            assert!((got4 - want4).abs() < 1e-10, "kappa(x,x,y,z) {got4} vs {want4}");

            let wantq = cumulant_oracle(&[&chans[0], &chans[1], &chans[2], &chans[3]]);
            let gotq = cn.joint4([0, 1, 2, 3])
                - cn.cov2(0, 1) * cn.cov2(2, 3)
                - cn.cov2(0, 2) * cn.cov2(1, 3)
                - cn.cov2(0, 3) * cn.cov2(1, 2);
            assert!((gotq - wantq).abs() < 1e-10, "kappa4 {gotq} vs {wantq}");
        }
    }

    #[test]
    fn pair_cumulant_11_is_population_covariance() {
        let x = rand_series(64, 5);
        let y = rand_series(64, 6);
        let trial = Trial {
            samples: vec![x.clone(), y.clone()],
            fs: 128.0,
            label: 0,
            origin: (0, 0),
        };
        let cn = Centered::new(&trial);
        let mx = x.iter().sum::<f64>() / 64.0;
        let my = y.iter().sum::<f64>() / 64.0;
        let cov = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - mx) * (b - my))
            .sum::<f64>()
            / 64.0;
        assert!((pair_cumulant(&cn, 0, 1, 1, 1) - cov).abs() < 1e-12);
    }

    #[test]
    fn constant_channel_gives_zero_moments_and_flags() {
        let trial = constant_trial(2, 32, 128.0, 7.5);
        let mut out = Vec::new();
        let mut deg = 0;
        extract(&trial, &StatisticsConfig::default(), &mut out, &mut deg).unwrap();
        // first 5 values are channel 0's central moments, then variance
        assert!(out[..6].iter().all(|&v| v == 0.0));
        assert!(deg > 0);
        assert!(out.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn identical_channels_have_unit_correlation() {
        let x = rand_series(64, 9);
        let trial = Trial {
            samples: vec![x.clone(), x],
            fs: 128.0,
            label: 0,
            origin: (0, 0),
        };
        let mut out = Vec::new();
        let mut deg = 0;
        extract(&trial, &StatisticsConfig::default(), &mut out, &mut deg).unwrap();
        // layout: 2 channels * 7 per-channel features, then correlation
        let corr = out[14];
        assert!((corr - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tuple_sampling_is_deterministic_and_capped() {
        let shape = TrialShape {
            n_channels: 10,
            window_len: 64,
            fs: 128.0,
        };
        let cfg = StatisticsConfig {
            cumulant_triples: 20,
            cumulant_quads: 15,
            seed: 3,
        };
        let (t1, q1) = sampled_tuples(shape, &cfg);
        let (t2, q2) = sampled_tuples(shape, &cfg);
        assert_eq!(t1, t2);
        assert_eq!(q1, q2);
        assert_eq!(t1.len(), 20);
        assert_eq!(q1.len(), 15);
        // small montage: everything enumerated
        let small = TrialShape {
            n_channels: 4,
            window_len: 64,
            fs: 128.0,
        };
        let (t, q) = sampled_tuples(small, &cfg);
        assert_eq!(t.len(), 4); // C(4,3)
        assert_eq!(q.len(), 1); // C(4,4)
    }

    #[test]
    fn short_window_rejected() {
        let trial = noise_trial(2, 4, 128.0, 0);
        let mut out = Vec::new();
        let mut deg = 0;
        assert!(extract(&trial, &StatisticsConfig::default(), &mut out, &mut deg).is_err());
    }

    use crate::signal::Trial;
}
