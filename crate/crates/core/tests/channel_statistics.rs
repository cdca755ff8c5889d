use std::f64::consts::PI;

use ddh_core::fading::{
    autocorr, cascaded_alpha, empirical_autocorrelation, gen_ar1, gen_jakes, ChannelParams, Hop,
};
use num_complex::Complex64;

const LEN: usize = 100_000;

/// J0 by its power series; enough terms for |x| <= 15.
fn j0(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        term *= -(x * x) / (4.0 * (k * k) as f64);
        sum += term;
    }
    sum
}

fn rms_error(samples: &[Complex64], sigma2: f64, f: f64) -> f64 {
    let sum: f64 = (0..=100)
        .map(|n| ((empirical_autocorrelation(samples, n) - sigma2 * j0(2.0 * PI * f * n as f64)) / sigma2).norm_sqr())
        .sum();
    (sum / 101.0).sqrt()
}

fn branch_stats(samples: &[Complex64]) -> (f64, f64, f64) {
    let n = samples.len() as f64;
    let mr = samples.iter().map(|z| z.re).sum::<f64>() / n;
    let mi = samples.iter().map(|z| z.im).sum::<f64>() / n;
    let (vr, vi, c) = samples.iter().fold((0.0, 0.0, 0.0), |a, z| {
        let (r, i) = (z.re - mr, z.im - mi);
        (a.0 + r * r, a.1 + i * i, a.2 + r * i)
    });
    (vr / n, vi / n, c / (vr * vi).sqrt())
}

#[test]
fn jakes_autocorrelation_follows_bessel_law() {
    for (sigma2, f) in [(1.0, 0.01), (1.0, 0.02), (10.0, 0.01), (10.0, 0.05)] {
        let ch = ChannelParams::new(sigma2, sigma2, f, f).unwrap();
        for seed in 0..8 {
            let h = gen_jakes(&ch, Hop::SourceRelay, LEN, seed).unwrap();
            let rms = rms_error(h.samples(), sigma2, f);
            assert!(rms <= 0.02, "sigma2 {sigma2} f {f} seed {seed}: rms {rms}");
        }
    }
}

#[test]
fn jakes_lag_one_example() {
    let ch = ChannelParams::new(1.0, 1.0, 0.01, 0.01).unwrap();
    let h = gen_jakes(&ch, Hop::SourceRelay, LEN, 42).unwrap();
    let r1 = empirical_autocorrelation(h.samples(), 1).re;
    assert!((r1 - 0.99803).abs() < 0.02, "{r1}");
}

#[test]
fn jakes_record_power_and_quadrature_balance() {
    // a record must span on the order of 1000 Doppler periods
    for (f, len) in [(0.01, LEN), (0.02, LEN), (0.001, 10 * LEN)] {
        for sigma2 in [1.0, 10.0] {
            let ch = ChannelParams::new(sigma2, sigma2, f, f).unwrap();
            for hop in [Hop::SourceRelay, Hop::RelayDestination] {
                let h = gen_jakes(&ch, hop, len, 7).unwrap();
                let power = empirical_autocorrelation(h.samples(), 0).re;
                assert!((power / sigma2 - 1.0).abs() < 0.02, "f {f}: power {power}");
                let (vr, vi, corr) = branch_stats(h.samples());
                assert!((vr / (sigma2 / 2.0) - 1.0).abs() < 0.03, "f {f}: var re {vr}");
                assert!((vi / (sigma2 / 2.0) - 1.0).abs() < 0.03, "f {f}: var im {vi}");
                assert!(corr.abs() < 0.02, "f {f}: I/Q correlation {corr}");
            }
        }
    }
}

#[test]
fn jakes_marginal_is_close_to_rayleigh() {
    // P(|h|^2 < x) = 1 - exp(-x) over an ensemble of independent records
    let ch = ChannelParams::new(1.0, 1.0, 0.01, 0.01).unwrap();
    let mut below = [0usize; 3];
    let thresholds = [0.1, 0.5, 1.0];
    let mut total = 0usize;
    for seed in 0..400 {
        let h = gen_jakes(&ch, Hop::SourceRelay, 1000, seed).unwrap();
        for z in h.samples().iter().step_by(100) {
            total += 1;
            for (count, &x) in below.iter_mut().zip(&thresholds) {
                if z.norm_sqr() < x {
                    *count += 1;
                }
            }
        }
    }
    for (&count, &x) in below.iter().zip(&thresholds) {
        let p = 1.0 - (-x as f64).exp();
        let se = (p * (1.0 - p) / total as f64).sqrt();
        let got = count as f64 / total as f64;
        assert!((got - p).abs() < 4.0 * se, "P(|h|^2 < {x}) = {got}, expected {p}");
    }
}

#[test]
fn hops_are_independent() {
    let ch = ChannelParams::new(1.0, 1.0, 0.02, 0.01).unwrap();
    let h1 = gen_jakes(&ch, Hop::SourceRelay, LEN, 3).unwrap();
    let h2 = gen_jakes(&ch, Hop::RelayDestination, LEN, 3).unwrap();
    let cross: Complex64 =
        h1.samples().iter().zip(h2.samples()).map(|(a, b)| a * b.conj()).sum::<Complex64>() / LEN as f64;
    assert!(cross.norm() < 0.05, "{cross}");
}

#[test]
fn cascaded_variance_is_product_of_variances() {
    for (s1, s2) in [(1.0, 1.0), (10.0, 1.0), (1.0, 10.0)] {
        let ch = ChannelParams::new(s1, s2, 0.02, 0.01).unwrap();
        let h1 = gen_jakes(&ch, Hop::SourceRelay, LEN, 5).unwrap();
        let h2 = gen_jakes(&ch, Hop::RelayDestination, LEN, 5).unwrap();
        let c: Vec<Complex64> = h1.samples().iter().zip(h2.samples()).map(|(a, b)| a * b).collect();
        let var = empirical_autocorrelation(&c, 0).re;
        assert!((var / (s1 * s2) - 1.0).abs() < 0.05, "{s1},{s2}: {var}");
        let lag1 = empirical_autocorrelation(&c, 1).re / var;
        let alpha = cascaded_alpha(&ch, 1).unwrap();
        assert!((lag1 - alpha).abs() < 0.01, "{lag1} vs {alpha}");
    }
}

#[test]
fn ar1_matches_its_definition() {
    for f in [0.2, 0.3] {
        let ch = ChannelParams::new(3.0, 1.0, f, f).unwrap();
        let h = gen_ar1(&ch, Hop::SourceRelay, LEN, 9).unwrap();
        let power = empirical_autocorrelation(h.samples(), 0).re;
        assert!((power / 3.0 - 1.0).abs() < 0.02, "{power}");
        let r1 = empirical_autocorrelation(h.samples(), 1).re;
        assert!((r1 - autocorr(&ch, Hop::SourceRelay, 1)).abs() < 0.02 * 3.0, "{r1}");
        let (vr, vi, corr) = branch_stats(h.samples());
        assert!((vr / 1.5 - 1.0).abs() < 0.03 && (vi / 1.5 - 1.0).abs() < 0.03 && corr.abs() < 0.02);
    }
}
