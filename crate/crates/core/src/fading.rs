//! Time-correlated Rayleigh channels for the two hops.
//!
//! The autocorrelation of hop `i` follows Clarke's law
//! `phi_i(n) = sigma_i^2 J0(2 pi f_i n)`. Two generators are provided: a
//! sum-of-sinusoids simulator (16 oscillators per quadrature branch, random
//! arrival-angle offset and phases) and the first-order autoregressive
//! approximation used by the analysis.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::bessel_j0;
use crate::rng::{self, LANE_HOP1, LANE_HOP2};
// inherent float methods take over whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

/// Phasors in the sum-of-sinusoids generator. Odd, see [`gen_jakes`].
///
/// More phasors bring the marginal closer to Gaussian (the deep-fade
/// probability of `N` unit phasors falls short by order `1/N`), fewer keep
/// the frequencies near the Doppler edge far enough apart to average out of a
/// 10^5-sample record at `f = 0.01`.
pub const OSCILLATORS: usize = 49;

/// Lag between the symbols compared by a differential detector under
/// block-by-block transmission.
pub const BLOCK_LAG: u32 = 1;

/// Which hop of the dual-hop link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hop {
    /// Source to relay.
    SourceRelay,
    /// Relay to destination.
    RelayDestination,
}

impl Hop {
    /// 1 for source-relay, 2 for relay-destination.
    pub fn index(self) -> u8 {
        match self {
            Hop::SourceRelay => 1,
            Hop::RelayDestination => 2,
        }
    }

    fn lane(self) -> u64 {
        match self {
            Hop::SourceRelay => LANE_HOP1,
            Hop::RelayDestination => LANE_HOP2,
        }
    }
}

/// Variances and normalised Doppler rates of both hops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    sigma2_1: f64,
    sigma2_2: f64,
    f1: f64,
    f2: f64,
}

impl ChannelParams {
    pub fn new(sigma2_1: f64, sigma2_2: f64, f1: f64, f2: f64) -> Result<Self> {
        for (name, v) in [("sigma2_1", sigma2_1), ("sigma2_2", sigma2_2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain { name, value: v });
            }
        }
        for (name, f) in [("f1", f1), ("f2", f2)] {
            if !(0.0..0.5).contains(&f) {
                return Err(Error::Domain { name, value: f });
            }
        }
        Ok(Self { sigma2_1, sigma2_2, f1, f2 })
    }

    pub fn sigma2_1(&self) -> f64 {
        self.sigma2_1
    }

    pub fn sigma2_2(&self) -> f64 {
        self.sigma2_2
    }

    pub fn f1(&self) -> f64 {
        self.f1
    }

    pub fn f2(&self) -> f64 {
        self.f2
    }

    pub fn variance(&self, hop: Hop) -> f64 {
        match hop {
            Hop::SourceRelay => self.sigma2_1,
            Hop::RelayDestination => self.sigma2_2,
        }
    }

    pub fn doppler(&self, hop: Hop) -> f64 {
        match hop {
            Hop::SourceRelay => self.f1,
            Hop::RelayDestination => self.f2,
        }
    }

    /// Same variances, different Doppler rates.
    pub fn with_dopplers(&self, f1: f64, f2: f64) -> Result<Self> {
        Self::new(self.sigma2_1, self.sigma2_2, f1, f2)
    }
}

/// `phi_i(n) = sigma_i^2 J0(2 pi f_i n)`.
pub fn autocorr(params: &ChannelParams, hop: Hop, lag: u32) -> f64 {
    params.variance(hop) * bessel_j0(2.0 * PI * params.doppler(hop) * lag as f64)
}

/// Autocorrelation of the cascaded channel `h1 h2`: `phi_1(n) phi_2(n)`.
pub fn cascaded_autocorr(params: &ChannelParams, lag: u32) -> f64 {
    autocorr(params, Hop::SourceRelay, lag) * autocorr(params, Hop::RelayDestination, lag)
}

/// Normalised cascaded autocorrelation `alpha = alpha_1 alpha_2` at `lag >= 1`.
pub fn cascaded_alpha(params: &ChannelParams, lag: u32) -> Result<f64> {
    if lag == 0 {
        return Err(Error::InvalidParameter("cascaded_alpha requires lag >= 1"));
    }
    let a1 = autocorr(params, Hop::SourceRelay, lag) / params.sigma2_1;
    let a2 = autocorr(params, Hop::RelayDestination, lag) / params.sigma2_2;
    Ok(a1 * a2)
}

/// Generator used for a fading process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Generator {
    /// Sum of sinusoids with Clarke autocorrelation.
    #[default]
    Jakes,
    /// First-order autoregressive model with `alpha = J0(2 pi f)`.
    Ar1,
}

/// Sampled channel coefficients of one hop.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingProcess {
    samples: Vec<Complex64>,
    params: ChannelParams,
    hop: Hop,
    generator: Generator,
}

impl FadingProcess {
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    pub fn hop(&self) -> Hop {
        self.hop
    }

    pub fn generator(&self) -> Generator {
        self.generator
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Generates `length` samples of hop `hop` with the selected generator.
pub fn generate(
    generator: Generator,
    params: &ChannelParams,
    hop: Hop,
    length: usize,
    seed: u64,
) -> Result<FadingProcess> {
    match generator {
        Generator::Jakes => gen_jakes(params, hop, length, seed),
        Generator::Ar1 => gen_ar1(params, hop, length, seed),
    }
}

/// Sum-of-sinusoids Rayleigh process.
///
/// `h[k] = sqrt(sigma^2 / N) sum_n exp(j (2 pi f k cos(a_n) + phase_n))` with
/// `N = OSCILLATORS` arrival angles `a_n = 2 pi (n + 1/8) / N` around
/// the full circle and independent uniform phases. The time average of
/// `h[k + m] h*[k]` is the rectangle rule for
/// `J0(x) = (1/2pi) int exp(j x cos a) da` over a full period, which is
/// accurate to near machine precision at the lags of interest, so one long
/// record follows the ensemble law. Unit phasors make the record power exact.
///
/// With `N` odd and the 1/8-step offset, no two angles are mirror images
/// (`a`, `-a`) or opposite (`a`, `pi -+ a`), so no two phasors share or negate a
/// frequency. Such pairs leave cross terms that do not average out of a
/// finite record and unbalance the quadrature branches.
pub fn gen_jakes(params: &ChannelParams, hop: Hop, length: usize, seed: u64) -> Result<FadingProcess> {
    if length == 0 {
        return Err(Error::InvalidParameter("fading process length must be >= 1"));
    }
    let mut rng = rng::stream(seed, hop.lane());
    let omega = 2.0 * PI * params.doppler(hop);
    let count = OSCILLATORS;
    let scale = (params.variance(hop) / count as f64).sqrt();

    // (phase, angular rate)
    let oscillators: Vec<(f64, f64)> = (0..count)
        .map(|n| {
            let angle = 2.0 * PI * (n as f64 + 0.125) / count as f64;
            (rng.random_range(-PI..PI), omega * angle.cos())
        })
        .collect();

    // Phasors advance by one rotation per sample and are recomputed exactly
    // every `REANCHOR` samples to bound rounding drift.
    const REANCHOR: usize = 1024;
    let mut state: Vec<(Complex64, Complex64)> = oscillators
        .iter()
        .map(|&(phase, rate)| (Complex64::from_polar(1.0, phase), Complex64::from_polar(1.0, rate)))
        .collect();
    let mut samples = Vec::with_capacity(length);
    for t in 0..length {
        if t > 0 && t % REANCHOR == 0 {
            for (z, &(phase, rate)) in state.iter_mut().zip(&oscillators) {
                z.0 = Complex64::from_polar(1.0, rate * t as f64 + phase);
            }
        }
        let sum: Complex64 = state.iter().map(|z| z.0).sum();
        samples.push(sum * scale);
        for z in state.iter_mut() {
            z.0 *= z.1;
        }
    }
    Ok(FadingProcess { samples, params: *params, hop, generator: Generator::Jakes })
}

/// AR(1) process `h[k] = alpha h[k-1] + sqrt(1 - alpha^2) e[k]`, started from
/// the stationary distribution.
pub fn gen_ar1(params: &ChannelParams, hop: Hop, length: usize, seed: u64) -> Result<FadingProcess> {
    if length == 0 {
        return Err(Error::InvalidParameter("fading process length must be >= 1"));
    }
    let mut rng = rng::stream(seed, hop.lane());
    let variance = params.variance(hop);
    let alpha = autocorr(params, hop, 1) / variance;
    let innovation_scale = (1.0 - alpha * alpha).max(0.0).sqrt();
    let mut samples = Vec::with_capacity(length);
    let mut h = rng::complex_gaussian(&mut rng, variance);
    samples.push(h);
    for _ in 1..length {
        let e = rng::complex_gaussian(&mut rng, variance);
        h = h * alpha + e * innovation_scale;
        samples.push(h);
    }
    Ok(FadingProcess { samples, params: *params, hop, generator: Generator::Ar1 })
}

/// Time-averaged `E{h[k] h*[k + lag]}` of a sampled process.
pub fn empirical_autocorrelation(samples: &[Complex64], lag: usize) -> Complex64 {
    if lag >= samples.len() {
        return Complex64::new(0.0, 0.0);
    }
    let n = samples.len() - lag;
    let sum: Complex64 = samples[..n]
        .iter()
        .zip(&samples[lag..])
        .map(|(a, b)| a * b.conj())
        .sum();
    sum / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j0_oracle(x: f64) -> f64 {
        1.0 - x * x / 4.0 + x.powi(4) / 64.0 - x.powi(6) / 2304.0
    }

    fn unit(f: f64) -> ChannelParams {
        ChannelParams::new(1.0, 1.0, f, f).unwrap()
    }

    #[test]
    fn autocorr_values() {
        assert_eq!(autocorr(&unit(0.37), Hop::SourceRelay, 0), 1.0);
        let x = 2.0 * PI * 0.001;
        assert!((autocorr(&unit(0.001), Hop::SourceRelay, 1) - j0_oracle(x)).abs() < 1e-12);
        let p = ChannelParams::new(10.0, 1.0, 0.01, 0.0).unwrap();
        let want = 10.0 * j0_oracle(2.0 * PI * 0.01);
        assert!((autocorr(&p, Hop::SourceRelay, 1) - want).abs() < 1e-10);
        assert!((want - 9.99013).abs() < 1e-5);
    }

    #[test]
    fn cascaded_alpha_cases() {
        let static_ch = ChannelParams::new(1.0, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(cascaded_alpha(&static_ch, 1).unwrap(), 1.0);
        let case2 = ChannelParams::new(1.0, 1.0, 0.01, 0.001).unwrap();
        let want2 = j0_oracle(2.0 * PI * 0.01) * j0_oracle(2.0 * PI * 0.001);
        assert!((cascaded_alpha(&case2, 1).unwrap() - want2).abs() < 1e-10);
        assert!((want2 - 0.99902).abs() < 5e-5);
        let case3 = ChannelParams::new(3.0, 0.5, 0.02, 0.01).unwrap();
        let want3 = j0_oracle(2.0 * PI * 0.02) * j0_oracle(2.0 * PI * 0.01);
        assert!((cascaded_alpha(&case3, 1).unwrap() - want3).abs() < 1e-10);
        assert!((want3 - 0.99508).abs() < 1e-5);
        assert!(cascaded_alpha(&case3, 0).is_err());
    }

    #[test]
    fn cascaded_alpha_monotone_in_doppler() {
        let mut prev = f64::INFINITY;
        for i in 0..=100 {
            let f = 0.001 * i as f64;
            let a = cascaded_alpha(&ChannelParams::new(1.0, 1.0, f, 0.005).unwrap(), 1).unwrap();
            assert!(a <= prev);
            assert!(a <= 1.0);
            prev = a;
        }
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(ChannelParams::new(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(ChannelParams::new(1.0, -1.0, 0.0, 0.0).is_err());
        assert!(ChannelParams::new(1.0, 1.0, 0.5, 0.0).is_err());
        assert!(ChannelParams::new(1.0, 1.0, 0.0, -0.1).is_err());
        assert!(gen_jakes(&unit(0.01), Hop::SourceRelay, 0, 1).is_err());
        assert!(gen_ar1(&unit(0.01), Hop::SourceRelay, 0, 1).is_err());
    }

    #[test]
    fn zero_doppler_is_constant() {
        for generator in [Generator::Jakes, Generator::Ar1] {
            let p = generate(generator, &unit(0.0), Hop::RelayDestination, 500, 9).unwrap();
            assert!(p.samples().iter().all(|&h| h == p.samples()[0]));
        }
    }

    #[test]
    fn generators_are_deterministic_per_seed_and_hop() {
        let p = unit(0.01);
        let a = gen_jakes(&p, Hop::SourceRelay, 1000, 42).unwrap();
        let b = gen_jakes(&p, Hop::SourceRelay, 1000, 42).unwrap();
        let c = gen_jakes(&p, Hop::RelayDestination, 1000, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.samples(), c.samples());
        let d = gen_ar1(&p, Hop::SourceRelay, 1000, 42).unwrap();
        assert_eq!(d, gen_ar1(&p, Hop::SourceRelay, 1000, 42).unwrap());
    }

    #[test]
    fn jakes_lag_one_autocorrelation() {
        let p = unit(0.01);
        let h = gen_jakes(&p, Hop::SourceRelay, 100_000, 5).unwrap();
        let r1 = empirical_autocorrelation(h.samples(), 1).re;
        assert!((r1 - 0.99803).abs() < 0.02, "lag-1 {r1}");
    }

    #[test]
    fn ar1_stationary_statistics() {
        let p = ChannelParams::new(2.0, 1.0, 0.2, 0.01).unwrap();
        let h = gen_ar1(&p, Hop::SourceRelay, 100_000, 11).unwrap();
        let power = empirical_autocorrelation(h.samples(), 0).re;
        assert!((power / 2.0 - 1.0).abs() < 0.02, "power {power}");
        let alpha = bessel_j0(2.0 * PI * 0.2);
        let r1 = empirical_autocorrelation(h.samples(), 1).re;
        assert!((r1 / (alpha * 2.0) - 1.0).abs() < 0.02, "lag-1 {r1}");
    }
}
