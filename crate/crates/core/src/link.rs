//! Dual-hop amplify-and-forward transmission chain.
//!
//! Source sends `sqrt(P0) s[k]` over `h1`, the relay scales its observation by
//! a fixed gain `A` and forwards it over `h2`:
//!
//! ```text
//! x[k] = sqrt(P0) h1[k] s[k] + w1[k]
//! y[k] = A h2[k] x[k] + w2[k] = A sqrt(P0) h1[k] h2[k] s[k] + w[k]
//! ```

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fading::FadingProcess;
use crate::rng::{self, LANE_NOISE};
// inherent float methods take over whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

/// Relay gain `A = sqrt(P1 / (P0 sigma_1^2 + N0))` that normalises the
/// average relay transmit power to `P1`.
pub fn amp_factor(p0: f64, p1: f64, sigma2_1: f64, n0: f64) -> Result<f64> {
    for (name, v) in [("P0", p0), ("P1", p1), ("sigma2_1", sigma2_1), ("N0", n0)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Domain { name, value: v });
        }
    }
    Ok((p1 / (p0 * sigma2_1 + n0)).sqrt())
}

/// Powers, noise level and relay gain of the link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConfig {
    p0: f64,
    p1: f64,
    n0: f64,
    amplification: f64,
    order: usize,
}

impl LinkConfig {
    /// Explicit powers and relay gain.
    pub fn new(p0: f64, p1: f64, n0: f64, amplification: f64, order: usize) -> Result<Self> {
        for (name, v) in [("P0", p0), ("P1", p1), ("N0", n0), ("A", amplification)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain { name, value: v });
            }
        }
        if order < 2 || !order.is_power_of_two() {
            return Err(Error::UnsupportedOrder(order));
        }
        Ok(Self { p0, p1, n0, amplification, order })
    }

    /// Splits the total power `P` as `P0 = rho P`, `P1 = (1 - rho) P` and
    /// sets the relay gain from the source-relay variance.
    pub fn from_total_power(total: f64, rho: f64, sigma2_1: f64, n0: f64, order: usize) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::Domain { name: "rho", value: rho });
        }
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Domain { name: "P", value: total });
        }
        let p0 = rho * total;
        let p1 = (1.0 - rho) * total;
        let a = amp_factor(p0, p1, sigma2_1, n0)?;
        Self::new(p0, p1, n0, a, order)
    }

    /// Unit noise and `P / N0 = 10^(snr_db / 10)`.
    pub fn from_snr_db(snr_db: f64, rho: f64, sigma2_1: f64, order: usize) -> Result<Self> {
        Self::from_total_power(db_to_linear(snr_db), rho, sigma2_1, 1.0, order)
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn amplification(&self) -> f64 {
        self.amplification
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Power-allocation factor `P0 / (P0 + P1)`.
    pub fn rho(&self) -> f64 {
        self.p0 / (self.p0 + self.p1)
    }

    pub fn total_power(&self) -> f64 {
        self.p0 + self.p1
    }

    /// Average received SNR per symbol at the relay, `P0 sigma_1^2 / N0`.
    pub fn relay_snr(&self, sigma2_1: f64) -> f64 {
        self.p0 * sigma2_1 / self.n0
    }

    /// End-to-end signal gain `A sqrt(P0)`.
    pub fn signal_gain(&self) -> f64 {
        self.amplification * self.p0.sqrt()
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// One simulated transmission with every intermediate signal retained.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub s: Vec<Complex64>,
    pub h1: Vec<Complex64>,
    pub h2: Vec<Complex64>,
    pub x: Vec<Complex64>,
    pub y: Vec<Complex64>,
    pub w1: Vec<Complex64>,
    pub w2: Vec<Complex64>,
}

impl Frame {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// Cascaded channel `h1[k] h2[k]`.
    pub fn cascaded(&self) -> Vec<Complex64> {
        self.h1.iter().zip(&self.h2).map(|(a, b)| a * b).collect()
    }
}

/// Sends `s` through both hops with noise drawn from `noise_seed`.
pub fn transmit(
    s: &[Complex64],
    h1: &FadingProcess,
    h2: &FadingProcess,
    cfg: &LinkConfig,
    noise_seed: u64,
) -> Result<Frame> {
    transmit_over(s, h1.samples(), h2.samples(), cfg, Some(noise_seed))
}

/// Same as [`transmit`] with both noise sources forced to zero.
pub fn transmit_noiseless(s: &[Complex64], h1: &FadingProcess, h2: &FadingProcess, cfg: &LinkConfig) -> Result<Frame> {
    transmit_over(s, h1.samples(), h2.samples(), cfg, None)
}

/// Transmission over raw channel samples; `noise_seed = None` disables noise.
pub fn transmit_over(
    s: &[Complex64],
    h1: &[Complex64],
    h2: &[Complex64],
    cfg: &LinkConfig,
    noise_seed: Option<u64>,
) -> Result<Frame> {
    for len in [h1.len(), h2.len()] {
        if len != s.len() {
            return Err(Error::LengthMismatch { expected: s.len(), actual: len });
        }
    }
    let n = s.len();
    let mut noise = noise_seed.map(|seed| rng::stream(seed, LANE_NOISE));
    let sqrt_p0 = cfg.p0.sqrt();
    let a = cfg.amplification;
    let mut frame = Frame {
        s: s.to_vec(),
        h1: h1.to_vec(),
        h2: h2.to_vec(),
        x: Vec::with_capacity(n),
        y: Vec::with_capacity(n),
        w1: Vec::with_capacity(n),
        w2: Vec::with_capacity(n),
    };
    let zero = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let (w1, w2) = match noise.as_mut() {
            Some(rng) => (rng::complex_gaussian(rng, cfg.n0), rng::complex_gaussian(rng, cfg.n0)),
            None => (zero, zero),
        };
        let x = h1[k] * s[k] * sqrt_p0 + w1;
        let y = h2[k] * x * a + w2;
        frame.x.push(x);
        frame.y.push(y);
        frame.w1.push(w1);
        frame.w2.push(w2);
    }
    Ok(frame)
}
