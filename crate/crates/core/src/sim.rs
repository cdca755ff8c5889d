//! Single-frame Monte Carlo kernel.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::detect::{cdd_detect, coherent_detect, MsdDetector};
use crate::error::Result;
use crate::fading::{generate, Hop};
use crate::link::{transmit, transmit_noiseless, LinkConfig};
use crate::modem::{diff_encode, Constellation};
use crate::rng::{self, LANE_DATA};
use crate::scenario::{DetectorKind, Scenario};

/// Data symbols per frame; the transmitted block carries one extra reference.
pub const FRAME_SYMBOLS: usize = 1000;

/// Bit-error tally of one or more frames.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub errors: u64,
    pub bits: u64,
    pub frames: u64,
    /// Sum over frames of the squared per-frame error count.
    pub squared_errors: u64,
}

impl Tally {
    /// Tally of a single frame.
    pub fn frame(errors: u64, bits: u64) -> Self {
        Self { errors, bits, frames: 1, squared_errors: errors * errors }
    }

    pub fn add(&mut self, other: Tally) {
        self.errors += other.errors;
        self.bits += other.bits;
        self.frames += other.frames;
        self.squared_errors += other.squared_errors;
    }

    /// Bit count corrected for the clustering of errors within frames.
    ///
    /// Bits of one frame share a channel realisation, so under slow fading
    /// errors arrive in bursts and the bit count overstates the information in
    /// the sample. The correction divides by the design effect, the ratio of
    /// the observed between-frame variance of the error count to its binomial
    /// value (floored at one). Frames are assumed to be of equal length.
    pub fn effective_bits(&self) -> f64 {
        let bits = self.bits as f64;
        if self.frames < 2 || self.errors == 0 || self.errors == self.bits {
            return bits;
        }
        let f = self.frames as f64;
        let per_frame = bits / f;
        let p = self.errors as f64 / bits;
        let mean = self.errors as f64 / f;
        let var = ((self.squared_errors as f64 - f * mean * mean) / (f - 1.0)).max(0.0);
        let design_effect = (var / (per_frame * p * (1.0 - p))).max(1.0);
        bits / design_effect
    }
}

/// Everything that is fixed across the frames of one BER point.
#[derive(Debug, Clone)]
pub struct FrameSimulator {
    scenario: Scenario,
    cfg: LinkConfig,
    constellation: Constellation,
    msd: Option<MsdDetector>,
    frame_symbols: usize,
    noiseless: bool,
}

impl FrameSimulator {
    pub fn new(scenario: &Scenario, snr_db: f64) -> Result<Self> {
        let cfg = LinkConfig::from_snr_db(snr_db, scenario.rho, scenario.ch.sigma2_1(), scenario.order)?;
        let constellation = Constellation::new(scenario.order)?;
        let msd = match scenario.detector {
            DetectorKind::Msd(n) => Some(MsdDetector::new(n, &cfg, &scenario.ch, constellation.clone())?),
            _ => None,
        };
        Ok(Self {
            scenario: scenario.clone(),
            cfg,
            constellation,
            msd,
            frame_symbols: FRAME_SYMBOLS,
            noiseless: false,
        })
    }

    /// Drops both receiver noise sources (detectors still assume the
    /// configured noise level).
    pub fn noiseless(mut self, on: bool) -> Self {
        self.noiseless = on;
        self
    }

    pub fn with_frame_symbols(mut self, n: usize) -> Self {
        self.frame_symbols = n.max(1);
        self
    }

    pub fn config(&self) -> &LinkConfig {
        &self.cfg
    }

    pub fn bits_per_frame(&self) -> u64 {
        (self.frame_symbols * self.constellation.bits_per_symbol()) as u64
    }

    /// Simulates one frame whose randomness is fully determined by `seed`.
    pub fn run(&self, seed: u64) -> Result<Tally> {
        let order = self.constellation.order();
        let mut data_rng = rng::stream(seed, LANE_DATA);
        let data: Vec<usize> = (0..self.frame_symbols).map(|_| data_rng.random_range(0..order)).collect();
        let v: Vec<Complex64> = data.iter().map(|&m| self.constellation.point(m)).collect();
        let s = diff_encode(&v)?;

        let len = s.len();
        let ch = &self.scenario.ch;
        let h1 = generate(self.scenario.generator, ch, Hop::SourceRelay, len, seed)?;
        let h2 = generate(self.scenario.generator, ch, Hop::RelayDestination, len, seed)?;
        let frame = if self.noiseless {
            transmit_noiseless(&s, &h1, &h2, &self.cfg)?
        } else {
            transmit(&s, &h1, &h2, &self.cfg, seed)?
        };

        let decisions: Vec<usize> = match self.scenario.detector {
            DetectorKind::Cdd => frame.y.windows(2).map(|w| cdd_detect(w[0], w[1], &self.constellation)).collect(),
            DetectorKind::Coherent => {
                let h = frame.cascaded();
                (1..len)
                    .map(|k| coherent_detect(frame.y[k], h[k], s[k - 1], &self.cfg, &self.constellation))
                    .collect()
            }
            DetectorKind::Msd(_) => self.msd.as_ref().expect("built for MSD scenarios").detect_stream(&frame.y)?,
        };

        let errors = decisions
            .iter()
            .zip(&data)
            .map(|(&d, &m)| u64::from(self.constellation.bit_distance(d, m)))
            .sum();
        Ok(Tally::frame(errors, self.bits_per_frame()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::FadingCase;

    fn scenario(case: FadingCase, order: usize, det: DetectorKind) -> Scenario {
        Scenario::preset(case, (1.0, 1.0), 0.3, order, det).unwrap()
    }

    #[test]
    fn effective_bits_tracks_clustering() {
        // between-frame variance below the binomial 90: no correction
        let mut spread = Tally::default();
        for e in [100u64, 90, 110, 100, 91, 109, 100, 100] {
            spread.add(Tally::frame(e, 1000));
        }
        let var = (spread.squared_errors as f64 - 8.0 * 100.0 * 100.0) / 7.0;
        assert!((var - 362.0 / 7.0).abs() < 1e-9);
        assert!((spread.effective_bits() - 8000.0).abs() < 1e-9);

        // every error in one frame
        let mut burst = Tally::frame(800, 1000);
        for _ in 0..7 {
            burst.add(Tally::frame(0, 1000));
        }
        let var = (640_000.0 - 8.0 * 100.0 * 100.0) / 7.0;
        assert!((burst.effective_bits() - 8000.0 / (var / 90.0)).abs() < 1e-6);
        assert!(burst.effective_bits() < 100.0);

        assert_eq!(Tally::frame(0, 1000).effective_bits(), 1000.0);
    }

    #[test]
    fn noiseless_static_channel_is_error_free() {
        // any Doppler leaves a small error floor even without noise
        let ch = crate::fading::ChannelParams::new(1.0, 1.0, 0.0, 0.0).unwrap();
        for det in [DetectorKind::Cdd, DetectorKind::Coherent, DetectorKind::Msd(5)] {
            for order in [2, 4] {
                let sc = Scenario::new("static", ch, 0.3, order, det).unwrap();
                let sim = FrameSimulator::new(&sc, 30.0).unwrap().noiseless(true);
                for seed in 0..3 {
                    let t = sim.run(seed).unwrap();
                    assert_eq!(t.errors, 0, "{det} M={order}");
                    assert_eq!(t.bits, (FRAME_SYMBOLS * order.trailing_zeros() as usize) as u64);
                }
            }
        }
    }

    #[test]
    fn frames_are_reproducible() {
        let sim = FrameSimulator::new(&scenario(FadingCase::III, 4, DetectorKind::Msd(4)), 10.0).unwrap();
        let a: Vec<Tally> = (0..4).map(|s| sim.run(s).unwrap()).collect();
        let b: Vec<Tally> = (0..4).map(|s| sim.run(s).unwrap()).collect();
        assert_eq!(a, b);
        assert!(a.iter().any(|t| t.errors > 0));
    }

    #[test]
    fn low_snr_errors_are_plausible() {
        let sim = FrameSimulator::new(&scenario(FadingCase::I, 2, DetectorKind::Cdd), 0.0).unwrap();
        let mut total = Tally::default();
        for s in 0..20 {
            total.add(sim.run(s).unwrap());
        }
        let ber = total.errors as f64 / total.bits as f64;
        // theory is about 0.46 at 0 dB
        assert!(ber > 0.35 && ber < 0.5, "{ber}");
    }
}
