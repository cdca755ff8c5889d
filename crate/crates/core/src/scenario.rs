//! Experiment presets and BER result records.

use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::fading::{ChannelParams, Generator};
// inherent float methods take over whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

/// The three Doppler scenarios of the study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FadingCase {
    /// Slow fading on both hops.
    I,
    /// Fast source-relay hop.
    II,
    /// Fast fading on both hops.
    III,
}

impl FadingCase {
    pub const ALL: [FadingCase; 3] = [FadingCase::I, FadingCase::II, FadingCase::III];

    /// Normalised Doppler rates `(f1, f2)`.
    pub fn dopplers(self) -> (f64, f64) {
        match self {
            FadingCase::I => (0.001, 0.001),
            FadingCase::II => (0.01, 0.001),
            FadingCase::III => (0.02, 0.01),
        }
    }

    pub fn channel(self, sigma2_1: f64, sigma2_2: f64) -> Result<ChannelParams> {
        let (f1, f2) = self.dopplers();
        ChannelParams::new(sigma2_1, sigma2_2, f1, f2)
    }
}

impl fmt::Display for FadingCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FadingCase::I => "I",
            FadingCase::II => "II",
            FadingCase::III => "III",
        })
    }
}

impl FromStr for FadingCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "I" | "i" | "1" => Ok(FadingCase::I),
            "II" | "ii" | "2" => Ok(FadingCase::II),
            "III" | "iii" | "3" => Ok(FadingCase::III),
            _ => Err(Error::InvalidParameter("fading case must be I, II or III")),
        }
    }
}

/// Receiver used by a simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DetectorKind {
    /// Two-symbol differential detection.
    Cdd,
    /// Multiple-symbol detection with the given window length.
    Msd(usize),
    /// Coherent detection with perfect channel knowledge and the true
    /// previous symbol.
    Coherent,
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DetectorKind::Cdd => f.write_str("cdd"),
            DetectorKind::Msd(n) => write!(f, "msd{n}"),
            DetectorKind::Coherent => f.write_str("coherent"),
        }
    }
}

/// Everything except the SNR that defines a BER curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub ch: ChannelParams,
    pub rho: f64,
    pub order: usize,
    /// `None` when the Doppler rates were given explicitly.
    pub fading_case: Option<FadingCase>,
    pub detector: DetectorKind,
    pub generator: Generator,
}

impl Scenario {
    pub fn new(name: impl Into<String>, ch: ChannelParams, rho: f64, order: usize, detector: DetectorKind) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::Domain { name: "rho", value: rho });
        }
        if order < 2 || !order.is_power_of_two() {
            return Err(Error::UnsupportedOrder(order));
        }
        if let DetectorKind::Msd(n) = detector {
            if n < 2 {
                return Err(Error::InvalidParameter("MSD window length must be >= 2"));
            }
        }
        Ok(Self { name: name.into(), ch, rho, order, fading_case: None, detector, generator: Generator::Jakes })
    }

    /// Preset with the Doppler pair of `case`.
    pub fn preset(
        case: FadingCase,
        sigma2: (f64, f64),
        rho: f64,
        order: usize,
        detector: DetectorKind,
    ) -> Result<Self> {
        let ch = case.channel(sigma2.0, sigma2.1)?;
        let name = alloc::format!("case{case}-M{order}-[{},{}]-rho{rho}-{detector}", sigma2.0, sigma2.1);
        let mut sc = Self::new(name, ch, rho, order, detector)?;
        sc.fading_case = Some(case);
        Ok(sc)
    }

    pub fn with_generator(mut self, generator: Generator) -> Self {
        self.generator = generator;
        self
    }

    pub fn with_detector(mut self, detector: DetectorKind) -> Self {
        self.detector = detector;
        self
    }
}

/// Origin of a BER value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    Theory,
    Simulation,
    /// High-power limit; the SNR field is `+inf`.
    Floor,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Theory => "theory",
            Source::Simulation => "simulation",
            Source::Floor => "floor",
        })
    }
}

/// One point of a BER curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerPoint {
    pub snr_db: f64,
    pub ber: f64,
    pub errors: u64,
    pub trials: u64,
    /// Independent-trial equivalent of `trials`; see [`crate::sim::Tally::effective_bits`].
    pub effective_trials: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub source: Source,
}

/// Two-sided normal quantile for 95% coverage.
pub const Z_95: f64 = 1.959_963_984_540_054;

impl BerPoint {
    /// Monte Carlo estimate from independent trials with its 95% Wilson interval.
    pub fn simulated(snr_db: f64, errors: u64, trials: u64) -> Self {
        Self::clustered(snr_db, errors, trials, trials as f64)
    }

    /// Monte Carlo estimate whose Wilson interval uses `effective_trials`.
    pub fn clustered(snr_db: f64, errors: u64, trials: u64, effective_trials: f64) -> Self {
        let ber = if trials == 0 { 0.0 } else { errors as f64 / trials as f64 };
        let (ci_low, ci_high) = wilson_interval_at(ber, effective_trials, Z_95);
        Self { snr_db, ber, errors, trials, effective_trials, ci_low, ci_high, source: Source::Simulation }
    }

    /// Analytical value; the interval collapses to the value.
    pub fn theory(snr_db: f64, ber: f64) -> Self {
        Self {
            snr_db,
            ber,
            errors: 0,
            trials: 0,
            effective_trials: 0.0,
            ci_low: ber,
            ci_high: ber,
            source: Source::Theory,
        }
    }

    pub fn floor(ber: f64) -> Self {
        Self { source: Source::Floor, ..Self::theory(f64::INFINITY, ber) }
    }

    /// Standard error of a simulated estimate.
    pub fn standard_error(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        (self.ber * (1.0 - self.ber) / self.effective_trials).sqrt()
    }
}

/// Wilson score interval for `errors` successes in `trials` Bernoulli trials.
pub fn wilson_interval(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    wilson_interval_at(errors as f64 / trials as f64, trials as f64, z)
}

/// Wilson interval for proportion `p` observed over `n` (possibly fractional) trials.
pub fn wilson_interval_at(p: f64, n: f64, z: f64) -> (f64, f64) {
    if n <= 0.0 {
        return (0.0, 1.0);
    }
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    // clamp so that the interval always contains the point estimate
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_dopplers() {
        assert_eq!(FadingCase::I.dopplers(), (0.001, 0.001));
        assert_eq!(FadingCase::II.dopplers(), (0.01, 0.001));
        assert_eq!(FadingCase::III.dopplers(), (0.02, 0.01));
        for c in FadingCase::ALL {
            assert_eq!(alloc::format!("{c}").parse::<FadingCase>().unwrap(), c);
        }
        assert!("IV".parse::<FadingCase>().is_err());
    }

    #[test]
    fn wilson_reference_values() {
        // 10 of 100 at 95%: textbook interval (0.0552, 0.1744)
        let (lo, hi) = wilson_interval(10, 100, Z_95);
        assert!((lo - 0.05523).abs() < 1e-4 && (hi - 0.17437).abs() < 1e-4);
        let (lo, hi) = wilson_interval(0, 50, Z_95);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.07135).abs() < 1e-4);
        let p = BerPoint::simulated(10.0, 7, 1000);
        assert!(p.ci_low <= p.ber && p.ber <= p.ci_high && p.errors <= p.trials);
    }

    #[test]
    fn scenario_validation() {
        assert!(Scenario::preset(FadingCase::I, (1.0, 1.0), 0.3, 2, DetectorKind::Cdd).is_ok());
        assert!(Scenario::preset(FadingCase::I, (1.0, 1.0), 1.0, 2, DetectorKind::Cdd).is_err());
        assert!(Scenario::preset(FadingCase::I, (1.0, 1.0), 0.3, 3, DetectorKind::Cdd).is_err());
        assert!(Scenario::preset(FadingCase::I, (1.0, 1.0), 0.3, 2, DetectorKind::Msd(1)).is_err());
        let floor = BerPoint::floor(1e-3);
        assert!(floor.snr_db.is_infinite() && floor.source == Source::Floor);
    }
}
