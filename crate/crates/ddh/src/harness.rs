//! Parallel, reproducible Monte Carlo BER estimation.
//!
//! Frames are simulated in fixed-size batches. Every frame draws its channel,
//! data and noise from a seed derived from `(master seed, SNR, frame index)`,
//! and the stopping rule is only consulted between batches, so the set of
//! simulated frames (and hence every count) is independent of the number of
//! worker threads.

use rayon::prelude::*;

use ddh_core::analysis::{channel_error_floor, ModulationAnalysisParams};
use ddh_core::fading::ChannelParams;
use ddh_core::rng::frame_seed;
use ddh_core::scenario::{BerPoint, DetectorKind, Scenario};
use ddh_core::sim::{FrameSimulator, Tally, FRAME_SYMBOLS};
use ddh_core::{Error, Result};

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "DDH_WORKERS";

/// Frames simulated between two evaluations of the stopping rule.
pub const DEFAULT_BATCH_FRAMES: u64 = 32;

/// When to stop sampling one BER point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct StopRule {
    pub min_errors: u64,
    pub min_bits: u64,
    pub max_bits: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self { min_errors: 100, min_bits: 100_000, max_bits: 100_000_000 }
    }
}

impl StopRule {
    pub fn satisfied(&self, t: &Tally) -> bool {
        t.bits >= self.max_bits || (t.errors >= self.min_errors && t.bits >= self.min_bits)
    }
}

/// Execution knobs that do not change the estimate's definition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// `None` uses [`WORKERS_ENV`] or the number of available cores.
    pub workers: Option<usize>,
    pub batch_frames: u64,
    pub frame_symbols: usize,
    pub noiseless: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { workers: None, batch_frames: DEFAULT_BATCH_FRAMES, frame_symbols: FRAME_SYMBOLS, noiseless: false }
    }
}

/// Worker count from the environment, falling back to the core count.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or_else(default_workers))
        .build()
        .map_err(|_| Error::InvalidParameter("could not start worker pool"))
}

/// Simulated BER of `sc` at every SNR in `grid` with default options.
pub fn run_ber(sc: &Scenario, grid: &[f64], stop: StopRule, seed: u64) -> Result<Vec<BerPoint>> {
    run_ber_with(sc, grid, stop, seed, &RunOptions::default())
}

pub fn run_ber_with(
    sc: &Scenario,
    grid: &[f64],
    stop: StopRule,
    seed: u64,
    opts: &RunOptions,
) -> Result<Vec<BerPoint>> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("SNR grid must not be empty"));
    }
    if opts.batch_frames == 0 {
        return Err(Error::InvalidParameter("batch size must be positive"));
    }
    pool(opts.workers)?.install(|| grid.par_iter().map(|&snr| run_point(sc, snr, stop, seed, opts)).collect())
}

fn run_point(sc: &Scenario, snr_db: f64, stop: StopRule, seed: u64, opts: &RunOptions) -> Result<BerPoint> {
    let sim = FrameSimulator::new(sc, snr_db)?.with_frame_symbols(opts.frame_symbols).noiseless(opts.noiseless);
    let point_key = snr_db.to_bits();
    let mut total = Tally::default();
    let mut next_frame = 0u64;
    while !stop.satisfied(&total) {
        let batch = (next_frame..next_frame + opts.batch_frames)
            .into_par_iter()
            .map(|frame| sim.run(frame_seed(seed, point_key, frame)))
            .try_reduce(Tally::default, |mut a, b| {
                a.add(b);
                Ok(a)
            })?;
        total.add(batch);
        next_frame += opts.batch_frames;
    }
    log::debug!("{}: {snr_db} dB, {} errors in {} bits", sc.name, total.errors, total.bits);
    Ok(BerPoint::clustered(snr_db, total.errors, total.bits, total.effective_bits()))
}

/// Which Doppler rates a floor sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
pub enum SweepMode {
    /// `f1 = f2 = f`.
    Both,
    /// `f1 = f`, `f2 = 0.001`.
    F1Only,
}

/// Doppler rate held by the relay-destination hop in an `f1-only` sweep.
pub const FIXED_F2: f64 = 0.001;

/// Power used to observe the floor in simulation.
pub const FLOOR_SNR_DB: f64 = 60.0;

/// One point of an error-floor sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloorPoint {
    pub f: f64,
    pub f1: f64,
    pub f2: f64,
    pub floor: f64,
    pub sim: BerPoint,
}

/// Settings of an error-floor sweep besides the Doppler grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloorSweep {
    pub mode: SweepMode,
    pub order: usize,
    pub sigma2: (f64, f64),
    pub rho: f64,
    pub snr_db: f64,
    pub stop: StopRule,
}

impl FloorSweep {
    pub fn new(mode: SweepMode, order: usize) -> Self {
        Self { mode, order, sigma2: (1.0, 1.0), rho: 0.3, snr_db: FLOOR_SNR_DB, stop: StopRule::default() }
    }
}

/// Theoretical floor and simulated high-power CDD BER for each rate in `f_grid`.
pub fn error_floor_sweep(f_grid: &[f64], sweep: &FloorSweep, seed: u64, opts: &RunOptions) -> Result<Vec<FloorPoint>> {
    let p = ModulationAnalysisParams::new(sweep.order)?;
    f_grid
        .iter()
        .map(|&f| {
            if !(0.0005..=0.1).contains(&f) {
                return Err(Error::Domain { name: "f", value: f });
            }
            let (f1, f2) = match sweep.mode {
                SweepMode::Both => (f, f),
                SweepMode::F1Only => (f, FIXED_F2),
            };
            let ch = ChannelParams::new(sweep.sigma2.0, sweep.sigma2.1, f1, f2)?;
            let floor = channel_error_floor(&ch, &p)?;
            let sc = Scenario::new(format!("floor-f{f}"), ch, sweep.rho, sweep.order, DetectorKind::Cdd)?;
            let sim = run_ber_with(&sc, &[sweep.snr_db], sweep.stop, seed, opts)?[0];
            Ok(FloorPoint { f, f1, f2, floor, sim })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ddh_core::scenario::FadingCase;

    #[test]
    fn stop_rule() {
        let r = StopRule::default();
        assert!(!r.satisfied(&Tally { errors: 1000, bits: 50_000, ..Tally::default() }));
        assert!(!r.satisfied(&Tally { errors: 99, bits: 10_000_000, ..Tally::default() }));
        assert!(r.satisfied(&Tally { errors: 100, bits: 100_000, ..Tally::default() }));
        assert!(r.satisfied(&Tally { errors: 0, bits: 100_000_000, ..Tally::default() }));
    }

    #[test]
    fn noiseless_point_has_no_errors() {
        let sc = Scenario::preset(FadingCase::I, (1.0, 1.0), 0.3, 2, DetectorKind::Cdd).unwrap();
        let stop = StopRule { min_errors: 100, min_bits: 10_000, max_bits: 64_000 };
        let opts = RunOptions { noiseless: true, workers: Some(1), ..RunOptions::default() };
        let p = run_ber_with(&sc, &[20.0], stop, 1, &opts).unwrap()[0];
        assert_eq!(p.errors, 0);
        assert_eq!(p.trials, 64_000);
    }

    #[test]
    fn grid_and_range_validation() {
        let sc = Scenario::preset(FadingCase::I, (1.0, 1.0), 0.3, 2, DetectorKind::Cdd).unwrap();
        assert!(run_ber(&sc, &[], StopRule::default(), 1).is_err());
        let sweep = FloorSweep::new(SweepMode::Both, 2);
        assert!(error_floor_sweep(&[0.2], &sweep, 1, &RunOptions::default()).is_err());
    }
}
