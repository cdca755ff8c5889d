//! `ddh` command-line interface.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ddh_core::fading::{ChannelParams, Generator};
use ddh_core::scenario::{DetectorKind, FadingCase, Scenario};

use crate::harness::{error_floor_sweep, run_ber_with, FloorSweep, RunOptions, StopRule, SweepMode, FLOOR_SNR_DB};
use crate::output::{self, write_artifact, RunManifest};
use crate::theory::{power_allocation, theory_curve};
use crate::validate::{run_criterion, ValidationConfig, DEFAULT_SEED};

#[derive(Debug, Parser)]
#[command(name = "ddh", version, about = "Differential amplify-and-forward dual-hop relaying: theory and simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytical BER curve (CSV: snr_db, ber_theory, source)
    Theory(TheoryArgs),
    /// Monte Carlo BER curve (CSV: snr_db, ber_sim, errors, trials, ci_low, ci_high)
    Simulate(SimulateArgs),
    /// Power-allocation search (JSON: rho_grid, ber_curve, rho_opt)
    Poweralloc(PowerArgs),
    /// Error floor against fading rate, theory and simulation (CSV)
    Floorsweep(FloorArgs),
    /// Acceptance suite; exits 0 iff every criterion passes
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Modulation {
    Dbpsk,
    Dqpsk,
}

impl Modulation {
    pub fn order(self) -> usize {
        match self {
            Modulation::Dbpsk => 2,
            Modulation::Dqpsk => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Detector {
    Cdd,
    Msd,
    Coherent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Model {
    Jakes,
    Ar1,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScenarioArgs {
    #[arg(long = "mod", value_enum, default_value = "dbpsk")]
    pub modulation: Modulation,
    /// Doppler scenario: I, II or III
    #[arg(long = "case", default_value = "I", value_parser = parse_case)]
    #[serde(serialize_with = "serialize_display")]
    pub case: FadingCase,
    /// Channel variances of the two hops
    #[arg(long, default_value = "1,1", value_parser = parse_pair)]
    pub sigma: (f64, f64),
    /// Fraction of the total power given to the source
    #[arg(long, default_value_t = 0.3)]
    pub rho: f64,
    /// Override the source-relay Doppler rate of the case
    #[arg(long)]
    pub f1: Option<f64>,
    /// Override the relay-destination Doppler rate of the case
    #[arg(long)]
    pub f2: Option<f64>,
    #[arg(long, value_enum, default_value = "cdd")]
    pub detector: Detector,
    /// MSD window length
    #[arg(long, default_value_t = 10)]
    pub window: usize,
    #[arg(long, value_enum, default_value = "jakes")]
    pub model: Model,
}

impl ScenarioArgs {
    pub fn scenario(&self) -> ddh_core::Result<Scenario> {
        let detector = match self.detector {
            Detector::Cdd => DetectorKind::Cdd,
            Detector::Msd => DetectorKind::Msd(self.window),
            Detector::Coherent => DetectorKind::Coherent,
        };
        let order = self.modulation.order();
        let mut sc = Scenario::preset(self.case, self.sigma, self.rho, order, detector)?;
        if self.f1.is_some() || self.f2.is_some() {
            let (f1, f2) = self.case.dopplers();
            let ch = ChannelParams::new(self.sigma.0, self.sigma.1, self.f1.unwrap_or(f1), self.f2.unwrap_or(f2))?;
            let name = format!("f{}-{}-M{order}-{detector}", ch.f1(), ch.f2());
            sc = Scenario::new(name, ch, self.rho, order, detector)?;
        }
        let generator = match self.model {
            Model::Jakes => Generator::Jakes,
            Model::Ar1 => Generator::Ar1,
        };
        Ok(sc.with_generator(generator))
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TheoryArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// P/N0 grid in dB: `start:step:stop` or a comma list
    #[arg(long, default_value = "0:5:50", value_parser = parse_grid)]
    pub snr: SnrGrid,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StopArgs {
    #[arg(long, default_value_t = StopRule::default().min_errors)]
    pub min_errors: u64,
    #[arg(long, default_value_t = StopRule::default().min_bits)]
    pub min_bits: u64,
    #[arg(long, default_value_t = StopRule::default().max_bits)]
    pub max_bits: u64,
}

impl StopArgs {
    fn rule(&self) -> StopRule {
        StopRule { min_errors: self.min_errors, min_bits: self.min_bits, max_bits: self.max_bits }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, default_value = "0:5:40", value_parser = parse_grid)]
    pub snr: SnrGrid,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub stop: StopArgs,
    /// Switch off receiver noise (diagnostics)
    #[arg(long)]
    pub noiseless: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PowerArgs {
    #[arg(long = "mod", value_enum, default_value = "dqpsk")]
    pub modulation: Modulation,
    #[arg(long, default_value = "1,1", value_parser = parse_pair)]
    pub sigma: (f64, f64),
    /// Total P/N0 in dB
    #[arg(long, default_value_t = 35.0)]
    pub snr: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FloorArgs {
    #[arg(long = "mod", value_enum, default_value = "dbpsk")]
    pub modulation: Modulation,
    #[arg(long, value_enum, default_value = "both")]
    pub mode: SweepMode,
    /// Doppler rates to sweep
    #[arg(long = "f", default_value = "0.001,0.002,0.005,0.01,0.02", value_delimiter = ',')]
    pub f: Vec<f64>,
    #[arg(long, default_value = "1,1", value_parser = parse_pair)]
    pub sigma: (f64, f64),
    #[arg(long, default_value_t = 0.3)]
    pub rho: f64,
    /// P/N0 (dB) of the simulated points
    #[arg(long, default_value_t = FLOOR_SNR_DB)]
    pub snr: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub stop: StopArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Run only these criteria (1-10)
    #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u8).range(1..=10))]
    pub only: Vec<u8>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parsed `--snr` values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnrGrid(pub Vec<f64>);

/// `start:step:stop` (inclusive) or `a,b,c`.
pub fn parse_grid(s: &str) -> Result<SnrGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let values = match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop) = (parse_f64(start)?, parse_f64(step)?, parse_f64(stop)?);
            if !(step > 0.0) || stop < start {
                return Err("range needs step > 0 and stop >= start".into());
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            (0..count).map(|i| start + i as f64 * step).collect()
        }
        [list] => list.split(',').map(parse_f64).collect::<Result<Vec<_>, _>>()?,
        _ => return Err("expected start:step:stop or a comma-separated list".into()),
    };
    if values.is_empty() {
        return Err("empty SNR grid".into());
    }
    Ok(SnrGrid(values))
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not finite: {s:?}"))
    }
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    match s.split(',').collect::<Vec<_>>().as_slice() {
        [a, b] => Ok((parse_f64(a)?, parse_f64(b)?)),
        _ => Err("expected two comma-separated values".into()),
    }
}

fn parse_case(s: &str) -> Result<FadingCase, String> {
    s.parse().map_err(|e: ddh_core::Error| e.to_string())
}

fn serialize_display<S: serde::Serializer, T: std::fmt::Display>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

type CliResult = Result<ExitCode, Box<dyn std::error::Error>>;

/// Writes to `--out` with a manifest, or to stdout.
fn emit<T: Serialize>(out: &Option<PathBuf>, bytes: Vec<u8>, args: &T, seed: Option<u64>) -> Result<(), Box<dyn std::error::Error>> {
    match out {
        Some(path) => {
            let manifest = RunManifest::new(std::env::args().collect(), serde_json::to_value(args)?, seed);
            write_artifact(path, &bytes, &manifest)?;
        }
        None => std::io::stdout().write_all(&bytes)?,
    }
    Ok(())
}

pub fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Theory(args) => {
            let points = theory_curve(&args.scenario.scenario()?, &args.snr.0)?;
            let mut buf = Vec::new();
            output::write_theory_csv(&mut buf, &points)?;
            emit(&args.out, buf, &args, None)?;
        }
        Command::Simulate(args) => {
            let opts = RunOptions { noiseless: args.noiseless, ..RunOptions::default() };
            let points = run_ber_with(&args.scenario.scenario()?, &args.snr.0, args.stop.rule(), args.seed, &opts)?;
            let mut buf = Vec::new();
            output::write_simulation_csv(&mut buf, &points)?;
            emit(&args.out, buf, &args, Some(args.seed))?;
        }
        Command::Poweralloc(args) => {
            let ch = ChannelParams::new(args.sigma.0, args.sigma.1, 0.0, 0.0)?;
            let result = power_allocation(args.snr, &ch, args.modulation.order())?;
            let mut buf = Vec::new();
            output::write_json(&mut buf, &result)?;
            emit(&args.out, buf, &args, None)?;
        }
        Command::Floorsweep(args) => {
            let sweep = FloorSweep {
                mode: args.mode,
                order: args.modulation.order(),
                sigma2: args.sigma,
                rho: args.rho,
                snr_db: args.snr,
                stop: args.stop.rule(),
            };
            let points = error_floor_sweep(&args.f, &sweep, args.seed, &RunOptions::default())?;
            let mut buf = Vec::new();
            output::write_floor_csv(&mut buf, &points)?;
            emit(&args.out, buf, &args, Some(args.seed))?;
        }
        Command::Validate(args) => {
            let cfg = ValidationConfig { seed: args.seed, ..ValidationConfig::default() };
            let ids: Vec<u8> = if args.only.is_empty() { (1..=10).collect() } else { args.only.clone() };
            let mut report = String::new();
            let mut all = true;
            for id in ids {
                let r = run_criterion(id, &cfg);
                all &= r.passed;
                let line = format!("{r}\n");
                print!("{line}");
                report.push_str(&line);
            }
            let summary = if all { "all criteria passed\n" } else { "some criteria failed\n" };
            print!("{summary}");
            report.push_str(summary);
            if let Some(path) = &args.out {
                emit(&Some(path.clone()), report.into_bytes(), &args, Some(args.seed))?;
            }
            return Ok(if all { ExitCode::SUCCESS } else { ExitCode::FAILURE });
        }
    }
    Ok(ExitCode::SUCCESS)
}
