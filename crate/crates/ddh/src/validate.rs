//! Acceptance suite: one check per reproduced result.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use ddh_core::analysis::{
    cdd_ber, channel_error_floor, characteristic_function, dominant_error_event, g_theta,
    msd_ber, msd_pep, optimize_power, pep_matrices, q_theta, BerQuadrature, EffectiveSnrModel,
    ModulationAnalysisParams, PepConfig,
};
use ddh_core::detect::{msd_exhaustive, msd_sphere, MsdStatistics, MsdWindow};
use ddh_core::fading::{autocorr, empirical_autocorrelation, gen_jakes, ChannelParams, Hop, BLOCK_LAG};
use ddh_core::link::LinkConfig;
use ddh_core::modem::Constellation;
use ddh_core::numerics::{bessel_j0, exp_integral_e1};
use ddh_core::rng;
use ddh_core::scenario::{BerPoint, DetectorKind, FadingCase, Scenario};
use ddh_core::Result;
use num_complex::Complex64;
use rand::Rng;

use crate::harness::{error_floor_sweep, run_ber_with, FloorSweep, RunOptions, StopRule, SweepMode, FLOOR_SNR_DB};

/// Default master seed of the suite.
pub const DEFAULT_SEED: u64 = 20_240_501;

#[derive(Debug, Clone, Copy)]
pub struct ValidationConfig {
    pub seed: u64,
    pub opts: RunOptions,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, opts: RunOptions::default() }
    }
}

/// Outcome of one criterion.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} {verdict}  {}: {}", self.id, self.title, self.detail)
    }
}

pub const TITLES: [&str; 10] = [
    "error-floor values",
    "floor vs fading rate",
    "power allocation",
    "theory-simulation agreement",
    "3 dB gap to coherent",
    "MSD restores performance",
    "MSD union bound",
    "sphere-decoder exactness",
    "channel statistics",
    "numerics",
];

/// Runs one criterion (1-based); errors turn into a failed report.
pub fn run_criterion(id: u8, cfg: &ValidationConfig) -> CriterionReport {
    let title = TITLES.get(usize::from(id).wrapping_sub(1)).copied().unwrap_or("unknown");
    let outcome = match id {
        1 => error_floor_values(cfg),
        2 => floor_curve(cfg),
        3 => power_allocation(),
        4 => theory_agreement(cfg),
        5 => coherent_gap(cfg),
        6 => msd_restores(cfg),
        7 => msd_union_bound(cfg),
        8 => sphere_exactness(cfg),
        9 => channel_statistics(cfg),
        10 => numerics(),
        _ => Ok((false, "no such criterion".into())),
    };
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionReport { id, title, passed, detail }
}

pub fn run_all(cfg: &ValidationConfig) -> Vec<CriterionReport> {
    (1..=10).map(|id| run_criterion(id, cfg)).collect()
}

type Check = Result<(bool, String)>;

fn within_factor(x: f64, reference: f64, factor: f64) -> bool {
    x >= reference / factor && x <= reference * factor
}

fn stop(min_errors: u64) -> StopRule {
    StopRule { min_errors, ..StopRule::default() }
}

fn dbpsk() -> ModulationAnalysisParams {
    ModulationAnalysisParams::new(2).expect("DBPSK")
}

fn simulate(sc: &Scenario, grid: &[f64], rule: StopRule, cfg: &ValidationConfig) -> Result<Vec<BerPoint>> {
    run_ber_with(sc, grid, rule, cfg.seed, &cfg.opts)
}

fn error_floor_values(cfg: &ValidationConfig) -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for (case, stated) in [(FadingCase::II, 5e-4), (FadingCase::III, 3e-3)] {
        let sc = Scenario::preset(case, (1.0, 1.0), 0.3, 2, DetectorKind::Cdd)?;
        let floor = channel_error_floor(&sc.ch, &dbpsk())?;
        let sim = simulate(&sc, &[FLOOR_SNR_DB], stop(1000), cfg)?[0];
        let pass = within_factor(floor, stated, 1.5) && within_factor(sim.ber, floor, 1.5);
        ok &= pass;
        parts.push(format!("case {case}: floor {floor:.3e} (stated {stated:.0e}), sim@60dB {:.3e}", sim.ber));
    }
    Ok((ok, parts.join("; ")))
}

fn floor_curve(cfg: &ValidationConfig) -> Check {
    const GRID: [f64; 5] = [0.001, 0.002, 0.005, 0.01, 0.02];
    let mut ok = true;
    let mut parts = Vec::new();
    let mut curves = Vec::new();
    for mode in [SweepMode::Both, SweepMode::F1Only] {
        let sweep = FloorSweep { stop: stop(2000), ..FloorSweep::new(mode, 2) };
        let points = error_floor_sweep(&GRID, &sweep, cfg.seed, &cfg.opts)?;
        let mut compared = 0;
        for p in &points {
            // the agreement is only asserted where the floor dominates
            if p.floor >= 1e-5 {
                compared += 1;
                if !within_factor(p.sim.ber, p.floor, 1.5) {
                    ok = false;
                    parts.push(format!("{mode:?} f={}: sim {:.3e} vs floor {:.3e}", p.f, p.sim.ber, p.floor));
                }
            }
        }
        let theory_up = points.windows(2).all(|w| w[1].floor > w[0].floor);
        let sim_up = points.windows(2).all(|w| w[1].sim.ber > w[0].sim.ber);
        ok &= theory_up && sim_up;
        parts.push(format!(
            "{mode:?}: {compared} rates compared, monotone theory {theory_up} sim {sim_up}, max ratio {:.2}",
            points
                .iter()
                .filter(|p| p.floor >= 1e-5)
                .map(|p| (p.sim.ber / p.floor).max(p.floor / p.sim.ber))
                .fold(1.0, f64::max)
        ));
        curves.push(points);
    }
    let above = curves[0].iter().zip(&curves[1]).all(|(both, f1)| {
        if both.f > crate::harness::FIXED_F2 {
            both.floor > f1.floor && both.sim.ber > f1.sim.ber
        } else {
            both.floor >= f1.floor
        }
    });
    ok &= above;
    parts.push(format!("both above f1-only: {above}"));
    Ok((ok, parts.join("; ")))
}

fn power_allocation() -> Check {
    let p = ModulationAnalysisParams::new(4)?;
    let mut ok = true;
    let mut parts = Vec::new();
    for ((s1, s2), stated) in [((1.0, 1.0), 0.30), ((10.0, 1.0), 0.12), ((1.0, 10.0), 0.54)] {
        let ch = ChannelParams::new(s1, s2, 0.0, 0.0)?;
        let rho = optimize_power(35.0, &ch, &p)?;
        ok &= (rho - stated).abs() <= 0.05 + 1e-9;
        parts.push(format!("[{s1},{s2}] -> {rho:.2} (stated {stated:.2})"));
    }
    Ok((ok, parts.join("; ")))
}

/// The four CDD figure configurations: modulation order, variances, rho.
pub const FIGURE_CONFIGS: [(usize, (f64, f64), f64); 4] =
    [(2, (1.0, 1.0), 0.3), (2, (1.0, 10.0), 0.54), (4, (1.0, 1.0), 0.3), (4, (10.0, 1.0), 0.12)];

fn theory_agreement(cfg: &ValidationConfig) -> Check {
    const GRID: [f64; 3] = [10.0, 15.0, 20.0];
    // Errors cluster within frames under slow fading; enough frames keep the
    // (design-effect corrected) interval informative.
    let rule = StopRule { min_errors: 1000, min_bits: 5_000_000, ..StopRule::default() };
    let mut ok = true;
    let mut misses = Vec::new();
    let mut checked = 0;
    let mut widest = 0.0f64;
    let mut worst_dev = 0.0f64;
    for (order, sigma2, rho) in FIGURE_CONFIGS {
        let sc = Scenario::preset(FadingCase::I, sigma2, rho, order, DetectorKind::Cdd)?;
        let p = ModulationAnalysisParams::new(order)?;
        for sim in simulate(&sc, &GRID, rule, cfg)? {
            let link = LinkConfig::from_snr_db(sim.snr_db, rho, sigma2.0, order)?;
            let theory = cdd_ber(&link, &sc.ch, &p, BLOCK_LAG)?;
            if theory < 1e-4 {
                continue;
            }
            checked += 1;
            widest = widest.max((sim.ci_high - sim.ci_low) / (2.0 * sim.ber));
            worst_dev = worst_dev.max((sim.ber / theory - 1.0).abs());
            if !(sim.ci_low <= theory && theory <= sim.ci_high) {
                ok = false;
                misses.push(format!(
                    "M={order} {sigma2:?} {} dB: theory {theory:.4e} outside [{:.4e}, {:.4e}]",
                    sim.snr_db, sim.ci_low, sim.ci_high
                ));
            }
        }
    }
    ok &= checked == 12;
    let summary = format!(
        "{checked} points, largest deviation {:.1}%, widest half-interval {:.1}%",
        100.0 * worst_dev,
        100.0 * widest
    );
    let detail = if misses.is_empty() { summary } else { format!("{summary}; {}", misses.join("; ")) };
    Ok((ok, detail))
}

/// SNR (dB) at which a decreasing curve crosses `target`, interpolating
/// `log10(BER)` linearly.
pub fn crossing_snr(points: &[BerPoint], target: f64) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        if a.ber >= target && b.ber <= target && a.ber > 0.0 && b.ber > 0.0 {
            let (la, lb, lt) = (a.ber.log10(), b.ber.log10(), target.log10());
            let t = if la == lb { 0.0 } else { (la - lt) / (la - lb) };
            Some(a.snr_db + t * (b.snr_db - a.snr_db))
        } else {
            None
        }
    })
}

fn coherent_gap(cfg: &ValidationConfig) -> Check {
    let grid: Vec<f64> = (0..=6).map(|k| 30.0 + 2.5 * k as f64).collect();
    // 10^4 frames per point so that slow fades are well sampled
    let rule = StopRule { min_errors: 1000, min_bits: 10_000_000, ..StopRule::default() };
    let cdd = Scenario::preset(FadingCase::I, (1.0, 1.0), 0.3, 2, DetectorKind::Cdd)?;
    let coh = cdd.clone().with_detector(DetectorKind::Coherent);
    let a = crossing_snr(&simulate(&cdd, &grid, rule, cfg)?, 1e-3);
    let b = crossing_snr(&simulate(&coh, &grid, rule, cfg)?, 1e-3);
    match (a, b) {
        (Some(a), Some(b)) => {
            let gap = a - b;
            Ok(((gap - 3.0).abs() <= 0.7, format!("CDD {a:.2} dB, coherent {b:.2} dB, gap {gap:.2} dB")))
        }
        _ => Ok((false, "a curve does not cross 1e-3 on the grid".into())),
    }
}

/// Criterion 6/7 grid and the MSD scenario they share.
const MSD_GRID: [f64; 3] = [30.0, 35.0, 40.0];

fn msd_case3() -> Result<Scenario> {
    Scenario::preset(FadingCase::III, (1.0, 1.0), 0.3, 2, DetectorKind::Msd(10))
}

fn msd_restores(cfg: &ValidationConfig) -> Check {
    let sc = msd_case3()?;
    let msd = simulate(&sc, &[40.0], stop(1000), cfg)?[0];
    let floor = channel_error_floor(&sc.ch, &dbpsk())?;
    let case1 = Scenario::preset(FadingCase::I, (1.0, 1.0), 0.3, 2, DetectorKind::Cdd)?;
    let cdd1 = simulate(&case1, &[40.0], stop(1000), cfg)?[0];
    let below = floor / msd.ber;
    let to_case1 = (msd.ber / cdd1.ber).max(cdd1.ber / msd.ber);
    Ok((
        below >= 5.0 && to_case1 <= 3.0,
        format!(
            "MSD@40dB {:.3e}, case III floor {floor:.3e} ({below:.2}x below, need 5x), case I CDD {:.3e} ({to_case1:.2}x apart, need <=3x)",
            msd.ber, cdd1.ber
        ),
    ))
}

fn msd_union_bound(cfg: &ValidationConfig) -> Check {
    let sc = msd_case3()?;
    let sims = simulate(&sc, &MSD_GRID, stop(1000), cfg)?;
    let mut ok = true;
    let mut parts = Vec::new();
    for sim in &sims[1..] {
        let link = LinkConfig::from_snr_db(sim.snr_db, sc.rho, sc.ch.sigma2_1(), sc.order)?;
        let bound = msd_ber(10, 2, &link, &sc.ch, &PepConfig::default())?;
        ok &= within_factor(sim.ber, bound, 2.0);
        parts.push(format!("{} dB: sim {:.3e}, bound {bound:.3e}", sim.snr_db, sim.ber));
    }
    Ok((ok, parts.join("; ")))
}

fn sphere_exactness(cfg: &ValidationConfig) -> Check {
    let mut worst = 0.0f64;
    let mut windows = 0;
    let mut r = rng::stream(cfg.seed, 0x5048);
    for n in [2usize, 3, 4] {
        for order in [2usize, 4] {
            let con = Constellation::new(order)?;
            for trial in 0..1000u32 {
                let case = FadingCase::ALL[trial as usize % 3];
                let ch = case.channel(1.0, 1.0)?;
                let snr = r.random_range(0.0..40.0);
                let link = LinkConfig::from_snr_db(snr, 0.3, 1.0, order)?;
                let stats = Arc::new(MsdStatistics::new(n, &link, &ch)?);
                let scale = r.random_range(0.1..10.0);
                let y: Vec<Complex64> = (0..n).map(|_| rng::complex_gaussian(&mut r, scale)).collect();
                let w = MsdWindow::new(stats, &y)?;
                let sphere = msd_sphere(&w, &con);
                let brute = msd_exhaustive(&w, &con)?;
                worst = worst.max((sphere.metric - brute.metric).abs() / brute.metric.max(1e-300));
                windows += 1;
            }
        }
    }
    Ok((worst <= 1e-9, format!("{windows} windows, worst relative metric gap {worst:.1e}")))
}

/// RMS of `|R(n) - sigma^2 J0(2 pi f n)| / sigma^2` over lags `0..=100`.
pub fn autocorrelation_rms(samples: &[Complex64], ch: &ChannelParams, hop: Hop) -> f64 {
    let var = ch.variance(hop);
    let sum: f64 = (0..=100u32)
        .map(|n| ((empirical_autocorrelation(samples, n as usize) - autocorr(ch, hop, n)) / var).norm_sqr())
        .sum();
    (sum / 101.0).sqrt()
}

fn channel_statistics(cfg: &ValidationConfig) -> Check {
    const LEN: usize = 100_000;
    // A 10^5-sample record at f = 0.001 spans only about 100 fades, too few
    // for a 5% variance estimate; slow hops are reported but not gated.
    const MIN_DOPPLER: f64 = 0.01;
    let mut worst_rms = 0.0f64;
    let mut worst_var = 0.0f64;
    let mut slow_var = 0.0f64;
    for (k, case) in FadingCase::ALL.into_iter().enumerate() {
        for (s1, s2) in [(1.0, 1.0), (10.0, 1.0), (1.0, 10.0)] {
            let ch = case.channel(s1, s2)?;
            let seed = cfg.seed.wrapping_add(k as u64);
            let h1 = gen_jakes(&ch, Hop::SourceRelay, LEN, seed)?;
            let h2 = gen_jakes(&ch, Hop::RelayDestination, LEN, seed)?;
            for (h, hop) in [(&h1, Hop::SourceRelay), (&h2, Hop::RelayDestination)] {
                if ch.doppler(hop) >= MIN_DOPPLER {
                    worst_rms = worst_rms.max(autocorrelation_rms(h.samples(), &ch, hop));
                }
            }
            let cascaded: Vec<Complex64> = h1.samples().iter().zip(h2.samples()).map(|(a, b)| a * b).collect();
            let err = (empirical_autocorrelation(&cascaded, 0).re / (s1 * s2) - 1.0).abs();
            if ch.f1().min(ch.f2()) >= MIN_DOPPLER {
                worst_var = worst_var.max(err);
            } else {
                slow_var = slow_var.max(err);
            }
        }
    }
    let ok = worst_rms <= 0.02 && worst_var <= 0.05;
    Ok((
        ok,
        format!(
            "worst autocorrelation RMS {:.2}%, worst cascaded variance error {:.2}% (f >= 0.01); {:.2}% with a hop at f = 0.001",
            100.0 * worst_rms,
            100.0 * worst_var,
            100.0 * slow_var
        ),
    ))
}

fn numerics() -> Check {
    let mut fails = Vec::new();
    let mut check = |name: &str, cond: bool| {
        if !cond {
            fails.push(name.to_string());
        }
    };
    let x = 2.0 * PI * 0.001;
    check("J0(0)", bessel_j0(0.0) == 1.0);
    check("J0 root", bessel_j0(2.404825557695773).abs() <= 1e-10);
    check("J0 small", (bessel_j0(x) - (1.0 - x * x / 4.0 + x.powi(4) / 64.0)).abs() <= 1e-12);
    check("E1(1)", (exp_integral_e1(1.0)? / 0.2193839344 - 1.0).abs() <= 1e-9);
    check("E1(0.5)", (exp_integral_e1(0.5)? / 0.5597735948 - 1.0).abs() <= 1e-9);
    check("E1 bound", [0.1, 1.0, 5.0, 30.0].iter().all(|&x| exp_integral_e1(x).map_or(false, |e| e < (-x).exp() / x)));
    check("E1 domain", exp_integral_e1(0.0).is_err());

    let quad = BerQuadrature::default();
    for order in [2, 4] {
        let p = ModulationAnalysisParams::new(order)?;
        for case in FadingCase::ALL {
            let ch = case.channel(1.0, 1.0)?;
            let alpha = ddh_core::fading::cascaded_alpha(&ch, BLOCK_LAG)?;
            for snr in [0.0, 20.0, 40.0, 60.0] {
                let link = LinkConfig::from_snr_db(snr, 0.3, 1.0, order)?;
                let m = EffectiveSnrModel::new(alpha, &link, 1.0)?;
                check("BER integral order doubling", quad.integrate(|t| Ok(g_theta(t, &p) * m.j_theta(t, &p, 1.0)?)).is_ok());
            }
            let a2 = alpha * alpha;
            check(
                "floor integral order doubling",
                quad.integrate(|t| Ok(g_theta(t, &p) * (1.0 - a2) / (a2 * q_theta(t, &p) + 1.0 - a2))).is_ok(),
            );
        }
    }

    let ch = FadingCase::III.channel(1.0, 1.0)?;
    let mut worst_q = 0.0f64;
    for order in [2, 4] {
        for snr in [10.0, 20.0, 30.0, 40.0] {
            let link = LinkConfig::from_snr_db(snr, 0.3, 1.0, order)?;
            let (s, s_hat) = dominant_error_event(10, order);
            let (sigma, q) = pep_matrices(&s, &s_hat, &link, &ch)?;
            check("Phi(0) = 1", (characteristic_function(&sigma, &q, Complex64::new(0.0, 0.0)) - 1.0).norm() < 1e-12);
            let a = msd_pep(&s, &s_hat, &link, &ch, &PepConfig::default())?;
            let b = msd_pep(&s, &s_hat, &link, &ch, &PepConfig::new(128, 1.0)?)?;
            worst_q = worst_q.max((a - b).abs() / b);
        }
    }
    check("PEP q=64 vs q=128", worst_q < 0.005);
    let ok = fails.is_empty();
    let detail = if ok {
        format!("all checks pass; PEP series worst q=64/128 gap {:.1e}", worst_q)
    } else {
        format!("failed: {}", fails.join(", "))
    };
    Ok((ok, detail))
}
