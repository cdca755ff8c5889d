//! Analytical BER curves for a scenario.

use ddh_core::analysis::{
    cdd_ber, channel_error_floor, msd_ber, optimize_power, power_allocation_curve, ModulationAnalysisParams, PepConfig,
};
use ddh_core::fading::{ChannelParams, BLOCK_LAG};
use ddh_core::link::LinkConfig;
use ddh_core::scenario::{BerPoint, DetectorKind, Scenario};
use ddh_core::{Error, Result};

/// Theory points for every SNR in `grid`, followed by the floor row for CDD.
///
/// CDD uses the exact integral, MSD the union bound over dominant error
/// events. The genie-aided coherent receiver has no closed form here.
pub fn theory_curve(sc: &Scenario, grid: &[f64]) -> Result<Vec<BerPoint>> {
    let p = ModulationAnalysisParams::new(sc.order)?;
    let mut points = grid
        .iter()
        .map(|&snr| {
            let cfg = LinkConfig::from_snr_db(snr, sc.rho, sc.ch.sigma2_1(), sc.order)?;
            let ber = match sc.detector {
                DetectorKind::Cdd => cdd_ber(&cfg, &sc.ch, &p, BLOCK_LAG)?,
                DetectorKind::Msd(n) => msd_ber(n, sc.order, &cfg, &sc.ch, &PepConfig::default())?,
                DetectorKind::Coherent => {
                    return Err(Error::InvalidParameter("no closed-form BER for the coherent baseline"))
                }
            };
            Ok(BerPoint::theory(snr, ber))
        })
        .collect::<Result<Vec<_>>>()?;
    if sc.detector == DetectorKind::Cdd {
        points.push(BerPoint::floor(channel_error_floor(&sc.ch, &p)?));
    }
    Ok(points)
}

/// Slow-fading BER over the power-allocation grid and its minimiser.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PowerAllocation {
    pub rho_grid: Vec<f64>,
    pub ber_curve: Vec<f64>,
    pub rho_opt: f64,
}

pub fn power_allocation(snr_db: f64, ch: &ChannelParams, order: usize) -> Result<PowerAllocation> {
    let p = ModulationAnalysisParams::new(order)?;
    let (rho_grid, ber_curve) = power_allocation_curve(snr_db, ch, &p)?;
    let rho_opt = optimize_power(snr_db, ch, &p)?;
    Ok(PowerAllocation { rho_grid, ber_curve, rho_opt })
}
