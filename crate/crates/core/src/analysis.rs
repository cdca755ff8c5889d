//! Closed-form performance of the differential relay link.
//!
//! CDD: the conditional BER `(1/4pi) int g(theta) exp(-q(theta) gamma) dtheta`
//! of the unified approach is averaged over the exponential `|h1|^2` and then
//! over `|h2|^2`, leaving a single angle integral. MSD: the pairwise error
//! probability of the dominant error event is the probability that a Hermitian
//! quadratic form of a Gaussian vector is non-positive, inverted from its
//! characteristic function by a Gauss-Chebyshev series.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fading::{cascaded_alpha, ChannelParams, Hop, BLOCK_LAG};
use crate::linalg::{cholesky_lower, diag, hermitian_eigenvalues, hermitian_inverse, CMatrix};
use crate::link::{db_to_linear, LinkConfig};
use crate::detect::covariance_matrix;
use crate::numerics::{scaled_exp_integral_e1, QuadratureRule, DEFAULT_ORDER};
// inherent float methods take over whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

/// Largest tolerated relative change of a BER integral when the quadrature
/// order is doubled.
pub const QUADRATURE_TOLERANCE: f64 = 1e-8;

/// Unified-approach constants `a`, `b` and `beta = a / b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationAnalysisParams {
    order: usize,
    a: f64,
    b: f64,
}

impl ModulationAnalysisParams {
    /// Available for DBPSK (`M = 2`) and DQPSK (`M = 4`).
    pub fn new(order: usize) -> Result<Self> {
        match order {
            2 => Ok(Self { order, a: 0.0, b: 2f64.sqrt() }),
            4 => {
                let r = 2f64.sqrt();
                Ok(Self { order, a: (2.0 - r).sqrt(), b: (2.0 + r).sqrt() })
            }
            _ => Err(Error::UnsupportedOrder(order)),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn beta(&self) -> f64 {
        self.a / self.b
    }

    fn bits_per_symbol(&self) -> f64 {
        self.order.trailing_zeros() as f64
    }
}

/// `g(theta) = (1 - beta^2) / (1 + 2 beta sin(theta) + beta^2)`.
pub fn g_theta(theta: f64, p: &ModulationAnalysisParams) -> f64 {
    let beta = p.beta();
    (1.0 - beta * beta) / (1.0 + 2.0 * beta * theta.sin() + beta * beta)
}

/// `q(theta) = (b^2 / log2 M) (1 + 2 beta sin(theta) + beta^2)`.
pub fn q_theta(theta: f64, p: &ModulationAnalysisParams) -> f64 {
    let beta = p.beta();
    p.b * p.b / p.bits_per_symbol() * (1.0 + 2.0 * beta * theta.sin() + beta * beta)
}

/// Effective SNR of two-symbol detection over the time-varying cascade.
///
/// Conditioned on the channels, `gamma = gamma_bar(|h2|^2) |h1|^2`; `b1`,
/// `b2(theta)` and `b3 = b2 / b1` rewrite the `|h1|^2` average as
/// `b3 (lambda2 + b1) / (lambda2 + b2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveSnrModel {
    alpha: f64,
    a2: f64,
    snr0: f64,
    rho1: f64,
    b1: f64,
}

impl EffectiveSnrModel {
    pub fn new(alpha: f64, cfg: &LinkConfig, sigma2_1: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Domain { name: "alpha", value: alpha });
        }
        let a2 = cfg.amplification() * cfg.amplification();
        let rho1 = cfg.relay_snr(sigma2_1);
        let al2 = alpha * alpha;
        let b1 = (1.0 + al2) / ((1.0 + al2) * a2 + (1.0 - al2) * a2 * rho1);
        Ok(Self { alpha, a2, snr0: cfg.p0() / cfg.n0(), rho1, b1 })
    }

    /// Model with `alpha` taken from the lag-1 cascaded autocorrelation.
    pub fn for_channel(cfg: &LinkConfig, ch: &ChannelParams) -> Result<Self> {
        Self::new(cascaded_alpha(ch, BLOCK_LAG)?, cfg, ch.sigma2_1())
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn b1(&self) -> f64 {
        self.b1
    }

    pub fn b2(&self, theta: f64, p: &ModulationAnalysisParams) -> f64 {
        let al2 = self.alpha * self.alpha;
        (1.0 + al2) / ((1.0 + al2) / self.b1 + al2 * q_theta(theta, p) * self.a2 * self.rho1)
    }

    pub fn b3(&self, theta: f64, p: &ModulationAnalysisParams) -> f64 {
        self.b2(theta, p) / self.b1
    }

    /// `gamma_bar` for a given `|h2|^2`.
    pub fn gamma_bar(&self, lambda2: f64) -> f64 {
        let al2 = self.alpha * self.alpha;
        al2 * self.a2 * self.snr0 * lambda2
            / (1.0 + al2 + (1.0 + al2 + (1.0 - al2) * self.rho1) * self.a2 * lambda2)
    }

    /// Mean of `gamma_bar` over `|h2|^2 ~ Exp(sigma2_2)`, by quadrature in
    /// `u = exp(-lambda2 / sigma2_2)`.
    pub fn mean_gamma_bar(&self, sigma2_2: f64, order: usize) -> Result<f64> {
        let rule = QuadratureRule::on_interval(order, 0.0, 1.0)?;
        Ok(rule.integrate(|u| self.gamma_bar(-sigma2_2 * u.ln())))
    }

    /// `J(theta)`: the `|h2|^2` average of `b3 (lambda2 + b1) / (lambda2 + b2)`.
    pub fn j_theta(&self, theta: f64, p: &ModulationAnalysisParams, sigma2_2: f64) -> Result<f64> {
        let b2 = self.b2(theta, p);
        let z = b2 / sigma2_2;
        let b3 = b2 / self.b1;
        Ok(b3 * (1.0 + (self.b1 - b2) / sigma2_2 * scaled_exp_integral_e1(z)?))
    }
}

/// Quadrature pair used for the order-doubling convergence check.
#[derive(Debug, Clone, PartialEq)]
pub struct BerQuadrature {
    base: QuadratureRule,
    doubled: QuadratureRule,
}

impl BerQuadrature {
    pub fn new(order: usize) -> Result<Self> {
        Ok(Self {
            base: QuadratureRule::gauss_legendre(order)?,
            doubled: QuadratureRule::gauss_legendre(2 * order)?,
        })
    }

    pub fn order(&self) -> usize {
        self.base.order()
    }

    /// `int f` at the base order; fails if doubling the order moves the
    /// result by more than [`QUADRATURE_TOLERANCE`] relative.
    pub fn integrate<F: FnMut(f64) -> Result<f64>>(&self, mut f: F) -> Result<f64> {
        let mut fail = None;
        let mut eval = |rule: &QuadratureRule| {
            rule.integrate(|x| match f(x) {
                Ok(v) => v,
                Err(e) => {
                    fail.get_or_insert(e);
                    f64::NAN
                }
            })
        };
        let coarse = eval(&self.base);
        let fine = eval(&self.doubled);
        if let Some(e) = fail {
            return Err(e);
        }
        let scale = fine.abs().max(f64::MIN_POSITIVE);
        let relative_change = (coarse - fine).abs() / scale;
        if !(relative_change <= QUADRATURE_TOLERANCE) {
            return Err(Error::QuadratureNonConvergence { relative_change });
        }
        Ok(coarse)
    }
}

impl Default for BerQuadrature {
    fn default() -> Self {
        Self::new(DEFAULT_ORDER).expect("default order is valid")
    }
}

/// Exact CDD BER for the channel's autocorrelation at `lag`.
pub fn cdd_ber(cfg: &LinkConfig, ch: &ChannelParams, p: &ModulationAnalysisParams, lag: u32) -> Result<f64> {
    let alpha = cascaded_alpha(ch, lag)?;
    cdd_ber_for_alpha(cfg, ch.sigma2_1(), ch.sigma2_2(), alpha, p, &BerQuadrature::default())
}

/// CDD BER for an explicit cascaded autocorrelation `alpha`.
pub fn cdd_ber_for_alpha(
    cfg: &LinkConfig,
    sigma2_1: f64,
    sigma2_2: f64,
    alpha: f64,
    p: &ModulationAnalysisParams,
    quad: &BerQuadrature,
) -> Result<f64> {
    let model = EffectiveSnrModel::new(alpha, cfg, sigma2_1)?;
    let integral = quad.integrate(|theta| Ok(g_theta(theta, p) * model.j_theta(theta, p, sigma2_2)?))?;
    Ok((integral / (4.0 * PI)).clamp(f64::MIN_POSITIVE, 0.5))
}

/// High-power limit of the CDD BER for cascaded autocorrelation `alpha`.
pub fn cdd_error_floor(alpha: f64, p: &ModulationAnalysisParams) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain { name: "alpha", value: alpha });
    }
    let al2 = alpha * alpha;
    let integral = BerQuadrature::default().integrate(|theta| {
        Ok(g_theta(theta, p) * (1.0 - al2) / (al2 * q_theta(theta, p) + 1.0 - al2))
    })?;
    Ok(integral / (4.0 * PI))
}

/// Error floor of a channel at the block lag.
pub fn channel_error_floor(ch: &ChannelParams, p: &ModulationAnalysisParams) -> Result<f64> {
    cdd_error_floor(cascaded_alpha(ch, BLOCK_LAG)?, p)
}

/// Series order and contour placement for PEP inversion.
#[derive(Debug, Clone, PartialEq)]
pub struct PepConfig {
    q: usize,
    contour_scale: f64,
    tau: Vec<f64>,
}

impl PepConfig {
    /// `q` even and at least 2. The contour abscissa is `contour_scale` times
    /// half the smallest positive pole; the scale must lie in `(0, 2)`.
    pub fn new(q: usize, contour_scale: f64) -> Result<Self> {
        if q < 2 || q % 2 != 0 {
            return Err(Error::InvalidParameter("series order q must be even and >= 2"));
        }
        if !(contour_scale > 0.0 && contour_scale < 2.0) {
            return Err(Error::Domain { name: "contour_scale", value: contour_scale });
        }
        let tau = (1..=q / 2).map(|k| ((2 * k - 1) as f64 * PI / (2 * q) as f64).tan()).collect();
        Ok(Self { q, contour_scale, tau })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn contour_scale(&self) -> f64 {
        self.contour_scale
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }
}

impl Default for PepConfig {
    fn default() -> Self {
        Self::new(64, 1.0).expect("default PEP config is valid")
    }
}

/// `Phi(t) = 1 / det(I + t Sigma Q)`.
pub fn characteristic_function(sigma: &CMatrix, q: &CMatrix, t: Complex64) -> Complex64 {
    let n = sigma.nrows();
    let m = CMatrix::identity(n, n) + sigma * q * t;
    Complex64::new(1.0, 0.0) / m.determinant()
}

/// Eigenvalues of `Sigma Q` for Hermitian positive-definite `Sigma` and
/// Hermitian `Q`, via the similar Hermitian matrix `G^H Q G`, `Sigma = G G^H`.
pub fn quadratic_form_eigenvalues(sigma: &CMatrix, q: &CMatrix) -> Result<Vec<f64>> {
    let g = cholesky_lower(sigma)?;
    let h = g.adjoint() * q * &g;
    let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(hermitian_eigenvalues(&h))
}

/// Half the smallest positive pole `-1/lambda_i` of `Phi`.
pub fn pep_contour_constant(sigma: &CMatrix, q: &CMatrix) -> Result<f64> {
    smallest_positive_pole(&quadratic_form_eigenvalues(sigma, q)?).map(|pole| 0.5 * pole)
}

fn smallest_positive_pole(eigenvalues: &[f64]) -> Result<f64> {
    let scale = eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    eigenvalues
        .iter()
        .filter(|&&l| l < -1e-13 * scale)
        .map(|&l| -1.0 / l)
        .min_by(f64::total_cmp)
        .ok_or(Error::DegeneratePoles)
}

/// Matrices of the decision statistic `Delta = y^H Q y` for transmitted `s`
/// and competitor `s_hat`: `Q = diag(s_hat) C^-1 diag(s_hat)^H - diag(s) C^-1
/// diag(s)^H` and `Sigma = diag(s) C diag(s)^H`. The competitor wins when
/// `Delta <= 0`.
pub fn pep_matrices(
    s: &[Complex64],
    s_hat: &[Complex64],
    cfg: &LinkConfig,
    ch: &ChannelParams,
) -> Result<(CMatrix, CMatrix)> {
    if s.len() != s_hat.len() {
        return Err(Error::LengthMismatch { expected: s.len(), actual: s_hat.len() });
    }
    for z in s.iter().chain(s_hat) {
        let modulus = z.norm();
        if (modulus - 1.0).abs() > 1e-9 {
            return Err(Error::NonUnitSymbol { modulus });
        }
    }
    let c = covariance_matrix(s.len(), cfg, ch);
    let c_inv = hermitian_inverse(&c)?;
    let ds = diag(s);
    let dh = diag(s_hat);
    let q = &dh * &c_inv * dh.adjoint() - &ds * &c_inv * ds.adjoint();
    let sigma = &ds * &c * ds.adjoint();
    Ok((sigma, q))
}

/// Probability that the MSD metric prefers `s_hat` over the transmitted `s`.
pub fn msd_pep(
    s: &[Complex64],
    s_hat: &[Complex64],
    cfg: &LinkConfig,
    ch: &ChannelParams,
    pc: &PepConfig,
) -> Result<f64> {
    let (sigma, q) = pep_matrices(s, s_hat, cfg, ch)?;
    let eigenvalues = quadratic_form_eigenvalues(&sigma, &q)?;
    let c = 0.5 * pc.contour_scale * smallest_positive_pole(&eigenvalues)?;
    let phi = |t: Complex64| {
        let det = eigenvalues.iter().fold(Complex64::new(1.0, 0.0), |acc, &l| acc * (1.0 + t * l));
        Complex64::new(1.0, 0.0) / det
    };
    let sum: f64 = pc
        .tau
        .iter()
        .map(|&tau| {
            let v = phi(Complex64::new(c, c * tau));
            v.re + tau * v.im
        })
        .sum();
    let pep = sum / pc.q as f64;
    if !(0.0..=1.0).contains(&pep) {
        log::warn!("PEP series value {pep:e} clamped to [0, 1]");
    }
    Ok(pep.clamp(0.0, 1.0))
}

/// Dominant error event of an `N`-window: all-ones against all-ones with the
/// last symbol advanced by one constellation step.
pub fn dominant_error_event(n: usize, order: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let s = alloc::vec![Complex64::new(1.0, 0.0); n];
    let mut s_hat = s.clone();
    s_hat[n - 1] = Complex64::from_polar(1.0, 2.0 * PI / order as f64);
    (s, s_hat)
}

/// Union-bound prefactor `w / (log2 M (N - 1))` with `w = 2(N-1)` for
/// `M = 2` and `4(N-1)` otherwise.
pub fn union_bound_weight(n: usize, order: usize) -> f64 {
    let w = if order == 2 { 2 * (n - 1) } else { 4 * (n - 1) };
    w as f64 / (order.trailing_zeros() as f64 * (n - 1) as f64)
}

/// Union-bound BER approximation of MSD with window `n`.
pub fn msd_ber(n: usize, order: usize, cfg: &LinkConfig, ch: &ChannelParams, pc: &PepConfig) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter("MSD window length must be >= 2"));
    }
    if order < 2 || !order.is_power_of_two() {
        return Err(Error::UnsupportedOrder(order));
    }
    let (s, s_hat) = dominant_error_event(n, order);
    Ok(union_bound_weight(n, order) * msd_pep(&s, &s_hat, cfg, ch, pc)?)
}

/// Power-allocation grid `{0.01, 0.02, ..., 0.99}`.
pub fn rho_grid() -> Vec<f64> {
    (1..100).map(|k| k as f64 / 100.0).collect()
}

/// CDD BER at `alpha = 1` along `rho_grid()` for total `P/N0` in dB.
pub fn power_allocation_curve(
    snr_db: f64,
    ch: &ChannelParams,
    p: &ModulationAnalysisParams,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if !snr_db.is_finite() {
        return Err(Error::Domain { name: "P/N0", value: snr_db });
    }
    let total = db_to_linear(snr_db);
    let quad = BerQuadrature::default();
    let grid = rho_grid();
    let ber = grid
        .iter()
        .map(|&rho| {
            let cfg = LinkConfig::from_total_power(total, rho, ch.sigma2_1(), 1.0, p.order())?;
            cdd_ber_for_alpha(&cfg, ch.sigma2_1(), ch.variance(Hop::RelayDestination), 1.0, p, &quad)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((grid, ber))
}

/// Power-allocation factor minimising the slow-fading CDD BER.
pub fn optimize_power(snr_db: f64, ch: &ChannelParams, p: &ModulationAnalysisParams) -> Result<f64> {
    let (grid, ber) = power_allocation_curve(snr_db, ch, p)?;
    let best = (0..grid.len()).min_by(|&i, &j| ber[i].total_cmp(&ber[j])).unwrap_or(0);
    Ok(grid[best])
}
