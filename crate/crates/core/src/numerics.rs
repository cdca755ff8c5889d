//! Special functions and quadrature used by the analytical BER expressions.
//!
//! Only what the analysis needs: the Bessel function `J0` (channel
//! autocorrelation), the exponential integral `E1` (closed-form averaging over
//! the relay-destination fade) and Gauss-Legendre quadrature over the
//! `[-pi, pi]` angle of the unified BER integrals.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, PI};


use crate::error::{Error, Result};
// inherent float methods take over whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Default number of Gauss-Legendre nodes for the angle integrals.
pub const DEFAULT_ORDER: usize = 201;

const SERIES_LIMIT: f64 = 8.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;

/// Bessel function of the first kind, order zero.
///
/// Three regimes: the ascending power series for `|x| < 8`, Miller's
/// backward recurrence normalised by `J0 + 2 sum J_2k = 1` for `8 <= |x| < 25`,
/// and the Hankel asymptotic expansion beyond. Absolute error stays below
/// `1e-13` on `|x| <= 50`.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x < SERIES_LIMIT {
        j0_series(x)
    } else if x < ASYMPTOTIC_LIMIT {
        j0_backward_recurrence(x)
    } else {
        j0_asymptotic(x)
    }
}

fn j0_series(x: f64) -> f64 {
    let z = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= z / (k * k);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) {
            return sum;
        }
        k += 1.0;
    }
}

fn j0_backward_recurrence(x: f64) -> f64 {
    // Start index comfortably above x; values of J_k for k >> x are negligible.
    let mut m = (x as usize) + 60;
    if m % 2 == 1 {
        m += 1;
    }
    let two_over_x = 2.0 / x;
    let mut j_next = 0.0; // J_{k+1}
    let mut j_curr = 1e-300; // J_k
    let mut even_sum = 0.0; // sum of J_2k for k >= 1
    let mut j0 = 0.0;
    for k in (1..=m).rev() {
        let j_prev = (k as f64) * two_over_x * j_curr - j_next;
        j_next = j_curr;
        j_curr = j_prev;
        // j_curr now holds J_{k-1}
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            even_sum += j_curr;
        }
        if k - 1 == 0 {
            j0 = j_curr;
        }
        if j_curr.abs() > 1e250 {
            j_curr *= 1e-250;
            j_next *= 1e-250;
            even_sum *= 1e-250;
        }
    }
    j0 / (j0 + 2.0 * even_sum)
}

fn j0_asymptotic(x: f64) -> f64 {
    // a_k = prod_{i=1..k} (2i-1)^2 / (k! 8^k)
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= odd * odd / (k as f64 * 8.0 * x);
        if term >= last || term < 1e-18 {
            break;
        }
        last = term;
        match k % 4 {
            1 => q -= term,
            2 => p -= term,
            3 => q += term,
            _ => p += term,
        }
    }
    let chi = x - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Exponential integral `E1(x) = int_x^inf exp(-t)/t dt` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    check_positive(x)?;
    if x < 1.0 {
        Ok(e1_series(x))
    } else {
        Ok(e1_continued_fraction_scaled(x) * (-x).exp())
    }
}

/// `exp(x) * E1(x)`, evaluated without overflow for large `x`.
pub fn scaled_exp_integral_e1(x: f64) -> Result<f64> {
    check_positive(x)?;
    if x < 1.0 {
        Ok(x.exp() * e1_series(x))
    } else {
        Ok(e1_continued_fraction_scaled(x))
    }
}

fn check_positive(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { name: "x", value: x })
    }
}

fn e1_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    let mut k = 1.0;
    loop {
        term *= -x / k;
        let contrib = term / k;
        sum += contrib;
        if contrib.abs() < 1e-17 * sum.abs().max(1e-17) {
            break;
        }
        k += 1.0;
    }
    -EULER_GAMMA - x.ln() - sum
}

/// Modified Lentz evaluation of the continued fraction for `exp(x) E1(x)`.
fn e1_continued_fraction_scaled(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// Gauss-Legendre nodes and weights on a finite interval.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Rule with `order` nodes on `[-pi, pi]`.
    pub fn gauss_legendre(order: usize) -> Result<Self> {
        Self::on_interval(order, -PI, PI)
    }

    /// Rule with `order` nodes on `[lower, upper]`.
    pub fn on_interval(order: usize, lower: f64, upper: f64) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter("quadrature order must be positive"));
        }
        if !(upper > lower) || !lower.is_finite() || !upper.is_finite() {
            return Err(Error::InvalidParameter("quadrature interval must be finite and non-empty"));
        }
        let (unit_nodes, unit_weights) = legendre_nodes(order);
        let half = 0.5 * (upper - lower);
        let mid = 0.5 * (upper + lower);
        let nodes = unit_nodes.iter().map(|&t| mid + half * t).collect();
        let weights = unit_weights.iter().map(|&w| half * w).collect();
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `sum_i w_i f(x_i)`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self::gauss_legendre(DEFAULT_ORDER).expect("default order is valid")
    }
}

/// Integrates `f` over the angle interval covered by `rule`.
pub fn integrate_theta<F: FnMut(f64) -> f64>(f: F, rule: &QuadratureRule) -> f64 {
    rule.integrate(f)
}

/// Nodes (ascending) and weights of the `n`-point rule on `[-1, 1]`.
fn legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut derivative = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            derivative = dp;
            let step = p / dp;
            x -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        if dp != 0.0 {
            derivative = dp;
        }
        let w = 2.0 / ((1.0 - x * x) * derivative * derivative);
        // x is descending in i; fill symmetric pairs in ascending order.
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    let dp = (n as f64) * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Trapezoid rule on the periodic integral representation
    /// `J0(x) = (1/2pi) int_0^{2pi} cos(x sin t) dt`; spectrally accurate.
    fn j0_trapezoid(x: f64) -> f64 {
        let k = 512;
        let h = 2.0 * PI / k as f64;
        (0..k).map(|i| (x * (i as f64 * h).sin()).cos()).sum::<f64>() / k as f64
    }

    /// Adaptive Simpson on `exp(-t)/t` over `[x, 100]`.
    fn e1_oracle(x: f64) -> f64 {
        fn simpson(_f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
            (b - a) / 6.0 * (fa + 4.0 * fm + fb)
        }
        fn adapt(
            f: &dyn Fn(f64) -> f64,
            a: f64,
            b: f64,
            fa: f64,
            fm: f64,
            fb: f64,
            whole: f64,
            eps: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = f(lm);
            let frm = f(rm);
            let left = simpson(f, a, m, fa, flm, fm);
            let right = simpson(f, m, b, fm, frm, fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * eps {
                left + right + (left + right - whole) / 15.0
            } else {
                adapt(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
                    + adapt(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
            }
        }
        let f = |t: f64| (-t).exp() / t;
        let (a, b) = (x, 100.0);
        let m = 0.5 * (a + b);
        let whole = simpson(&f, a, b, f(a), f(m), f(b));
        adapt(&f, a, b, f(a), f(m), f(b), whole, 1e-14 * (-x).exp() / x, 50)
    }

    #[test]
    fn j0_at_zero_is_one() {
        assert_eq!(bessel_j0(0.0), 1.0);
    }

    #[test]
    fn j0_first_root() {
        // bisection on the power series alone
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if j0_series(lo) * j0_series(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let root = 0.5 * (lo + hi);
        assert!((root - 2.404825557695773).abs() < 1e-12);
        assert!(bessel_j0(2.404825557695773).abs() <= 1e-10);
    }

    #[test]
    fn j0_small_argument_series() {
        let x = 2.0 * PI * 0.001;
        let oracle = 1.0 - x * x / 4.0 + x.powi(4) / 64.0;
        assert!((bessel_j0(x) - oracle).abs() < 1e-15);
        assert!((bessel_j0(x) - 0.99999013).abs() < 1e-8);
    }

    #[test]
    fn j0_matches_integral_representation_up_to_50() {
        let mut x = -50.0;
        while x <= 50.0 {
            let err = (bessel_j0(x) - j0_trapezoid(x)).abs();
            assert!(err <= 1e-12, "x = {x}: error {err:e}");
            x += 0.173;
        }
        for &x in &[7.999_999, 8.0, 8.000_001, 24.999, 25.0, 25.001, 50.0] {
            assert!((bessel_j0(x) - j0_trapezoid(x)).abs() <= 1e-12, "x = {x}");
        }
    }

    #[test]
    fn j0_series_remainder_bounded_by_first_omitted_term() {
        // For |x| <= 1 the series alternates with decreasing terms.
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            let z = 0.25 * x * x;
            let truncated = 1.0 - z + z * z / 4.0;
            let omitted = z * z * z / 36.0;
            assert!((bessel_j0(x) - truncated).abs() <= omitted + 1e-16);
        }
    }

    #[test]
    fn e1_reference_values() {
        let one = exp_integral_e1(1.0).unwrap();
        let half = exp_integral_e1(0.5).unwrap();
        let oracle_one = e1_oracle(1.0);
        let oracle_half = e1_oracle(0.5);
        assert!((one / oracle_one - 1.0).abs() < 1e-10);
        assert!((half / oracle_half - 1.0).abs() < 1e-10);
        assert!((one - 0.2193839344).abs() < 1e-10);
        assert!((half - 0.5597735948).abs() < 1e-10);
    }

    #[test]
    fn e1_agrees_with_oracle_across_branch_split() {
        for &x in &[0.05, 0.3, 0.9, 0.999, 1.0, 1.001, 2.0, 5.0, 12.0, 30.0] {
            let got = exp_integral_e1(x).unwrap();
            let want = e1_oracle(x);
            assert!((got / want - 1.0).abs() < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn e1_upper_bound() {
        for i in 1..200 {
            let x = i as f64 * 0.1;
            assert!(exp_integral_e1(x).unwrap() < (-x).exp() / x);
        }
    }

    #[test]
    fn e1_logarithmic_singularity() {
        let x = 1e-6;
        assert!((exp_integral_e1(x).unwrap() + x.ln() + EULER_GAMMA).abs() < 1e-5);
    }

    #[test]
    fn e1_rejects_non_positive() {
        assert!(matches!(exp_integral_e1(0.0), Err(Error::Domain { .. })));
        assert!(exp_integral_e1(-1.0).is_err());
        assert!(scaled_exp_integral_e1(f64::NAN).is_err());
    }

    #[test]
    fn scaled_e1_is_finite_for_large_arguments() {
        let v = scaled_exp_integral_e1(5000.0).unwrap();
        // exp(x) E1(x) ~ 1/x (1 - 1/x + 2/x^2)
        let x = 5000.0;
        assert!((v - (1.0 / x) * (1.0 - 1.0 / x + 2.0 / (x * x))).abs() < 1e-14);
    }

    #[test]
    fn rule_invariants() {
        let rule = QuadratureRule::default();
        assert_eq!(rule.order(), DEFAULT_ORDER);
        let total: f64 = rule.weights().iter().sum();
        assert!((total / (2.0 * PI) - 1.0).abs() < 1e-12);
        assert!(rule.weights().iter().all(|&w| w > 0.0));
        assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(rule.nodes().iter().all(|&x| (-PI..=PI).contains(&x)));
    }

    #[test]
    fn constant_and_odd_integrands() {
        let rule = QuadratureRule::default();
        assert!((integrate_theta(|_| 1.0, &rule) - 2.0 * PI).abs() < 1e-12);
        assert!(integrate_theta(f64::sin, &rule).abs() <= 1e-12);
    }

    #[test]
    fn polynomial_exactness() {
        let rule = QuadratureRule::on_interval(12, -1.0, 1.0).unwrap();
        for degree in 0..12 {
            let got = rule.integrate(|x| x.powi(degree));
            let want = if degree % 2 == 1 { 0.0 } else { 2.0 / (degree as f64 + 1.0) };
            assert!((got - want).abs() < 1e-12, "degree {degree}");
        }
    }

    #[test]
    fn reciprocal_sine_against_trapezoid() {
        let f = |t: f64| 1.0 / (1.0 + 0.5 * t.sin());
        let k = 1_000_000;
        let h = 2.0 * PI / k as f64;
        let trapezoid: f64 = (0..k).map(|i| f(-PI + i as f64 * h)).sum::<f64>() * h;
        let got = integrate_theta(f, &QuadratureRule::default());
        assert!((got - trapezoid).abs() < 1e-10);
        // closed form 2pi / sqrt(1 - 0.25)
        assert!((got - 2.0 * PI / 0.75f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn invalid_rules_rejected() {
        assert!(QuadratureRule::gauss_legendre(0).is_err());
        assert!(QuadratureRule::on_interval(4, 1.0, 1.0).is_err());
    }
}
