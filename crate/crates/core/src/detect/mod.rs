//! Detectors operating on destination samples.
//!
//! All detectors return phase indices into the [`Constellation`]; the
//! corresponding symbol is `constellation.point(index)`.

mod msd;

pub use msd::{
    covariance_matrix, msd_build, msd_detect_stream, msd_exhaustive, msd_sphere, MsdDecision, MsdDetector,
    MsdStatistics, MsdWindow, EXHAUSTIVE_LIMIT,
};

use num_complex::Complex64;

use crate::link::LinkConfig;
use crate::modem::{Constellation, TIE_MARGIN};

/// Two-symbol differential detection: `argmin_v |y_curr - v y_prev|^2`.
///
/// Needs no channel knowledge. Ties resolve to the smallest phase index.
pub fn cdd_detect(y_prev: Complex64, y_curr: Complex64, constellation: &Constellation) -> usize {
    // |y_curr - v y_prev|^2 = const - 2 Re(y_curr* v y_prev)
    argmax_correlation(y_curr.conj() * y_prev, constellation)
}

/// Genie-aided coherent detection of the data symbol `v[k]` given the true
/// cascaded gain `h[k]` and the previously transmitted symbol `s[k-1]`:
/// `argmin_v |y - A sqrt(P0) h v s_prev|^2`.
///
/// With `h = 0` every candidate scores equally and index 0 is returned.
pub fn coherent_detect(
    y: Complex64,
    h: Complex64,
    s_prev: Complex64,
    cfg: &LinkConfig,
    constellation: &Constellation,
) -> usize {
    let reference = h * s_prev * cfg.signal_gain();
    argmax_correlation(y.conj() * reference, constellation)
}

/// `argmax_m Re(z p_m)`, smallest index on ties.
fn argmax_correlation(z: Complex64, constellation: &Constellation) -> usize {
    let margin = TIE_MARGIN * z.norm();
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (m, p) in constellation.points().iter().enumerate() {
        let score = (z * p).re;
        if score > best_score + margin {
            best = m;
            best_score = score;
        }
    }
    best
}
