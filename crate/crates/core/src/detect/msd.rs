//! Multiple-symbol differential detection with sphere decoding.
//!
//! With the averaged covariance `C = A^2 P0 Sigma_h + (1 + A^2 sigma_2^2) N0 I`
//! the window decision minimises `y^H diag(s) C^-1 diag(s*) y = ||U s||^2`,
//! where `C^-1 = L L^H` and `U = (L^H diag(y))*` is upper triangular. The
//! metric is invariant to a common rotation of `s`, so the first symbol of
//! every candidate is pinned to `1`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fading::{autocorr, cascaded_autocorr, ChannelParams, Hop};
use crate::linalg::{inverse_cholesky_lower, toeplitz, CMatrix};
use crate::link::LinkConfig;
use crate::modem::Constellation;

/// Largest candidate count accepted by [`msd_exhaustive`].
pub const EXHAUSTIVE_LIMIT: u128 = 1 << 20;

/// `C = A^2 P0 Sigma_h + (1 + A^2 sigma_2^2) N0 I` for a window of `n` samples.
pub fn covariance_matrix(n: usize, cfg: &LinkConfig, ch: &ChannelParams) -> CMatrix {
    let a2 = cfg.amplification() * cfg.amplification();
    let noise = (1.0 + a2 * ch.variance(Hop::RelayDestination)) * cfg.n0();
    let mut c = toeplitz(&cascaded_row(n, ch));
    c *= Complex64::new(a2 * cfg.p0(), 0.0);
    for i in 0..n {
        c[(i, i)] += noise;
    }
    c
}

fn cascaded_row(n: usize, ch: &ChannelParams) -> Vec<f64> {
    (0..n as u32).map(|lag| cascaded_autocorr(ch, lag)).collect()
}

/// Window-independent quantities for one window length: the covariances and
/// the whitening factor `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct MsdStatistics {
    len: usize,
    sigma_h1: CMatrix,
    sigma_h: CMatrix,
    covariance: CMatrix,
    whitening: CMatrix,
}

impl MsdStatistics {
    pub fn new(len: usize, cfg: &LinkConfig, ch: &ChannelParams) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidParameter("window length must be >= 1"));
        }
        let sigma_h1 = toeplitz(&(0..len as u32).map(|lag| autocorr(ch, Hop::SourceRelay, lag)).collect::<Vec<_>>());
        let sigma_h = toeplitz(&cascaded_row(len, ch));
        let covariance = covariance_matrix(len, cfg, ch);
        let whitening = inverse_cholesky_lower(&covariance)?;
        Ok(Self { len, sigma_h1, sigma_h, covariance, whitening })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Covariance of the source-relay channel over the window.
    pub fn sigma_h1(&self) -> &CMatrix {
        &self.sigma_h1
    }

    /// Covariance of the cascaded channel over the window.
    pub fn sigma_h(&self) -> &CMatrix {
        &self.sigma_h
    }

    /// `C`.
    pub fn covariance(&self) -> &CMatrix {
        &self.covariance
    }

    /// Lower-triangular `L` with `C^-1 = L L^H`.
    pub fn whitening(&self) -> &CMatrix {
        &self.whitening
    }
}

/// One detection window: received samples and the search matrix `U`.
#[derive(Debug, Clone)]
pub struct MsdWindow {
    stats: Arc<MsdStatistics>,
    y: Vec<Complex64>,
    /// Row-major `U`; entries below the diagonal are zero.
    u: Vec<Complex64>,
}

impl MsdWindow {
    pub fn new(stats: Arc<MsdStatistics>, y: &[Complex64]) -> Result<Self> {
        let n = stats.len();
        if y.len() != n {
            return Err(Error::LengthMismatch { expected: n, actual: y.len() });
        }
        let l = &stats.whitening;
        // U_ij = conj(conj(L_ji) y_j) = L_ji conj(y_j), zero for j < i.
        let mut u = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in i..n {
                u[i * n + j] = l[(j, i)] * y[j].conj();
            }
        }
        Ok(Self { stats, y: y.to_vec(), u })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn y(&self) -> &[Complex64] {
        &self.y
    }

    pub fn statistics(&self) -> &MsdStatistics {
        &self.stats
    }

    /// `U` as a matrix.
    pub fn search_matrix(&self) -> CMatrix {
        let n = self.len();
        CMatrix::from_row_slice(n, n, &self.u)
    }

    /// `||U s||^2` for arbitrary symbols.
    pub fn metric(&self, s: &[Complex64]) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                let row = &self.u[i * n..(i + 1) * n];
                row[i..].iter().zip(&s[i..]).map(|(u, s)| u * s).sum::<Complex64>().norm_sqr()
            })
            .sum()
    }

    /// `||U s||^2` for a vector of phase indices.
    pub fn metric_of_indices(&self, indices: &[usize], constellation: &Constellation) -> f64 {
        let s: Vec<Complex64> = indices.iter().map(|&m| constellation.point(m)).collect();
        self.metric(&s)
    }
}

/// Builds `C`, `L` and `U` for one window.
pub fn msd_build(y: &[Complex64], cfg: &LinkConfig, ch: &ChannelParams) -> Result<MsdWindow> {
    if y.len() < 2 {
        return Err(Error::InvalidParameter("MSD window needs at least 2 samples"));
    }
    let stats = Arc::new(MsdStatistics::new(y.len(), cfg, ch)?);
    MsdWindow::new(stats, y)
}

/// Minimising phase-index sequence (first entry 0) and its metric.
#[derive(Debug, Clone, PartialEq)]
pub struct MsdDecision {
    pub indices: Vec<usize>,
    pub metric: f64,
}

impl MsdDecision {
    /// Differential data decisions `v[k] = s*[k] s[k+1]` as phase indices.
    pub fn data_indices(&self, order: usize) -> impl Iterator<Item = usize> + '_ {
        self.indices.windows(2).map(move |w| (w[1] + order - w[0]) % order)
    }
}

/// Exact minimiser of `||U s||^2` by depth-first Schnorr-Euchner enumeration.
///
/// The search runs from the last row of the triangular system upwards with an
/// initially unbounded radius that shrinks at every leaf. Internally the last
/// symbol is pinned; the result is rotated so the first index is 0, which
/// leaves the metric unchanged.
pub fn msd_sphere(window: &MsdWindow, constellation: &Constellation) -> MsdDecision {
    let n = window.len();
    let order = constellation.order();
    let mut search = Search {
        u: &window.u,
        n,
        points: constellation.points(),
        current: vec![0; n],
        best: vec![0; n],
        radius: f64::INFINITY,
        scratch: vec![(0.0, 0); order * n],
    };
    let last = n - 1;
    search.current[last] = 0;
    let base = window.u[last * n + last].norm_sqr();
    if n == 1 {
        return MsdDecision { indices: vec![0], metric: base };
    }
    search.descend(last - 1, base);
    let reference = search.best[0];
    let indices = search.best.iter().map(|&m| (m + order - reference) % order).collect();
    MsdDecision { indices, metric: search.radius }
}

struct Search<'a> {
    u: &'a [Complex64],
    n: usize,
    points: &'a [Complex64],
    current: Vec<usize>,
    best: Vec<usize>,
    radius: f64,
    /// Per-level candidate buffer (cost, index).
    scratch: Vec<(f64, usize)>,
}

impl Search<'_> {
    fn descend(&mut self, level: usize, partial: f64) {
        let n = self.n;
        let order = self.points.len();
        let row = &self.u[level * n..(level + 1) * n];
        let interference: Complex64 = (level + 1..n).map(|j| row[j] * self.points[self.current[j]]).sum();
        let diagonal = row[level];

        let start = level * order;
        for (m, p) in self.points.iter().enumerate() {
            self.scratch[start + m] = ((diagonal * p + interference).norm_sqr(), m);
        }
        // Schnorr-Euchner order: closest point first, ties by index.
        self.scratch[start..start + order].sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        for k in 0..order {
            let (cost, m) = self.scratch[start + k];
            let total = partial + cost;
            if total >= self.radius {
                break;
            }
            self.current[level] = m;
            if level == 0 {
                self.radius = total;
                self.best.copy_from_slice(&self.current);
            } else {
                self.descend(level - 1, total);
            }
        }
    }
}

/// Brute-force minimiser over all `M^(N-1)` sequences with `s[0] = 1`,
/// enumerated lexicographically; the first minimum found is kept.
pub fn msd_exhaustive(window: &MsdWindow, constellation: &Constellation) -> Result<MsdDecision> {
    let n = window.len();
    let order = constellation.order();
    let count = (order as u128).checked_pow((n - 1) as u32).unwrap_or(u128::MAX);
    if count > EXHAUSTIVE_LIMIT {
        return Err(Error::SearchSpaceOverflow(count));
    }
    let mut indices = vec![0usize; n];
    let mut best = MsdDecision { indices: indices.clone(), metric: f64::INFINITY };
    for _ in 0..count {
        let metric = window.metric_of_indices(&indices, constellation);
        if metric < best.metric {
            best.metric = metric;
            best.indices.copy_from_slice(&indices);
        }
        // odometer, index 1 most significant
        for pos in (1..n).rev() {
            indices[pos] += 1;
            if indices[pos] < order {
                break;
            }
            indices[pos] = 0;
        }
    }
    Ok(best)
}

/// Stream detector with precomputed statistics for every window size it uses.
#[derive(Debug, Clone)]
pub struct MsdDetector {
    window_len: usize,
    constellation: Constellation,
    /// `stats[k]` serves windows of `k + 2` samples.
    stats: Vec<Arc<MsdStatistics>>,
}

impl MsdDetector {
    pub fn new(window_len: usize, cfg: &LinkConfig, ch: &ChannelParams, constellation: Constellation) -> Result<Self> {
        if window_len < 2 {
            return Err(Error::InvalidParameter("MSD window length must be >= 2"));
        }
        let stats = (2..=window_len)
            .map(|len| MsdStatistics::new(len, cfg, ch).map(Arc::new))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { window_len, constellation, stats })
    }

    pub fn window_len(&self) -> usize {
        self.window_len
    }

    pub fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    /// Data decisions (phase indices) for a received stream.
    ///
    /// Windows of `N` samples advance by `N - 1`, overlapping by one sample; a
    /// shorter tail (at least 2 samples) is detected with a window of its own
    /// size. Produces `y.len() - 1` decisions.
    pub fn detect_stream(&self, y: &[Complex64]) -> Result<Vec<usize>> {
        if y.len() < 2 {
            return Err(Error::InvalidParameter("MSD stream needs at least 2 samples"));
        }
        let order = self.constellation.order();
        let mut decisions = Vec::with_capacity(y.len() - 1);
        let mut start = 0;
        while start + 1 < y.len() {
            let size = self.window_len.min(y.len() - start);
            let window = MsdWindow::new(self.stats[size - 2].clone(), &y[start..start + size])?;
            let decision = msd_sphere(&window, &self.constellation);
            decisions.extend(decision.data_indices(order));
            start += size - 1;
        }
        Ok(decisions)
    }
}

/// One-shot stream detection; see [`MsdDetector::detect_stream`].
pub fn msd_detect_stream(
    y: &[Complex64],
    window_len: usize,
    cfg: &LinkConfig,
    ch: &ChannelParams,
    constellation: &Constellation,
) -> Result<Vec<usize>> {
    MsdDetector::new(window_len, cfg, ch, constellation.clone())?.detect_stream(y)
}
