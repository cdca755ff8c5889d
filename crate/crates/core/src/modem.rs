//! Gray-labelled M-PSK and differential encoding.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const UNIT_TOLERANCE: f64 = 1e-9;
/// Relative margin under which two candidate scores count as tied.
pub(crate) const TIE_MARGIN: f64 = 1e-12;

/// M-PSK alphabet `{exp(j 2 pi m / M)}` with a binary-reflected Gray labelling
/// anchored at label 0 for the point `1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    order: usize,
    bits_per_symbol: usize,
    points: Vec<Complex64>,
}

impl Constellation {
    /// `order` must be a power of two, at least 2.
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 || !order.is_power_of_two() {
            return Err(Error::UnsupportedOrder(order));
        }
        let points = (0..order).map(|m| psk_point(m, order)).collect();
        Ok(Self { order, bits_per_symbol: order.trailing_zeros() as usize, points })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Point with phase index `index` (taken modulo the order).
    pub fn point(&self, index: usize) -> Complex64 {
        self.points[index % self.order]
    }

    /// Gray label of the point with phase index `index`.
    pub fn label(&self, index: usize) -> usize {
        index ^ (index >> 1)
    }

    /// Phase index carrying Gray label `label`.
    pub fn index_of_label(&self, label: usize) -> usize {
        let mut index = label;
        let mut shift = label >> 1;
        while shift != 0 {
            index ^= shift;
            shift >>= 1;
        }
        index
    }

    /// Phase index of the point closest to `z`; ties go to the smaller index.
    pub fn nearest_index(&self, z: Complex64) -> usize {
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        let margin = TIE_MARGIN * z.norm();
        for (m, p) in self.points.iter().enumerate() {
            // max Re(z p*) <=> min |z - p|^2 on the unit circle
            let score = z.re * p.re + z.im * p.im;
            if score > best_score + margin {
                best = m;
                best_score = score;
            }
        }
        best
    }

    /// Maps groups of `log2 M` bits (most significant first) to phase indices.
    pub fn map_bits_to_indices(&self, bits: &[u8]) -> Result<Vec<usize>> {
        if bits.len() % self.bits_per_symbol != 0 {
            return Err(Error::LengthMismatch {
                expected: bits.len().div_ceil(self.bits_per_symbol) * self.bits_per_symbol,
                actual: bits.len(),
            });
        }
        Ok(bits
            .chunks(self.bits_per_symbol)
            .map(|group| {
                let label = group.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b & 1));
                self.index_of_label(label)
            })
            .collect())
    }

    /// Maps bits to constellation points.
    pub fn map_bits(&self, bits: &[u8]) -> Result<Vec<Complex64>> {
        Ok(self.map_bits_to_indices(bits)?.into_iter().map(|m| self.points[m]).collect())
    }

    /// Appends the label bits of phase index `index`.
    pub fn push_label_bits(&self, index: usize, out: &mut Vec<u8>) {
        let label = self.label(index % self.order);
        for shift in (0..self.bits_per_symbol).rev() {
            out.push(((label >> shift) & 1) as u8);
        }
    }

    /// Hard-decides each symbol and returns its label bits.
    pub fn demap(&self, symbols: &[Complex64]) -> Vec<u8> {
        let mut bits = Vec::with_capacity(symbols.len() * self.bits_per_symbol);
        for &z in symbols {
            self.push_label_bits(self.nearest_index(z), &mut bits);
        }
        bits
    }

    /// Number of differing label bits between two phase indices.
    pub fn bit_distance(&self, a: usize, b: usize) -> u32 {
        (self.label(a % self.order) ^ self.label(b % self.order)).count_ones()
    }
}

fn psk_point(m: usize, order: usize) -> Complex64 {
    // quarter-turn multiples exactly
    if (4 * m) % order == 0 {
        return match (4 * m) / order {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, 2.0 * PI * m as f64 / order as f64)
}

/// `s[0] = 1`, `s[k] = v[k] s[k-1]`; the output is one symbol longer.
pub fn diff_encode(v: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut s = Vec::with_capacity(v.len() + 1);
    let mut prev = Complex64::new(1.0, 0.0);
    s.push(prev);
    for &symbol in v {
        let modulus = symbol.norm();
        if (modulus - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::NonUnitSymbol { modulus });
        }
        prev *= symbol;
        s.push(prev);
    }
    Ok(s)
}

/// `v[k] = s*[k] s[k+1]`, snapped to the nearest constellation point.
pub fn diff_decode(s_hat: &[Complex64], constellation: &Constellation) -> Vec<Complex64> {
    s_hat
        .windows(2)
        .map(|pair| constellation.point(constellation.nearest_index(pair[0].conj() * pair[1])))
        .collect()
}
