//! Small dense complex matrix helpers on top of `nalgebra`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
// inherent float methods take over whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

pub type CMatrix = DMatrix<Complex64>;

/// Symmetric Toeplitz matrix with first row `row`.
pub fn toeplitz(row: &[f64]) -> CMatrix {
    let n = row.len();
    CMatrix::from_fn(n, n, |i, j| Complex64::new(row[i.abs_diff(j)], 0.0))
}

pub fn diag(v: &[Complex64]) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(v))
}

/// Lower-triangular `L` with `C^-1 = L L^H`.
///
/// Factors the index-reversed matrix so that `C = R R^H` with `R` upper
/// triangular, then inverts `R`; `L = R^-H` is lower triangular. `C` itself is
/// never inverted explicitly.
pub fn inverse_cholesky_lower(c: &CMatrix) -> Result<CMatrix> {
    let n = c.nrows();
    if n == 0 || c.ncols() != n {
        return Err(Error::InvalidParameter("matrix must be square and non-empty"));
    }
    let reversed = CMatrix::from_fn(n, n, |i, j| c[(n - 1 - i, n - 1 - j)]);
    let g = cholesky_lower(&reversed)?;
    // R = J G J is upper triangular and C = R R^H.
    let r = CMatrix::from_fn(n, n, |i, j| g[(n - 1 - i, n - 1 - j)]);
    let r_inv = r
        .solve_upper_triangular(&CMatrix::identity(n, n))
        .ok_or(Error::NotPositiveDefinite)?;
    Ok(r_inv.adjoint())
}

/// Inverse of a Hermitian positive-definite matrix.
pub fn hermitian_inverse(c: &CMatrix) -> Result<CMatrix> {
    let n = c.nrows();
    let g = cholesky_lower(c)?;
    let g_inv = g
        .solve_lower_triangular(&CMatrix::identity(n, n))
        .ok_or(Error::NotPositiveDefinite)?;
    Ok(g_inv.adjoint() * g_inv)
}

/// Lower Cholesky factor `G` with `C = G G^H`; fails on a non-positive pivot.
pub fn cholesky_lower(c: &CMatrix) -> Result<CMatrix> {
    let n = c.nrows();
    if c.ncols() != n {
        return Err(Error::InvalidParameter("matrix must be square"));
    }
    let mut g = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut pivot = c[(j, j)].re;
        for k in 0..j {
            pivot -= g[(j, k)].norm_sqr();
        }
        if !(pivot > 0.0) || !pivot.is_finite() {
            return Err(Error::NotPositiveDefinite);
        }
        let d = pivot.sqrt();
        g[(j, j)] = Complex64::new(d, 0.0);
        for i in j + 1..n {
            let mut sum = c[(i, j)];
            for k in 0..j {
                sum -= g[(i, k)] * g[(j, k)].conj();
            }
            g[(i, j)] = sum / d;
        }
    }
    Ok(g)
}

/// Real eigenvalues of a Hermitian matrix (the strict upper part is ignored).
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect()
}

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
