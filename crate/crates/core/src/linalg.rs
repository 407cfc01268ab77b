//! Least squares and small dense helpers shared by the estimators.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative threshold on the diagonal of R below which a regressor matrix is
/// declared rank deficient (columns are unit-normalized first).
const RANK_TOL: f64 = 1e-10;

/// Multi-response least-squares fit of `Y (T×m)` on `X (T×k)`.
#[derive(Debug, Clone)]
pub struct OlsFit {
    /// k × m
    pub coefficients: DMatrix<f64>,
    /// T × m
    pub residuals: DMatrix<f64>,
    /// (X'X)^-1, k × k
    pub xtx_inv: DMatrix<f64>,
}

impl OlsFit {
    pub fn n_obs(&self) -> usize {
        self.residuals.nrows()
    }

    /// Residual sum of squares per response column.
    pub fn ssr(&self) -> Vec<f64> {
        self.residuals
            .column_iter()
            .map(|c| c.norm_squared())
            .collect()
    }
}

pub fn ols(y: &DMatrix<f64>, x: &DMatrix<f64>) -> Result<OlsFit> {
    let (t, k) = x.shape();
    assert_eq!(t, y.nrows(), "ols: row mismatch");
    if k == 0 {
        return Ok(OlsFit {
            coefficients: DMatrix::zeros(0, y.ncols()),
            residuals: y.clone(),
            xtx_inv: DMatrix::zeros(0, 0),
        });
    }
    if t < k {
        return Err(Error::RankDeficientRegressors);
    }
    let norms: Vec<f64> = x.column_iter().map(|c| c.norm()).collect();
    if norms.iter().any(|&n| n == 0.0 || !n.is_finite()) {
        return Err(Error::RankDeficientRegressors);
    }
    let mut xs = x.clone();
    for (j, n) in norms.iter().enumerate() {
        xs.column_mut(j).scale_mut(1.0 / n);
    }
    let qr = xs.qr();
    let r = qr.r();
    let diag_max = (0..k).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if (0..k).any(|i| r[(i, i)].abs() <= RANK_TOL * diag_max) {
        return Err(Error::RankDeficientRegressors);
    }
    let qty = qr.q().transpose() * y;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or(Error::RankDeficientRegressors)?;
    let mut coefficients = &r_inv * qty;
    let mut xtx_inv = &r_inv * r_inv.transpose();
    for (i, ni) in norms.iter().enumerate() {
        coefficients.row_mut(i).scale_mut(1.0 / ni);
        for (j, nj) in norms.iter().enumerate() {
            xtx_inv[(i, j)] /= ni * nj;
        }
    }
    let residuals = y - x * &coefficients;
    Ok(OlsFit {
        coefficients,
        residuals,
        xtx_inv,
    })
}

/// Lower Cholesky factor of a symmetric positive-definite matrix.
pub fn cholesky_lower(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    nalgebra::Cholesky::new(m.clone()).map(|c| c.l())
}

/// Horizontally concatenate blocks with equal row counts.
pub fn hstack(blocks: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        debug_assert_eq!(b.nrows(), rows);
        out.view_mut((0, at), (rows, b.ncols())).copy_from(b);
        at += b.ncols();
    }
    out
}

/// Rows `[start, start + len)` of `m`.
pub fn rows(m: &DMatrix<f64>, start: usize, len: usize) -> DMatrix<f64> {
    m.rows(start, len).clone_owned()
}

/// First differences of each column.
pub fn diff_rows(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (t, n) = m.shape();
    DMatrix::from_fn(t - 1, n, |i, j| m[(i + 1, j)] - m[(i, j)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_fit() {
        let x = DMatrix::from_fn(10, 2, |i, j| if j == 0 { 1.0 } else { i as f64 });
        let y = DMatrix::from_fn(10, 1, |i, _| 2.0 + 3.0 * i as f64);
        let fit = ols(&y, &x).unwrap();
        assert!((fit.coefficients[(0, 0)] - 2.0).abs() < 1e-12);
        assert!((fit.coefficients[(1, 0)] - 3.0).abs() < 1e-12);
        assert!(fit.ssr()[0] < 1e-20);
        let direct = (x.transpose() * &x).try_inverse().unwrap();
        assert!((fit.xtx_inv - direct).abs().max() < 1e-10);
    }

    #[test]
    fn collinear_columns_rejected() {
        let x = DMatrix::from_fn(10, 2, |i, j| (i as f64 + 1.0) * (j as f64 + 1.0));
        let y = DMatrix::from_element(10, 1, 1.0);
        assert!(matches!(ols(&y, &x), Err(Error::RankDeficientRegressors)));
    }
}
