//! Static least-squares regression of one column on others plus a constant.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::ols;
use crate::series::SeriesFrame;

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTerm {
    pub name: String,
    pub coefficient: f64,
    pub std_error: f64,
    pub t_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaticRegression {
    pub target: String,
    /// Constant first, then the regressors in the order given.
    pub terms: Vec<RegressionTerm>,
    pub r_squared: f64,
    pub sigma: f64,
    pub n_obs: usize,
}

impl StaticRegression {
    pub fn term(&self, name: &str) -> Option<&RegressionTerm> {
        self.terms.iter().find(|t| t.name == name)
    }
}

/// Fit `target = a0 + sum_i a_i * regressor_i + e` by OLS.
pub fn static_regression(
    frame: &SeriesFrame,
    target: &str,
    regressors: &[impl AsRef<str>],
) -> Result<StaticRegression> {
    let y = frame
        .column(target)
        .ok_or_else(|| Error::SchemaMismatch(format!("missing column `{target}`")))?;
    let xs = regressors
        .iter()
        .map(|r| {
            frame
                .column(r.as_ref())
                .ok_or_else(|| Error::SchemaMismatch(format!("missing column `{}`", r.as_ref())))
        })
        .collect::<Result<Vec<_>>>()?;
    let (n, k) = (frame.len(), xs.len() + 1);
    if n <= k + 1 {
        return Err(Error::SeriesTooShort {
            required: k + 2,
            actual: n,
        });
    }
    let x = DMatrix::from_fn(
        n,
        k,
        |i, j| if j == 0 { 1.0 } else { xs[j - 1].values()[i] },
    );
    let yv = DMatrix::from_column_slice(n, 1, y.values());
    let fit = ols(&yv, &x)?;
    let ssr = fit.ssr()[0];
    let mean = y.values().iter().sum::<f64>() / n as f64;
    let tss: f64 = y.values().iter().map(|v| (v - mean).powi(2)).sum();
    let s2 = ssr / (n - k) as f64;
    let terms = std::iter::once("const".to_string())
        .chain(regressors.iter().map(|r| r.as_ref().to_string()))
        .enumerate()
        .map(|(j, name)| {
            let coefficient = fit.coefficients[(j, 0)];
            let std_error = (s2 * fit.xtx_inv[(j, j)]).sqrt();
            RegressionTerm {
                name,
                coefficient,
                std_error,
                t_ratio: coefficient / std_error,
            }
        })
        .collect();
    Ok(StaticRegression {
        target: target.to_string(),
        terms,
        r_squared: if tss > 0.0 { 1.0 - ssr / tss } else { 1.0 },
        sigma: s2.sqrt(),
        n_obs: n,
    })
}
