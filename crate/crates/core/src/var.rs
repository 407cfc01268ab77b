//! Levels VAR estimation and lag-order selection.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::linalg::ols;
use crate::series::SeriesFrame;

/// A VAR(p) in levels, `y_t = c + A_1 y_{t-1} + ... + A_p y_{t-p} + u_t`.
#[derive(Debug, Clone)]
pub struct VarModel {
    pub p: usize,
    pub constant: bool,
    /// Zero when `constant` is false.
    pub intercept: DVector<f64>,
    pub coefficients: Vec<DMatrix<f64>>,
    /// `E'E / T_effective`
    pub residual_cov: DMatrix<f64>,
    pub log_likelihood: f64,
    pub t_effective: usize,
    pub column_names: Vec<String>,
    /// In-sample one-step predictions, `T_effective × n`.
    pub fitted: DMatrix<f64>,
    pub residuals: DMatrix<f64>,
}

impl VarModel {
    pub fn n_vars(&self) -> usize {
        self.column_names.len()
    }

    /// Regressors per equation.
    pub fn n_regressors(&self) -> usize {
        self.constant as usize + self.n_vars() * self.p
    }
}

/// Gaussian log-likelihood concentrated on `Σ = E'E/T`.
pub fn gaussian_log_likelihood(t: usize, sigma: &DMatrix<f64>) -> f64 {
    let n = sigma.nrows() as f64;
    let t = t as f64;
    -(t * n / 2.0) * (1.0 + (2.0 * PI).ln()) - (t / 2.0) * sigma.determinant().ln()
}

pub fn fit_var(frame: &SeriesFrame, p: usize, constant: bool) -> Result<VarModel> {
    let n = frame.n_columns();
    let required = n * p + p + 6;
    if frame.len() < required {
        return Err(Error::SeriesTooShort {
            required,
            actual: frame.len(),
        });
    }
    let names = frame.names().iter().map(|s| s.to_string()).collect();
    fit_var_matrix(&frame.to_matrix(), p, constant, p, names)
}

/// Fit using equations for `t = first..T-1` (`first >= p`), so that models of
/// different orders can share one sample.
pub(crate) fn fit_var_matrix(
    y: &DMatrix<f64>,
    p: usize,
    constant: bool,
    first: usize,
    column_names: Vec<String>,
) -> Result<VarModel> {
    assert!(first >= p);
    let (t_total, n) = y.shape();
    let t_eff = t_total - first;
    let m = constant as usize + n * p;
    if t_eff <= m {
        return Err(Error::SeriesTooShort {
            required: first + m + 1,
            actual: t_total,
        });
    }
    let x = DMatrix::from_fn(t_eff, m, |row, col| {
        let t = first + row;
        if constant && col == 0 {
            return 1.0;
        }
        let c = col - constant as usize;
        y[(t - 1 - c / n, c % n)]
    });
    let dep = y.rows(first, t_eff).clone_owned();
    let fit = ols(&dep, &x)?;
    let b = &fit.coefficients;
    let intercept = if constant {
        b.row(0).transpose()
    } else {
        DVector::zeros(n)
    };
    let coefficients = (0..p)
        .map(|lag| {
            let off = constant as usize + lag * n;
            b.rows(off, n).transpose()
        })
        .collect();
    let residual_cov = fit.residuals.transpose() * &fit.residuals / t_eff as f64;
    let log_likelihood = gaussian_log_likelihood(t_eff, &residual_cov);
    Ok(VarModel {
        p,
        constant,
        intercept,
        coefficients,
        log_likelihood,
        t_effective: t_eff,
        column_names,
        fitted: &dep - &fit.residuals,
        residuals: fit.residuals,
        residual_cov,
    })
}

/// Information criteria per observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InformationCriteria {
    pub aic: f64,
    pub sc: f64,
    pub hq: f64,
}

impl InformationCriteria {
    /// From a log-likelihood with `q` estimated parameters on `t` observations.
    pub fn from_log_likelihood(logl: f64, q: usize, t: usize) -> Self {
        let (q, t) = (q as f64, t as f64);
        let base = -2.0 * logl / t;
        Self {
            aic: base + 2.0 * q / t,
            sc: base + q * t.ln() / t,
            hq: base + 2.0 * q * t.ln().ln() / t,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LagRow {
    pub lag: usize,
    pub logl: f64,
    /// Sequential modified LR statistic; absent at lag 0.
    pub lr: Option<f64>,
    pub fpe: f64,
    pub aic: f64,
    pub sc: f64,
    pub hq: f64,
}

/// Lag chosen by each criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LagSelections {
    pub lr: usize,
    pub fpe: usize,
    pub aic: usize,
    pub sc: usize,
    pub hq: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LagSelectionTable {
    pub rows: Vec<LagRow>,
    pub selected: LagSelections,
    pub n_vars: usize,
    pub t_effective: usize,
    pub constant: bool,
    pub column_names: Vec<String>,
}

fn argmin(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (f64::INFINITY, 0);
    for (i, v) in values.enumerate() {
        if v < best.0 {
            best = (v, i);
        }
    }
    best.1
}

pub fn lag_order_table(
    frame: &SeriesFrame,
    max_lag: usize,
    constant: bool,
) -> Result<LagSelectionTable> {
    let n = frame.n_columns();
    let y = frame.to_matrix();
    let names: Vec<String> = frame.names().iter().map(|s| s.to_string()).collect();
    let t = frame.len().saturating_sub(max_lag);
    let m_max = constant as usize + n * max_lag;
    if t < m_max + 5 {
        return Err(Error::SeriesTooShort {
            required: max_lag + m_max + 5,
            actual: frame.len(),
        });
    }
    let lr_crit = ChiSquared::new((n * n) as f64)
        .map_err(|e| Error::InvalidParams(e.to_string()))?
        .inverse_cdf(0.95);

    let mut rows = Vec::with_capacity(max_lag + 1);
    let mut lr_selected = 0;
    let mut prev_logl = None;
    for lag in 0..=max_lag {
        let model = fit_var_matrix(&y, lag, constant, max_lag, names.clone())?;
        let m = model.n_regressors();
        let logl = model.log_likelihood;
        let tf = t as f64;
        let ic = InformationCriteria::from_log_likelihood(logl, n * m, t);
        let fpe =
            ((tf + m as f64) / (tf - m as f64)).powi(n as i32) * model.residual_cov.determinant();
        // (T - m)(ln|S_{j-1}| - ln|S_j|), written through the log-likelihoods.
        let lr = prev_logl.map(|prev: f64| (tf - m as f64) * 2.0 * (logl - prev) / tf);
        if let Some(stat) = lr {
            if stat > lr_crit {
                lr_selected = lag;
            }
        }
        prev_logl = Some(logl);
        rows.push(LagRow {
            lag,
            logl,
            lr,
            fpe,
            aic: ic.aic,
            sc: ic.sc,
            hq: ic.hq,
        });
    }
    let selected = LagSelections {
        lr: lr_selected,
        fpe: argmin(rows.iter().map(|r| r.fpe)),
        aic: argmin(rows.iter().map(|r| r.aic)),
        sc: argmin(rows.iter().map(|r| r.sc)),
        hq: argmin(rows.iter().map(|r| r.hq)),
    };
    Ok(LagSelectionTable {
        rows,
        selected,
        n_vars: n,
        t_effective: t,
        constant,
        column_names: names,
    })
}
