//! Orthogonalized impulse responses and forecast-error variance
//! decomposition.
//!
//! Moving-average matrices follow `Ψ_0 = I`, `Ψ_h = Σ_{j=1..min(h,p)} A_j Ψ_{h-j}`
//! from the levels representation. Shocks are orthogonalized with the lower
//! Cholesky factor of the residual covariance taken in the requested
//! variable ordering.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::var::VarModel;
use crate::vecm::VecmModel;

/// Anything with a levels VAR representation and a residual covariance.
pub trait VarRepresentation {
    fn lag_matrices(&self) -> Vec<DMatrix<f64>>;
    fn residual_cov(&self) -> &DMatrix<f64>;
    fn column_names(&self) -> &[String];
}

impl VarRepresentation for VecmModel {
    fn lag_matrices(&self) -> Vec<DMatrix<f64>> {
        self.levels_representation().coefficients
    }

    fn residual_cov(&self) -> &DMatrix<f64> {
        &self.residual_cov
    }

    fn column_names(&self) -> &[String] {
        &self.column_names
    }
}

impl VarRepresentation for VarModel {
    fn lag_matrices(&self) -> Vec<DMatrix<f64>> {
        self.coefficients.clone()
    }

    fn residual_cov(&self) -> &DMatrix<f64> {
        &self.residual_cov
    }

    fn column_names(&self) -> &[String] {
        &self.column_names
    }
}

/// Reduced-form moving-average matrices `Ψ_0..=Ψ_horizon`.
pub fn ma_coefficients(model: &impl VarRepresentation, horizon: usize) -> Vec<DMatrix<f64>> {
    let a = model.lag_matrices();
    let n = model.column_names().len();
    let mut psi: Vec<DMatrix<f64>> = Vec::with_capacity(horizon + 1);
    psi.push(DMatrix::identity(n, n));
    for h in 1..=horizon {
        let mut next = DMatrix::zeros(n, n);
        for (j, aj) in a.iter().enumerate().take(h) {
            next += aj * &psi[h - j - 1];
        }
        psi.push(next);
    }
    psi
}

/// Column positions of `ordering` in the model; must be a permutation.
fn resolve_ordering(names: &[String], ordering: &[impl AsRef<str>]) -> Result<Vec<usize>> {
    if ordering.len() != names.len() {
        return Err(Error::InvalidParams(format!(
            "ordering has {} names, model has {}",
            ordering.len(),
            names.len()
        )));
    }
    let mut idx = Vec::with_capacity(names.len());
    for o in ordering {
        let o = o.as_ref();
        let i = names.iter().position(|n| n == o).ok_or_else(|| {
            Error::InvalidParams(format!("ordering names unknown variable `{o}`"))
        })?;
        if idx.contains(&i) {
            return Err(Error::InvalidParams(format!("`{o}` repeated in ordering")));
        }
        idx.push(i);
    }
    Ok(idx)
}

/// Impact matrix `P` in model coordinates: column `j` is the impact of the
/// shock attached to variable `j`; `P[i][j] = 0` when `j` is ordered after `i`.
pub fn impact_matrix(
    model: &impl VarRepresentation,
    ordering: &[impl AsRef<str>],
) -> Result<DMatrix<f64>> {
    let order = resolve_ordering(model.column_names(), ordering)?;
    let sigma = model.residual_cov();
    let n = order.len();
    let permuted = DMatrix::from_fn(n, n, |a, b| sigma[(order[a], order[b])]);
    let l = nalgebra::Cholesky::new(permuted)
        .ok_or(Error::NonPositiveDefiniteCovariance)?
        .l();
    let mut p = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            p[(order[a], order[b])] = l[(a, b)];
        }
    }
    Ok(p)
}

#[derive(Debug, Clone)]
pub struct IrfResult {
    pub horizon: usize,
    /// `responses[h][(i, j)]`: response of variable `i` to the shock of
    /// variable `j`, both in model column order.
    pub responses: Vec<DMatrix<f64>>,
    pub ordering: Vec<String>,
    pub column_names: Vec<String>,
}

impl IrfResult {
    pub fn response(&self, h: usize, variable: &str, shock: &str) -> Option<f64> {
        let i = self.column_names.iter().position(|n| n == variable)?;
        let j = self.column_names.iter().position(|n| n == shock)?;
        self.responses.get(h).map(|m| m[(i, j)])
    }

    /// `horizon,response,shock,value` rows; shocks listed in ordering order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("horizon,response,shock,value\n");
        for (h, m) in self.responses.iter().enumerate() {
            for (i, resp) in self.column_names.iter().enumerate() {
                for shock in &self.ordering {
                    let j = self.column_names.iter().position(|n| n == shock).unwrap();
                    let _ = writeln!(out, "{h},{resp},{shock},{}", m[(i, j)]);
                }
            }
        }
        out
    }
}

pub fn impulse_response(
    model: &impl VarRepresentation,
    horizon: usize,
    ordering: &[impl AsRef<str>],
) -> Result<IrfResult> {
    if horizon == 0 {
        return Err(Error::InvalidParams("horizon must be >= 1".into()));
    }
    let p = impact_matrix(model, ordering)?;
    let responses = ma_coefficients(model, horizon)
        .into_iter()
        .map(|psi| psi * &p)
        .collect();
    Ok(IrfResult {
        horizon,
        responses,
        ordering: ordering.iter().map(|s| s.as_ref().to_string()).collect(),
        column_names: model.column_names().to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FevdRow {
    pub period: usize,
    pub se: f64,
    /// Percent, one per shock in ordering order.
    pub shares: Vec<f64>,
}

/// Decomposition of one variable's forecast-error variance.
#[derive(Debug, Clone, PartialEq)]
pub struct FevdTable {
    pub variable: String,
    pub shocks: Vec<String>,
    pub rows: Vec<FevdRow>,
}

impl FevdTable {
    pub fn share(&self, period: usize, shock: &str) -> Option<f64> {
        let j = self.shocks.iter().position(|s| s == shock)?;
        self.rows.get(period.checked_sub(1)?).map(|r| r.shares[j])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fevd {
    pub tables: Vec<FevdTable>,
}

impl Fevd {
    pub fn table(&self, variable: &str) -> Option<&FevdTable> {
        self.tables.iter().find(|t| t.variable == variable)
    }
}

pub fn fevd(
    model: &impl VarRepresentation,
    horizon: usize,
    ordering: &[impl AsRef<str>],
) -> Result<Fevd> {
    let irf = impulse_response(model, horizon, ordering)?;
    let names = model.column_names();
    let order = resolve_ordering(names, ordering)?;
    let n = names.len();
    let tables = (0..n)
        .map(|i| {
            let mut cum = vec![0.0; n];
            let rows = (1..=horizon)
                .map(|h| {
                    let theta = &irf.responses[h - 1];
                    for (c, &j) in cum.iter_mut().zip(&order) {
                        *c += theta[(i, j)].powi(2);
                    }
                    let total: f64 = cum.iter().sum();
                    FevdRow {
                        period: h,
                        se: total.sqrt(),
                        shares: cum.iter().map(|c| 100.0 * c / total).collect(),
                    }
                })
                .collect();
            FevdTable {
                variable: names[i].clone(),
                shocks: irf.ordering.clone(),
                rows,
            }
        })
        .collect();
    Ok(Fevd { tables })
}
