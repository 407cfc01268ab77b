//! Vector error-correction model at a given cointegration rank.
//!
//! ```text
//! dy_t = alpha (beta' y_{t-1} + beta_const) + G_1 dy_{t-1} + ... + G_{p-1} dy_{t-p+1} + mu + u_t
//! ```
//!
//! `beta` comes from the Johansen eigenvectors; `alpha`, the short-run
//! matrices and `mu` are then least squares on the error-correction terms.

use nalgebra::{Complex, DMatrix, DVector};

use crate::cointegration::{format_ecm_equation, mean_centering_consts, reduced_rank, DetCase};
use crate::error::{Error, Result};
use crate::linalg::{hstack, ols};
use crate::series::SeriesFrame;

#[derive(Debug, Clone)]
pub struct VecmModel {
    pub rank: usize,
    /// `n × rank`
    pub alpha: DMatrix<f64>,
    /// `n × rank`; the leading `rank × rank` block is the identity when
    /// estimated.
    pub beta: DMatrix<f64>,
    pub beta_const: Vec<f64>,
    /// `G_1..G_{p-1}`
    pub gamma: Vec<DMatrix<f64>>,
    pub intercept: DVector<f64>,
    pub residual_cov: DMatrix<f64>,
    pub t_effective: usize,
    pub column_names: Vec<String>,
    pub det_case: DetCase,
    /// In-sample one-step level predictions, `T_effective × n`.
    pub fitted: DMatrix<f64>,
    pub residuals: DMatrix<f64>,
    /// Regressors of every equation: ECM terms, lagged differences, then the
    /// constant when present.
    pub regressors: DMatrix<f64>,
}

/// `y_t = c + A_1 y_{t-1} + ... + A_p y_{t-p} + u_t` implied by a VECM.
#[derive(Debug, Clone)]
pub struct LevelsRepresentation {
    pub intercept: DVector<f64>,
    pub coefficients: Vec<DMatrix<f64>>,
}

impl VecmModel {
    /// Assemble a model from known parameters (simulation designs, tests).
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        column_names: Vec<String>,
        alpha: DMatrix<f64>,
        beta: DMatrix<f64>,
        beta_const: Vec<f64>,
        gamma: Vec<DMatrix<f64>>,
        intercept: DVector<f64>,
        residual_cov: DMatrix<f64>,
    ) -> Result<Self> {
        let n = column_names.len();
        let rank = beta.ncols();
        let check = |expected: usize, actual: usize| {
            if expected == actual {
                Ok(())
            } else {
                Err(Error::DimensionMismatch { expected, actual })
            }
        };
        check(n, alpha.nrows())?;
        check(n, beta.nrows())?;
        check(rank, alpha.ncols())?;
        check(rank, beta_const.len())?;
        check(n, intercept.len())?;
        check(n, residual_cov.nrows())?;
        check(n, residual_cov.ncols())?;
        for g in &gamma {
            check(n, g.nrows())?;
            check(n, g.ncols())?;
        }
        Ok(Self {
            rank,
            alpha,
            beta,
            beta_const,
            gamma,
            intercept,
            residual_cov,
            t_effective: 0,
            column_names,
            det_case: DetCase::UnrestrictedConstant,
            fitted: DMatrix::zeros(0, n),
            residuals: DMatrix::zeros(0, n),
            regressors: DMatrix::zeros(0, 0),
        })
    }

    pub fn n_vars(&self) -> usize {
        self.column_names.len()
    }

    /// Lag order of the levels representation.
    pub fn p(&self) -> usize {
        self.gamma.len() + 1
    }

    pub fn levels_representation(&self) -> LevelsRepresentation {
        let n = self.n_vars();
        let p = self.p();
        let pi = &self.alpha * self.beta.transpose();
        let mut coefficients = Vec::with_capacity(p);
        for i in 0..p {
            let a = if i == 0 {
                let mut a = DMatrix::identity(n, n) + &pi;
                if let Some(g1) = self.gamma.first() {
                    a += g1;
                }
                a
            } else if i == p - 1 {
                -&self.gamma[i - 1]
            } else {
                &self.gamma[i] - &self.gamma[i - 1]
            };
            coefficients.push(a);
        }
        let intercept =
            &self.intercept + &self.alpha * DVector::from_column_slice(&self.beta_const);
        LevelsRepresentation {
            intercept,
            coefficients,
        }
    }

    /// Error-correction equations, one per relation, all terms on one side.
    pub fn ecm_equations(&self) -> Vec<String> {
        (0..self.rank)
            .map(|j| {
                let coefs: Vec<f64> = self.beta.column(j).iter().copied().collect();
                // lead with the variable carrying the unit coefficient
                let lead = coefs.iter().position(|&c| c == 1.0).unwrap_or(0);
                let mut names = vec![self.column_names[lead].clone()];
                let mut ordered = vec![coefs[lead]];
                for (i, c) in coefs.iter().enumerate() {
                    if i != lead {
                        names.push(self.column_names[i].clone());
                        ordered.push(*c);
                    }
                }
                format_ecm_equation(
                    &format!("ECM_{{{},t-1}}", j + 1),
                    &names,
                    &ordered,
                    self.beta_const[j],
                )
            })
            .collect()
    }
}

pub fn fit_vecm(
    frame: &SeriesFrame,
    p: usize,
    rank: usize,
    det_case: DetCase,
) -> Result<VecmModel> {
    let n = frame.n_columns();
    if rank > n {
        return Err(Error::InvalidParams(format!(
            "rank {rank} exceeds system size {n}"
        )));
    }
    let y = frame.to_matrix();
    let rr = reduced_rank(&y, p, det_case)?;
    let t_eff = rr.t_effective;
    let levels = rr.z1.columns(0, n).clone_owned();

    let mut vectors = rr.vectors.columns(0, rank).clone_owned();
    if rank > 0 {
        // Identify beta by an identity leading block when it is invertible.
        if let Some(inv) = vectors
            .view((0, 0), (rank, rank))
            .clone_owned()
            .try_inverse()
        {
            vectors = &vectors * inv;
            for i in 0..rank {
                for j in 0..rank {
                    vectors[(i, j)] = if i == j { 1.0 } else { 0.0 };
                }
            }
        }
    }
    let beta = vectors.rows(0, n).clone_owned();
    let ecm = &rr.z1 * &vectors;
    let mut beta_const = match det_case {
        DetCase::RestrictedConstant => vectors.row(n).iter().copied().collect(),
        _ => vec![0.0; rank],
    };

    let x = hstack(&[&ecm, &rr.z2]);
    let fit = ols(&rr.dy, &x)?;
    let b = &fit.coefficients;
    let alpha = b.rows(0, rank).transpose();
    let gamma = (0..p - 1)
        .map(|i| b.rows(rank + i * n, n).transpose())
        .collect();
    let mut intercept = if det_case == DetCase::UnrestrictedConstant {
        b.row(rank + n * (p - 1)).transpose()
    } else {
        DVector::zeros(n)
    };
    if det_case == DetCase::UnrestrictedConstant && rank > 0 {
        // Move the part of mu lying in the span of alpha into the relations so
        // each ECM term is mean-zero in sample.
        beta_const = mean_centering_consts(&beta, &levels);
        intercept -= &alpha * DVector::from_column_slice(&beta_const);
    }
    let residual_cov = fit.residuals.transpose() * &fit.residuals / t_eff as f64;
    let fitted = &levels + (&rr.dy - &fit.residuals);
    Ok(VecmModel {
        rank,
        alpha,
        beta,
        beta_const,
        gamma,
        intercept,
        residual_cov,
        t_effective: t_eff,
        column_names: frame.names().iter().map(|s| s.to_string()).collect(),
        det_case,
        fitted,
        residuals: fit.residuals,
        regressors: x,
    })
}

/// `beta_j' x + beta_const_j` for each relation.
pub fn ecm_term(model: &VecmModel, levels: &[f64]) -> Result<Vec<f64>> {
    if levels.len() != model.n_vars() {
        return Err(Error::DimensionMismatch {
            expected: model.n_vars(),
            actual: levels.len(),
        });
    }
    let x = DVector::from_column_slice(levels);
    Ok((0..model.rank)
        .map(|j| model.beta.column(j).dot(&x) + model.beta_const[j])
        .collect())
}

/// Companion matrix of a levels VAR.
pub fn companion_matrix(coefficients: &[DMatrix<f64>]) -> DMatrix<f64> {
    let p = coefficients.len();
    let n = coefficients[0].nrows();
    let mut c = DMatrix::zeros(n * p, n * p);
    for (i, a) in coefficients.iter().enumerate() {
        c.view_mut((0, i * n), (n, n)).copy_from(a);
    }
    for i in 1..p {
        c.view_mut((i * n, (i - 1) * n), (n, n))
            .copy_from(&DMatrix::identity(n, n));
    }
    c
}

/// Companion eigenvalues sorted by modulus, largest first.
pub fn companion_eigenvalues(model: &VecmModel) -> Result<Vec<Complex<f64>>> {
    let c = companion_matrix(&model.levels_representation().coefficients);
    // Francis iterations occasionally stall at machine epsilon; loosen the
    // deflation threshold before giving up.
    let schur = [f64::EPSILON, 1e-14, 1e-12, 1e-10]
        .iter()
        .find_map(|&eps| nalgebra::Schur::try_new(c.clone(), eps, 10_000))
        .ok_or(Error::EigenFailure)?;
    let mut eig: Vec<Complex<f64>> = schur.complex_eigenvalues().iter().copied().collect();
    if eig.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::EigenFailure);
    }
    eig.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    Ok(eig)
}

/// Distance from 1 within which a companion root counts as a unit root.
pub const UNIT_ROOT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub stable: bool,
    pub unit_root_count: usize,
    pub expected_unit_roots: usize,
    /// Moduli that are neither unit roots nor inside `1 - tol`, plus any
    /// unit roots in excess of `n - rank`.
    pub offending_moduli: Vec<f64>,
    pub moduli: Vec<f64>,
}

pub fn stability_check(model: &VecmModel) -> Result<StabilityReport> {
    let moduli: Vec<f64> = companion_eigenvalues(model)?
        .iter()
        .map(|z| z.norm())
        .collect();
    let expected = model.n_vars() - model.rank;
    let unit: Vec<f64> = moduli
        .iter()
        .copied()
        .filter(|m| (m - 1.0).abs() <= UNIT_ROOT_TOL)
        .collect();
    let mut offending: Vec<f64> = moduli
        .iter()
        .copied()
        .filter(|m| (m - 1.0).abs() > UNIT_ROOT_TOL && *m >= 1.0 - UNIT_ROOT_TOL)
        .collect();
    if unit.len() > expected {
        offending.extend(&unit[expected..]);
    }
    Ok(StabilityReport {
        stable: unit.len() == expected && offending.is_empty(),
        unit_root_count: unit.len(),
        expected_unit_roots: expected,
        offending_moduli: offending,
        moduli,
    })
}
