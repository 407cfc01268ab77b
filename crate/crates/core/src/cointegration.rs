//! Johansen reduced-rank cointegration test.
//!
//! Lagged differences (and, depending on [`DetCase`], a constant) are
//! concentrated out of `dy_t` and of the lagged level term, leaving residuals
//! `R0` and `R1`. With moment matrices `S_ij = R_i'R_j / T` the eigenvalues
//! solve `|λ S11 - S10 S00^-1 S01| = 0`. The problem is reduced to a symmetric
//! one through the Cholesky factor of `S11`, which keeps the eigenvalues real.

use std::fmt::Write as _;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::{diff_rows, ols};
use crate::series::SeriesFrame;

/// Deterministic terms in the error-correction system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DetCase {
    /// No deterministic terms.
    None,
    /// Constant restricted to the cointegrating space.
    RestrictedConstant,
    /// Unrestricted constant (linear trends in levels allowed).
    UnrestrictedConstant,
}

impl DetCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            DetCase::None => "none",
            DetCase::RestrictedConstant => "restricted_constant",
            DetCase::UnrestrictedConstant => "unrestricted_constant",
        }
    }
}

impl FromStr for DetCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "none" => Ok(DetCase::None),
            "restricted_constant" => Ok(DetCase::RestrictedConstant),
            "unrestricted_constant" => Ok(DetCase::UnrestrictedConstant),
            other => Err(Error::Config(format!(
                "unknown det_case `{other}` (none | restricted_constant | unrestricted_constant)"
            ))),
        }
    }
}

/// 5% trace critical values indexed by `n - r - 1`, for `n - r = 1..=10`.
///
/// - `None`: MacKinnon, Haug & Michelis (1999), as tabulated in statsmodels.
/// - `RestrictedConstant`: Osterwald-Lenum (1992), Table 1*.
/// - `UnrestrictedConstant`: MacKinnon, Haug & Michelis (1999); the first
///   five entries are the values printed by common econometrics software.
pub const TRACE_CRIT_5PCT_NONE: [f64; 10] = [
    4.1296, 12.3212, 24.2761, 40.1749, 60.0627, 83.9383, 111.7797, 143.6691, 179.5199, 219.4051,
];
pub const TRACE_CRIT_5PCT_RESTRICTED: [f64; 10] = [
    9.24, 19.96, 34.91, 53.12, 76.07, 102.14, 131.70, 165.58, 202.92, 244.15,
];
pub const TRACE_CRIT_5PCT_UNRESTRICTED: [f64; 10] = [
    3.8415, 15.4947, 29.7971, 47.8561, 69.8189, 95.7542, 125.6185, 159.5290, 197.3772, 239.2468,
];

/// Largest system the embedded critical values cover.
pub const MAX_SYSTEM_SIZE: usize = 10;

pub fn trace_critical_value_5pct(case: DetCase, n_minus_r: usize) -> Option<f64> {
    let table = match case {
        DetCase::None => &TRACE_CRIT_5PCT_NONE,
        DetCase::RestrictedConstant => &TRACE_CRIT_5PCT_RESTRICTED,
        DetCase::UnrestrictedConstant => &TRACE_CRIT_5PCT_UNRESTRICTED,
    };
    n_minus_r.checked_sub(1).and_then(|i| table.get(i).copied())
}

#[derive(Debug, Clone)]
pub struct JohansenResult {
    /// Descending, in [0, 1).
    pub eigenvalues: Vec<f64>,
    /// Indexed by the hypothesized rank `r = 0..n-1`.
    pub trace_stats: Vec<f64>,
    pub max_eig_stats: Vec<f64>,
    pub crit_5pct: Vec<f64>,
    pub selected_rank: usize,
    /// All `n` cointegrating vectors (columns, sorted by eigenvalue), each
    /// scaled so its first entry is 1 where that entry is nonzero.
    pub eigenvectors: DMatrix<f64>,
    /// Constant inside each relation of `eigenvectors`.
    pub eigenvector_consts: Vec<f64>,
    /// `n × selected_rank`
    pub beta: DMatrix<f64>,
    pub beta_const: Vec<f64>,
    /// `n × selected_rank`
    pub alpha: DMatrix<f64>,
    pub t_effective: usize,
    pub det_case: DetCase,
    pub p: usize,
    pub column_names: Vec<String>,
}

/// Shared reduced-rank machinery for the test and for VECM estimation.
#[derive(Debug, Clone)]
pub(crate) struct ReducedRank {
    /// Sorted descending; length n.
    pub eigenvalues: Vec<f64>,
    /// `n1 × n` (n1 = n + 1 with a restricted constant), `v' S11 v = I`.
    pub vectors: DMatrix<f64>,
    pub s01: DMatrix<f64>,
    pub s11: DMatrix<f64>,
    pub t_effective: usize,
    /// Levels regressor `z1_{t-1}` (with the constant column when restricted),
    /// `T_eff × n1`.
    pub z1: DMatrix<f64>,
    /// `dy_t`, `T_eff × n`.
    pub dy: DMatrix<f64>,
    /// Short-run regressors: lagged differences then the unrestricted constant.
    pub z2: DMatrix<f64>,
}

/// Eigenvalues below zero by less than this are roundoff on a zero root.
const EIG_ROUNDOFF: f64 = 1e-10;

pub(crate) fn reduced_rank(y: &DMatrix<f64>, p: usize, case: DetCase) -> Result<ReducedRank> {
    let (t_total, n) = y.shape();
    if p == 0 {
        return Err(Error::InvalidParams(
            "Johansen lag order p must be >= 1".into(),
        ));
    }
    if n == 0 {
        return Err(Error::InvalidParams("empty system".into()));
    }
    let n_z2 = n * (p - 1) + (case == DetCase::UnrestrictedConstant) as usize;
    let n1 = n + (case == DetCase::RestrictedConstant) as usize;
    let required = p + n_z2 + n1 + 5;
    if t_total < required {
        return Err(Error::SeriesTooShort {
            required,
            actual: t_total,
        });
    }
    let d = diff_rows(y);
    // Equations for t = p..T-1; d row (t-1) holds dy_t.
    let t_eff = t_total - p;
    let dy = d.rows(p - 1, t_eff).clone_owned();
    let z1 = DMatrix::from_fn(t_eff, n1, |row, col| {
        if col == n {
            1.0
        } else {
            y[(p + row - 1, col)]
        }
    });
    let z2 = DMatrix::from_fn(t_eff, n_z2, |row, col| {
        if col == n * (p - 1) {
            return 1.0;
        }
        let lag = col / n + 1;
        d[(p + row - 1 - lag, col % n)]
    });
    let (r0, r1) = if n_z2 == 0 {
        (dy.clone(), z1.clone())
    } else {
        (ols(&dy, &z2)?.residuals, ols(&z1, &z2)?.residuals)
    };
    let tf = t_eff as f64;
    let s00 = r0.transpose() * &r0 / tf;
    let s01 = r0.transpose() * &r1 / tf;
    let s11 = r1.transpose() * &r1 / tf;

    let s00_chol = nalgebra::Cholesky::new(s00.clone())
        .ok_or_else(|| Error::SingularMomentMatrix("S00 is not positive definite".into()))?;
    let s11_chol = nalgebra::Cholesky::new(s11.clone())
        .ok_or_else(|| Error::SingularMomentMatrix("S11 is not positive definite".into()))?;
    let l = s11_chol.l();
    let s00_inv_s01 = s00_chol.solve(&s01);
    let m = s01.transpose() * s00_inv_s01;
    // C = L^-1 M L^-T
    let tmp = l
        .solve_lower_triangular(&m)
        .ok_or_else(|| Error::SingularMomentMatrix("S11 factor".into()))?;
    let c = l
        .solve_lower_triangular(&tmp.transpose())
        .ok_or_else(|| Error::SingularMomentMatrix("S11 factor".into()))?;
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(c, f64::EPSILON, 0).ok_or(Error::EigenFailure)?;

    let mut order: Vec<usize> = (0..n1).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    order.truncate(n);

    let mut eigenvalues = Vec::with_capacity(n);
    for &i in &order {
        let mut v = eig.eigenvalues[i];
        if !(-EIG_ROUNDOFF..1.0).contains(&v) {
            return Err(Error::EigenvalueOutOfRange { value: v });
        }
        if v < 0.0 {
            v = 0.0;
        }
        eigenvalues.push(v);
    }
    let mut w = DMatrix::zeros(n1, n);
    for (j, &i) in order.iter().enumerate() {
        w.set_column(j, &eig.eigenvectors.column(i));
    }
    let vectors = l
        .transpose()
        .solve_upper_triangular(&w)
        .ok_or_else(|| Error::SingularMomentMatrix("S11 factor".into()))?;
    Ok(ReducedRank {
        eigenvalues,
        vectors,
        s01,
        s11,
        t_effective: t_eff,
        z1,
        dy,
        z2,
    })
}

/// `trace(r) = -T * sum_{i > r} ln(1 - λ_i)` for `r = 0..n-1`.
pub fn trace_from_eigenvalues(eigenvalues: &[f64], t: usize) -> Result<Vec<f64>> {
    let contrib = max_eig_from_eigenvalues(eigenvalues, t)?;
    let mut out = vec![0.0; contrib.len()];
    let mut acc = 0.0;
    for i in (0..contrib.len()).rev() {
        acc += contrib[i];
        out[i] = acc;
    }
    Ok(out)
}

/// `maxeig(r) = -T * ln(1 - λ_{r+1})`.
pub fn max_eig_from_eigenvalues(eigenvalues: &[f64], t: usize) -> Result<Vec<f64>> {
    eigenvalues
        .iter()
        .map(|&l| {
            if !(0.0..1.0).contains(&l) {
                Err(Error::EigenvalueOutOfRange { value: l })
            } else {
                Ok(-(t as f64) * (1.0 - l).ln())
            }
        })
        .collect()
}

/// Scale each column so its first entry is 1 (columns whose first entry is
/// numerically zero are left as they are).
fn normalize_first_row(v: &mut DMatrix<f64>) {
    for mut col in v.column_iter_mut() {
        let pivot = col[0];
        let scale = col.amax();
        if pivot.abs() > 1e-12 * scale {
            col /= pivot;
        }
    }
}

/// Constant making each relation zero-mean over the sample (used when the
/// constant is unrestricted and so not identified inside the relation).
pub(crate) fn mean_centering_consts(beta: &DMatrix<f64>, levels: &DMatrix<f64>) -> Vec<f64> {
    let ecm = levels * beta;
    ecm.column_iter()
        .map(|c| -c.sum() / c.len() as f64)
        .collect()
}

/// Split `n1 × r` vectors into the `n × r` level part and per-relation
/// constants, given the deterministic case.
pub(crate) fn split_consts(
    rr: &ReducedRank,
    vectors: &DMatrix<f64>,
    case: DetCase,
    n: usize,
) -> (DMatrix<f64>, Vec<f64>) {
    let beta = vectors.rows(0, n).clone_owned();
    let consts = match case {
        DetCase::RestrictedConstant => vectors.row(n).iter().copied().collect(),
        DetCase::UnrestrictedConstant => {
            mean_centering_consts(&beta, &rr.z1.columns(0, n).clone_owned())
        }
        DetCase::None => vec![0.0; vectors.ncols()],
    };
    (beta, consts)
}

pub fn johansen_test(frame: &SeriesFrame, p: usize, det_case: DetCase) -> Result<JohansenResult> {
    let n = frame.n_columns();
    if n < 2 {
        return Err(Error::InvalidParams(
            "Johansen test needs at least two series".into(),
        ));
    }
    if n > MAX_SYSTEM_SIZE {
        return Err(Error::InvalidParams(format!(
            "at most {MAX_SYSTEM_SIZE} series supported by the critical-value tables"
        )));
    }
    let rr = reduced_rank(&frame.to_matrix(), p, det_case)?;
    let t = rr.t_effective;
    let trace_stats = trace_from_eigenvalues(&rr.eigenvalues, t)?;
    let max_eig_stats = max_eig_from_eigenvalues(&rr.eigenvalues, t)?;
    let crit_5pct: Vec<f64> = (0..n)
        .map(|r| trace_critical_value_5pct(det_case, n - r).expect("n <= MAX_SYSTEM_SIZE"))
        .collect();
    let selected_rank = (0..n).find(|&r| trace_stats[r] < crit_5pct[r]).unwrap_or(n);

    let mut vectors = rr.vectors.clone();
    normalize_first_row(&mut vectors);
    let (eigenvectors, eigenvector_consts) = split_consts(&rr, &vectors, det_case, n);

    let sel = vectors.columns(0, selected_rank).clone_owned();
    let gram = sel.transpose() * &rr.s11 * &sel;
    let alpha = if selected_rank == 0 {
        DMatrix::zeros(n, 0)
    } else {
        let gram_inv = gram
            .try_inverse()
            .ok_or_else(|| Error::SingularMomentMatrix("beta' S11 beta".into()))?;
        &rr.s01 * &sel * gram_inv
    };
    Ok(JohansenResult {
        eigenvalues: rr.eigenvalues.clone(),
        trace_stats,
        max_eig_stats,
        crit_5pct,
        selected_rank,
        beta: eigenvectors.columns(0, selected_rank).clone_owned(),
        beta_const: eigenvector_consts[..selected_rank].to_vec(),
        eigenvectors,
        eigenvector_consts,
        alpha,
        t_effective: t,
        det_case,
        p,
        column_names: frame.names().iter().map(|s| s.to_string()).collect(),
    })
}

/// A cointegrating relation written with all terms on one side and a unit
/// coefficient on `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct LongRunRelation {
    pub target: String,
    /// `(name, coefficient)` in the original column order; target has 1.
    pub coefficients: Vec<(String, f64)>,
    pub constant: f64,
}

impl LongRunRelation {
    /// ECM layout: `label = target_{t-1} + c1 x1_{t-1} + ... + const`.
    pub fn ecm_equation(&self, label: &str) -> String {
        let t = self.target_index();
        let mut names = vec![self.target.clone()];
        let mut coefs = vec![1.0];
        for (i, (n, c)) in self.coefficients.iter().enumerate() {
            if i != t {
                names.push(n.clone());
                coefs.push(*c);
            }
        }
        format_ecm_equation(label, &names, &coefs, self.constant)
    }

    /// Solved form: `target = -c1 x1 - ... - const`.
    pub fn solved_form(&self) -> String {
        let mut out = format!("{} =", self.target);
        let mut first = true;
        for (n, c) in &self.coefficients {
            if *n == self.target || *c == 0.0 {
                continue;
            }
            push_term(&mut out, -c, Some(n), "", first);
            first = false;
        }
        if self.constant != 0.0 {
            push_term(&mut out, -self.constant, None, "", first);
        }
        out
    }

    fn target_index(&self) -> usize {
        self.coefficients
            .iter()
            .position(|(n, _)| *n == self.target)
            .expect("target present")
    }
}

fn push_term(out: &mut String, c: f64, name: Option<&str>, suffix: &str, first: bool) {
    match (first, c < 0.0) {
        (true, true) => {
            let _ = write!(out, " -{:.4}", c.abs());
        }
        (true, false) => {
            let _ = write!(out, " {:.4}", c);
        }
        (false, neg) => {
            let _ = write!(out, " {} {:.4}", if neg { '-' } else { '+' }, c.abs());
        }
    }
    if let Some(n) = name {
        let _ = write!(out, " {n}{suffix}");
    }
}

/// `label = names[0]_{t-1} + c1 names[1]_{t-1} ... ± const`, the first
/// coefficient being 1 and printed implicitly.
pub fn format_ecm_equation(label: &str, names: &[String], coefs: &[f64], constant: f64) -> String {
    let mut out = format!("{label} =");
    let mut first = true;
    for (n, &c) in names.iter().zip(coefs) {
        if c == 0.0 {
            continue;
        }
        if first && c == 1.0 {
            let _ = write!(out, " {n}_{{t-1}}");
        } else if c == 1.0 {
            let _ = write!(out, " + {n}_{{t-1}}");
        } else {
            push_term(&mut out, c, Some(n), "_{t-1}", first);
        }
        first = false;
    }
    if constant != 0.0 || first {
        push_term(&mut out, constant, None, "", first);
    }
    out
}

/// First cointegrating vector renormalized on `target`.
pub fn long_run_relation(result: &JohansenResult, target: &str) -> Result<LongRunRelation> {
    if result.selected_rank == 0 || result.beta.ncols() == 0 {
        return Err(Error::RankZero);
    }
    let idx = result
        .column_names
        .iter()
        .position(|n| n == target)
        .ok_or_else(|| Error::SchemaMismatch(format!("column `{target}` not in system")))?;
    let col = result.beta.column(0);
    let pivot = col[idx];
    if pivot.abs() <= 1e-12 * col.amax().max(1.0) {
        return Err(Error::ZeroPivot);
    }
    Ok(LongRunRelation {
        target: target.to_string(),
        coefficients: result
            .column_names
            .iter()
            .zip(col.iter())
            .map(|(n, c)| (n.clone(), if n == target { 1.0 } else { c / pivot }))
            .collect(),
        constant: result.beta_const[0] / pivot,
    })
}
