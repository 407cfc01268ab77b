//! Augmented Dickey-Fuller unit-root test.
//!
//! The test regression is
//!
//! ```text
//! dy_t = [c] + [b*t] + rho*y_{t-1} + sum_{i=1..L} g_i*dy_{t-i} + e_t
//! ```
//!
//! and the statistic is the t-ratio of `rho`. P-values come from MacKinnon's
//! response surfaces for a single series (MacKinnon 1994, "Approximate
//! asymptotic distribution functions for unit-root and cointegration tests",
//! JBES 12(2); the same coefficient sets used by statsmodels' `mackinnonp`).

use std::fmt;

use nalgebra::DMatrix;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::linalg::ols;
use crate::series::{difference, TimeSeries};

/// Deterministic terms in the test regression. A trend requires a constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetSpec {
    constant: bool,
    trend: bool,
}

impl DetSpec {
    pub const NONE: DetSpec = DetSpec {
        constant: false,
        trend: false,
    };
    pub const CONSTANT: DetSpec = DetSpec {
        constant: true,
        trend: false,
    };
    pub const CONSTANT_TREND: DetSpec = DetSpec {
        constant: true,
        trend: true,
    };

    pub fn new(constant: bool, trend: bool) -> Result<Self> {
        if trend && !constant {
            return Err(Error::InvalidParams(
                "a trend term requires a constant".into(),
            ));
        }
        Ok(Self { constant, trend })
    }

    pub fn constant(&self) -> bool {
        self.constant
    }

    pub fn trend(&self) -> bool {
        self.trend
    }

    fn n_terms(&self) -> usize {
        self.constant as usize + self.trend as usize
    }
}

impl std::str::FromStr for DetSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "n" | "nc" | "none" => Ok(DetSpec::NONE),
            "c" | "constant" => Ok(DetSpec::CONSTANT),
            "ct" | "trend" | "constant_trend" => Ok(DetSpec::CONSTANT_TREND),
            other => Err(Error::Config(format!(
                "unknown deterministic spec `{other}`"
            ))),
        }
    }
}

/// Augmentation lag policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LagChoice {
    Fixed(usize),
    /// Minimize the Schwarz criterion over `0..=max_lag` on a common sample.
    Auto {
        max_lag: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdfResult {
    pub statistic: f64,
    pub p_value: f64,
    pub lags: usize,
    pub spec: DetSpec,
    pub n_obs: usize,
    pub stationary_at_5pct: bool,
}

impl AdfResult {
    /// `(C,T,L)` test-form label, e.g. `(C,0,5)` or `(0,0,4)`.
    pub fn test_form(&self) -> String {
        format!(
            "({},{},{})",
            if self.spec.constant { "C" } else { "0" },
            if self.spec.trend { "T" } else { "0" },
            self.lags
        )
    }
}

impl fmt::Display for AdfResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} t={:.4} p={:.4} {}",
            self.test_form(),
            self.statistic,
            self.p_value,
            if self.stationary_at_5pct {
                "stationary"
            } else {
                "non-stationary"
            }
        )
    }
}

struct AdfFit {
    statistic: f64,
    ssr: f64,
    n_obs: usize,
    n_regressors: usize,
}

/// Fit the ADF regression with `lags` augmentation terms using equations
/// for `dy_t`, `t = first..y.len()-1`.
fn fit_adf(y: &[f64], spec: DetSpec, lags: usize, first: usize) -> Result<AdfFit> {
    let n_obs = y.len() - first;
    let k = spec.n_terms() + 1 + lags;
    if n_obs < 10 + k {
        return Err(Error::SeriesTooShort {
            required: first + 10 + k,
            actual: y.len(),
        });
    }
    let rho_col = spec.n_terms();
    let x = DMatrix::from_fn(n_obs, k, |row, col| {
        let t = first + row;
        match col {
            c if c < spec.n_terms() => {
                if c == 0 {
                    1.0
                } else {
                    t as f64
                }
            }
            c if c == rho_col => y[t - 1],
            c => {
                let i = c - rho_col;
                y[t - i] - y[t - i - 1]
            }
        }
    });
    let dy = DMatrix::from_fn(n_obs, 1, |row, _| y[first + row] - y[first + row - 1]);
    let fit = ols(&dy, &x)?;
    let ssr = fit.ssr()[0];
    let tss = dy.norm_squared();
    if ssr <= 1e-24 * tss {
        return Err(Error::ZeroVariance);
    }
    let s2 = ssr / (n_obs - k) as f64;
    let se = (s2 * fit.xtx_inv[(rho_col, rho_col)]).sqrt();
    Ok(AdfFit {
        statistic: fit.coefficients[(rho_col, 0)] / se,
        ssr,
        n_obs,
        n_regressors: k,
    })
}

pub fn adf_test(series: &TimeSeries, spec: DetSpec, lags: LagChoice) -> Result<AdfResult> {
    let y = series.values();
    let (lo, hi) = y
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    if hi - lo == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let chosen = match lags {
        LagChoice::Fixed(l) => l,
        LagChoice::Auto { max_lag } => select_lag(y, spec, max_lag)?,
    };
    if y.len() < chosen + 2 {
        return Err(Error::SeriesTooShort {
            required: chosen + 2,
            actual: y.len(),
        });
    }
    let fit = fit_adf(y, spec, chosen, chosen + 1)?;
    let p_value = mackinnon_p(fit.statistic, spec);
    Ok(AdfResult {
        statistic: fit.statistic,
        p_value,
        lags: chosen,
        spec,
        n_obs: fit.n_obs,
        stationary_at_5pct: p_value < 0.05,
    })
}

/// Schwarz-criterion lag choice, all candidates fitted on the sample trimmed
/// for `max_lag`. Ties go to the smaller lag.
fn select_lag(y: &[f64], spec: DetSpec, max_lag: usize) -> Result<usize> {
    if y.len() < max_lag + 2 {
        return Err(Error::SeriesTooShort {
            required: max_lag + 2,
            actual: y.len(),
        });
    }
    let mut best = (f64::INFINITY, 0);
    for lag in 0..=max_lag {
        let fit = fit_adf(y, spec, lag, max_lag + 1)?;
        let t = fit.n_obs as f64;
        let sc = (fit.ssr / t).ln() + fit.n_regressors as f64 * t.ln() / t;
        if sc < best.0 {
            best = (sc, lag);
        }
    }
    Ok(best.1)
}

/// Smallest `d <= max_order` whose `d`-th difference rejects a unit root at 5%.
pub fn integration_order(
    series: &TimeSeries,
    spec: DetSpec,
    lags: LagChoice,
    max_order: usize,
) -> Result<usize> {
    for d in 0..=max_order {
        let s = if d == 0 {
            series.clone()
        } else {
            difference(series, d)?
        };
        if adf_test(&s, spec, lags)?.stationary_at_5pct {
            return Ok(d);
        }
    }
    Err(Error::OrderUndetermined { max_order })
}

// Response-surface coefficients for one series (N = 1). Index 0: no
// deterministic terms, 1: constant, 2: constant and trend.
const TAU_MAX: [f64; 3] = [f64::INFINITY, 2.74, 0.7];
const TAU_MIN: [f64; 3] = [-19.04, -18.83, -16.18];
const TAU_STAR: [f64; 3] = [-1.04, -1.61, -2.89];
const TAU_SMALLP: [[f64; 3]; 3] = [
    [0.6344, 1.2378, 3.2496e-2],
    [2.1659, 1.4412, 3.8269e-2],
    [3.2512, 1.6047, 4.9588e-2],
];
const TAU_LARGEP: [[f64; 4]; 3] = [
    [0.4797, 9.3557e-1, -0.6999e-1, 3.3066e-2],
    [1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2],
    [2.5261, 6.1654e-1, -3.7956e-1, -6.0285e-2],
];

/// Asymptotic p-value of an ADF t-statistic.
pub fn mackinnon_p(stat: f64, spec: DetSpec) -> f64 {
    let case = spec.n_terms();
    if stat > TAU_MAX[case] {
        return 1.0;
    }
    if stat < TAU_MIN[case] {
        return 0.0;
    }
    let z = if stat <= TAU_STAR[case] {
        poly(&TAU_SMALLP[case], stat)
    } else {
        poly(&TAU_LARGEP[case], stat)
    };
    Normal::standard().cdf(z)
}

/// `c[0] + c[1] x + c[2] x^2 + ...`
fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}
