//! Closed-form money multipliers and their sensitivities to the cash leakage
//! rate `k`, the reserve ratio `r` and the time-to-demand deposit ratio `t`.
//!
//! With `D = r + r*t + k`:
//!
//! ```text
//! m1 = (1 + k) / D
//! m2 = (1 + k + t) / D
//! ```
//!
//! The reserve sensitivity of `m1` is `-(1 + k)(1 + t) / D^2`, which is what
//! differentiating `m1` gives; the printed variant `-(1 + t)(1 + r) / D^2`
//! found in some derivations does not match finite differences.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Cash leakage rate, total reserve ratio and time-to-demand deposit ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierParams {
    k: f64,
    r: f64,
    t: f64,
}

impl MultiplierParams {
    pub fn new(k: f64, r: f64, t: f64) -> Result<Self> {
        if !(k.is_finite() && r.is_finite() && t.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "non-finite parameters k={k}, r={r}, t={t}"
            )));
        }
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidParams(format!("r={r} outside (0, 1)")));
        }
        if k < 0.0 {
            return Err(Error::InvalidParams(format!("k={k} is negative")));
        }
        if t < 0.0 {
            return Err(Error::InvalidParams(format!("t={t} is negative")));
        }
        let p = Self { k, r, t };
        if p.denominator() <= 0.0 {
            return Err(Error::InvalidParams("r + r*t + k <= 0".into()));
        }
        Ok(p)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `D = r + r*t + k`.
    pub fn denominator(&self) -> f64 {
        self.r + self.r * self.t + self.k
    }

    /// Parameters shifted by a scenario; fails if the endpoint is invalid.
    pub fn perturbed(&self, s: &DeltaScenario) -> Result<Self> {
        Self::new(self.k + s.dk, self.r + s.dr, self.t + s.dt)
    }
}

/// Narrow and broad multiplier levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Multipliers {
    pub m1: f64,
    pub m2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierGradient {
    pub dm1_dk: f64,
    pub dm1_dr: f64,
    pub dm1_dt: f64,
    pub dm2_dk: f64,
    pub dm2_dr: f64,
    pub dm2_dt: f64,
}

/// A joint perturbation of (k, r, t).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DeltaScenario {
    pub dk: f64,
    pub dr: f64,
    pub dt: f64,
}

impl DeltaScenario {
    pub fn new(dk: f64, dr: f64, dt: f64) -> Self {
        Self { dk, dr, dt }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.dk * factor, self.dr * factor, self.dt * factor)
    }
}

/// First-order (total differential) and exact multiplier changes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaEstimate {
    pub approx_dm1: f64,
    pub approx_dm2: f64,
    pub exact_dm1: f64,
    pub exact_dm2: f64,
}

pub fn multipliers(p: &MultiplierParams) -> Multipliers {
    let d = p.denominator();
    Multipliers {
        m1: (1.0 + p.k) / d,
        m2: (1.0 + p.k + p.t) / d,
    }
}

pub fn gradient(p: &MultiplierParams) -> MultiplierGradient {
    let MultiplierParams { k, r, t } = *p;
    let d2 = p.denominator().powi(2);
    MultiplierGradient {
        dm1_dk: (r * (1.0 + t) - 1.0) / d2,
        dm1_dr: -(1.0 + k) * (1.0 + t) / d2,
        dm1_dt: -r * (1.0 + k) / d2,
        dm2_dk: (r - 1.0) * (1.0 + t) / d2,
        dm2_dr: -(1.0 + k + t) * (1.0 + t) / d2,
        dm2_dt: k * (1.0 - r) / d2,
    }
}

pub fn delta_estimate(p: &MultiplierParams, s: &DeltaScenario) -> Result<DeltaEstimate> {
    let q = p.perturbed(s)?;
    let g = gradient(p);
    let (m_p, m_q) = (multipliers(p), multipliers(&q));
    Ok(DeltaEstimate {
        approx_dm1: g.dm1_dk * s.dk + g.dm1_dr * s.dr + g.dm1_dt * s.dt,
        approx_dm2: g.dm2_dk * s.dk + g.dm2_dr * s.dr + g.dm2_dt * s.dt,
        exact_dm1: m_q.m1 - m_p.m1,
        exact_dm2: m_q.m2 - m_p.m2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn as_str(&self) -> &'static str {
        match self {
            Sign::Negative => "negative",
            Sign::Zero => "zero",
            Sign::Positive => "positive",
        }
    }
}

/// Cells within this distance of the `r(1+t) = 1` boundary count as zero.
pub const SIGN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignCell {
    pub r: f64,
    pub t: f64,
    pub sign: Sign,
}

/// Sign of `dm1/dk` over an (r, t) grid. It does not depend on `k`: the sign
/// is that of `r(1+t) - 1`.
pub fn sign_region(r_grid: &[f64], t_grid: &[f64]) -> Result<Vec<SignCell>> {
    let mut cells = Vec::with_capacity(r_grid.len() * t_grid.len());
    for &r in r_grid {
        for &t in t_grid {
            MultiplierParams::new(0.0, r, t)?;
            let x = r * (1.0 + t) - 1.0;
            let sign = if x.abs() <= SIGN_TOLERANCE {
                Sign::Zero
            } else if x > 0.0 {
                Sign::Positive
            } else {
                Sign::Negative
            };
            cells.push(SignCell { r, t, sign });
        }
    }
    Ok(cells)
}

/// The `t` at which `dm1/dk` changes sign for a given `r`.
pub fn sign_boundary_t(r: f64) -> f64 {
    1.0 / r - 1.0
}

/// `r,t,sign` rows with a header.
pub fn sign_region_csv(cells: &[SignCell]) -> String {
    let mut out = String::from("r,t,sign\n");
    for c in cells {
        let _ = writeln!(out, "{},{},{}", c.r, c.t, c.sign.as_str());
    }
    out
}
