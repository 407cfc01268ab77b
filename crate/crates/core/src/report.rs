//! Aligned-text and CSV renderings of estimation results.

use crate::cointegration::JohansenResult;
use crate::dynamics::{Fevd, IrfResult};
use crate::multiplier::{DeltaEstimate, MultiplierGradient, Multipliers};
use crate::regression::StaticRegression;
use crate::series::SeriesFrame;
use crate::unit_root::AdfResult;
use crate::var::LagSelectionTable;
use crate::vecm::{StabilityReport, VecmModel};

/// Text and CSV forms of one table.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub text: String,
    pub csv: String,
}

/// First column left-aligned, the rest right-aligned.
pub fn text_table(title: &str, header: &[&str], rows: &[Vec<String>]) -> String {
    let ncol = header.len();
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, cell) in width.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| -> String {
        let mut s = String::new();
        for (i, c) in cells.iter().enumerate().take(ncol) {
            if i == 0 {
                s.push_str(&format!("{c:<w$}", w = width[0]));
            } else {
                s.push_str(&format!("  {c:>w$}", w = width[i]));
            }
        }
        s.trim_end().to_string()
    };
    let total: usize = width.iter().sum::<usize>() + 2 * (ncol.saturating_sub(1));
    let mut out = String::new();
    if !title.is_empty() {
        out.push_str(title);
        out.push('\n');
    }
    out.push_str(&line(
        &header.iter().map(|h| h.to_string()).collect::<Vec<_>>(),
    ));
    out.push('\n');
    out.push_str(&"-".repeat(total));
    out.push('\n');
    for r in rows {
        out.push_str(&line(r));
        out.push('\n');
    }
    out
}

pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn f4(x: f64) -> String {
    format!("{x:.4}")
}

fn full(x: f64) -> String {
    format!("{x}")
}

/// Per-column quarterly factors with a note on the method used.
pub fn seasonal_factors(factors: &[(String, [f64; 4])]) -> Rendered {
    let header = ["Variable", "Q1", "Q2", "Q3", "Q4"];
    let rows = |fmt: fn(f64) -> String| -> Vec<Vec<String>> {
        factors
            .iter()
            .map(|(name, f)| {
                let mut r = vec![name.clone()];
                r.extend(f.iter().map(|x| fmt(*x)));
                r
            })
            .collect()
    };
    let mut text = String::from(
        "Method: multiplicative ratio to centered 2x4 moving average, factors\n\
         normalized to unit product over the year. This is a classical X-11\n\
         first pass, not the full Census X-12 procedure.\n\n",
    );
    text.push_str(&text_table(
        "Seasonal factors",
        &header,
        &rows(|x| format!("{x:.6}")),
    ));
    Rendered {
        text,
        csv: csv_table(&header, &rows(|x| format!("{x}"))),
    }
}

pub fn descriptive_stats(frame: &SeriesFrame) -> Rendered {
    let header = ["Variable", "Mean", "Maximum", "Minimum", "Std. Dev.", "Obs"];
    let stats: Vec<(String, [f64; 4], usize)> = frame
        .columns()
        .iter()
        .map(|c| {
            let v = c.values();
            let n = v.len() as f64;
            let mean = v.iter().sum::<f64>() / n;
            let var = if v.len() > 1 {
                v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = v.iter().copied().fold(f64::INFINITY, f64::min);
            (c.name().to_string(), [mean, max, min, var.sqrt()], v.len())
        })
        .collect();
    let rows = |fmt: fn(f64) -> String| -> Vec<Vec<String>> {
        stats
            .iter()
            .map(|(name, s, n)| {
                let mut r = vec![name.clone()];
                r.extend(s.iter().map(|x| fmt(*x)));
                r.push(n.to_string());
                r
            })
            .collect()
    };
    Rendered {
        text: text_table("Descriptive statistics", &header, &rows(f4)),
        csv: csv_table(
            &["variable", "mean", "max", "min", "std_dev", "obs"],
            &rows(full),
        ),
    }
}

/// `(variable, result)` pairs, levels and differences interleaved.
pub fn adf_table(results: &[(String, AdfResult)]) -> Rendered {
    let verdict = |r: &AdfResult| {
        if r.stationary_at_5pct {
            "stationary"
        } else {
            "non-stationary"
        }
    };
    let text_rows: Vec<Vec<String>> = results
        .iter()
        .map(|(name, r)| {
            vec![
                name.clone(),
                r.test_form(),
                f4(r.statistic),
                f4(r.p_value),
                verdict(r).to_string(),
            ]
        })
        .collect();
    let csv_rows: Vec<Vec<String>> = results
        .iter()
        .map(|(name, r)| {
            vec![
                name.clone(),
                r.test_form(),
                r.lags.to_string(),
                r.n_obs.to_string(),
                full(r.statistic),
                full(r.p_value),
                verdict(r).to_string(),
            ]
        })
        .collect();
    Rendered {
        text: text_table(
            "ADF unit-root tests",
            &[
                "Variable",
                "Test form (C,T,L)",
                "t-value",
                "P-value",
                "Result",
            ],
            &text_rows,
        ),
        csv: csv_table(
            &[
                "variable",
                "test_form",
                "lags",
                "n_obs",
                "statistic",
                "p_value",
                "result",
            ],
            &csv_rows,
        ),
    }
}

pub fn lag_table(t: &LagSelectionTable) -> Rendered {
    let s = t.selected;
    let star = |lag: usize, chosen: usize| if lag == chosen { "*" } else { "" };
    let text_rows = t
        .rows
        .iter()
        .map(|r| {
            vec![
                r.lag.to_string(),
                f4(r.logl),
                r.lr.map(|v| format!("{v:.4}{}", star(r.lag, s.lr)))
                    .unwrap_or_else(|| "NA".into()),
                format!("{:.4e}{}", r.fpe, star(r.lag, s.fpe)),
                format!("{:.4}{}", r.aic, star(r.lag, s.aic)),
                format!("{:.4}{}", r.sc, star(r.lag, s.sc)),
                format!("{:.4}{}", r.hq, star(r.lag, s.hq)),
            ]
        })
        .collect::<Vec<_>>();
    let csv_rows = t
        .rows
        .iter()
        .map(|r| {
            vec![
                r.lag.to_string(),
                full(r.logl),
                r.lr.map(full).unwrap_or_default(),
                full(r.fpe),
                full(r.aic),
                full(r.sc),
                full(r.hq),
            ]
        })
        .collect::<Vec<_>>();
    let mut text = text_table(
        &format!(
            "VAR lag order selection ({}; T = {})",
            t.column_names.join(", "),
            t.t_effective
        ),
        &["Lag", "LogL", "LR", "FPE", "AIC", "SC", "HQ"],
        &text_rows,
    );
    text.push_str("* lag order selected by the criterion\n");
    Rendered {
        text,
        csv: csv_table(&["lag", "logl", "lr", "fpe", "aic", "sc", "hq"], &csv_rows),
    }
}

fn hypothesis(r: usize) -> String {
    if r == 0 {
        "None".into()
    } else {
        format!("At most {r}")
    }
}

pub fn johansen_table(j: &JohansenResult) -> Rendered {
    let n = j.eigenvalues.len();
    let text_rows = (0..n)
        .map(|r| {
            let star = if j.trace_stats[r] > j.crit_5pct[r] {
                " *"
            } else {
                ""
            };
            vec![
                format!("{}{star}", hypothesis(r)),
                f4(j.eigenvalues[r]),
                f4(j.trace_stats[r]),
                f4(j.crit_5pct[r]),
                f4(j.max_eig_stats[r]),
            ]
        })
        .collect::<Vec<_>>();
    let csv_rows = (0..n)
        .map(|r| {
            vec![
                r.to_string(),
                full(j.eigenvalues[r]),
                full(j.trace_stats[r]),
                full(j.crit_5pct[r]),
                full(j.max_eig_stats[r]),
            ]
        })
        .collect::<Vec<_>>();
    let mut text = text_table(
        &format!(
            "Johansen cointegration test ({}; {}; lags in levels = {}; T = {})",
            j.column_names.join(", "),
            j.det_case.as_str(),
            j.p,
            j.t_effective
        ),
        &[
            "Hypothesized No. of CE(s)",
            "Eigenvalue",
            "Trace Statistic",
            "0.05 Critical Value",
            "Max-Eigen Statistic",
        ],
        &text_rows,
    );
    text.push_str(&format!(
        "* rejection at the 0.05 level; trace test indicates {} cointegrating equation(s)\n",
        j.selected_rank
    ));
    Rendered {
        text,
        csv: csv_table(
            &["rank", "eigenvalue", "trace", "crit_5pct", "max_eig"],
            &csv_rows,
        ),
    }
}

/// Error-correction equations and the long-run form of the first relation.
pub fn ecm_text(model: &VecmModel) -> String {
    if model.rank == 0 {
        return "rank 0: no cointegrating relations; model estimated in differences\n".into();
    }
    let mut out = String::new();
    for eq in model.ecm_equations() {
        out.push_str(&eq);
        out.push('\n');
    }
    let names = &model.column_names;
    let pivot = model.beta[(0, 0)];
    if pivot.abs() > 1e-12 {
        let relation = crate::cointegration::LongRunRelation {
            target: names[0].clone(),
            coefficients: names
                .iter()
                .enumerate()
                .map(|(i, n)| (n.clone(), model.beta[(i, 0)] / pivot))
                .collect(),
            constant: model.beta_const[0] / pivot,
        };
        out.push_str(&relation.solved_form());
        out.push('\n');
    }
    out
}

/// Every estimated VECM parameter as `block,row,column,value`.
pub fn vecm_csv(model: &VecmModel) -> String {
    let names = &model.column_names;
    let mut rows = Vec::new();
    for j in 0..model.rank {
        let ce = format!("ECM{}", j + 1);
        for (i, n) in names.iter().enumerate() {
            rows.push(vec![
                "beta".into(),
                n.clone(),
                ce.clone(),
                full(model.beta[(i, j)]),
            ]);
        }
        rows.push(vec![
            "beta".into(),
            "const".into(),
            ce.clone(),
            full(model.beta_const[j]),
        ]);
        for (i, n) in names.iter().enumerate() {
            rows.push(vec![
                "alpha".into(),
                n.clone(),
                ce.clone(),
                full(model.alpha[(i, j)]),
            ]);
        }
    }
    for (l, g) in model.gamma.iter().enumerate() {
        for (i, eq) in names.iter().enumerate() {
            for (k, reg) in names.iter().enumerate() {
                rows.push(vec![
                    format!("gamma{}", l + 1),
                    eq.clone(),
                    format!("D{reg}(-{})", l + 1),
                    full(g[(i, k)]),
                ]);
            }
        }
    }
    for (i, eq) in names.iter().enumerate() {
        rows.push(vec![
            "intercept".into(),
            eq.clone(),
            "const".into(),
            full(model.intercept[i]),
        ]);
    }
    csv_table(&["block", "row", "column", "value"], &rows)
}

pub fn stability(report: &StabilityReport, roots: &[nalgebra::Complex<f64>]) -> Rendered {
    let mut text = format!(
        "Companion roots: {} total, {} unit root(s) (expected {}), {}\n",
        roots.len(),
        report.unit_root_count,
        report.expected_unit_roots,
        if report.stable {
            "stable"
        } else {
            "NOT stable"
        }
    );
    let rows: Vec<Vec<String>> = roots
        .iter()
        .map(|z| vec![f4(z.re), f4(z.im), f4(z.norm())])
        .collect();
    text.push_str(&text_table("", &["Real", "Imaginary", "Modulus"], &rows));
    let csv_rows: Vec<Vec<String>> = roots
        .iter()
        .map(|z| vec![full(z.re), full(z.im), full(z.norm())])
        .collect();
    Rendered {
        text,
        csv: csv_table(&["re", "im", "modulus"], &csv_rows),
    }
}

pub fn irf_csv(irf: &IrfResult) -> String {
    irf.to_csv()
}

pub fn fevd_tables(f: &Fevd) -> Rendered {
    let mut text = String::new();
    let mut csv_rows = Vec::new();
    for t in &f.tables {
        let mut header = vec!["Period", "S.E."];
        header.extend(t.shocks.iter().map(|s| s.as_str()));
        let rows: Vec<Vec<String>> = t
            .rows
            .iter()
            .map(|r| {
                let mut row = vec![r.period.to_string(), f4(r.se)];
                row.extend(r.shares.iter().map(|s| f4(*s)));
                row
            })
            .collect();
        text.push_str(&text_table(
            &format!("Variance decomposition of {}", t.variable),
            &header,
            &rows,
        ));
        text.push('\n');
        for r in &t.rows {
            for (shock, share) in t.shocks.iter().zip(&r.shares) {
                csv_rows.push(vec![
                    t.variable.clone(),
                    r.period.to_string(),
                    full(r.se),
                    shock.clone(),
                    full(*share),
                ]);
            }
        }
    }
    Rendered {
        text,
        csv: csv_table(&["variable", "period", "se", "shock", "share"], &csv_rows),
    }
}

pub fn regression_table(r: &StaticRegression) -> Rendered {
    let text_rows: Vec<Vec<String>> = r
        .terms
        .iter()
        .map(|t| {
            vec![
                t.name.clone(),
                f4(t.coefficient),
                f4(t.std_error),
                f4(t.t_ratio),
            ]
        })
        .collect();
    let mut text = text_table(
        &format!("Static regression of {} (T = {})", r.target, r.n_obs),
        &["Variable", "Coefficient", "Std. Error", "t-Statistic"],
        &text_rows,
    );
    text.push_str(&format!(
        "R-squared {:.4}  S.E. of regression {:.4}\n",
        r.r_squared, r.sigma
    ));
    let mut csv_rows: Vec<Vec<String>> = r
        .terms
        .iter()
        .map(|t| {
            vec![
                t.name.clone(),
                full(t.coefficient),
                full(t.std_error),
                full(t.t_ratio),
            ]
        })
        .collect();
    csv_rows.push(vec![
        "r_squared".into(),
        full(r.r_squared),
        String::new(),
        String::new(),
    ]);
    Rendered {
        text,
        csv: csv_table(&["term", "coefficient", "std_error", "t_ratio"], &csv_rows),
    }
}

/// Levels, sensitivities and scenario effects as plain text.
pub fn multiplier_text(
    levels: &Multipliers,
    gradient: &MultiplierGradient,
    scenarios: &[(String, DeltaEstimate)],
) -> String {
    let mut out = format!("m1 = {:.6}\nm2 = {:.6}\n\n", levels.m1, levels.m2);
    let g = gradient;
    out.push_str(&text_table(
        "Sensitivities",
        &["", "d/dk", "d/dr", "d/dt"],
        &[
            vec!["m1".into(), f4(g.dm1_dk), f4(g.dm1_dr), f4(g.dm1_dt)],
            vec!["m2".into(), f4(g.dm2_dk), f4(g.dm2_dr), f4(g.dm2_dt)],
        ],
    ));
    if !scenarios.is_empty() {
        let rows: Vec<Vec<String>> = scenarios
            .iter()
            .map(|(name, d)| {
                vec![
                    name.clone(),
                    format!("{:.6}", d.approx_dm1),
                    format!("{:.6}", d.exact_dm1),
                    format!("{:.6}", d.approx_dm2),
                    format!("{:.6}", d.exact_dm2),
                ]
            })
            .collect();
        out.push('\n');
        out.push_str(&text_table(
            "Scenario effects",
            &[
                "Scenario",
                "dm1 (linear)",
                "dm1 (exact)",
                "dm2 (linear)",
                "dm2 (exact)",
            ],
            &rows,
        ));
    }
    out
}
