mod common;

use common::*;
use moneta_core::var::{fit_var, lag_order_table, InformationCriteria};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rayon::prelude::*;

#[test]
fn var1_coefficients_recovered() {
    // persistent regressors: coefficient s.e. about 0.014 and 0.019 at T = 1000
    let a = DMatrix::from_row_slice(2, 2, &[0.9, 0.05, 0.0, 0.8]);
    let c = DVector::from_vec(vec![0.5, -0.3]);
    let hits = (0..200u64)
        .into_par_iter()
        .filter(|&s| {
            let y = simulate_var(
                &mut rng(80_000 + s),
                1000,
                &c,
                std::slice::from_ref(&a),
                &DMatrix::identity(2, 2),
                200,
            );
            let m = fit_var(&frame_from(&y), 1, true).unwrap();
            (&m.coefficients[0] - &a).amax() < 0.05
        })
        .count();
    assert!(rate(hits, 200) >= 0.95, "{hits}/200");
}

#[test]
fn white_noise_selects_lag_zero_by_sc() {
    let hits = (0..300u64)
        .into_par_iter()
        .filter(|&s| {
            let y = DMatrix::from_vec(500, 3, normals(&mut rng(81_000 + s), 1500));
            lag_order_table(&frame_from(&y), 4, true)
                .unwrap()
                .selected
                .sc
                == 0
        })
        .count();
    assert!(rate(hits, 300) >= 0.90, "{hits}/300");
}

#[test]
fn strong_var1_selects_lag_one_under_every_criterion() {
    let a = DMatrix::from_row_slice(3, 3, &[0.8, 0.1, 0.0, 0.0, 0.7, 0.1, 0.1, 0.0, 0.6]);
    let picks: Vec<_> = (0..300u64)
        .into_par_iter()
        .map(|s| {
            let y = simulate_var(
                &mut rng(82_000 + s),
                500,
                &DVector::zeros(3),
                std::slice::from_ref(&a),
                &DMatrix::identity(3, 3),
                200,
            );
            lag_order_table(&frame_from(&y), 2, true).unwrap().selected
        })
        .collect();
    let share = |f: fn(&moneta_core::var::LagSelections) -> usize| {
        rate(picks.iter().filter(|p| f(p) == 1).count(), 300)
    };
    let rates = [
        ("LR", share(|p| p.lr)),
        ("FPE", share(|p| p.fpe)),
        ("AIC", share(|p| p.aic)),
        ("SC", share(|p| p.sc)),
        ("HQ", share(|p| p.hq)),
    ];
    for (name, r) in rates {
        assert!(r >= 0.90, "{name}: {r}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lag_table_is_internally_consistent(seed in any::<u64>(), n in 1usize..4, max_lag in 1usize..5) {
        let mut g = rng(seed);
        let y = DMatrix::from_vec(80, n, normals(&mut g, 80 * n));
        let y = DMatrix::from_fn(80, n, |t, j| (0..=t).map(|s| 0.3f64.powi((t - s) as i32) * y[(s, j)]).sum::<f64>());
        let table = lag_order_table(&frame_from(&y), max_lag, true).unwrap();
        prop_assert_eq!(table.t_effective, 80 - max_lag);
        for w in table.rows.windows(2) {
            // same sample, nested regressors: det(residual_cov) cannot rise
            prop_assert!(w[1].logl >= w[0].logl - 1e-9);
        }
        for row in &table.rows {
            let q = n * (1 + n * row.lag);
            let ic = InformationCriteria::from_log_likelihood(row.logl, q, table.t_effective);
            let t = table.t_effective as f64;
            let base = -2.0 * row.logl / t;
            prop_assert!((row.aic - (base + 2.0 * q as f64 / t)).abs() < 1e-8);
            prop_assert!((row.sc - (base + q as f64 * t.ln() / t)).abs() < 1e-8);
            prop_assert!((row.hq - (base + 2.0 * q as f64 * t.ln().ln() / t)).abs() < 1e-8);
            prop_assert!((row.aic - ic.aic).abs() < 1e-12);
        }
        let argmin = |f: fn(&moneta_core::var::LagRow) -> f64| {
            let best = table.rows.iter().map(f).fold(f64::INFINITY, f64::min);
            table.rows.iter().position(|r| f(r) == best).unwrap()
        };
        prop_assert_eq!(table.selected.aic, argmin(|r| r.aic));
        prop_assert_eq!(table.selected.sc, argmin(|r| r.sc));
        prop_assert_eq!(table.selected.hq, argmin(|r| r.hq));
        prop_assert_eq!(table.selected.fpe, argmin(|r| r.fpe));
    }
}
