use moneta_core::dynamics::{fevd, impact_matrix, impulse_response, ma_coefficients};
use moneta_core::var::VarModel;
use moneta_core::vecm::VecmModel;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("y{i}")).collect()
}

/// Stable by construction: the summed Frobenius norms of the lag matrices
/// stay below one.
fn stable_var() -> impl Strategy<Value = (VarModel, Vec<String>)> {
    (1usize..5, 1usize..4).prop_flat_map(|(n, p)| {
        (
            prop::collection::vec(-1.0f64..1.0, n * n * p),
            prop::collection::vec(-1.0f64..1.0, n * n),
            Just(names(n)).prop_shuffle(),
        )
            .prop_map(move |(a, l, ordering)| {
                let mut lags: Vec<DMatrix<f64>> = a
                    .chunks(n * n)
                    .map(|c| DMatrix::from_column_slice(n, n, c))
                    .collect();
                let norm: f64 = lags.iter().map(|m| m.norm()).sum();
                if norm > 0.9 {
                    for m in &mut lags {
                        *m *= 0.9 / norm;
                    }
                }
                let l = DMatrix::from_column_slice(n, n, &l);
                let sigma = &l * l.transpose() + DMatrix::identity(n, n) * 0.1;
                (var_model(lags, sigma), ordering)
            })
    })
}

fn var_model(coefficients: Vec<DMatrix<f64>>, residual_cov: DMatrix<f64>) -> VarModel {
    let n = residual_cov.nrows();
    VarModel {
        p: coefficients.len(),
        constant: false,
        intercept: DVector::zeros(n),
        coefficients,
        residual_cov,
        log_likelihood: 0.0,
        t_effective: 0,
        column_names: names(n),
        fitted: DMatrix::zeros(0, n),
        residuals: DMatrix::zeros(0, n),
    }
}

fn rank_one_trivariate() -> VecmModel {
    VecmModel::from_parts(
        names(3),
        DMatrix::from_column_slice(3, 1, &[-0.3, 0.1, 0.2]),
        DMatrix::from_column_slice(3, 1, &[1.0, -1.0, 0.5]),
        vec![0.0],
        vec![DMatrix::identity(3, 3) * 0.2],
        DVector::zeros(3),
        DMatrix::from_row_slice(3, 3, &[1.0, 0.3, 0.1, 0.3, 1.0, 0.2, 0.1, 0.2, 1.0]),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn fevd_rows_are_distributions((model, ordering) in stable_var(), horizon in 1usize..25) {
        let d = fevd(&model, horizon, &ordering).unwrap();
        for table in &d.tables {
            prop_assert_eq!(table.rows.len(), horizon);
            let mut prev_se = 0.0;
            for row in &table.rows {
                let total: f64 = row.shares.iter().sum();
                prop_assert!((total - 100.0).abs() < 1e-9, "{}", total);
                prop_assert!(row.shares.iter().all(|s| *s >= 0.0));
                prop_assert!(row.se >= prev_se);
                prev_se = row.se;
            }
        }
    }

    #[test]
    fn impact_is_triangular_in_the_ordering((model, ordering) in stable_var()) {
        let irf = impulse_response(&model, 1, &ordering).unwrap();
        let p = impact_matrix(&model, &ordering).unwrap();
        prop_assert_eq!(&irf.responses[0], &p);
        for (a, resp) in ordering.iter().enumerate() {
            for shock in &ordering[a + 1..] {
                prop_assert_eq!(irf.response(0, resp, shock).unwrap(), 0.0);
            }
        }
        let recon = &p * p.transpose();
        prop_assert!((recon - &model.residual_cov).amax() < 1e-12);
    }

    #[test]
    fn reordering_leaves_ma_coefficients_unchanged((model, ordering) in stable_var()) {
        let natural = names(model.residual_cov.nrows());
        let psi = ma_coefficients(&model, 12);
        for order in [&natural, &ordering] {
            let irf = impulse_response(&model, 12, order).unwrap();
            let p_inv = impact_matrix(&model, order).unwrap().try_inverse().unwrap();
            for (h, r) in irf.responses.iter().enumerate() {
                prop_assert!((r * &p_inv - &psi[h]).amax() < 1e-12, "h={}", h);
            }
        }
    }
}

#[test]
fn unit_root_responses_settle_at_nonzero_levels() {
    let m = rank_one_trivariate();
    let h = 80;
    let irf = impulse_response(&m, h, &names(3)).unwrap();
    let (last, prev) = (&irf.responses[h], &irf.responses[h - 1]);
    let persistent =
        (0..9).any(|k| last[k].abs() > 10.0 * (last[k] - prev[k]).abs() && last[k].abs() > 1e-3);
    assert!(persistent, "{last}");
}

#[test]
fn stationary_responses_die_out() {
    let m = var_model(
        vec![DMatrix::from_row_slice(2, 2, &[0.5, 0.2, 0.1, 0.4])],
        DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 2.0]),
    );
    let irf = impulse_response(&m, 80, &names(2)).unwrap();
    assert!(irf.responses[80].amax() < 1e-10);
}
