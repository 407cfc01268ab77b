mod common;

use common::*;
use moneta_core::cointegration::DetCase;
use moneta_core::vecm::{ecm_term, fit_vecm, stability_check, VecmModel, UNIT_ROOT_TOL};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rayon::prelude::*;

/// `dy_t = alpha (beta' y_{t-1}) + e_t` with `alpha = (-0.3, 0.1)`, `beta = (1, -1)`.
fn error_correcting_pair(seed: u64, t: usize) -> DMatrix<f64> {
    let mut g = rng(seed);
    let e = normals(&mut g, 2 * t);
    let mut y = DMatrix::zeros(t, 2);
    for s in 1..t {
        let z = y[(s - 1, 0)] - y[(s - 1, 1)];
        y[(s, 0)] = y[(s - 1, 0)] - 0.3 * z + e[2 * s];
        y[(s, 1)] = y[(s - 1, 1)] + 0.1 * z + e[2 * s + 1];
    }
    y
}

fn fitted_model(seed: u64, p: usize, rank: usize, det: DetCase) -> (DMatrix<f64>, VecmModel) {
    let mut g = rng(seed);
    let w = random_walk(&mut g, 160);
    let noise = normals(&mut g, 480);
    let y = DMatrix::from_fn(160, 3, |t, j| {
        let drift = if j == 2 { 0.004 * t as f64 } else { 0.0 };
        drift + w[t] * (1.0 + 0.5 * j as f64) + noise[3 * t + j]
    });
    let m = fit_vecm(&frame_from(&y), p, rank, det).unwrap();
    (y, m)
}

#[test]
fn adjustment_and_cointegrating_vectors_recovered() {
    let hits = (0..200u64)
        .into_par_iter()
        .filter(|&s| {
            let y = error_correcting_pair(90_000 + s, 1000);
            let m = fit_vecm(&frame_from(&y), 1, 1, DetCase::RestrictedConstant).unwrap();
            let ok_alpha =
                (m.alpha[(0, 0)] + 0.3).abs() < 0.1 && (m.alpha[(1, 0)] - 0.1).abs() < 0.1;
            let ok_beta = (m.beta[(0, 0)] - 1.0).abs() < 0.1 && (m.beta[(1, 0)] + 1.0).abs() < 0.1;
            ok_alpha && ok_beta
        })
        .count();
    assert!(rate(hits, 200) >= 0.90, "{hits}/200");
}

#[test]
fn constructed_bivariate_model_has_one_unit_root() {
    let m = VecmModel::from_parts(
        vec!["a".into(), "b".into()],
        DMatrix::from_column_slice(2, 1, &[-0.3, 0.1]),
        DMatrix::from_column_slice(2, 1, &[1.0, -1.0]),
        vec![0.0],
        vec![DMatrix::from_row_slice(2, 2, &[0.2, 0.0, 0.1, 0.1])],
        DVector::zeros(2),
        DMatrix::identity(2, 2),
    )
    .unwrap();
    let r = stability_check(&m).unwrap();
    assert!(r.stable, "{r:?}");
    assert_eq!(r.unit_root_count, 1);
    assert_eq!(
        r.moduli
            .iter()
            .filter(|x| (*x - 1.0).abs() <= UNIT_ROOT_TOL)
            .count(),
        1
    );
    assert!(r
        .moduli
        .iter()
        .filter(|x| (*x - 1.0).abs() > UNIT_ROOT_TOL)
        .all(|x| *x < 1.0 - UNIT_ROOT_TOL));
}

#[test]
fn full_rank_fit_of_stationary_data_has_no_unit_roots() {
    let a = DMatrix::from_row_slice(2, 2, &[0.5, 0.1, 0.0, 0.4]);
    let y = simulate_var(
        &mut rng(91),
        400,
        &DVector::zeros(2),
        &[a],
        &DMatrix::identity(2, 2),
        100,
    );
    let m = fit_vecm(&frame_from(&y), 2, 2, DetCase::UnrestrictedConstant).unwrap();
    let r = stability_check(&m).unwrap();
    assert!(r.stable);
    assert_eq!(r.unit_root_count, 0);
    assert!(r.moduli.iter().all(|x| *x < 1.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn levels_form_reproduces_one_step_predictions(
        seed in any::<u64>(),
        p in 1usize..4,
        rank in 0usize..4,
        det in prop_oneof![Just(DetCase::None), Just(DetCase::RestrictedConstant), Just(DetCase::UnrestrictedConstant)],
    ) {
        let (y, m) = fitted_model(seed, p, rank, det);
        let lv = m.levels_representation();
        prop_assert_eq!(m.fitted.nrows(), 160 - p);
        for i in 0..m.fitted.nrows() {
            let t = i + p;
            let mut pred = lv.intercept.clone();
            for (j, a) in lv.coefficients.iter().enumerate() {
                pred += a * y.row(t - j - 1).transpose();
            }
            for k in 0..3 {
                prop_assert!((pred[k] - m.fitted[(i, k)]).abs() < 1e-8, "row {} var {}", i, k);
                prop_assert!((y[(t, k)] - m.fitted[(i, k)] - m.residuals[(i, k)]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn residuals_are_orthogonal_to_regressors(
        seed in any::<u64>(),
        p in 1usize..4,
        rank in 0usize..4,
        det in prop_oneof![Just(DetCase::None), Just(DetCase::RestrictedConstant), Just(DetCase::UnrestrictedConstant)],
    ) {
        let (_, m) = fitted_model(seed, p, rank, det);
        if m.regressors.ncols() > 0 {
            let normal = m.regressors.transpose() * &m.residuals;
            prop_assert!(normal.amax() < 1e-8, "{}", normal.amax());
        }
    }

    #[test]
    fn ecm_term_is_affine(
        seed in any::<u64>(),
        x in prop::collection::vec(-50.0f64..50.0, 3),
        z in prop::collection::vec(-50.0f64..50.0, 3),
        a in -2.0f64..3.0,
    ) {
        let (_, m) = fitted_model(seed, 2, 2, DetCase::RestrictedConstant);
        let mix: Vec<f64> = x.iter().zip(&z).map(|(u, v)| a * u + (1.0 - a) * v).collect();
        let (ex, ez, em) = (ecm_term(&m, &x).unwrap(), ecm_term(&m, &z).unwrap(), ecm_term(&m, &mix).unwrap());
        for j in 0..m.rank {
            let want = a * ex[j] + (1.0 - a) * ez[j];
            prop_assert!((em[j] - want).abs() <= 1e-9 * (1.0 + want.abs() + ex[j].abs() + ez[j].abs()));
        }
    }

    #[test]
    fn ecm_vanishes_on_the_cointegrating_hyperplane(seed in any::<u64>(), rest in prop::collection::vec(-20.0f64..20.0, 2)) {
        let (_, m) = fitted_model(seed, 2, 1, DetCase::RestrictedConstant);
        let b = m.beta.column(0);
        // beta is normalized with a leading 1, so solve for the first level
        let x0 = -(b[1] * rest[0] + b[2] * rest[1] + m.beta_const[0]);
        let e = ecm_term(&m, &[x0, rest[0], rest[1]]).unwrap();
        prop_assert!(e[0].abs() <= 1e-12 * (1.0 + x0.abs()));
    }
}
