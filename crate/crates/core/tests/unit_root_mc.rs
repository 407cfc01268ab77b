mod common;

use common::*;
use moneta_core::unit_root::{adf_test, integration_order, DetSpec, LagChoice};
use proptest::prelude::*;
use rayon::prelude::*;

const AUTO: LagChoice = LagChoice::Auto { max_lag: 4 };

fn order_rate(
    base: u64,
    want: usize,
    make: impl Fn(&mut rand_chacha::ChaCha8Rng) -> Vec<f64> + Sync,
) -> f64 {
    let hits = (0..500u64)
        .into_par_iter()
        .filter(|&s| {
            let y = make(&mut rng(base + s));
            integration_order(&series("y", y), DetSpec::CONSTANT, AUTO, 2).ok() == Some(want)
        })
        .count();
    rate(hits, 500)
}

#[test]
fn random_walk_is_integrated_of_order_one() {
    let r = order_rate(70_000, 1, |g| random_walk(g, 400));
    assert!(r >= 0.90, "{r}");
}

#[test]
fn stationary_ar1_is_integrated_of_order_zero() {
    let r = order_rate(71_000, 0, |g| ar1(g, 400, 0.3));
    assert!(r >= 0.95, "{r}");
}

#[test]
fn cumulated_random_walk_is_integrated_of_order_two() {
    let r = order_rate(72_000, 2, |g| {
        let mut acc = 0.0;
        random_walk(g, 400)
            .into_iter()
            .map(|x| {
                acc += x;
                acc
            })
            .collect()
    });
    assert!(r > 0.5, "{r}");
}

#[test]
fn no_deterministic_zero_lag_statistic_matches_two_pass_regression() {
    let y = [
        1.2, 0.8, 1.5, 2.1, 1.7, 1.1, 1.9, 2.6, 2.2, 1.4, 0.9, 1.6, 2.3, 2.0, 1.3, 0.7, 1.0, 1.8,
        2.4, 1.9,
    ];
    // rho = sum(x dy) / sum(x^2) with x = y_{t-1}; then residual variance
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for t in 1..y.len() {
        sxy += y[t - 1] * (y[t] - y[t - 1]);
        sxx += y[t - 1] * y[t - 1];
    }
    let rho = sxy / sxx;
    let mut ssr = 0.0;
    for t in 1..y.len() {
        let e = (y[t] - y[t - 1]) - rho * y[t - 1];
        ssr += e * e;
    }
    let n = (y.len() - 1) as f64;
    let want = rho / (ssr / (n - 1.0) / sxx).sqrt();

    let got = adf_test(&series("y", y.to_vec()), DetSpec::NONE, LagChoice::Fixed(0)).unwrap();
    assert!(
        (got.statistic - want).abs() < 1e-12,
        "{} vs {want}",
        got.statistic
    );
    assert_eq!(got.lags, 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn statistic_ignores_shift_and_positive_scale(
        seed in any::<u64>(),
        shift in -1e3f64..1e3,
        scale in 1e-3f64..1e3,
        lags in 0usize..4,
    ) {
        let y = random_walk(&mut rng(seed), 120);
        let base = adf_test(&series("y", y.clone()), DetSpec::CONSTANT, LagChoice::Fixed(lags)).unwrap();
        let shifted = adf_test(
            &series("y", y.iter().map(|v| v + shift).collect()),
            DetSpec::CONSTANT,
            LagChoice::Fixed(lags),
        )
        .unwrap();
        let scaled = adf_test(
            &series("y", y.iter().map(|v| v * scale).collect()),
            DetSpec::CONSTANT,
            LagChoice::Fixed(lags),
        )
        .unwrap();
        prop_assert!((base.statistic - shifted.statistic).abs() < 1e-8);
        prop_assert!((base.statistic - scaled.statistic).abs() < 1e-8);
        prop_assert_eq!(base.stationary_at_5pct, base.p_value < 0.05);
    }
}
