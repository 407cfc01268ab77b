mod common;

use common::*;
use moneta_core::cointegration::{johansen_test, trace_critical_value_5pct, DetCase};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn case() -> impl Strategy<Value = DetCase> {
    prop_oneof![
        Just(DetCase::None),
        Just(DetCase::RestrictedConstant),
        Just(DetCase::UnrestrictedConstant),
    ]
}

/// `n` series driven by `trends` shared random walks plus noise.
fn system(seed: u64, t: usize, n: usize, trends: usize) -> DMatrix<f64> {
    let mut g = rng(seed);
    let walks: Vec<Vec<f64>> = (0..trends).map(|_| random_walk(&mut g, t)).collect();
    let noise = normals(&mut g, t * n);
    DMatrix::from_fn(t, n, |i, j| {
        let w = if trends == 0 {
            0.0
        } else {
            walks[j % trends][i]
        };
        w + noise[i * n + j]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn statistics_are_consistent(
        seed in any::<u64>(),
        n in 2usize..5,
        p in 1usize..4,
        trends in 0usize..3,
        det in case(),
    ) {
        let y = system(seed, 150, n, trends.min(n));
        let r = johansen_test(&frame_from(&y), p, det).unwrap();
        let t = r.t_effective as f64;
        prop_assert_eq!(r.t_effective, 150 - p);
        prop_assert_eq!(r.eigenvalues.len(), n);

        for w in r.eigenvalues.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
        for &l in &r.eigenvalues {
            prop_assert!((0.0..1.0).contains(&l));
        }
        for k in 0..n {
            let want: f64 = -t * r.eigenvalues[k..].iter().map(|l| (1.0 - l).ln()).sum::<f64>();
            prop_assert!((r.trace_stats[k] - want).abs() <= 1e-9 * want.max(1.0));
            let next = if k + 1 < n { r.trace_stats[k + 1] } else { 0.0 };
            prop_assert!((r.trace_stats[k] - next - r.max_eig_stats[k]).abs() <= 1e-9 * r.trace_stats[k].max(1.0));
            if k + 1 < n {
                prop_assert!(r.trace_stats[k] > r.trace_stats[k + 1]);
            }
            prop_assert_eq!(r.crit_5pct[k], trace_critical_value_5pct(det, n - k).unwrap());
        }
        let rule = (0..n).find(|&k| r.trace_stats[k] < r.crit_5pct[k]).unwrap_or(n);
        prop_assert_eq!(r.selected_rank, rule);

        let sv = r.eigenvectors.clone().svd(false, false).singular_values;
        let (lo, hi) = (sv.min(), sv.max());
        prop_assert!(lo > 1e-10 * hi, "singular values {:?}", sv);
        prop_assert_eq!(r.beta.ncols(), r.selected_rank);
        prop_assert_eq!(r.alpha.ncols(), r.selected_rank);
    }
}
