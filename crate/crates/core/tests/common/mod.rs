#![allow(dead_code)]

use moneta_core::series::{PeriodIndex, SeriesFrame, TimeSeries};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn series(name: &str, values: Vec<f64>) -> TimeSeries {
    TimeSeries::new(name, PeriodIndex::new(2000, 1).unwrap(), values).unwrap()
}

/// Frame from a `T × n` matrix with columns `y0, y1, ...`.
pub fn frame_from(y: &DMatrix<f64>) -> SeriesFrame {
    SeriesFrame::new(
        (0..y.ncols())
            .map(|j| series(&format!("y{j}"), y.column(j).iter().copied().collect()))
            .collect(),
    )
    .unwrap()
}

pub fn random_walk(rng: &mut ChaCha8Rng, t: usize) -> Vec<f64> {
    let mut acc = 0.0;
    normals(rng, t)
        .into_iter()
        .map(|e| {
            acc += e;
            acc
        })
        .collect()
}

pub fn ar1(rng: &mut ChaCha8Rng, t: usize, phi: f64) -> Vec<f64> {
    let burn = 100;
    let mut y = 0.0;
    let mut out = Vec::with_capacity(t);
    for (i, e) in normals(rng, t + burn).into_iter().enumerate() {
        y = phi * y + e;
        if i >= burn {
            out.push(y);
        }
    }
    out
}

/// `y_t = c + sum_j A_j y_{t-j} + L e_t` with `e` standard normal, after a
/// burn-in (skipped when `burn == 0`, starting from zero).
pub fn simulate_var(
    rng: &mut ChaCha8Rng,
    t: usize,
    c: &DVector<f64>,
    a: &[DMatrix<f64>],
    chol: &DMatrix<f64>,
    burn: usize,
) -> DMatrix<f64> {
    let n = c.len();
    let total = t + burn;
    let mut y = DMatrix::zeros(total, n);
    for s in 0..total {
        let e = DVector::from_vec(normals(rng, n));
        let mut v = c + chol * e;
        for (j, aj) in a.iter().enumerate() {
            if s > j {
                v += aj * y.row(s - j - 1).transpose();
            }
        }
        y.set_row(s, &v.transpose());
    }
    y.rows(burn, t).clone_owned()
}

pub fn rate(hits: usize, total: usize) -> f64 {
    hits as f64 / total as f64
}
