//! Shared fixtures and the reduced-basis oracle used by the integration
//! suites.

#![allow(dead_code)]

use qmm_walfisch::{MeasurementSet, Terrain};
use rand::Rng;

pub struct Campaign {
    pub terrain: Terrain,
    pub meas: MeasurementSet,
}

pub fn random_terrain<R: Rng>(rng: &mut R, f_range: (f64, f64)) -> Terrain {
    Terrain::new(
        rng.gen_range(f_range.0..=f_range.1),
        rng.gen_range(5.0..50.0),
        rng.gen_range(10.0..80.0),
        rng.gen_range(0.0..=55.0),
        rng.gen_range(1.0..30.0),
        rng.gen_range(1.0..60.0),
    )
    .unwrap()
}

/// Distances inside the Walfisch-Bertoni domain of `t`, capped at 8 km.
pub fn random_distances<R: Rng>(rng: &mut R, t: &Terrain, n: usize) -> Vec<f64> {
    let hi = (0.95 * t.wb_limit_km()).min(8.0);
    (0..n).map(|_| rng.gen_range(0.05..hi)).collect()
}

/// Smooth trend plus uniform noise.
pub fn random_campaign<R: Rng>(rng: &mut R, f_range: (f64, f64)) -> Campaign {
    let terrain = random_terrain(rng, f_range);
    let n = rng.gen_range(30..=300);
    let d = random_distances(rng, &terrain, n);
    let (a, b, c) = (
        rng.gen_range(100.0..135.0),
        rng.gen_range(20.0..45.0),
        rng.gen_range(-1.5..1.5),
    );
    let meas = MeasurementSet::from_pairs(
        d.into_iter()
            .map(|d| (d, a + b * d.log10() + c * d + rng.gen_range(-6.0..6.0))),
    )
    .unwrap();
    Campaign { terrain, meas }
}

pub fn curvature(t: &Terrain, d: f64) -> f64 {
    -18.0 * (1.0 - d * d / (17.0 * t.dh_tx_m)).log10()
}

/// Least-squares fit onto an explicitly given column basis by forming the
/// normal equations and solving them with partially pivoted Gaussian
/// elimination. Returns fitted values.
pub fn normal_equation_fit(columns: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let p = columns.len();
    let mut a = vec![vec![0.0; p + 1]; p];
    for i in 0..p {
        for j in 0..p {
            a[i][j] = columns[i].iter().zip(&columns[j]).map(|(u, v)| u * v).sum();
        }
        a[i][p] = columns[i].iter().zip(y).map(|(u, v)| u * v).sum();
    }
    for col in 0..p {
        let pivot = (col..p)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col {
                let f = row[col] / pivot_row[col];
                for (x, v) in row.iter_mut().zip(&pivot_row).skip(col) {
                    *x -= f * v;
                }
            }
        }
    }
    let coef: Vec<f64> = (0..p).map(|i| a[i][p] / a[i][i]).collect();
    (0..y.len())
        .map(|k| (0..p).map(|i| coef[i] * columns[i][k]).sum())
        .collect()
}

/// Oracle columns spanning a Walfisch-Ikegami model for fixed terrain.
pub fn wi_span(d: &[f64]) -> Vec<Vec<f64>> {
    vec![vec![1.0; d.len()], d.iter().map(|x| x.log10()).collect()]
}

/// Oracle columns spanning the Walfisch-Bertoni model for fixed terrain.
pub fn wb_span(t: &Terrain, d: &[f64]) -> Vec<Vec<f64>> {
    let mut s = wi_span(d);
    s.push(d.iter().map(|&x| curvature(t, x)).collect());
    s
}

pub fn rms_diff(a: &[f64], b: &[f64]) -> f64 {
    (a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64).sqrt()
}
