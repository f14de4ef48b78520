mod common;

use common::*;
use qmm_walfisch::basis::{build_basis, effective_rank, DEFAULT_RANK_TOL};
use qmm_walfisch::{calibrate, disaggregate, fit_design, MeasurementSet, ModelKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CAMPAIGNS: usize = 25;

fn campaigns(seed: u64, f_range: (f64, f64)) -> Vec<Campaign> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..CAMPAIGNS)
        .map(|_| random_campaign(&mut rng, f_range))
        .collect()
}

#[test]
fn matches_reduced_basis_oracle() {
    for c in campaigns(11, (150.0, 3500.0)) {
        let d = c.meas.distances();
        let y = c.meas.pathloss();
        let wi_oracle = normal_equation_fit(&wi_span(&d), &y);
        let wb_oracle = normal_equation_fit(&wb_span(&c.terrain, &d), &y);
        for kind in ModelKind::ALL {
            let cal = calibrate(kind, &c.terrain, &c.meas).unwrap();
            let oracle = if kind.is_walfisch_bertoni() {
                &wb_oracle
            } else {
                &wi_oracle
            };
            let gap = rms_diff(&cal.fitted, oracle);
            assert!(gap < 1e-7, "{kind}: fitted differs from oracle by {gap}");
        }
    }
}

#[test]
fn residuals_orthogonal_to_columns() {
    for c in campaigns(12, (150.0, 3500.0)) {
        for kind in ModelKind::ALL {
            let cal = calibrate(kind, &c.terrain, &c.meas).unwrap();
            let m = cal.basis.design_matrix(&cal.distances).unwrap();
            let r_norm = cal.residuals.iter().map(|r| r * r).sum::<f64>().sqrt();
            for n in 0..m.cols() {
                let col = m.column(n);
                let dot: f64 = col.iter().zip(&cal.residuals).map(|(a, b)| a * b).sum();
                let col_norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
                let bound = 1e-6 * col_norm * r_norm + 1e-9;
                assert!(dot.abs() <= bound, "{kind} column {n}: {dot} > {bound}");
            }
        }
    }
}

#[test]
fn zero_mean_residual() {
    for c in campaigns(13, (150.0, 3500.0)) {
        for kind in ModelKind::ALL {
            let cal = calibrate(kind, &c.terrain, &c.meas).unwrap();
            assert!(cal.mpe().abs() <= 1e-9, "{kind}: mpe {}", cal.mpe());
        }
    }
}

#[test]
fn walfisch_ikegami_variants_share_rmse() {
    for c in campaigns(14, (150.0, 2000.0)) {
        let rmse: Vec<f64> = ModelKind::WALFISCH_IKEGAMI
            .iter()
            .map(|&k| calibrate(k, &c.terrain, &c.meas).unwrap().rmse())
            .collect();
        let spread = rmse.iter().cloned().fold(f64::MIN, f64::max)
            - rmse.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread <= 1e-9, "{rmse:?}");
    }
}

#[test]
fn walfisch_bertoni_dominates() {
    for c in campaigns(15, (150.0, 3500.0)) {
        let wb = calibrate(ModelKind::WBert, &c.terrain, &c.meas)
            .unwrap()
            .rmse();
        for kind in ModelKind::WALFISCH_IKEGAMI {
            let wi = calibrate(kind, &c.terrain, &c.meas).unwrap().rmse();
            assert!(wb <= wi + 1e-9, "{kind}: {wb} > {wi}");
        }
    }
}

#[test]
fn column_rescaling_keeps_fitted_values() {
    for c in campaigns(16, (150.0, 3500.0)).into_iter().take(8) {
        for kind in ModelKind::ALL {
            let basis = build_basis(kind, &c.terrain).unwrap();
            let y = c.meas.pathloss();
            let m = basis.design_matrix(&c.meas.distances()).unwrap();
            let base = fit_design(&m, &y, DEFAULT_RANK_TOL).unwrap();
            for (n, factor) in [(1, 3.7), (0, -0.25), (basis.len() - 1, 12.0)] {
                let mut scaled = m.clone();
                scaled.scale_column(n, factor);
                let fit = fit_design(&scaled, &y, DEFAULT_RANK_TOL).unwrap();
                assert!(rms_diff(&fit.fitted, &base.fitted) < 1e-9, "{kind} col {n}");
            }
        }
    }
}

#[test]
fn recalibration_is_idempotent() {
    for c in campaigns(17, (150.0, 3500.0)).into_iter().take(8) {
        for kind in ModelKind::ALL {
            let first = calibrate(kind, &c.terrain, &c.meas).unwrap();
            let again = MeasurementSet::from_pairs(
                first
                    .distances
                    .iter()
                    .copied()
                    .zip(first.fitted.iter().copied()),
            )
            .unwrap();
            let second = calibrate(kind, &c.terrain, &again).unwrap();
            assert!(second.rmse() <= 1e-9, "{kind}: {}", second.rmse());
            assert!(rms_diff(&second.fitted, &first.fitted) <= 1e-9);
        }
    }
}

#[test]
fn calibration_rank_matches_span() {
    for c in campaigns(18, (150.0, 3500.0)).into_iter().take(8) {
        for kind in ModelKind::ALL {
            let cal = calibrate(kind, &c.terrain, &c.meas).unwrap();
            let expected = if kind.is_walfisch_bertoni() { 3 } else { 2 };
            assert_eq!(cal.rank, expected, "{kind}");
            let m = cal.basis.design_matrix(&cal.distances).unwrap();
            assert_eq!(effective_rank(&m, DEFAULT_RANK_TOL).unwrap(), cal.rank);
        }
    }
}

#[test]
fn disaggregation_partitions_net_prediction() {
    for c in campaigns(19, (150.0, 3500.0)).into_iter().take(6) {
        for kind in ModelKind::ALL {
            let cal = calibrate(kind, &c.terrain, &c.meas).unwrap();
            let p = disaggregate(&cal, &cal.distances).unwrap();
            for k in 0..p.distances.len() {
                assert!((p.calibrated_net(k) - cal.fitted[k]).abs() < 1e-9);
                let basic = qmm_walfisch::predict_basic(kind, &c.terrain, p.distances[k]).unwrap();
                assert!((p.basic_net(k) - basic).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn duplicate_distances_act_as_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let c = random_campaign(&mut rng, (800.0, 1800.0));
    let doubled = MeasurementSet::from_pairs(
        c.meas
            .samples()
            .iter()
            .chain(c.meas.samples())
            .map(|s| (s.d_km, s.pathloss_db)),
    )
    .unwrap();
    for kind in ModelKind::ALL {
        let a = calibrate(kind, &c.terrain, &c.meas).unwrap();
        let b = calibrate(kind, &c.terrain, &doubled).unwrap();
        assert!((a.rmse() - b.rmse()).abs() < 1e-9);
        assert!(rms_diff(&a.fitted, &b.fitted[..a.fitted.len()]) < 1e-9);
    }
}
