//! Batch pipeline behind the `calibrate`, `predict` and `rank` subcommands.

use std::collections::HashSet;
use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::thread;

use crate::basis::{build_basis, effective_rank, BasisSet};
use crate::calib::{calibrate_with_tol, disaggregate, Calibration, MeasurementSet};
use crate::error::{Error, Result};
use crate::metrics::{self, MetricsReport};
use crate::models::ModelKind;

use super::config::CampaignConfig;
use super::io::write_coefficients;

pub const SUMMARY_FILE: &str = "summary.csv";
pub const SUMMARY_HEADER: [&str; 7] = [
    "model",
    "basic_rmse_db",
    "basic_mpe_db",
    "calibrated_rmse_db",
    "calibrated_mpe_db",
    "improvement_pct",
    "rank",
];

pub fn profile_file(kind: ModelKind) -> String {
    format!("profile_{kind}.csv")
}

pub fn disagg_file(kind: ModelKind) -> String {
    format!("disagg_{kind}.csv")
}

pub fn coefficients_file(kind: ModelKind) -> String {
    format!("coefficients_{kind}.csv")
}

/// Fixed 4-decimal dB rendering; negative zero prints as `0.0000`.
pub fn fmt4(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub kind: ModelKind,
    pub basic: MetricsReport,
    pub calibrated: MetricsReport,
    pub rank: usize,
}

#[derive(Debug)]
pub struct ModelFailure {
    pub kind: ModelKind,
    pub error: Error,
}

#[derive(Debug, Default)]
pub struct RunReport {
    pub rows: Vec<SummaryRow>,
    pub warnings: Vec<String>,
    pub failures: Vec<ModelFailure>,
    pub written: Vec<PathBuf>,
}

impl RunReport {
    pub fn success(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Grid points inside the model's domain; W-BERT drops points at or beyond
/// its curvature limit.
fn grid_for(basis: &BasisSet, grid: &[f64], warnings: &mut Vec<String>) -> Vec<f64> {
    let dropped = basis.out_of_domain(grid);
    if dropped.is_empty() {
        return grid.to_vec();
    }
    let limit = basis.terrain.wb_limit_km();
    warnings.push(format!(
        "{}: prediction grid truncated at the {:.4} km domain edge ({} point(s) dropped)",
        basis.kind,
        limit,
        dropped.len()
    ));
    grid.iter().copied().filter(|&d| d < limit).collect()
}

/// Calibrates every configured model against `meas` and writes the report
/// files into `out_dir`. A failing model is recorded and skipped; the rest
/// still run.
pub fn run_calibration(
    config: &CampaignConfig,
    meas: &MeasurementSet,
    out_dir: &Path,
) -> Result<RunReport> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let results: Vec<(ModelKind, Result<Calibration>)> = thread::scope(|s| {
        let handles: Vec<_> = config
            .models
            .iter()
            .map(|&kind| {
                (
                    kind,
                    s.spawn(move || {
                        calibrate_with_tol(kind, &config.terrain, meas, config.rank_tol)
                    }),
                )
            })
            .collect();
        handles
            .into_iter()
            .map(|(kind, h)| (kind, h.join().expect("calibration thread panicked")))
            .collect()
    });

    let grid = config.grid.points();
    let mut report = RunReport::default();
    for (kind, result) in results {
        let outcome = result.and_then(|c| {
            let files = write_model_outputs(&c, &grid, out_dir, &mut report.warnings)?;
            Ok((c, files))
        });
        match outcome {
            Ok((c, files)) => {
                let basic = MetricsReport::new(&c.basic_fitted(), &c.measured)?;
                let calibrated = c.report();
                report.rows.push(SummaryRow {
                    kind,
                    basic,
                    calibrated,
                    rank: c.rank,
                });
                report.written.extend(files);
            }
            Err(error) => report.failures.push(ModelFailure { kind, error }),
        }
    }

    let summary = out_dir.join(SUMMARY_FILE);
    write_summary(&summary, &report.rows)?;
    report.written.push(summary);
    Ok(report)
}

fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        w.write_record([
            r.kind.name().to_string(),
            fmt4(r.basic.rmse_db),
            fmt4(r.basic.mpe_db),
            fmt4(r.calibrated.rmse_db),
            fmt4(r.calibrated.mpe_db),
            r.calibrated.improvement_pct.map(fmt4).unwrap_or_default(),
            r.rank.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Profile rows: every measurement sample plus every grid point whose
/// distance is not already measured, sorted by distance.
fn profile_rows(c: &Calibration, grid: &[f64]) -> Vec<(f64, Option<f64>)> {
    let measured: HashSet<u64> = c.distances.iter().map(|d| d.to_bits()).collect();
    let mut rows: Vec<(f64, Option<f64>)> = c
        .distances
        .iter()
        .zip(&c.measured)
        .map(|(&d, &m)| (d, Some(m)))
        .collect();
    rows.extend(
        grid.iter()
            .filter(|d| !measured.contains(&d.to_bits()))
            .map(|&d| (d, None)),
    );
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    rows
}

fn write_model_outputs(
    c: &Calibration,
    grid: &[f64],
    out_dir: &Path,
    warnings: &mut Vec<String>,
) -> Result<Vec<PathBuf>> {
    let grid = grid_for(&c.basis, grid, warnings);

    let profile = out_dir.join(profile_file(c.kind));
    let mut w = csv::Writer::from_path(&profile)?;
    w.write_record(["distance_km", "measured_db", "basic_db", "calibrated_db"])?;
    for (d, m) in profile_rows(c, &grid) {
        w.write_record([
            d.to_string(),
            m.map(|v| v.to_string()).unwrap_or_default(),
            c.basis.sum(d)?.to_string(),
            c.predict(d)?.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(&profile, e))?;

    let disagg = out_dir.join(disagg_file(c.kind));
    let p = disaggregate(c, &grid)?;
    let mut w = csv::Writer::from_path(&disagg)?;
    let mut header = vec!["distance_km".to_string()];
    header.extend(p.groups.iter().map(|g| format!("basic_{g}_db")));
    header.extend(p.groups.iter().map(|g| format!("calibrated_{g}_db")));
    header.push("basic_net_db".into());
    header.push("calibrated_net_db".into());
    w.write_record(&header)?;
    for (k, d) in p.distances.iter().enumerate() {
        let mut rec = vec![d.to_string()];
        rec.extend(p.basic.iter().map(|g| g[k].to_string()));
        rec.extend(p.calibrated.iter().map(|g| g[k].to_string()));
        rec.push(p.basic_net(k).to_string());
        rec.push(p.calibrated_net(k).to_string());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(&disagg, e))?;

    let coefficients = out_dir.join(coefficients_file(c.kind));
    let file = File::create(&coefficients).map_err(|e| Error::io(&coefficients, e))?;
    write_coefficients(file, &c.basis, &c.alpha)?;

    Ok(vec![profile, disagg, coefficients])
}

/// Predictions of the basic model (no `alpha`) or a calibrated one over
/// `grid`. Out-of-domain W-BERT points are dropped with a warning.
pub fn predict_grid(
    basis: &BasisSet,
    alpha: Option<&[f64]>,
    grid: &[f64],
    warnings: &mut Vec<String>,
) -> Result<Vec<(f64, f64)>> {
    grid_for(basis, grid, warnings)
        .into_iter()
        .map(|d| {
            let v = match alpha {
                Some(a) => basis.weighted_sum(a, d)?,
                None => basis.sum(d)?,
            };
            Ok((d, v))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankRow {
    pub kind: ModelKind,
    pub rows: usize,
    pub distinct_distances: usize,
    pub rank: usize,
}

/// Effective rank of each model's design matrix over `distances`.
pub fn rank_report(
    config: &CampaignConfig,
    distances: &[f64],
) -> Vec<(ModelKind, Result<RankRow>)> {
    let distinct = distances
        .iter()
        .map(|d| d.to_bits())
        .collect::<HashSet<_>>()
        .len();
    config
        .models
        .iter()
        .map(|&kind| {
            let row = build_basis(kind, &config.terrain)
                .and_then(|b| b.design_matrix(distances))
                .and_then(|m| {
                    Ok(RankRow {
                        kind,
                        rows: m.rows(),
                        distinct_distances: distinct,
                        rank: effective_rank(&m, config.rank_tol)?,
                    })
                });
            (kind, row)
        })
        .collect()
}

/// Recomputes RMSE from a written profile file (rows with a measurement).
pub fn profile_rmse(path: &Path) -> Result<f64> {
    let mut rdr = csv::Reader::from_path(path)?;
    let (mut pred, mut meas) = (Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec?;
        if rec[1].is_empty() {
            continue;
        }
        let num = |s: &str| {
            s.parse::<f64>().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: rec.position().map_or(0, |p| p.line() as usize),
                message: format!("`{s}` is not a number"),
            })
        };
        meas.push(num(&rec[1])?);
        pred.push(num(&rec[3])?);
    }
    metrics::rmse(&pred, &meas)
}
