//! Measurement and coefficient files.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::basis::BasisSet;
use crate::calib::{MeasurementSet, Sample};
use crate::error::{Error, Result};

pub const MEASUREMENT_HEADER: [&str; 2] = ["distance_km", "pathloss_db"];
pub const COEFFICIENT_HEADER: [&str; 4] = ["index", "label", "group", "alpha"];

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(file))
}

/// Reads a `distance_km,pathloss_db` file. Rows keep file order.
pub fn load_measurements(path: &Path) -> Result<MeasurementSet> {
    let mut rdr = reader(path)?;
    let mut records = rdr.records();
    match records.next() {
        Some(rec) => {
            let rec = rec?;
            if rec.iter().collect::<Vec<_>>() != MEASUREMENT_HEADER {
                return Err(parse_error(
                    path,
                    1,
                    "expected header `distance_km,pathloss_db`",
                ));
            }
        }
        None => {
            return Err(parse_error(
                path,
                1,
                "missing header `distance_km,pathloss_db`",
            ))
        }
    }

    let mut samples = Vec::new();
    for rec in records {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != 2 {
            return Err(parse_error(
                path,
                line,
                format!("expected 2 columns, found {}", rec.len()),
            ));
        }
        let cell = |i: usize, name: &str| -> Result<f64> {
            rec[i]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    parse_error(
                        path,
                        line,
                        format!("{name}: `{}` is not a finite number", &rec[i]),
                    )
                })
        };
        let d_km = cell(0, "distance_km")?;
        let pathloss_db = cell(1, "pathloss_db")?;
        if d_km <= 0.0 {
            return Err(parse_error(
                path,
                line,
                format!("distance_km must be > 0, got {d_km}"),
            ));
        }
        if pathloss_db <= 0.0 {
            return Err(parse_error(
                path,
                line,
                format!("pathloss_db must be > 0, got {pathloss_db}"),
            ));
        }
        samples.push(Sample { d_km, pathloss_db });
    }
    if samples.is_empty() {
        return Err(parse_error(path, 2, "no measurement rows"));
    }
    MeasurementSet::new(samples)
}

/// Writes measurements with round-trip exact number formatting.
pub fn write_measurements(path: &Path, meas: &MeasurementSet) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(MEASUREMENT_HEADER)?;
    for s in meas.samples() {
        w.write_record([s.d_km.to_string(), s.pathloss_db.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn write_coefficients(out: impl Write, basis: &BasisSet, alpha: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COEFFICIENT_HEADER)?;
    for (f, a) in basis.functions.iter().zip(alpha) {
        w.write_record([
            f.index.to_string(),
            f.label.to_string(),
            f.group.name().to_string(),
            a.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<coefficients>", e))?;
    Ok(())
}

/// Reads a coefficient file written by [`write_coefficients`] and checks it
/// against `basis` by index and label.
pub fn load_coefficients(path: &Path, basis: &BasisSet) -> Result<Vec<f64>> {
    let mut rdr = reader(path)?;
    let mut alpha = Vec::with_capacity(basis.len());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 1;
        if i == 0 {
            if rec.iter().collect::<Vec<_>>() != COEFFICIENT_HEADER {
                return Err(parse_error(
                    path,
                    line,
                    "expected header `index,label,group,alpha`",
                ));
            }
            continue;
        }
        if rec.len() != 4 {
            return Err(parse_error(path, line, "expected 4 columns"));
        }
        let n = alpha.len();
        let f = basis.functions.get(n).ok_or_else(|| {
            parse_error(
                path,
                line,
                format!("more than {} coefficients for {}", basis.len(), basis.kind),
            )
        })?;
        if rec[0] != f.index.to_string() || &rec[1] != f.label {
            return Err(parse_error(
                path,
                line,
                format!(
                    "expected term {} `{}`, found {} `{}`",
                    f.index, f.label, &rec[0], &rec[1]
                ),
            ));
        }
        let a = rec[3]
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| {
                parse_error(
                    path,
                    line,
                    format!("alpha: `{}` is not a finite number", &rec[3]),
                )
            })?;
        alpha.push(a);
    }
    if alpha.len() != basis.len() {
        return Err(parse_error(
            path,
            alpha.len() + 1,
            format!(
                "expected {} coefficients for {}, found {}",
                basis.len(),
                basis.kind,
                alpha.len()
            ),
        ));
    }
    Ok(alpha)
}
