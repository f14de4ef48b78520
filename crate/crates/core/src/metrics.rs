//! Prediction-error statistics.

use crate::error::{Error, Result};

fn paired<'a>(predicted: &'a [f64], measured: &'a [f64]) -> Result<impl Iterator<Item = f64> + 'a> {
    if predicted.len() != measured.len() {
        return Err(Error::LengthMismatch {
            predicted: predicted.len(),
            measured: measured.len(),
        });
    }
    if predicted.is_empty() {
        return Err(Error::Empty("metric over zero samples"));
    }
    Ok(predicted.iter().zip(measured).map(|(p, m)| p - m))
}

/// Root-mean-square of `predicted - measured`.
pub fn rmse(predicted: &[f64], measured: &[f64]) -> Result<f64> {
    let n = predicted.len() as f64;
    let ss: f64 = paired(predicted, measured)?.map(|e| e * e).sum();
    Ok((ss / n).sqrt())
}

/// Mean prediction error, `mean(predicted - measured)`.
pub fn mpe(predicted: &[f64], measured: &[f64]) -> Result<f64> {
    let n = predicted.len() as f64;
    Ok(paired(predicted, measured)?.sum::<f64>() / n)
}

/// Percent reduction of RMSE relative to the basic model.
pub fn improvement_pct(rmse_basic: f64, rmse_calibrated: f64) -> Result<f64> {
    if rmse_basic.is_nan() || rmse_basic <= 0.0 {
        return Err(Error::domain("rmse_basic", rmse_basic, "> 0"));
    }
    Ok(100.0 * (rmse_basic - rmse_calibrated) / rmse_basic)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub rmse_db: f64,
    pub mpe_db: f64,
    pub rmse_basic_db: Option<f64>,
    pub improvement_pct: Option<f64>,
}

impl MetricsReport {
    pub fn new(predicted: &[f64], measured: &[f64]) -> Result<Self> {
        Ok(MetricsReport {
            rmse_db: rmse(predicted, measured)?,
            mpe_db: mpe(predicted, measured)?,
            rmse_basic_db: None,
            improvement_pct: None,
        })
    }

    /// Attaches the basic model's RMSE and the resulting improvement. The
    /// improvement is left empty when the basic RMSE is zero.
    pub fn with_basic(mut self, rmse_basic_db: f64) -> Self {
        self.rmse_basic_db = Some(rmse_basic_db);
        self.improvement_pct = improvement_pct(rmse_basic_db, self.rmse_db).ok();
        self
    }
}
