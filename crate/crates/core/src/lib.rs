//! Moment-method calibration of Walfisch-type pathloss models.
//!
//! The component terms of the COST231 and ITU-R Walfisch-Ikegami models and
//! of the Walfisch-Bertoni model are used as expansion and testing functions;
//! calibration coefficients are obtained from the Gram system over the
//! measurement distances.
//!
//! ```
//! use qmm_walfisch::{calibrate, predict_basic, MeasurementSet, ModelKind, Terrain};
//!
//! let t = Terrain::new(900.0, 20.0, 24.0, 30.0, 12.0, 10.0).unwrap();
//! let meas = MeasurementSet::from_pairs(
//!     [0.5, 1.0, 2.0, 4.0].map(|d| (d, 110.0 + 32.0 * f64::log10(d))),
//! )
//! .unwrap();
//! let c = calibrate(ModelKind::CwiM, &t, &meas).unwrap();
//! assert!(c.rmse() < 1e-9);
//! let nominal = predict_basic(ModelKind::CwiM, &t, 3.0).unwrap();
//! println!("3 km: {:.2} dB calibrated, {nominal:.2} dB basic", c.predict(3.0).unwrap());
//! ```

pub mod basis;
pub mod calib;
pub mod cli;
pub mod error;
pub mod metrics;
pub mod models;

pub use basis::{build_basis, effective_rank, BasisFunction, BasisSet, DesignMatrix, Group, Shape};
pub use calib::{
    calibrate, calibrate_with_tol, disaggregate, fit_design, solve_min_norm, Calibration,
    DisaggregationProfile, MeasurementSet, Sample,
};
pub use error::{Error, Result};
pub use metrics::{improvement_pct, mpe, rmse, MetricsReport};
pub use models::{predict_basic, Density, Family, ModelKind, Terrain};
