//! Campaign configuration, file formats and the batch pipeline used by the
//! `qmm` binary.

mod config;
mod io;
mod run;

pub use config::{CampaignConfig, Grid};
pub use io::{load_coefficients, load_measurements, write_coefficients, write_measurements};
pub use run::{
    coefficients_file, disagg_file, fmt4, predict_grid, profile_file, profile_rmse, rank_report,
    run_calibration, ModelFailure, RankRow, RunReport, SummaryRow, SUMMARY_FILE, SUMMARY_HEADER,
};
