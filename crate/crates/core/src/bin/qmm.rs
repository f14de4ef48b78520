use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qmm_walfisch::cli::{self, CampaignConfig};
use qmm_walfisch::{build_basis, Error, ModelKind};

#[derive(Parser, Debug)]
#[command(
    author,
    version,
    about = "Calibrate Walfisch-type pathloss models against measurements"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Calibrate every configured model and write report files
    Calibrate {
        /// Campaign config (`key = value` lines)
        #[arg(short, long)]
        config: PathBuf,
        /// Measurement CSV; overrides `measurements` in the config
        #[arg(short, long)]
        measurements: Option<PathBuf>,
        /// Output directory; overrides `output_dir` in the config
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate a basic or saved calibrated model on the config grid
    Predict {
        #[arg(short, long)]
        config: PathBuf,
        /// Model name (CWI-M, CWI-SU, ITWI-M, ITWI-SU, W-BERT)
        #[arg(long)]
        model: ModelKind,
        /// Coefficient file from a previous `calibrate` run
        #[arg(long)]
        coefficients: Option<PathBuf>,
    },
    /// Print the effective rank of each model's design matrix
    Rank {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(short, long)]
        measurements: Option<PathBuf>,
        /// Relative singular-value threshold; overrides `rank_tol`
        #[arg(long)]
        tol: Option<f64>,
    },
}

fn measurement_path(cfg: &CampaignConfig, flag: Option<PathBuf>) -> Result<PathBuf, Error> {
    flag.or_else(|| cfg.measurements.clone()).ok_or_else(|| {
        Error::Config("no measurement file (set `measurements` or pass --measurements)".into())
    })
}

fn calibrate(
    config: &Path,
    measurements: Option<PathBuf>,
    output: Option<PathBuf>,
) -> Result<bool, Error> {
    let cfg = CampaignConfig::load(config)?;
    let meas = cli::load_measurements(&measurement_path(&cfg, measurements)?)?;
    let out = output.or_else(|| cfg.output_dir.clone()).ok_or_else(|| {
        Error::Config("no output directory (set `output_dir` or pass --output)".into())
    })?;
    let report = cli::run_calibration(&cfg, &meas, &out)?;

    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "{:<8} {:>10} {:>10} {:>10} {:>10} {:>9} {:>4}",
        "model", "basic", "basic", "QMM", "QMM", "improv.", "rank"
    );
    println!(
        "{:<8} {:>10} {:>10} {:>10} {:>10} {:>9} {:>4}",
        "", "RMSE", "MPE", "RMSE", "MPE", "%", ""
    );
    for r in &report.rows {
        println!(
            "{:<8} {:>10} {:>10} {:>10} {:>10} {:>9} {:>4}",
            r.kind.name(),
            cli::fmt4(r.basic.rmse_db),
            cli::fmt4(r.basic.mpe_db),
            cli::fmt4(r.calibrated.rmse_db),
            cli::fmt4(r.calibrated.mpe_db),
            r.calibrated
                .improvement_pct
                .map(cli::fmt4)
                .unwrap_or_else(|| "-".into()),
            r.rank,
        );
    }
    for f in &report.failures {
        eprintln!("error: {}: {}", f.kind, f.error);
    }
    Ok(report.success())
}

fn predict(config: &Path, model: ModelKind, coefficients: Option<PathBuf>) -> Result<bool, Error> {
    let cfg = CampaignConfig::load(config)?;
    let basis = build_basis(model, &cfg.terrain)?;
    let alpha = coefficients
        .map(|p| cli::load_coefficients(&p, &basis))
        .transpose()?;
    let mut warnings = Vec::new();
    let rows = cli::predict_grid(&basis, alpha.as_deref(), &cfg.grid.points(), &mut warnings)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let mut out = io::stdout().lock();
    let column = if alpha.is_some() {
        "calibrated_db"
    } else {
        "basic_db"
    };
    let write = |out: &mut io::StdoutLock<'_>| -> io::Result<()> {
        writeln!(out, "distance_km,{column}")?;
        for (d, v) in &rows {
            writeln!(out, "{d},{v}")?;
        }
        Ok(())
    };
    write(&mut out).map_err(|e| Error::io("<stdout>", e))?;
    Ok(true)
}

fn rank(config: &Path, measurements: Option<PathBuf>, tol: Option<f64>) -> Result<bool, Error> {
    let mut cfg = CampaignConfig::load(config)?;
    if let Some(tol) = tol {
        cfg.rank_tol = tol;
    }
    let meas = cli::load_measurements(&measurement_path(&cfg, measurements)?)?;
    let mut ok = true;
    println!("model,rows,distinct_distances,rank");
    for (kind, row) in cli::rank_report(&cfg, &meas.distances()) {
        match row {
            Ok(r) => println!("{},{},{},{}", kind, r.rows, r.distinct_distances, r.rank),
            Err(e) => {
                eprintln!("error: {kind}: {e}");
                ok = false;
            }
        }
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = match args.command {
        Command::Calibrate {
            config,
            measurements,
            output,
        } => calibrate(&config, measurements, output),
        Command::Predict {
            config,
            model,
            coefficients,
        } => predict(&config, model, coefficients),
        Command::Rank {
            config,
            measurements,
            tol,
        } => rank(&config, measurements, tol),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
