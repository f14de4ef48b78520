use std::fs;
use std::path::{Path, PathBuf};

use crate::basis::DEFAULT_RANK_TOL;
use crate::error::{Error, Result};
use crate::models::{ModelKind, Terrain};

/// Distances `d_min, d_min + step, …` up to and including `d_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub d_min_km: f64,
    pub d_max_km: f64,
    pub d_step_km: f64,
}

impl Grid {
    pub fn new(d_min_km: f64, d_max_km: f64, d_step_km: f64) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !(ok(d_min_km) && ok(d_max_km) && ok(d_step_km)) || d_max_km < d_min_km {
            return Err(Error::Config(format!(
                "grid must satisfy 0 < d_min <= d_max and step > 0 (got {d_min_km}, {d_max_km}, {d_step_km})"
            )));
        }
        Ok(Grid {
            d_min_km,
            d_max_km,
            d_step_km,
        })
    }

    /// Points are snapped to 1e-9 km so that decimal grids land on the same
    /// values a measurement file would spell out (0.3, not 0.30000000000000004).
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.d_max_km - self.d_min_km) / self.d_step_km + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| ((self.d_min_km + i as f64 * self.d_step_km) * 1e9).round() / 1e9)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub terrain: Terrain,
    pub models: Vec<ModelKind>,
    pub measurements: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub grid: Grid,
    pub rank_tol: f64,
}

const KEYS: [&str; 13] = [
    "f_mhz",
    "w_m",
    "b_m",
    "phi_deg",
    "dh_rx_m",
    "dh_tx_m",
    "models",
    "d_min_km",
    "d_max_km",
    "d_step_km",
    "rank_tol",
    "measurements",
    "output_dir",
];

impl CampaignConfig {
    /// Reads a `key = value` file. Relative `measurements` and `output_dir`
    /// paths are taken relative to the config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse(&text).map_err(|e| match e {
            Error::Parse { line, message, .. } => Error::Parse {
                path: path.to_path_buf(),
                line,
                message,
            },
            other => other,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.measurements, &mut cfg.output_dir]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Parses config text. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values: Vec<(&str, &str, usize)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(line_no, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(parse_err(line_no, format!("unknown key `{key}`")));
            }
            if values.iter().any(|(k, _, _)| *k == key) {
                return Err(parse_err(line_no, format!("duplicate key `{key}`")));
            }
            values.push((key, value, line_no));
        }

        let get = |key: &str| {
            values
                .iter()
                .find(|(k, _, _)| *k == key)
                .map(|(_, v, l)| (*v, *l))
        };
        let num = |key: &'static str| -> Result<f64> {
            let (v, line) =
                get(key).ok_or_else(|| Error::Config(format!("missing key `{key}`")))?;
            v.parse::<f64>()
                .map_err(|_| parse_err(line, format!("`{key}`: `{v}` is not a number")))
        };

        let terrain = Terrain::new(
            num("f_mhz")?,
            num("w_m")?,
            num("b_m")?,
            num("phi_deg")?,
            num("dh_rx_m")?,
            num("dh_tx_m")?,
        )
        .map_err(|e| Error::Config(e.to_string()))?;

        let (models_raw, _) =
            get("models").ok_or_else(|| Error::Config("missing key `models`".into()))?;
        let mut models = Vec::new();
        for name in models_raw.split(',').filter(|s| !s.trim().is_empty()) {
            let kind: ModelKind = name.parse()?;
            if !models.contains(&kind) {
                models.push(kind);
            }
        }
        if models.is_empty() {
            return Err(Error::Config("`models` lists no model".into()));
        }

        let grid = Grid::new(num("d_min_km")?, num("d_max_km")?, num("d_step_km")?)?;
        let rank_tol = match get("rank_tol") {
            Some(_) => num("rank_tol")?,
            None => DEFAULT_RANK_TOL,
        };
        if !(rank_tol.is_finite() && rank_tol > 0.0 && rank_tol < 1.0) {
            return Err(Error::Config(format!(
                "rank_tol must be in (0, 1), got {rank_tol}"
            )));
        }

        Ok(CampaignConfig {
            terrain,
            models,
            measurements: get("measurements").map(|(v, _)| PathBuf::from(v)),
            output_dir: get("output_dir").map(|(v, _)| PathBuf::from(v)),
            grid,
            rank_tol,
        })
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: PathBuf::from("<config>"),
        line,
        message: message.into(),
    }
}
