//! Batch front-end for `hetnet-core`: parameter sweeps, analytic vs Monte Carlo
//! validation and grid searches, all written as CSV.

pub mod presets;
pub mod search;
pub mod sweep;
pub mod validate;

use std::io::Write;
use std::path::Path;

use hetnet_core::model::{parse_config, NetworkConfig};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Config { path: String, message: String },
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub fn load_config(path: &Path) -> Result<NetworkConfig, CliError> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text).map_err(|e| CliError::Config {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Either `--config` or `--preset`, not both.
pub fn resolve_config(config: Option<&Path>, preset: Option<&str>) -> Result<NetworkConfig, CliError> {
    match (config, preset) {
        (Some(p), None) => load_config(p),
        (None, Some(name)) => presets::preset(name)
            .map(|p| p.config)
            .ok_or_else(|| CliError::UnknownPreset(name.to_string())),
        (Some(_), Some(_)) => Err(CliError::Usage("give --config or --preset, not both".into())),
        (None, None) => Err(CliError::Usage("one of --config or --preset is required".into())),
    }
}

/// Parses `start:step:stop` (inclusive) or a comma-separated list. The result must be
/// non-empty and strictly increasing.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(CliError::Grid("empty grid".into()));
    }
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| CliError::Grid(format!("not a number: {t:?}")))
    };
    let grid = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Grid(format!("expected start:step:stop, got {s:?}")));
        }
        let (a, h, b) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if h <= 0.0 {
            return Err(CliError::Grid("step must be positive".into()));
        }
        if b < a {
            return Err(CliError::Grid("stop precedes start".into()));
        }
        let n = ((b - a) / h + 1e-9).floor() as usize;
        (0..=n).map(|i| a + i as f64 * h).collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    check_grid(&grid)?;
    Ok(grid)
}

pub fn check_grid(grid: &[f64]) -> Result<(), CliError> {
    if grid.is_empty() {
        return Err(CliError::Grid("empty grid".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Grid("values must be strictly increasing".into()));
    }
    Ok(())
}

/// Six fractional digits, no exponent.
pub fn fmt6(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

/// Writes `rows` under `header` to `out`, or stdout when `out` is `None`.
pub fn write_csv(out: Option<&Path>, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}
