//! Analytic SIR coverage against a reference engine, threshold by threshold.

use hetnet_core::analytic::Analyzer;
use hetnet_core::model::db_to_linear;
use hetnet_core::simulator::{estimate, SimOptions};

use crate::{check_grid, fmt6, CliError};

pub const HEADER: [&str; 7] = ["threshold_db", "analytic", "monte_carlo", "ci_halfwidth", "gap", "tolerance", "pass"];

/// What the analytic curve is compared with.
#[derive(Debug, Clone)]
pub enum Reference {
    Sim(SimOptions),
    /// A second analytic engine, reported with zero CI.
    Analytic(Box<Analyzer>),
    /// Stored `(value, ci half-width)` per threshold.
    Curve(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRow {
    pub threshold_db: f64,
    pub analytic: f64,
    pub reference: f64,
    pub ci_halfwidth: f64,
    /// `analytic - reference`
    pub gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ValidationRow {
    pub fn new(threshold_db: f64, analytic: f64, reference: f64, ci_halfwidth: f64, tolerance: f64) -> Self {
        let gap = analytic - reference;
        ValidationRow {
            threshold_db,
            analytic,
            reference,
            ci_halfwidth,
            gap,
            tolerance,
            pass: gap.abs() <= tolerance + ci_halfwidth,
        }
    }

    pub fn record(&self) -> Vec<String> {
        vec![
            fmt6(self.threshold_db),
            fmt6(self.analytic),
            fmt6(self.reference),
            fmt6(self.ci_halfwidth),
            fmt6(self.gap),
            fmt6(self.tolerance),
            self.pass.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn records(&self) -> Vec<Vec<String>> {
        self.rows.iter().map(|r| r.record()).collect()
    }
}

/// Network SIR coverage of `a` against `reference` at each threshold (dB).
pub fn validate(
    a: &Analyzer,
    reference: &Reference,
    thresholds_db: &[f64],
    tolerance: f64,
) -> Result<ValidationReport, CliError> {
    check_grid(thresholds_db)?;
    if !(tolerance >= 0.0) {
        return Err(CliError::Usage("tolerance must be non-negative".into()));
    }
    let fail = |e: &dyn std::fmt::Display| CliError::Usage(format!("engine failure: {e}"));
    let ours = a.sir_curve(None, thresholds_db).map_err(|e| fail(&e))?;
    let theirs: Vec<(f64, f64)> = match reference {
        Reference::Analytic(b) => {
            let c = b.sir_curve(None, thresholds_db).map_err(|e| fail(&e))?;
            c.values.into_iter().map(|v| (v, 0.0)).collect()
        }
        Reference::Curve(c) => {
            if c.len() != thresholds_db.len() {
                return Err(CliError::Usage("reference curve length differs from the thresholds".into()));
            }
            c.clone()
        }
        Reference::Sim(opts) => {
            let mut opts = opts.clone();
            opts.sir_thresholds = thresholds_db.iter().map(|&d| db_to_linear(d)).collect();
            opts.rate_thresholds.clear();
            opts.track_load = false;
            let est = estimate(a.config(), &opts).map_err(|e| fail(&e))?;
            est.sir_points.iter().map(|p| (p.value, p.half_width())).collect()
        }
    };
    let rows = thresholds_db
        .iter()
        .zip(ours.values.iter().zip(theirs))
        .map(|(&t, (&v, (r, h)))| ValidationRow::new(t, v, r, h, tolerance))
        .collect();
    Ok(ValidationReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_rule_includes_ci() {
        assert!(ValidationRow::new(0.0, 0.50, 0.44, 0.011, 0.05).pass);
        assert!(!ValidationRow::new(0.0, 0.50, 0.44, 0.009, 0.05).pass);
        assert!(ValidationRow::new(0.0, 0.3, 0.3, 0.0, 0.0).pass);
    }
}
