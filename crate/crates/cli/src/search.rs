//! Grid search for the bias or power-control fraction maximising an analytic objective.

use hetnet_core::analytic::{AnalyticOptions, Analyzer, Corollary, LoadMode};
use hetnet_core::model::{db_to_linear, NetworkConfig, Tier};

use crate::sweep::Param;
use crate::{check_grid, fmt6, CliError};

pub const HEADER: [&str; 3] = ["variable_value", "objective", "valid"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    SirCoverage { tau_db: f64 },
    RateCoverage { rho: f64, load_mode: LoadMode },
    /// Network coverage from a corollary's closed form; points outside its
    /// hypotheses are invalid.
    Corollary { id: u8, tau_db: f64 },
}

impl Objective {
    /// `sir@TAU_DB`, `rate@RHO` or `corK@TAU_DB`.
    pub fn parse(s: &str, load_mode: LoadMode) -> Result<Objective, CliError> {
        let bad = || CliError::Usage(format!("objective {s:?}: expected sir@TAU_DB, rate@RHO or corK@TAU_DB"));
        let (kind, arg) = s.split_once('@').ok_or_else(bad)?;
        let x: f64 = arg.trim().parse().map_err(|_| bad())?;
        if !x.is_finite() {
            return Err(bad());
        }
        match kind.trim() {
            "sir" => Ok(Objective::SirCoverage { tau_db: x }),
            "rate" if x > 0.0 => Ok(Objective::RateCoverage { rho: x, load_mode }),
            k => {
                let id = k.strip_prefix("cor").and_then(|d| d.parse::<u8>().ok()).ok_or_else(bad)?;
                Corollary::from_id(id).ok_or_else(bad)?;
                Ok(Objective::Corollary { id, tau_db: x })
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            Objective::SirCoverage { tau_db } => format!("sir@{tau_db}"),
            Objective::RateCoverage { rho, .. } => format!("rate@{rho}"),
            Objective::Corollary { id, tau_db } => format!("cor{id}@{tau_db}"),
        }
    }

    pub fn evaluate(&self, cfg: &NetworkConfig, opts: AnalyticOptions) -> Result<f64, String> {
        let a = Analyzer::with_options(cfg, opts).map_err(|e| e.to_string())?;
        let r = match *self {
            Objective::SirCoverage { tau_db } => a.network_sir_coverage(db_to_linear(tau_db)),
            Objective::RateCoverage { rho, load_mode } => a.network_rate_coverage(rho, load_mode),
            Objective::Corollary { id, tau_db } => {
                let c = Corollary::from_id(id).ok_or("unknown corollary")?;
                let tau = db_to_linear(tau_db);
                let mut total = 0.0;
                for t in [Tier::Macro, Tier::Femto] {
                    total += a.ul_assoc_probability(t) * a.corollary_coverage(c, t, tau).map_err(|e| e.to_string())?;
                }
                Ok(total)
            }
        };
        r.map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub variable: Param,
    /// `(value, objective)`; `None` where the point is invalid.
    pub curve: Vec<(f64, Option<f64>)>,
    pub best: Option<(f64, f64)>,
}

impl SearchResult {
    pub fn records(&self) -> Vec<Vec<String>> {
        self.curve
            .iter()
            .map(|(x, v)| match v {
                Some(v) => vec![fmt6(*x), fmt6(*v), "true".into()],
                None => vec![fmt6(*x), String::new(), "false".into()],
            })
            .collect()
    }
}

/// Argmax of `objective` over `grid`; ties go to the smaller value.
pub fn search(
    base: &NetworkConfig,
    objective: &Objective,
    variable: Param,
    grid: &[f64],
    opts: AnalyticOptions,
) -> Result<SearchResult, CliError> {
    if !matches!(variable, Param::BiasDb | Param::Eta) {
        return Err(CliError::Usage(format!("cannot search over {}; use bias_db or eta", variable.name())));
    }
    check_grid(grid)?;
    let curve: Vec<(f64, Option<f64>)> = grid
        .iter()
        .map(|&x| {
            let v = variable.apply(base, x).and_then(|cfg| objective.evaluate(&cfg, opts));
            (x, v.ok())
        })
        .collect();
    let best = argmax(&curve);
    Ok(SearchResult { variable, curve, best })
}

/// First maximum over the valid points, so ties go to the earlier (smaller) value.
pub fn argmax(curve: &[(f64, Option<f64>)]) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for &(x, v) in curve {
        if let Some(v) = v {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((x, v));
            }
        }
    }
    best
}
