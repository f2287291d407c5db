//! One-parameter sweeps over a scenario.

use hetnet_core::analytic::{AnalyticOptions, Analyzer, LoadMode};
use hetnet_core::model::{db_to_linear, AssociationCase, NetworkConfig, Tier};
use hetnet_core::simulator::{estimate, estimate_association, Proportion, SimOptions};
use rayon::prelude::*;

use crate::{check_grid, fmt6, CliError};

pub const HEADER: [&str; 6] = ["param_value", "engine", "metric", "value", "ci_halfwidth", "seed"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    /// lambda_F / lambda_M with lambda_M held fixed
    LambdaRatio,
    BiasDb,
    Eta,
    TauDb,
    /// bits/s
    Rho,
    NM,
}

impl Param {
    pub const ALL: [Param; 6] = [Param::LambdaRatio, Param::BiasDb, Param::Eta, Param::TauDb, Param::Rho, Param::NM];

    pub fn name(self) -> &'static str {
        match self {
            Param::LambdaRatio => "lambda_ratio",
            Param::BiasDb => "bias_db",
            Param::Eta => "eta",
            Param::TauDb => "tau_db",
            Param::Rho => "rho",
            Param::NM => "n_m",
        }
    }

    pub fn from_name(s: &str) -> Option<Param> {
        Param::ALL.into_iter().find(|p| p.name() == s)
    }

    /// Scenario with this parameter set to `v`; threshold parameters leave it unchanged.
    pub fn apply(self, base: &NetworkConfig, v: f64) -> Result<NetworkConfig, String> {
        let mut cfg = *base;
        match self {
            Param::LambdaRatio => cfg.femto_tier.density = v * cfg.macro_tier.density,
            Param::BiasDb => cfg.set_bias_db(v),
            Param::Eta => cfg.eta = v,
            Param::NM => {
                if v < 1.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
                    return Err(format!("n_m = {v} is not a positive integer"));
                }
                cfg.macro_tier.antennas = v as u32;
            }
            Param::TauDb | Param::Rho => {}
        }
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    SirCoverage,
    SirMacro,
    SirFemto,
    RateCoverage,
    Case1,
    Case2,
    Case3,
    AssocMacro,
    AssocFemto,
}

impl Metric {
    pub const ALL: [Metric; 9] = [
        Metric::SirCoverage,
        Metric::SirMacro,
        Metric::SirFemto,
        Metric::RateCoverage,
        Metric::Case1,
        Metric::Case2,
        Metric::Case3,
        Metric::AssocMacro,
        Metric::AssocFemto,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::SirCoverage => "sir_coverage",
            Metric::SirMacro => "sir_coverage_macro",
            Metric::SirFemto => "sir_coverage_femto",
            Metric::RateCoverage => "rate_coverage",
            Metric::Case1 => "case1",
            Metric::Case2 => "case2",
            Metric::Case3 => "case3",
            Metric::AssocMacro => "assoc_macro",
            Metric::AssocFemto => "assoc_femto",
        }
    }

    pub fn from_name(s: &str) -> Option<Metric> {
        Metric::ALL.into_iter().find(|m| m.name() == s)
    }

    fn uses_sir(self) -> bool {
        matches!(self, Metric::SirCoverage | Metric::SirMacro | Metric::SirFemto)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Analytic,
    Sim,
    Both,
}

impl Engine {
    pub fn from_name(s: &str) -> Option<Engine> {
        match s {
            "analytic" => Some(Engine::Analytic),
            "sim" => Some(Engine::Sim),
            "both" => Some(Engine::Both),
            _ => None,
        }
    }

    fn analytic(self) -> bool {
        self != Engine::Sim
    }

    fn sim(self) -> bool {
        self != Engine::Analytic
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: Param,
    pub grid: Vec<f64>,
    pub engine: Engine,
    pub metric: Metric,
    /// Threshold for SIR metrics unless the sweep is over `tau_db`.
    pub tau_db: f64,
    /// Threshold for rate coverage unless the sweep is over `rho`.
    pub rho: f64,
    pub load_mode: LoadMode,
    pub analytic: AnalyticOptions,
    /// Thresholds inside are ignored; the sweep supplies them.
    pub sim: SimOptions,
}

impl SweepSpec {
    pub fn new(param: Param, grid: Vec<f64>, metric: Metric) -> Self {
        SweepSpec {
            param,
            grid,
            engine: Engine::Analytic,
            metric,
            tau_db: 0.0,
            rho: 1e5,
            load_mode: LoadMode::Pmf,
            analytic: AnalyticOptions::default(),
            sim: SimOptions::default(),
        }
    }

    pub fn check(&self) -> Result<(), CliError> {
        check_grid(&self.grid)?;
        if self.param == Param::TauDb && !self.metric.uses_sir() {
            return Err(CliError::Usage(format!("tau_db sweeps need an SIR metric, not {}", self.metric.name())));
        }
        if self.param == Param::Rho && self.metric != Metric::RateCoverage {
            return Err(CliError::Usage(format!("rho sweeps need rate_coverage, not {}", self.metric.name())));
        }
        if self.param == Param::Rho && self.grid[0] <= 0.0 {
            return Err(CliError::Grid("rho values must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param_value: f64,
    pub engine: &'static str,
    pub metric: Metric,
    /// `(value, ci half-width)` or the failure message.
    pub outcome: Result<(f64, f64), String>,
    pub seed: u64,
}

impl SweepRow {
    pub fn record(&self) -> Vec<String> {
        let (value, ci) = match &self.outcome {
            Ok((v, h)) => (fmt6(*v), fmt6(*h)),
            Err(_) => ("failed".to_string(), String::new()),
        };
        vec![
            fmt6(self.param_value),
            self.engine.to_string(),
            self.metric.name().to_string(),
            value,
            ci,
            self.seed.to_string(),
        ]
    }
}

pub fn analytic_value(
    cfg: &NetworkConfig,
    metric: Metric,
    tau_db: f64,
    rho: f64,
    load_mode: LoadMode,
    opts: AnalyticOptions,
) -> Result<f64, String> {
    let a = Analyzer::with_options(cfg, opts).map_err(|e| e.to_string())?;
    let tau = db_to_linear(tau_db);
    let r = match metric {
        Metric::SirCoverage => a.network_sir_coverage(tau),
        Metric::SirMacro => a.sir_coverage(Tier::Macro, tau),
        Metric::SirFemto => a.sir_coverage(Tier::Femto, tau),
        Metric::RateCoverage => a.network_rate_coverage(rho, load_mode),
        Metric::Case1 => a.case_probability(AssociationCase::MacroBoth),
        Metric::Case2 => a.case_probability(AssociationCase::MacroDlFemtoUl),
        Metric::Case3 => a.case_probability(AssociationCase::FemtoBoth),
        Metric::AssocMacro => a.tier_assoc_probability(Tier::Macro),
        Metric::AssocFemto => a.tier_assoc_probability(Tier::Femto),
    };
    r.map_err(|e| e.to_string())
}

fn pair(p: &Proportion) -> (f64, f64) {
    (p.value, p.half_width())
}

/// Monte Carlo values of `metric` at each threshold (dB for SIR, bits/s for rate).
/// Association metrics ignore the thresholds and return one value.
pub fn sim_values(
    cfg: &NetworkConfig,
    metric: Metric,
    thresholds: &[f64],
    sim: &SimOptions,
) -> Result<Vec<(f64, f64)>, String> {
    let mut opts = sim.clone();
    opts.sir_thresholds.clear();
    opts.rate_thresholds.clear();
    opts.track_load = false;
    let err = |e: hetnet_core::simulator::SimError| e.to_string();
    match metric {
        Metric::SirCoverage | Metric::SirMacro | Metric::SirFemto => {
            opts.sir_thresholds = thresholds.iter().map(|&d| db_to_linear(d)).collect();
            let est = estimate(cfg, &opts).map_err(err)?;
            let pts = match metric {
                Metric::SirCoverage => &est.sir_points,
                Metric::SirMacro => &est.tier_sir[Tier::Macro.index()],
                _ => &est.tier_sir[Tier::Femto.index()],
            };
            Ok(pts.iter().map(pair).collect())
        }
        Metric::RateCoverage => {
            opts.rate_thresholds = thresholds.to_vec();
            opts.track_load = true;
            let est = estimate(cfg, &opts).map_err(err)?;
            Ok(est.rate.iter().map(pair).collect())
        }
        _ => {
            let est = estimate_association(cfg, &opts).map_err(err)?;
            let p = match metric {
                Metric::Case1 => est.cases[0],
                Metric::Case2 => est.cases[1],
                Metric::Case3 => est.cases[2],
                Metric::AssocMacro => Proportion::new(est.cases[0].hits + est.reverse_split.hits, est.drops),
                _ => Proportion::new(est.cases[1].hits + est.cases[2].hits, est.drops),
            };
            Ok(vec![pair(&p)])
        }
    }
}

pub fn run_sweep(base: &NetworkConfig, spec: &SweepSpec) -> Result<Vec<SweepRow>, CliError> {
    spec.check()?;
    let seed = spec.sim.seed;
    let point = |v: f64| -> (f64, f64) {
        match spec.param {
            Param::TauDb => (v, spec.rho),
            Param::Rho => (spec.tau_db, v),
            _ => (spec.tau_db, spec.rho),
        }
    };

    let analytic: Vec<Option<Result<(f64, f64), String>>> = spec
        .grid
        .par_iter()
        .map(|&v| {
            if !spec.engine.analytic() {
                return None;
            }
            let (tau_db, rho) = point(v);
            Some(
                spec.param
                    .apply(base, v)
                    .and_then(|cfg| analytic_value(&cfg, spec.metric, tau_db, rho, spec.load_mode, spec.analytic))
                    .map(|x| (x, 0.0)),
            )
        })
        .collect();

    let sim: Vec<Option<Result<(f64, f64), String>>> = if !spec.engine.sim() {
        vec![None; spec.grid.len()]
    } else if matches!(spec.param, Param::TauDb | Param::Rho) {
        // one run covers every threshold
        match sim_values(base, spec.metric, &spec.grid, &spec.sim) {
            Ok(v) => v.into_iter().map(|x| Some(Ok(x))).collect(),
            Err(e) => vec![Some(Err(e)); spec.grid.len()],
        }
    } else {
        spec.grid
            .iter()
            .map(|&v| {
                let (tau_db, rho) = point(v);
                let th = if spec.metric == Metric::RateCoverage { rho } else { tau_db };
                Some(
                    spec.param
                        .apply(base, v)
                        .and_then(|cfg| sim_values(&cfg, spec.metric, &[th], &spec.sim))
                        .map(|x| x[0]),
                )
            })
            .collect()
    };

    let mut rows = Vec::new();
    for (i, &v) in spec.grid.iter().enumerate() {
        for (engine, r) in [("analytic", &analytic[i]), ("sim", &sim[i])] {
            if let Some(r) = r {
                rows.push(SweepRow { param_value: v, engine, metric: spec.metric, outcome: r.clone(), seed });
            }
        }
    }
    Ok(rows)
}
