//! Association probabilities, serving-distance law, SIR coverage, the
//! special-case closed forms, load distribution and rate coverage.

mod corollary;
mod coverage;
mod distance;
mod laplace;
mod load;

pub use corollary::Corollary;
pub use distance::{assoc_integral, assoc_integral_quadrature, RadialKernel, ServingDistance};
pub use laplace::{LaplaceExponent, LimitMode};
pub use load::{LoadMode, LoadModel};

use thiserror::Error;

use crate::model::{resolve_law, AssociationCase, AssociationLaw, ModelError, NetworkConfig, Tier};
use crate::numerics::{NumericsError, QuadratureSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("corollary {id} does not apply: {condition}")]
    CorollaryHypothesis { id: u8, condition: &'static str },
    #[error("derivative order {n} exceeds the supported maximum {max}")]
    OrderTooHigh { n: usize, max: usize },
    #[error("{0}")]
    InvalidArgument(&'static str),
    #[error("{what} = {value} falls outside [0, 1] beyond numerical tolerance")]
    Consistency { what: &'static str, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticOptions {
    pub limit_mode: LimitMode,
    /// Interferer-distance integrals inside the Laplace exponent.
    pub inner: QuadratureSpec,
    /// Serving-distance integral of the coverage expression.
    pub outer: QuadratureSpec,
    /// Tolerance for clamping probabilities into `[0, 1]`.
    pub clamp_tol: f64,
}

impl Default for AnalyticOptions {
    fn default() -> Self {
        AnalyticOptions {
            limit_mode: LimitMode::DisplayedInfinite,
            inner: QuadratureSpec::new(1e-9, 1e-15),
            outer: QuadratureSpec::new(1e-8, 1e-13),
            clamp_tol: 1e-6,
        }
    }
}

impl AnalyticOptions {
    pub fn with_mode(mut self, mode: LimitMode) -> Self {
        self.limit_mode = mode;
        self
    }
}

/// Which form a coverage value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Analytic,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageCurve {
    pub thresholds_db: Vec<f64>,
    pub values: Vec<f64>,
    pub half_widths: Vec<f64>,
    pub source: Source,
}

impl CoverageCurve {
    pub fn thresholds_linear(&self) -> Vec<f64> {
        self.thresholds_db.iter().map(|d| 10f64.powf(d / 10.0)).collect()
    }
}

/// Analytic engine bound to one scenario.
#[derive(Debug, Clone)]
pub struct Analyzer {
    cfg: NetworkConfig,
    law: AssociationLaw,
    opts: AnalyticOptions,
    dist: [ServingDistance; 2],
}

impl Analyzer {
    pub fn new(cfg: &NetworkConfig) -> Result<Self, AnalyticError> {
        Self::with_options(cfg, AnalyticOptions::default())
    }

    pub fn with_options(cfg: &NetworkConfig, opts: AnalyticOptions) -> Result<Self, AnalyticError> {
        let law = resolve_law(cfg)?;
        Self::with_law(cfg, law, opts)
    }

    /// Uses `law` verbatim instead of deriving it from `cfg`.
    pub fn with_law(cfg: &NetworkConfig, law: AssociationLaw, opts: AnalyticOptions) -> Result<Self, AnalyticError> {
        cfg.validate()?;
        let make = |k: Tier| {
            let j = k.other();
            ServingDistance::new(
                cfg.tier(k).density,
                cfg.tier(j).density,
                law.zeta(k),
                cfg.tier(k).alpha,
                cfg.tier(j).alpha,
                &opts.inner,
            )
        };
        let dist = [make(Tier::Macro)?, make(Tier::Femto)?];
        Ok(Analyzer { cfg: *cfg, law, opts, dist })
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.cfg
    }

    pub fn law(&self) -> &AssociationLaw {
        &self.law
    }

    pub fn options(&self) -> &AnalyticOptions {
        &self.opts
    }

    /// Probability of each association case, evaluated from the Υ-branch integrals.
    ///
    /// On the macro-leaning bias branch the middle integral measures the
    /// femto-DL/macro-UL split instead; the three values still sum to one.
    pub fn case_probability(&self, case: AssociationCase) -> Result<f64, AnalyticError> {
        let (m, f) = (&self.cfg.macro_tier, &self.cfg.femto_tier);
        let q = &self.opts.inner;
        let v = match case {
            AssociationCase::MacroBoth => {
                assoc_integral(m.density, f.density, self.law.upsilon_1, m.alpha, f.alpha, q)?
            }
            AssociationCase::MacroDlFemtoUl => {
                assoc_integral(f.density, m.density, self.law.upsilon_1p, f.alpha, m.alpha, q)?
                    - assoc_integral(f.density, m.density, self.law.upsilon_2p, f.alpha, m.alpha, q)?
            }
            AssociationCase::FemtoBoth => {
                assoc_integral(f.density, m.density, self.law.upsilon_2p, f.alpha, m.alpha, q)?
            }
        };
        Ok(v.clamp(0.0, 1.0))
    }

    /// Tier association probability with the branch-dependent constant.
    pub fn tier_assoc_probability(&self, tier: Tier) -> Result<f64, AnalyticError> {
        let (k, j) = (self.cfg.tier(tier), self.cfg.tier(tier.other()));
        Ok(assoc_integral(
            k.density,
            j.density,
            self.law.tier_upsilon(tier),
            k.alpha,
            j.alpha,
            &self.opts.inner,
        )?)
    }

    /// Probability that the UL rule picks `tier`; normalises the serving-distance law.
    pub fn ul_assoc_probability(&self, tier: Tier) -> f64 {
        self.dist[tier.index()].assoc
    }

    pub fn serving_distance(&self, tier: Tier) -> &ServingDistance {
        &self.dist[tier.index()]
    }

    pub fn laplace_exponent(&self, tier: Tier, x_k: f64) -> LaplaceExponent<'_> {
        self.laplace_exponent_with_mode(tier, x_k, self.opts.limit_mode)
    }

    pub fn laplace_exponent_with_mode(&self, tier: Tier, x_k: f64, mode: LimitMode) -> LaplaceExponent<'_> {
        let (k, j) = (self.cfg.tier(tier), self.cfg.tier(tier.other()));
        LaplaceExponent {
            serving: tier,
            x_k,
            mode,
            lam_k: k.density,
            lam_j: j.density,
            alpha_k: k.alpha,
            alpha_j: j.alpha,
            eta: self.cfg.eta,
            zeta: self.law.zeta(tier),
            own: &self.dist[tier.index()],
            other: &self.dist[tier.other().index()],
            quad: self.opts.inner,
        }
    }
}

/// `[f(s), f'(s), ..., f^(n)(s)]` for the given exponent.
pub fn laplace_exponent_derivs(le: &LaplaceExponent<'_>, s: f64, n: usize) -> Result<Vec<f64>, AnalyticError> {
    le.derivs(s, n)
}

pub fn case_probability(case: AssociationCase, cfg: &NetworkConfig) -> Result<f64, AnalyticError> {
    Analyzer::new(cfg)?.case_probability(case)
}

pub fn tier_assoc_probability(tier: Tier, cfg: &NetworkConfig) -> Result<f64, AnalyticError> {
    Analyzer::new(cfg)?.tier_assoc_probability(tier)
}

pub fn serving_distance_pdf(tier: Tier, cfg: &NetworkConfig) -> Result<ServingDistance, AnalyticError> {
    Ok(*Analyzer::new(cfg)?.serving_distance(tier))
}

pub fn sir_coverage(tier: Tier, cfg: &NetworkConfig, tau: f64) -> Result<f64, AnalyticError> {
    Analyzer::new(cfg)?.sir_coverage(tier, tau)
}

pub fn network_sir_coverage(cfg: &NetworkConfig, tau: f64) -> Result<f64, AnalyticError> {
    Analyzer::new(cfg)?.network_sir_coverage(tau)
}

pub fn corollary_coverage(id: u8, tier: Tier, cfg: &NetworkConfig, tau: f64) -> Result<f64, AnalyticError> {
    let c = Corollary::from_id(id).ok_or(AnalyticError::InvalidArgument("corollary id must be 1..=7"))?;
    Analyzer::new(cfg)?.corollary_coverage(c, tier, tau)
}

pub fn load_pmf(tier: Tier, cfg: &NetworkConfig) -> Result<LoadModel, AnalyticError> {
    Analyzer::new(cfg)?.load_pmf(tier)
}

pub fn rate_coverage(tier: Tier, cfg: &NetworkConfig, rho: f64, mode: LoadMode) -> Result<f64, AnalyticError> {
    Analyzer::new(cfg)?.rate_coverage(tier, rho, mode)
}
