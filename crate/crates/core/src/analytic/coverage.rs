use crate::model::Tier;
use crate::numerics::{faa_di_bruno_exp, integrate, Domain, N_MAX};

use super::{AnalyticError, Analyzer, CoverageCurve, LimitMode, Source};

/// `sum_{n<terms} (-1)^n / n! * s^n L^(n)(s)` from `[f, s f', s^2 f'', ...]`.
/// Every summand is non-negative because `f^(j)` alternates in sign.
pub(crate) fn derivative_sum(scaled: &[f64], terms: usize) -> Result<f64, AnalyticError> {
    let mut total = 0.0;
    let mut fact = 1.0;
    for n in 0..terms {
        if n > 0 {
            fact *= n as f64;
        }
        let t = faa_di_bruno_exp(n, &scaled[..=n])?;
        let signed = if n % 2 == 0 { t } else { -t } / fact;
        if signed < -1e-9 {
            return Err(AnalyticError::Consistency {
                what: "derivative-sum term",
                value: signed,
            });
        }
        total += signed;
    }
    Ok(total)
}

impl Analyzer {
    pub(crate) fn clamp_probability(&self, what: &'static str, v: f64) -> Result<f64, AnalyticError> {
        let tol = self.opts.clamp_tol;
        if !(v >= -tol && v <= 1.0 + tol) {
            return Err(AnalyticError::Consistency { what, value: v });
        }
        Ok(v.clamp(0.0, 1.0))
    }

    pub(crate) fn check_tau(tau: f64) -> Result<(), AnalyticError> {
        if tau > 0.0 && tau.is_finite() {
            Ok(())
        } else {
            Err(AnalyticError::InvalidArgument("SIR threshold must be positive and finite"))
        }
    }

    /// Coverage of a UE served in the UL by a tier-`tier` BS.
    pub fn sir_coverage(&self, tier: Tier, tau: f64) -> Result<f64, AnalyticError> {
        self.sir_coverage_with_mode(tier, tau, self.opts.limit_mode)
    }

    pub fn sir_coverage_with_mode(&self, tier: Tier, tau: f64, mode: LimitMode) -> Result<f64, AnalyticError> {
        Self::check_tau(tau)?;
        let terms = self.cfg.tier(tier).antennas as usize;
        if terms - 1 > N_MAX {
            return Err(AnalyticError::OrderTooHigh { n: terms - 1, max: N_MAX });
        }
        let d = &self.dist[tier.index()];
        let (alpha, eta) = (self.cfg.tier(tier).alpha, self.cfg.eta);

        if mode == LimitMode::DisplayedInfinite && eta == 1.0 {
            // s = tau for every serving distance and the exponent ignores X_K.
            let le = self.laplace_exponent_with_mode(tier, d.mode(), mode);
            let sc = le.scaled_derivs(tau, terms - 1)?;
            return self.clamp_probability("tier SIR coverage", derivative_sum(&sc, terms)?);
        }

        let mut fail = None;
        let est = integrate(
            |x| {
                let s = tau * x.powf(alpha * (1.0 - eta));
                let le = self.laplace_exponent_with_mode(tier, x, mode);
                match le
                    .scaled_derivs(s, terms - 1)
                    .and_then(|sc| derivative_sum(&sc, terms))
                {
                    Ok(v) => d.pdf(x) * v,
                    Err(e) => {
                        fail.get_or_insert(e);
                        0.0
                    }
                }
            },
            Domain::Finite(0.0, d.cutoff),
            &self.opts.outer,
        )?;
        if let Some(e) = fail {
            return Err(e);
        }
        self.clamp_probability("tier SIR coverage", est.value)
    }

    /// `A_M C_M + A_F C_F`
    pub fn network_sir_coverage(&self, tau: f64) -> Result<f64, AnalyticError> {
        self.network_sir_coverage_with_mode(tau, self.opts.limit_mode)
    }

    pub fn network_sir_coverage_with_mode(&self, tau: f64, mode: LimitMode) -> Result<f64, AnalyticError> {
        let mut total = 0.0;
        for t in Tier::BOTH {
            let a = self.ul_assoc_probability(t);
            if a > 0.0 {
                total += a * self.sir_coverage_with_mode(t, tau, mode)?;
            }
        }
        self.clamp_probability("network SIR coverage", total)
    }

    /// Coverage over a list of thresholds in dB; `tier = None` gives the network value.
    pub fn sir_curve(&self, tier: Option<Tier>, thresholds_db: &[f64]) -> Result<CoverageCurve, AnalyticError> {
        let mut values = Vec::with_capacity(thresholds_db.len());
        for &db in thresholds_db {
            let tau = 10f64.powf(db / 10.0);
            values.push(match tier {
                Some(t) => self.sir_coverage(t, tau)?,
                None => self.network_sir_coverage(tau)?,
            });
        }
        Ok(CoverageCurve {
            thresholds_db: thresholds_db.to_vec(),
            half_widths: vec![0.0; values.len()],
            values,
            source: Source::Analytic,
        })
    }
}
