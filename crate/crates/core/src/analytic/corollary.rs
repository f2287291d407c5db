//! Special cases of the coverage expression, evaluated through their own
//! simplified forms. Derivatives here go through the Leibniz rule on
//! `t 2F1(1, 1-2/a; 2-2/a; -t)` and the contiguous derivative identity rather
//! than the integral representation used by the general path.

use std::f64::consts::PI;

use crate::model::Tier;
use crate::numerics::{hyp2f1, hyp2f1_neg_scaled, integrate, integrate_vec, partitions, Domain};

use super::coverage::derivative_sum;
use super::{AnalyticError, Analyzer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Corollary {
    /// No power control (eta = 0).
    NoPowerControl,
    /// Full channel inversion (eta = 1).
    FullInversion,
    /// `N_K B_K = N_J B_J`, common alpha.
    BalancedWeights,
    /// Identical tiers apart from DL power.
    SymmetricTiers,
    /// eta = 0 with balanced weights and common alpha.
    BalancedNoPowerControl,
    /// eta = 0, single receive antenna, common alpha: closed form.
    SingleAntenna,
    /// eta = 0, SISO in both tiers, balanced weights: density invariant.
    SisoBalanced,
}

impl Corollary {
    pub const ALL: [Corollary; 7] = [
        Corollary::NoPowerControl,
        Corollary::FullInversion,
        Corollary::BalancedWeights,
        Corollary::SymmetricTiers,
        Corollary::BalancedNoPowerControl,
        Corollary::SingleAntenna,
        Corollary::SisoBalanced,
    ];

    pub fn id(self) -> u8 {
        Corollary::ALL.iter().position(|&c| c == self).unwrap() as u8 + 1
    }

    pub fn from_id(id: u8) -> Option<Corollary> {
        Corollary::ALL.get((id as usize).checked_sub(1)?).copied()
    }
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// `psi_k(t) = t^k d^k/dt^k [t F(-t)]`, `F = 2F1(1, 1-2/alpha; 2-2/alpha; .)`, k = 0..=n.
fn psi(t: f64, alpha: f64, n: usize) -> Result<Vec<f64>, AnalyticError> {
    let (a, b, c) = (1.0, 1.0 - 2.0 / alpha, 2.0 - 2.0 / alpha);
    // tf[m] = t^m F^(m)(-t)
    let mut tf = Vec::with_capacity(n + 1);
    let mut poch = 1.0;
    for m in 0..=n {
        let mf = m as f64;
        if m > 0 {
            let i = mf - 1.0;
            poch *= (a + i) * (b + i) / (c + i);
        }
        tf.push(poch * hyp2f1_neg_scaled(a + mf, b + mf, c + mf, t, m as i32)?);
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(t * tf[0]);
    for k in 1..=n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        out.push(sign * t * (tf[k] - k as f64 * tf[k - 1]));
    }
    Ok(out)
}

impl Analyzer {
    fn require(&self, id: u8, ok: bool, condition: &'static str) -> Result<(), AnalyticError> {
        if ok {
            Ok(())
        } else {
            Err(AnalyticError::CorollaryHypothesis { id, condition })
        }
    }

    /// Checks the hypotheses of `c` for serving tier `tier`.
    pub fn corollary_applies(&self, c: Corollary, tier: Tier) -> Result<(), AnalyticError> {
        let id = c.id();
        let (k, j) = (self.cfg.tier(tier), self.cfg.tier(tier.other()));
        let eta = self.cfg.eta;
        let equal_alpha = same(k.alpha, j.alpha);
        let balanced = same(self.law.zeta(tier), 1.0);
        match c {
            Corollary::NoPowerControl => self.require(id, eta == 0.0, "requires eta = 0"),
            Corollary::FullInversion => self.require(id, eta == 1.0, "requires eta = 1"),
            Corollary::BalancedWeights => {
                self.require(id, balanced, "requires N_K B_K = N_J B_J")?;
                self.require(id, equal_alpha, "requires alpha_K = alpha_J")
            }
            Corollary::SymmetricTiers => {
                self.require(id, k.antennas == j.antennas, "requires N_K = N_J")?;
                self.require(
                    id,
                    same(self.cfg.effective_bias(tier), self.cfg.effective_bias(tier.other())),
                    "requires B_K = B_J",
                )?;
                self.require(id, equal_alpha, "requires alpha_K = alpha_J")?;
                self.require(id, same(k.density, j.density), "requires lambda_K = lambda_J")
            }
            Corollary::BalancedNoPowerControl => {
                self.require(id, eta == 0.0, "requires eta = 0")?;
                self.require(id, balanced, "requires N_K B_K = N_J B_J")?;
                self.require(id, equal_alpha, "requires alpha_K = alpha_J")
            }
            Corollary::SingleAntenna => {
                self.require(id, eta == 0.0, "requires eta = 0")?;
                self.require(id, k.antennas == 1, "requires N_K = 1")?;
                self.require(id, equal_alpha, "requires alpha_K = alpha_J")
            }
            Corollary::SisoBalanced => {
                self.require(id, eta == 0.0, "requires eta = 0")?;
                self.require(id, k.antennas == 1 && j.antennas == 1, "requires N_K = N_J = 1")?;
                self.require(
                    id,
                    same(self.cfg.effective_bias(tier), self.cfg.effective_bias(tier.other())),
                    "requires B_K = B_J",
                )?;
                self.require(id, equal_alpha, "requires alpha_K = alpha_J")
            }
        }
    }

    pub fn corollary_coverage(&self, c: Corollary, tier: Tier, tau: f64) -> Result<f64, AnalyticError> {
        Self::check_tau(tau)?;
        self.corollary_applies(c, tier)?;
        let v = match c {
            Corollary::NoPowerControl => self.cor_no_power_control(tier, tau)?,
            Corollary::FullInversion => self.cor_full_inversion(tier, tau)?,
            Corollary::BalancedWeights => {
                let lam = self.cfg.tier(tier).density + self.cfg.tier(tier.other()).density;
                self.cor_single_tier_equivalent(tier, lam, tau)?
            }
            Corollary::SymmetricTiers => {
                let lam = 2.0 * self.cfg.tier(tier).density;
                self.cor_single_tier_equivalent(tier, lam, tau)?
            }
            Corollary::BalancedNoPowerControl => self.cor_balanced_no_pc(tier, tau)?,
            Corollary::SingleAntenna => self.cor_single_antenna(tier, tau)?,
            Corollary::SisoBalanced => {
                let alpha = self.cfg.tier(tier).alpha;
                let q = 2.0 / alpha;
                1.0 / (1.0 + 2.0 * tau / (alpha - 2.0) * hyp2f1(1.0, 1.0 - q, 2.0 - q, -tau)?)
            }
        };
        self.clamp_probability("corollary coverage", v)
    }

    fn cor_no_power_control(&self, tier: Tier, tau: f64) -> Result<f64, AnalyticError> {
        let (k, j) = (self.cfg.tier(tier), self.cfg.tier(tier.other()));
        let (ak, aj, zeta) = (k.alpha, j.alpha, self.law.zeta(tier));
        let terms = k.antennas as usize;
        let d = &self.dist[tier.index()];
        let psi_own = psi(tau, ak, terms - 1)?;
        let mut fail = None;
        let est = integrate(
            |x| {
                let sigma = tau * x.powf(ak);
                let l = (zeta * x.powf(ak)).powf(1.0 / aj);
                let run = || -> Result<f64, AnalyticError> {
                    let psi_other = psi(sigma * l.powf(-ak), ak, terms - 1)?;
                    let sc: Vec<f64> = (0..terms)
                        .map(|m| {
                            -2.0 * PI / (ak - 2.0)
                                * (k.density * x * x * psi_own[m] + j.density * l * l * psi_other[m])
                        })
                        .collect();
                    derivative_sum(&sc, terms)
                };
                match run() {
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
        match fail {
            Some(e) => Err(e),
            None => Ok(est.value),
        }
    }

    fn cor_full_inversion(&self, tier: Tier, tau: f64) -> Result<f64, AnalyticError> {
        let (k, j) = (self.cfg.tier(tier), self.cfg.tier(tier.other()));
        let (ak, aj, zeta) = (k.alpha, j.alpha, self.law.zeta(tier));
        let terms = k.antennas as usize;
        let q = &self.opts.inner;
        let m_own = self.dist[tier.index()].moment(2.0, q)?;
        let m_other = self.dist[tier.other().index()].moment(2.0 * aj / ak, q)?;
        let p_own = psi(tau, ak, terms - 1)?;
        let p_other = psi(tau * zeta, ak, terms - 1)?;
        let sc: Vec<f64> = (0..terms)
            .map(|m| {
                -2.0 * PI / (ak - 2.0)
                    * (k.density * m_own * p_own[m] + j.density * zeta.powf(-2.0 / ak) * m_other * p_other[m])
            })
            .collect();
        derivative_sum(&sc, terms)
    }

    /// Interference as from one tier of density `lam` with Rayleigh link distances.
    fn cor_single_tier_equivalent(&self, tier: Tier, lam: f64, tau: f64) -> Result<f64, AnalyticError> {
        let k = self.cfg.tier(tier);
        let (alpha, eta) = (k.alpha, self.cfg.eta);
        let terms = k.antennas as usize;
        let rayleigh = |y: f64| 2.0 * PI * lam * y * (-PI * lam * y * y).exp();
        // exp(-pi lam y^2) < 1e-17 beyond this radius
        let y_hi = (40.0 / (PI * lam)).sqrt();
        let mut fail = None;
        let est = integrate(
            |x| {
                let s = tau * x.powf(alpha * (1.0 - eta));
                let inner = integrate_vec(
                    terms,
                    |y, v: &mut [f64]| match psi(s * y.powf(-alpha * (1.0 - eta)), alpha, terms - 1) {
                        Ok(p) => {
                            let w = y * y * rayleigh(y);
                            for (slot, pk) in v.iter_mut().zip(p) {
                                *slot = w * pk;
                            }
                        }
                        Err(e) => {
                            fail.get_or_insert(e);
                            v.iter_mut().for_each(|s| *s = 0.0);
                        }
                    },
                    Domain::Finite(0.0, y_hi),
                    &self.opts.inner,
                );
                let run = || -> Result<f64, AnalyticError> {
                    let inner = inner?;
                    let sc: Vec<f64> = inner.value.iter().map(|v| -2.0 * PI * lam / (alpha - 2.0) * v).collect();
                    derivative_sum(&sc, terms)
                };
                match run() {
                    Ok(v) => 2.0 * PI * lam * x * (-PI * lam * x * x).exp() * v,
                    Err(e) => {
                        fail.get_or_insert(e);
                        0.0
                    }
                }
            },
            Domain::Finite(0.0, y_hi),
            &self.opts.outer,
        )?;
        match fail {
            Some(e) => Err(e),
            None => Ok(est.value),
        }
    }

    /// Closed form: with `f = -kappa X^2 psi_0(tau)`, every term of the derivative
    /// sum is a polynomial in `X^2` times a Gaussian, integrated exactly.
    fn cor_balanced_no_pc(&self, tier: Tier, tau: f64) -> Result<f64, AnalyticError> {
        let (k, j) = (self.cfg.tier(tier), self.cfg.tier(tier.other()));
        let alpha = k.alpha;
        let lam = k.density + j.density;
        let terms = k.antennas as usize;
        let kappa = 2.0 * PI * lam / (alpha - 2.0);
        let p = psi(tau, alpha, terms - 1)?;
        // d[m]: coefficient of X^(2m) in the derivative sum, after factoring exp(-kappa psi_0 X^2)
        let mut d = vec![0.0; terms];
        d[0] = 1.0;
        let mut fact = 1.0;
        for n in 1..terms {
            fact *= n as f64;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            for part in partitions(n)? {
                let mut prod = part.coefficient();
                for (jj, &b) in part.multiplicities().iter().enumerate() {
                    if b > 0 {
                        prod *= (-kappa * p[jj + 1]).powi(b as i32);
                    }
                }
                d[part.parts() as usize] += sign * prod / fact;
            }
        }
        let beta = PI * lam + kappa * p[0];
        // A_K = lam_K / lam, so 2 pi lam_K / A_K = 2 pi lam
        let mut total = 0.0;
        let mut mfact = 1.0;
        for (m, dm) in d.iter().enumerate() {
            if m > 0 {
                mfact *= m as f64;
            }
            total += dm * mfact / (2.0 * beta.powi(m as i32 + 1));
        }
        Ok(2.0 * PI * lam * total)
    }

    fn cor_single_antenna(&self, tier: Tier, tau: f64) -> Result<f64, AnalyticError> {
        let (k, j) = (self.cfg.tier(tier), self.cfg.tier(tier.other()));
        let alpha = k.alpha;
        let zeta = self.law.zeta(tier);
        let q = 2.0 / alpha;
        let f = |z: f64| hyp2f1(1.0, 1.0 - q, 2.0 - q, z);
        let g = k.density * f(-tau)? + j.density * zeta.powf(q - 1.0) * f(-tau / zeta)?;
        let a_k = self.ul_assoc_probability(tier);
        Ok(k.density / (a_k * (k.density + j.density * zeta.powf(q) + 2.0 * tau / (alpha - 2.0) * g)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::hyp2f1_deriv;

    #[test]
    fn psi_matches_direct_leibniz_expansion() {
        let alpha: f64 = 3.5;
        let (a, b, c) = (1.0, 1.0 - 2.0 / alpha, 2.0 - 2.0 / alpha);
        for &t in &[0.2f64, 1.7, 9.0] {
            let p = psi(t, alpha, 5).unwrap();
            for k in 1..=5usize {
                let sign_k = if k % 2 == 0 { 1.0 } else { -1.0 };
                let direct = t.powi(k as i32)
                    * (t * sign_k * hyp2f1_deriv(a, b, c, k, -t).unwrap()
                        - sign_k * k as f64 * hyp2f1_deriv(a, b, c, k - 1, -t).unwrap());
                assert!((p[k] - direct).abs() < 1e-11 * direct.abs(), "t={t} k={k}");
            }
        }
    }

    #[test]
    fn ids_round_trip() {
        for c in Corollary::ALL {
            assert_eq!(Corollary::from_id(c.id()), Some(c));
        }
        assert_eq!(Corollary::from_id(0), None);
        assert_eq!(Corollary::from_id(8), None);
    }
}
