//! Laplace exponent of the aggregate UL interference seen by a tagged BS, and
//! its derivatives in `s`.
//!
//! Derivatives are produced pre-multiplied by `s^k`. In that form every term is
//! bounded, and Faà di Bruno applied to `[f, s f', s^2 f'', ...]` directly yields
//! `s^n d^n/ds^n exp(f)`.

use std::f64::consts::PI;

use crate::model::Tier;
use crate::numerics::{hyp2f1_neg_scaled, integrate_vec, Domain, QuadratureSpec, N_MAX};

use super::distance::ServingDistance;
use super::AnalyticError;

/// Integration limits for the interferer-distance averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LimitMode {
    /// Interferer link distances over `(0, inf)`; each interferer is at least as
    /// far from the tagged BS as its own association rule allows.
    DisplayedInfinite,
    /// Same kernel, interferer link distances truncated at `X_K` (tier K) and
    /// `zeta^((a_J+a_K)/a_J^2) X_K^(a_K^2/a_J^2)` (tier J).
    AppendixFinite,
    /// Interferers lie outside the exclusion disc set by the typical UE
    /// (`u > X_K`, `v > (zeta X_K^a_K)^(1/a_J)`), and each interferer's link
    /// distance is drawn from its law conditioned on not preferring the tagged BS.
    ExclusionConditioned,
}

impl LimitMode {
    pub const ALL: [LimitMode; 3] = [
        LimitMode::DisplayedInfinite,
        LimitMode::AppendixFinite,
        LimitMode::ExclusionConditioned,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LimitMode::DisplayedInfinite => "displayed-infinite",
            LimitMode::AppendixFinite => "appendix-finite",
            LimitMode::ExclusionConditioned => "exclusion-conditioned",
        }
    }

    pub fn from_name(s: &str) -> Option<LimitMode> {
        LimitMode::ALL.into_iter().find(|m| m.name() == s)
    }
}

/// Laplace exponent for a tagged BS of tier K whose scheduled UE sits at `x_k`.
#[derive(Debug, Clone, Copy)]
pub struct LaplaceExponent<'a> {
    pub serving: Tier,
    pub x_k: f64,
    pub mode: LimitMode,
    pub lam_k: f64,
    pub lam_j: f64,
    pub alpha_k: f64,
    pub alpha_j: f64,
    pub eta: f64,
    pub zeta: f64,
    pub own: &'a ServingDistance,
    pub other: &'a ServingDistance,
    pub quad: QuadratureSpec,
}

/// `s^k G_k` where `G_k = int_a^inf d^k/ds^k [s w u^-alpha / (1 + s w u^-alpha)]... u du`
/// written through `w = c a^-alpha`, the interferer's relative gain at the exclusion radius.
fn scaled_g(k: usize, sw: f64, a2: f64, alpha: f64) -> Result<f64, AnalyticError> {
    let q = 2.0 / alpha;
    if k == 0 {
        return Ok(a2 / (alpha - 2.0) * hyp2f1_neg_scaled(1.0, 1.0 - q, 2.0 - q, sw, 1)?);
    }
    let kf = k as f64;
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    let h = hyp2f1_neg_scaled(kf + 1.0, kf - q, kf + 1.0 - q, sw, k as i32)?;
    Ok(sign * fact / (alpha * kf - 2.0) * a2 * h)
}

/// `s^k d^k/ds^k [s w/(1 + s w)]`
fn scaled_rational(k: usize, sw: f64) -> f64 {
    let r = sw / (1.0 + sw);
    if k == 0 {
        return r;
    }
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    sign * fact * r.powi(k as i32) / (1.0 + sw)
}

impl<'a> LaplaceExponent<'a> {
    /// Upper limits of the interferer link-distance integrals, tier K then tier J.
    fn link_limits(&self) -> (f64, f64) {
        match self.mode {
            LimitMode::AppendixFinite => {
                let aj2 = self.alpha_j * self.alpha_j;
                let lj = self.zeta.powf((self.alpha_j + self.alpha_k) / aj2)
                    * self.x_k.powf(self.alpha_k * self.alpha_k / aj2);
                (self.x_k.min(self.own.cutoff), lj.min(self.other.cutoff))
            }
            _ => (self.own.cutoff, self.other.cutoff),
        }
    }

    /// `[f(s), s f'(s), ..., s^n f^(n)(s)]`
    pub fn scaled_derivs(&self, s: f64, n: usize) -> Result<Vec<f64>, AnalyticError> {
        if n > N_MAX {
            return Err(AnalyticError::OrderTooHigh { n, max: N_MAX });
        }
        if !(s >= 0.0 && s.is_finite()) {
            return Err(AnalyticError::InvalidArgument("s must be finite and non-negative"));
        }
        if s == 0.0 {
            return Ok(vec![0.0; n + 1]);
        }
        match self.mode {
            LimitMode::ExclusionConditioned => self.conditioned(s, n),
            _ => self.kernel_average(s, n),
        }
    }

    /// `[f(s), f'(s), ..., f^(n)(s)]`; for `s = 0` only `f(0) = 0` is meaningful and
    /// higher entries are reported as zero.
    pub fn derivs(&self, s: f64, n: usize) -> Result<Vec<f64>, AnalyticError> {
        let mut v = self.scaled_derivs(s, n)?;
        if s > 0.0 {
            for (k, x) in v.iter_mut().enumerate().skip(1) {
                *x /= s.powi(k as i32);
            }
        }
        Ok(v)
    }

    pub fn value(&self, s: f64) -> Result<f64, AnalyticError> {
        Ok(self.scaled_derivs(s, 0)?[0])
    }

    fn kernel_average(&self, s: f64, n: usize) -> Result<Vec<f64>, AnalyticError> {
        let (lim_k, lim_j) = self.link_limits();
        let (ak, aj, eta, zeta) = (self.alpha_k, self.alpha_j, self.eta, self.zeta);
        let dim = n + 1;
        let mut out = vec![0.0; dim];
        let mut fail = None;

        let own = integrate_vec(
            dim,
            |y, v: &mut [f64]| {
                let pdf = self.own.pdf(y);
                // interferer of the same tier: exclusion radius a = y, w = y^(-a_K (1-eta))
                let sw = s * y.powf(-ak * (1.0 - eta));
                for (k, slot) in v.iter_mut().enumerate() {
                    *slot = match scaled_g(k, sw, y * y, ak) {
                        Ok(g) => g * pdf,
                        Err(e) => {
                            fail.get_or_insert(e);
                            0.0
                        }
                    };
                }
            },
            Domain::Finite(0.0, lim_k),
            &self.quad,
        )?;
        if let Some(e) = fail.take() {
            return Err(e);
        }
        let other = integrate_vec(
            dim,
            |y, v: &mut [f64]| {
                let pdf = self.other.pdf(y);
                // a = (y^a_J / zeta)^(1/a_K), w = zeta y^(-a_J (1-eta))
                let a2 = (y.powf(aj) / zeta).powf(2.0 / ak);
                let sw = s * zeta * y.powf(-aj * (1.0 - eta));
                for (k, slot) in v.iter_mut().enumerate() {
                    *slot = match scaled_g(k, sw, a2, ak) {
                        Ok(g) => g * pdf,
                        Err(e) => {
                            fail.get_or_insert(e);
                            0.0
                        }
                    };
                }
            },
            Domain::Finite(0.0, lim_j),
            &self.quad,
        )?;
        if let Some(e) = fail {
            return Err(e);
        }
        for k in 0..dim {
            out[k] = -2.0 * PI * (self.lam_k * own.value[k] + self.lam_j * other.value[k]);
        }
        Ok(out)
    }

    fn conditioned(&self, s: f64, n: usize) -> Result<Vec<f64>, AnalyticError> {
        let (ak, aj, eta, zeta) = (self.alpha_k, self.alpha_j, self.eta, self.zeta);
        let dim = n + 1;
        let mut fail = None;

        // One tier's contribution: outer over the interferer-to-tagged distance r,
        // inner over the interferer's own link distance y <= ybar(r).
        let mut tier_term = |law: &ServingDistance,
                             r_min: f64,
                             a_link: f64,
                             ybar: &dyn Fn(f64) -> f64|
         -> Result<Vec<f64>, AnalyticError> {
            let scale = r_min.max(law.scale());
            let quad_outer = self.quad.with_scale(scale);
            let mut inner_buf = vec![0.0; dim];
            let est = integrate_vec(
                dim,
                |r, v: &mut [f64]| {
                    let path = r.powf(-ak);
                    if eta == 0.0 {
                        for (k, slot) in v.iter_mut().enumerate() {
                            *slot = r * scaled_rational(k, s * path);
                        }
                        return;
                    }
                    let hi = ybar(r).min(law.cutoff);
                    let inner = integrate_vec(
                        dim + 1,
                        |y, w: &mut [f64]| {
                            let pdf = law.pdf(y);
                            let sw = s * y.powf(a_link * eta) * path;
                            w[0] = pdf;
                            for k in 0..dim {
                                w[k + 1] = pdf * scaled_rational(k, sw);
                            }
                        },
                        Domain::Finite(0.0, hi),
                        &self.quad,
                    );
                    match inner {
                        Ok(e) if e.value[0] > 0.0 => {
                            for k in 0..dim {
                                inner_buf[k] = e.value[k + 1] / e.value[0];
                            }
                        }
                        Ok(_) => inner_buf.iter_mut().for_each(|x| *x = 0.0),
                        Err(e) => {
                            fail.get_or_insert(AnalyticError::from(e));
                            inner_buf.iter_mut().for_each(|x| *x = 0.0);
                        }
                    }
                    for k in 0..dim {
                        v[k] = r * inner_buf[k];
                    }
                },
                Domain::UpperInfinite(r_min),
                &quad_outer,
            )?;
            Ok(est.value)
        };

        let own = tier_term(self.own, self.x_k, ak, &|u| u)?;
        let l_j = (zeta * self.x_k.powf(ak)).powf(1.0 / aj);
        let other = tier_term(self.other, l_j, aj, &|v| (zeta * v.powf(ak)).powf(1.0 / aj))?;
        if let Some(e) = fail {
            return Err(e);
        }
        Ok((0..dim)
            .map(|k| -2.0 * PI * (self.lam_k * own[k] + self.lam_j * other[k]))
            .collect())
    }
}
