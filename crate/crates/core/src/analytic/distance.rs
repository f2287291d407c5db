//! Radial kernels `x exp(-pi (lam x^2 + c x^p))` shared by the association
//! probabilities and the serving-distance law.

use std::f64::consts::PI;

use crate::numerics::{integrate, Domain, NumericsError, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialKernel {
    pub lam: f64,
    pub c: f64,
    pub p: f64,
}

impl RadialKernel {
    pub fn ln_value(&self, x: f64) -> f64 {
        x.ln() - PI * (self.lam * x * x + self.c * x.powf(self.p))
    }

    pub fn value(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        x * (-PI * (self.lam * x * x + self.c * x.powf(self.p))).exp()
    }

    /// Maximiser of the kernel; `d/dx ln k` is strictly decreasing so bisection is safe.
    pub fn peak(&self) -> f64 {
        let slope = |x: f64| 1.0 / x - PI * (2.0 * self.lam * x + self.c * self.p * x.powf(self.p - 1.0));
        let (mut lo, mut hi) = (1e-12, 1.0);
        while slope(hi) > 0.0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if slope(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Point beyond the peak where the kernel has fallen to `rel` of its maximum.
    pub fn tail(&self, rel: f64) -> f64 {
        let peak = self.peak();
        let target = self.ln_value(peak) + rel.ln();
        let (mut lo, mut hi) = (peak, 2.0 * peak);
        while self.ln_value(hi) > target {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.ln_value(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-13 * hi {
                break;
            }
        }
        hi
    }

    /// `2 pi lam_norm * int_0^inf k(x) dx`
    pub fn mass(&self, lam_norm: f64, quad: &QuadratureSpec) -> Result<f64, NumericsError> {
        if self.p == 2.0 {
            return Ok(lam_norm / (self.lam + self.c));
        }
        let hi = self.tail(1e-16);
        let e = integrate(|x| self.value(x), Domain::Finite(0.0, hi), quad)?;
        Ok(2.0 * PI * lam_norm * e.value)
    }
}

/// Association integral `2 pi lam_own int x exp(-pi[lam_other U^(2/a_other) x^(2 a_own/a_other) + lam_own x^2]) dx`.
pub fn assoc_integral(
    lam_own: f64,
    lam_other: f64,
    upsilon: f64,
    alpha_own: f64,
    alpha_other: f64,
    quad: &QuadratureSpec,
) -> Result<f64, NumericsError> {
    let k = RadialKernel {
        lam: lam_own,
        c: lam_other * upsilon.powf(2.0 / alpha_other),
        p: 2.0 * alpha_own / alpha_other,
    };
    k.mass(lam_own, quad)
}

/// Same integral evaluated by quadrature even when the closed form applies.
pub fn assoc_integral_quadrature(
    lam_own: f64,
    lam_other: f64,
    upsilon: f64,
    alpha_own: f64,
    alpha_other: f64,
    quad: &QuadratureSpec,
) -> Result<f64, NumericsError> {
    let k = RadialKernel {
        lam: lam_own,
        c: lam_other * upsilon.powf(2.0 / alpha_other),
        p: 2.0 * alpha_own / alpha_other,
    };
    let hi = k.tail(1e-16);
    let e = integrate(|x| k.value(x), Domain::Finite(0.0, hi), quad)?;
    Ok(2.0 * PI * lam_own * e.value)
}

/// Law of the distance between a UE and its UL serving BS of a given tier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServingDistance {
    pub kernel: RadialKernel,
    /// `2 pi lam_K / A_K`
    pub norm: f64,
    /// UL association probability of the tier
    pub assoc: f64,
    /// Kernel has dropped below 1e-12 of its peak beyond this distance.
    pub cutoff: f64,
}

impl ServingDistance {
    pub fn new(
        lam_k: f64,
        lam_j: f64,
        zeta: f64,
        alpha_k: f64,
        alpha_j: f64,
        quad: &QuadratureSpec,
    ) -> Result<Self, NumericsError> {
        let kernel = RadialKernel {
            lam: lam_k,
            c: lam_j * zeta.powf(2.0 / alpha_j),
            p: 2.0 * alpha_k / alpha_j,
        };
        let assoc = kernel.mass(lam_k, quad)?;
        Ok(ServingDistance {
            kernel,
            norm: 2.0 * PI * lam_k / assoc,
            assoc,
            cutoff: kernel.tail(1e-12),
        })
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.norm * self.kernel.value(x)
    }

    pub fn mode(&self) -> f64 {
        self.kernel.peak()
    }

    /// Rough length scale, used to size quadrature maps.
    pub fn scale(&self) -> f64 {
        1.0 / (PI * (self.kernel.lam + self.kernel.c)).sqrt()
    }

    pub fn cdf(&self, x: f64, quad: &QuadratureSpec) -> Result<f64, NumericsError> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        if self.kernel.p == 2.0 {
            return Ok(1.0 - (-PI * (self.kernel.lam + self.kernel.c) * x * x).exp());
        }
        let e = integrate(|t| self.pdf(t), Domain::Finite(0.0, x.min(self.cutoff)), quad)?;
        Ok(e.value.min(1.0))
    }

    /// `E[Y^q]`
    pub fn moment(&self, q: f64, quad: &QuadratureSpec) -> Result<f64, NumericsError> {
        let hi = self.kernel.tail(1e-16);
        let e = integrate(|t| t.powf(q) * self.pdf(t), Domain::Finite(0.0, hi), quad)?;
        Ok(e.value)
    }
}
