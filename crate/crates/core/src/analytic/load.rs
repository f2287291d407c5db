use statrs::function::gamma::ln_gamma;

use crate::model::Tier;

use super::{AnalyticError, Analyzer};

/// Mean-load slope of the linear approximation.
pub const MEAN_LOAD_SLOPE: f64 = 1.28;
/// Shape of the cell-area gamma approximation.
const AREA_SHAPE: f64 = 3.5;
const TAIL_MASS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LoadMode {
    /// Average over the full load distribution.
    Pmf,
    /// Plug in the mean load.
    Mean,
}

impl LoadMode {
    pub fn name(self) -> &'static str {
        match self {
            LoadMode::Pmf => "pmf",
            LoadMode::Mean => "mean",
        }
    }

    pub fn from_name(s: &str) -> Option<LoadMode> {
        match s {
            "pmf" => Some(LoadMode::Pmf),
            "mean" => Some(LoadMode::Mean),
            _ => None,
        }
    }
}

/// Number of UEs sharing the tagged BS, including the tagged UE.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadModel {
    pub tier: Tier,
    /// `lambda_U A_K / lambda_K`, mean number of other UEs per cell.
    pub ratio: f64,
    /// Linear mean-load approximation.
    pub mean_load: f64,
    /// `pmf[i] = P(load = i + 1)`, truncated once the tail mass drops below 1e-8.
    pub pmf: Vec<f64>,
}

impl LoadModel {
    pub fn new(tier: Tier, ratio: f64) -> Result<Self, AnalyticError> {
        if !(ratio >= 0.0 && ratio.is_finite()) {
            return Err(AnalyticError::InvalidArgument("load ratio must be finite and non-negative"));
        }
        let mut pmf = Vec::new();
        if ratio == 0.0 {
            pmf.push(1.0);
        } else {
            // P(n) = Gamma(n-1+a) / ((n-1)! Gamma(a)) * p^(n-1) (1-p)^a, p = c / (a + c)
            let a = AREA_SHAPE;
            let ln_p = (ratio / (a + ratio)).ln();
            let ln_q = (a / (a + ratio)).ln();
            let mut acc = 0.0;
            let mut k = 0usize;
            loop {
                let kf = k as f64;
                let ln_term = ln_gamma(kf + a) - ln_gamma(kf + 1.0) - ln_gamma(a) + kf * ln_p + a * ln_q;
                let term = ln_term.exp();
                pmf.push(term);
                acc += term;
                k += 1;
                if 1.0 - acc < TAIL_MASS && kf > ratio {
                    break;
                }
            }
        }
        Ok(LoadModel {
            tier,
            ratio,
            mean_load: 1.0 + MEAN_LOAD_SLOPE * ratio,
            pmf,
        })
    }

    pub fn n_max(&self) -> usize {
        self.pmf.len()
    }

    pub fn prob(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.pmf.get(n - 1).copied().unwrap_or(0.0)
        }
    }

    /// Mean of the tabulated distribution.
    pub fn pmf_mean(&self) -> f64 {
        self.pmf.iter().enumerate().map(|(i, p)| (i + 1) as f64 * p).sum()
    }
}

/// Monotone cubic Hermite interpolant.
#[derive(Debug, Clone)]
struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            for i in 1..n - 1 {
                if delta[i - 1] * delta[i] > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
                }
            }
            d[0] = Self::end_slope(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = Self::end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Pchip { x, y, d }
    }

    fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
        let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s.signum() != d0.signum() {
            0.0
        } else if d0.signum() != d1.signum() && s.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            s
        }
    }

    fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let t = t.clamp(self.x[0], self.x[n - 1]);
        let i = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            p => (p - 1).min(n - 2),
        };
        let h = self.x[i + 1] - self.x[i];
        let u = (t - self.x[i]) / h;
        let (h00, h10) = ((1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u), u * (1.0 - u) * (1.0 - u));
        let (h01, h11) = (u * u * (3.0 - 2.0 * u), u * u * (u - 1.0));
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }
}

/// Node spacing in `ln tau` for the cached coverage curve.
const TABLE_STEP: f64 = 0.04;
/// Coverage below this is treated as zero for larger thresholds.
const TABLE_FLOOR: f64 = 1e-10;

impl Analyzer {
    pub fn load_pmf(&self, tier: Tier) -> Result<LoadModel, AnalyticError> {
        let ratio = self.cfg.ue_density * self.ul_assoc_probability(tier) / self.cfg.tier(tier).density;
        LoadModel::new(tier, ratio)
    }

    pub fn rate_coverage(&self, tier: Tier, rho: f64, mode: LoadMode) -> Result<f64, AnalyticError> {
        Ok(self.rate_coverage_curve(tier, &[rho], mode)?[0])
    }

    /// Tier rate coverage at each threshold in `rhos` (bits/s).
    pub fn rate_coverage_curve(&self, tier: Tier, rhos: &[f64], mode: LoadMode) -> Result<Vec<f64>, AnalyticError> {
        let w = self.cfg.bandwidth_hz;
        if !(w > 0.0) {
            return Err(AnalyticError::InvalidArgument("bandwidth must be positive"));
        }
        if rhos.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(AnalyticError::InvalidArgument("rate threshold must be positive and finite"));
        }
        let load = self.load_pmf(tier)?;
        let tau = |rho: f64, n: f64| (rho * n / w * std::f64::consts::LN_2).exp_m1();
        match mode {
            LoadMode::Mean => rhos
                .iter()
                .map(|&r| self.sir_coverage(tier, tau(r, load.mean_load)))
                .collect(),
            LoadMode::Pmf => {
                let lo = rhos.iter().fold(f64::INFINITY, |m, &r| m.min(tau(r, 1.0)));
                let hi = rhos.iter().fold(0.0f64, |m, &r| m.max(tau(r, load.n_max() as f64)));
                let curve = self.coverage_table(tier, lo, hi)?;
                Ok(rhos
                    .iter()
                    .map(|&r| {
                        let mut acc = 0.0;
                        for (i, p) in load.pmf.iter().enumerate() {
                            let t = tau(r, (i + 1) as f64);
                            if t > curve.1 {
                                break;
                            }
                            acc += p * curve.0.eval(t.ln()).clamp(0.0, 1.0);
                        }
                        acc.clamp(0.0, 1.0)
                    })
                    .collect())
            }
        }
    }

    /// Interpolant of the tier coverage in `ln tau` on `[lo, hi]`, plus the
    /// threshold above which coverage is negligible.
    fn coverage_table(&self, tier: Tier, lo: f64, hi: f64) -> Result<(Pchip, f64), AnalyticError> {
        // thresholds past 1e100 are never reached before the coverage floor
        let (a, b) = (lo.ln(), hi.ln().min(230.0).max(lo.ln() + TABLE_STEP));
        let n = (((b - a) / TABLE_STEP).ceil() as usize).max(1);
        let mut xs = Vec::with_capacity(n + 1);
        let mut ys = Vec::with_capacity(n + 1);
        let mut cutoff = f64::INFINITY;
        for i in 0..=n {
            let x = a + (b - a) * i as f64 / n as f64;
            let c = self.sir_coverage(tier, x.exp())?;
            xs.push(x);
            ys.push(c);
            if c < TABLE_FLOOR && xs.len() >= 2 {
                cutoff = x.exp();
                break;
            }
        }
        if xs.len() == 1 {
            xs.push(a + TABLE_STEP);
            ys.push(self.sir_coverage(tier, xs[1].exp())?);
        }
        Ok((Pchip::new(xs, ys), cutoff))
    }

    /// `A_M R_M + A_F R_F`
    pub fn network_rate_coverage(&self, rho: f64, mode: LoadMode) -> Result<f64, AnalyticError> {
        Ok(self.network_rate_coverage_curve(&[rho], mode)?[0])
    }

    pub fn network_rate_coverage_curve(&self, rhos: &[f64], mode: LoadMode) -> Result<Vec<f64>, AnalyticError> {
        let mut out = vec![0.0; rhos.len()];
        for t in Tier::BOTH {
            let a = self.ul_assoc_probability(t);
            if a > 0.0 {
                for (o, r) in out.iter_mut().zip(self.rate_coverage_curve(t, rhos, mode)?) {
                    *o += a * r;
                }
            }
        }
        Ok(out)
    }
}
