//! Monte Carlo engine: Poisson deployments on a square window, weighted
//! nearest-BS association, one scheduled UE per BS, MRC receive fading.

mod drop;
mod geometry;

pub use drop::{realize, run_drop, tagged_sir, Interferer, Realization};
pub use geometry::{Grid, Point};

use rayon::prelude::*;
use thiserror::Error;

use crate::analytic::{CoverageCurve, Source};
use crate::model::{AssociationCase, ModelError, NetworkConfig, Tier};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("window holds only {expected:.1} expected {} BSs; need at least 50", tier.name())]
    WindowTooSmall { tier: Tier, expected: f64 },
    #[error("a tier stayed empty after {retries} redraws")]
    EmptyTier { retries: u32 },
    #[error("no UE fell in the window")]
    NoUe,
    #[error("tagged BS lies in the border guard region")]
    TaggedNearEdge,
    #[error("{0}")]
    InvalidArgument(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FadingMode {
    /// Draw `Gamma(N, 1)` and `Exp(1)` gains directly.
    Distribution,
    /// Draw complex Gaussian channel vectors and project on the MRC combiner.
    Vectors,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UePlacement {
    /// Tagged UE at the window centre; each other BS's scheduled UE is sampled
    /// directly inside its UL cell.
    Typical,
    /// Every UE of the window is drawn and associated; the tagged UE is the one
    /// nearest the centre, forced to be scheduled.
    Explicit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    /// Half the side of the square window, km.
    pub half_width_km: f64,
    pub n_drops: u64,
    pub seed: u64,
    pub fading: FadingMode,
    pub placement: UePlacement,
    /// Count the tagged cell's UEs (needed for rate) under typical placement.
    pub track_load: bool,
    /// SIR thresholds, linear.
    pub sir_thresholds: Vec<f64>,
    /// Rate thresholds, bits/s.
    pub rate_thresholds: Vec<f64>,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            half_width_km: 10.0,
            n_drops: 100_000,
            seed: 1,
            fading: FadingMode::Distribution,
            placement: UePlacement::Typical,
            track_load: false,
            sir_thresholds: Vec::new(),
            rate_thresholds: Vec::new(),
        }
    }
}

/// Outcome of one drop for the tagged UE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DropResult {
    pub dl_tier: Tier,
    pub ul_tier: Tier,
    /// UL serving distance, km.
    pub serving_distance: f64,
    pub sir: f64,
    pub load: Option<u32>,
    /// Bits/s.
    pub rate: Option<f64>,
}

impl DropResult {
    /// `None` for the femto-DL/macro-UL split.
    pub fn case(&self) -> Option<AssociationCase> {
        match (self.dl_tier, self.ul_tier) {
            (Tier::Macro, Tier::Macro) => Some(AssociationCase::MacroBoth),
            (Tier::Macro, Tier::Femto) => Some(AssociationCase::MacroDlFemtoUl),
            (Tier::Femto, Tier::Femto) => Some(AssociationCase::FemtoBoth),
            (Tier::Femto, Tier::Macro) => None,
        }
    }
}

/// 95% Wilson score interval for `k` successes out of `n`.
pub fn wilson(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let (nf, p) = (n as f64, k as f64 / n as f64);
    let denom = 1.0 + z * z / nf;
    let centre = (p + z * z / (2.0 * nf)) / denom;
    let half = z / denom * (p * (1.0 - p) / nf + z * z / (4.0 * nf * nf)).sqrt();
    // rounding can leave the interval a hair short of p at the extremes
    ((centre - half).clamp(0.0, p), (centre + half).clamp(p, 1.0))
}

/// Integer tallies; merging is associative and commutative.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Tally {
    drops: u64,
    /// MacroBoth, MacroDlFemtoUl, FemtoBoth, femto-DL/macro-UL
    cases: [u64; 4],
    tier_drops: [u64; 2],
    sir_hits: Vec<u64>,
    tier_sir_hits: [Vec<u64>; 2],
    rate_hits: Vec<u64>,
    skipped: u64,
}

impl Tally {
    fn new(nt: usize, nr: usize) -> Self {
        Tally {
            drops: 0,
            cases: [0; 4],
            tier_drops: [0; 2],
            sir_hits: vec![0; nt],
            tier_sir_hits: [vec![0; nt], vec![0; nt]],
            rate_hits: vec![0; nr],
            skipped: 0,
        }
    }

    fn add(&mut self, r: &DropResult, opts: &SimOptions) {
        self.drops += 1;
        self.cases[r.case().map_or(3, |c| c.index())] += 1;
        let t = r.ul_tier.index();
        self.tier_drops[t] += 1;
        for (i, &tau) in opts.sir_thresholds.iter().enumerate() {
            if r.sir > tau {
                self.sir_hits[i] += 1;
                self.tier_sir_hits[t][i] += 1;
            }
        }
        if let Some(rate) = r.rate {
            for (i, &rho) in opts.rate_thresholds.iter().enumerate() {
                if rate > rho {
                    self.rate_hits[i] += 1;
                }
            }
        }
    }

    fn merge(mut self, o: Tally) -> Tally {
        self.drops += o.drops;
        self.skipped += o.skipped;
        for i in 0..4 {
            self.cases[i] += o.cases[i];
        }
        for t in 0..2 {
            self.tier_drops[t] += o.tier_drops[t];
            for (a, b) in self.tier_sir_hits[t].iter_mut().zip(&o.tier_sir_hits[t]) {
                *a += b;
            }
        }
        for (a, b) in self.sir_hits.iter_mut().zip(&o.sir_hits) {
            *a += b;
        }
        for (a, b) in self.rate_hits.iter_mut().zip(&o.rate_hits) {
            *a += b;
        }
        self
    }
}

/// Empirical probability with its 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Proportion {
    pub hits: u64,
    pub trials: u64,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Proportion {
    pub fn new(hits: u64, trials: u64) -> Self {
        let (lower, upper) = wilson(hits, trials);
        let value = if trials == 0 { f64::NAN } else { hits as f64 / trials as f64 };
        Proportion {
            hits,
            trials,
            value,
            lower,
            upper,
        }
    }

    /// Largest distance from the point estimate to an interval end.
    pub fn half_width(&self) -> f64 {
        (self.value - self.lower).max(self.upper - self.value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimEstimate {
    /// Network SIR coverage; thresholds reported in dB.
    pub sir: CoverageCurve,
    /// Coverage conditioned on the UL serving tier.
    pub tier_sir: [Vec<Proportion>; 2],
    pub sir_points: Vec<Proportion>,
    /// Association case frequencies.
    pub cases: [Proportion; 3],
    /// Femto-DL/macro-UL frequency (only non-zero with macro-leaning bias).
    pub reverse_split: Proportion,
    pub tier_share: [Proportion; 2],
    pub rate: Vec<Proportion>,
    /// Drops that produced a result.
    pub drops: u64,
    /// Drops discarded because the tagged BS fell in the border guard.
    pub skipped: u64,
}

/// Runs `opts.n_drops` independent drops. The result depends only on
/// `(cfg, opts)`, not on how drops are spread over threads.
pub fn estimate(cfg: &NetworkConfig, opts: &SimOptions) -> Result<SimEstimate, SimError> {
    if opts.n_drops == 0 {
        return Err(SimError::InvalidArgument("n_drops must be at least 1"));
    }
    if !(opts.half_width_km > 0.0 && opts.half_width_km.is_finite()) {
        return Err(SimError::InvalidArgument("window half-width must be positive"));
    }
    cfg.validate()?;
    let (nt, nr) = (opts.sir_thresholds.len(), opts.rate_thresholds.len());
    let tally = (0..opts.n_drops)
        .into_par_iter()
        .map(|d| -> Result<Tally, (u64, SimError)> {
            let mut t = Tally::new(nt, nr);
            let r = realize(cfg, opts, opts.seed, d).map_err(|e| (d, e))?;
            match run_drop(&r, cfg, opts) {
                Ok(res) => t.add(&res, opts),
                Err(SimError::TaggedNearEdge) => t.skipped += 1,
                Err(e) => return Err((d, e)),
            }
            Ok(t)
        })
        .reduce(
            || Ok(Tally::new(nt, nr)),
            |a, b| match (a, b) {
                (Ok(a), Ok(b)) => Ok(a.merge(b)),
                // report the lowest failing drop so errors are reproducible too
                (Err(a), Err(b)) => Err(if a.0 <= b.0 { a } else { b }),
                (Err(e), _) | (_, Err(e)) => Err(e),
            },
        )
        .map_err(|(_, e)| e)?;

    let n = tally.drops;
    let sir_points: Vec<Proportion> = tally.sir_hits.iter().map(|&k| Proportion::new(k, n)).collect();
    let tier_sir = [0, 1].map(|t| {
        tally.tier_sir_hits[t]
            .iter()
            .map(|&k| Proportion::new(k, tally.tier_drops[t]))
            .collect()
    });
    Ok(SimEstimate {
        sir: CoverageCurve {
            thresholds_db: opts.sir_thresholds.iter().map(|t| 10.0 * t.log10()).collect(),
            values: sir_points.iter().map(|p| p.value).collect(),
            half_widths: sir_points.iter().map(|p| p.half_width()).collect(),
            source: Source::MonteCarlo,
        },
        tier_sir,
        sir_points,
        cases: [0, 1, 2].map(|c| Proportion::new(tally.cases[c], n)),
        reverse_split: Proportion::new(tally.cases[3], n),
        tier_share: [0, 1].map(|t| Proportion::new(tally.tier_drops[t], n)),
        rate: tally.rate_hits.iter().map(|&k| Proportion::new(k, n)).collect(),
        drops: n,
        skipped: tally.skipped,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssociationEstimate {
    pub cases: [Proportion; 3],
    pub reverse_split: Proportion,
    pub drops: u64,
}

/// Association frequencies of the tagged UE only; skips scheduling and fading.
pub fn estimate_association(cfg: &NetworkConfig, opts: &SimOptions) -> Result<AssociationEstimate, SimError> {
    if opts.n_drops == 0 {
        return Err(SimError::InvalidArgument("n_drops must be at least 1"));
    }
    let law = crate::model::resolve_law(cfg)?;
    let counts = (0..opts.n_drops)
        .into_par_iter()
        .map(|d| -> Result<[u64; 4], SimError> {
            let r = realize(cfg, opts, opts.seed, d)?;
            let near = |pts: &[Point]| pts.iter().map(|p| p.norm()).fold(f64::INFINITY, f64::min);
            let (xm, xf) = (near(&r.macro_bs), near(&r.femto_bs));
            let res = DropResult {
                dl_tier: law.dl_tier(xm, xf),
                ul_tier: law.ul_tier(xm, xf),
                serving_distance: 0.0,
                sir: 0.0,
                load: None,
                rate: None,
            };
            let mut c = [0u64; 4];
            c[res.case().map_or(3, |c| c.index())] = 1;
            Ok(c)
        })
        .try_reduce(|| [0u64; 4], |a, b| Ok([a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]))?;
    let n = opts.n_drops;
    Ok(AssociationEstimate {
        cases: [0, 1, 2].map(|c| Proportion::new(counts[c], n)),
        reverse_split: Proportion::new(counts[3], n),
        drops: n,
    })
}
