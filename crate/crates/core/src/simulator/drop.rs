use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, Poisson, StandardNormal};

use crate::model::{resolve_law, AssociationLaw, NetworkConfig, Tier};

use super::geometry::{Grid, Point};
use super::{DropResult, FadingMode, SimError, SimOptions, UePlacement};

/// Tries before giving up on drawing a deployment with both tiers non-empty.
const MAX_RETRIES: u32 = 64;
/// Mean number of sparse UE candidates per BS in the first scheduling pass.
const CANDIDATES_PER_BS: f64 = 4.0;

/// One deployment of base stations (and, with explicit placement, UEs).
#[derive(Debug, Clone)]
pub struct Realization {
    pub half_width: f64,
    pub macro_bs: Vec<Point>,
    pub femto_bs: Vec<Point>,
    /// Empty under typical-UE placement, where UEs are sampled per cell on demand.
    pub ues: Vec<Point>,
    pub seed: u64,
    pub drop: u64,
    /// Deployments discarded because a tier came out empty.
    pub retries: u32,
    rng: ChaCha8Rng,
}

impl Realization {
    pub fn bs(&self, t: Tier) -> &[Point] {
        match t {
            Tier::Macro => &self.macro_bs,
            Tier::Femto => &self.femto_bs,
        }
    }
}

fn uniform_square(rng: &mut ChaCha8Rng, h: f64) -> Point {
    Point::new(rng.random_range(-h..h), rng.random_range(-h..h))
}

fn poisson(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|d| d.sample(rng) as u64).unwrap_or(0)
}

fn scatter(rng: &mut ChaCha8Rng, density: f64, h: f64) -> Vec<Point> {
    let n = poisson(rng, density * 4.0 * h * h);
    (0..n).map(|_| uniform_square(rng, h)).collect()
}

/// Draws a deployment on `[-h, h]^2`; deterministic in `(seed, drop)`.
pub fn realize(cfg: &NetworkConfig, opts: &SimOptions, seed: u64, drop: u64) -> Result<Realization, SimError> {
    let h = opts.half_width_km;
    for t in Tier::BOTH {
        let expected = cfg.tier(t).density * 4.0 * h * h;
        if expected < 50.0 {
            return Err(SimError::WindowTooSmall { tier: t, expected });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(drop);
    let mut retries = 0;
    loop {
        let macro_bs = scatter(&mut rng, cfg.macro_tier.density, h);
        let femto_bs = scatter(&mut rng, cfg.femto_tier.density, h);
        if macro_bs.is_empty() || femto_bs.is_empty() {
            retries += 1;
            if retries > MAX_RETRIES {
                return Err(SimError::EmptyTier { retries });
            }
            continue;
        }
        let ues = match opts.placement {
            UePlacement::Typical => Vec::new(),
            UePlacement::Explicit => scatter(&mut rng, cfg.ue_density, h),
        };
        return Ok(Realization {
            half_width: h,
            macro_bs,
            femto_bs,
            ues,
            seed,
            drop,
            retries,
            rng,
        });
    }
}

/// Spatial view of a realization used while resolving associations.
struct Scene<'a> {
    cfg: &'a NetworkConfig,
    law: AssociationLaw,
    half: f64,
    grids: [Grid; 2],
}

impl Scene<'_> {
    fn nearest(&self, t: Tier, z: Point) -> (usize, f64) {
        self.grids[t.index()].nearest(z).expect("tiers are non-empty")
    }

    /// Whether a UE at `z` is served in the UL by BS `i` of tier `t`.
    fn in_ul_cell(&self, t: Tier, i: usize, z: Point) -> bool {
        if z.x.abs() >= self.half || z.y.abs() >= self.half {
            return false;
        }
        let g = &self.grids[t.index()];
        let d = z.dist(g.points()[i]);
        if g.any_closer(z, d, i) {
            return false;
        }
        let o = t.other();
        // the other tier only matters inside the radius where its weight could win
        let (wt, wo) = (self.law.ul_weight[t.index()], self.law.ul_weight[o.index()]);
        let (at, ao) = (self.law.alpha[t.index()], self.law.alpha[o.index()]);
        let reach = (wo / wt * d.powf(at)).powf(1.0 / ao) * (1.0 + 1e-9);
        match self.grids[o.index()].nearest_within(z, reach) {
            None => true,
            Some((_, d_o)) => {
                let (x_m, x_f) = if t == Tier::Macro { (d, d_o) } else { (d_o, d) };
                self.law.ul_tier(x_m, x_f) == t
            }
        }
    }

    /// Uniform point of the UL cell of BS `i` (tier `t`) among a Poisson number
    /// (intensity `lam`) of UE candidates in the disc of radius `bound`, or
    /// `None` when none falls in the cell.
    fn schedule(&self, rng: &mut ChaCha8Rng, t: Tier, i: usize, lam: f64) -> Option<Point> {
        let (c, bound) = self.proposal(t, i);
        let m = poisson(rng, lam * std::f64::consts::PI * bound * bound);
        for _ in 0..m {
            let z = in_disc(rng, c, bound);
            if self.in_ul_cell(t, i, z) {
                return Some(z);
            }
        }
        None
    }

    /// Scheduled UE of every BS except `skip`.
    ///
    /// The UE process is split into two independent thinnings. A sparse one is
    /// drawn over the whole window and associated in one pass; a cell that
    /// catches at least one of its points picks one uniformly. Cells left empty
    /// fall back to rejection sampling from the remaining intensity. Either way
    /// the pick is uniform over the cell and the cell is silent with
    /// probability `exp(-lambda_U |cell|)`.
    fn schedule_all(&self, rng: &mut ChaCha8Rng, skip: (Tier, usize)) -> [Vec<Option<Point>>; 2] {
        let n_bs = [self.grids[0].len(), self.grids[1].len()];
        let area = 4.0 * self.half * self.half;
        let lam_c = (CANDIDATES_PER_BS * (n_bs[0] + n_bs[1]) as f64 / area).min(self.cfg.ue_density);
        let mut out = [vec![None; n_bs[0]], vec![None; n_bs[1]]];
        let mut seen = [vec![0u32; n_bs[0]], vec![0u32; n_bs[1]]];
        for _ in 0..poisson(rng, lam_c * area) {
            let z = uniform_square(rng, self.half);
            let (im, xm) = self.nearest(Tier::Macro, z);
            let (i_f, xf) = self.nearest(Tier::Femto, z);
            let ul = self.law.ul_tier(xm, xf);
            let bs = if ul == Tier::Macro { im } else { i_f };
            let c = &mut seen[ul.index()][bs];
            *c += 1;
            if rng.random_range(0..*c) == 0 {
                out[ul.index()][bs] = Some(z);
            }
        }
        let rest = self.cfg.ue_density - lam_c;
        if rest > 0.0 {
            for t in Tier::BOTH {
                for i in 0..n_bs[t.index()] {
                    if seen[t.index()][i] == 0 && (t, i) != skip {
                        out[t.index()][i] = self.schedule(rng, t, i, rest);
                    }
                }
            }
        }
        out[skip.0.index()][skip.1] = None;
        out
    }

    /// Number of UEs other than the tagged one in the UL cell of BS `i`.
    fn cell_count(&self, rng: &mut ChaCha8Rng, t: Tier, i: usize) -> u32 {
        let (c, bound) = self.proposal(t, i);
        let m = poisson(rng, self.cfg.ue_density * std::f64::consts::PI * bound * bound);
        (0..m).filter(|_| self.in_ul_cell(t, i, in_disc(rng, c, bound))).count() as u32
    }

    /// A disc containing the UL cell of BS `i`.
    ///
    /// Starts from the same-tier Voronoi bound. With a common path-loss
    /// exponent and a UL weight below the other tier's, the cell also lies in
    /// the Apollonius disc `|z - b| <= c |z - f|` of the nearest other-tier BS
    /// `f`; the smaller disc wins.
    fn proposal(&self, t: Tier, i: usize) -> (Point, f64) {
        let p = self.grids[t.index()].points()[i];
        let voronoi = (p, self.grids[t.index()].cell_bound(i));
        let o = t.other();
        let (at, ao) = (self.law.alpha[t.index()], self.law.alpha[o.index()]);
        let ratio = self.law.ul_weight[t.index()] / self.law.ul_weight[o.index()];
        if at != ao || ratio >= 1.0 {
            return voronoi;
        }
        let c = ratio.powf(1.0 / at);
        let (j, d) = self.nearest(o, p);
        let f = self.grids[o.index()].points()[j];
        let k = c * c / (1.0 - c * c);
        let centre = Point::new(p.x + (p.x - f.x) * k, p.y + (p.y - f.y) * k);
        let radius = c * d / (1.0 - c * c) * (1.0 + 1e-9);
        if radius < voronoi.1 {
            (centre, radius)
        } else {
            voronoi
        }
    }
}

fn in_disc(rng: &mut ChaCha8Rng, c: Point, r: f64) -> Point {
    let rad = r * rng.random::<f64>().sqrt();
    let th = std::f64::consts::TAU * rng.random::<f64>();
    Point::new(c.x + rad * th.cos(), c.y + rad * th.sin())
}

/// Receive-side fading for one drop.
struct Fading {
    mode: FadingMode,
    /// MRC combiner of the tagged link (vector mode only), split re/im.
    w: Vec<(f64, f64)>,
}

impl Fading {
    fn signal(mode: FadingMode, n: u32, rng: &mut ChaCha8Rng) -> (f64, Fading) {
        match mode {
            FadingMode::Distribution => {
                let g = Gamma::new(n as f64, 1.0).expect("positive shape").sample(rng);
                (g, Fading { mode, w: Vec::new() })
            }
            FadingMode::Vectors => {
                let h = cn_vector(rng, n);
                let norm2: f64 = h.iter().map(|(a, b)| a * a + b * b).sum();
                let s = norm2.sqrt();
                let w = h.iter().map(|(a, b)| (a / s, b / s)).collect();
                (norm2, Fading { mode, w })
            }
        }
    }

    fn interference(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self.mode {
            FadingMode::Distribution => Exp1.sample(rng),
            FadingMode::Vectors => {
                let g = cn_vector(rng, self.w.len() as u32);
                // |w^H g|^2
                let (mut re, mut im) = (0.0, 0.0);
                for (&(wr, wi), (gr, gi)) in self.w.iter().zip(g) {
                    re += wr * gr + wi * gi;
                    im += wr * gi - wi * gr;
                }
                re * re + im * im
            }
        }
    }
}

/// `n` independent CN(0, 1) entries.
fn cn_vector(rng: &mut ChaCha8Rng, n: u32) -> Vec<(f64, f64)> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (0..n)
        .map(|_| {
            let a: f64 = StandardNormal.sample(rng);
            let b: f64 = StandardNormal.sample(rng);
            (a * s, b * s)
        })
        .collect()
}

/// A scheduled UE seen from the tagged BS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interferer {
    /// Fading power gain after the tagged BS's combiner.
    pub gain: f64,
    /// Distance to its own serving BS, which sets its transmit power.
    pub link_distance: f64,
    /// Path-loss exponent of its own serving tier.
    pub link_alpha: f64,
    /// Distance to the tagged BS.
    pub distance: f64,
}

/// `g0 X0^(a_K (eta - 1)) / sum_i g_i X_i^(a_i eta) D_i^(-a_K)`; the common
/// `P_0` cancels.
pub fn tagged_sir(g0: f64, x0: f64, alpha_k: f64, eta: f64, interferers: &[Interferer]) -> f64 {
    let signal = g0 * x0.powf(alpha_k * (eta - 1.0));
    let interference: f64 = interferers
        .iter()
        .map(|i| i.gain * i.link_distance.powf(i.link_alpha * eta) * i.distance.powf(-alpha_k))
        .sum();
    if interference > 0.0 {
        signal / interference
    } else {
        f64::INFINITY
    }
}

/// Tagged UE of a drop: position, serving tier and BS, DL tier, and the
/// number of UEs sharing its BS when already known.
struct Tagged {
    ue: Point,
    dl: Tier,
    ul: Tier,
    bs: usize,
    load: Option<u32>,
}

/// Resolves association, scheduling and fading for one realization.
pub fn run_drop(r: &Realization, cfg: &NetworkConfig, opts: &SimOptions) -> Result<DropResult, SimError> {
    let law = resolve_law(cfg)?;
    let mut rng = r.rng.clone();
    let scene = Scene {
        cfg,
        law,
        half: r.half_width,
        grids: [
            Grid::new(&r.macro_bs, r.half_width, 1.0),
            Grid::new(&r.femto_bs, r.half_width, 1.0),
        ],
    };
    let mut scheduled: [Vec<Option<Point>>; 2] = [vec![None; r.macro_bs.len()], vec![None; r.femto_bs.len()]];

    let tagged = match opts.placement {
        UePlacement::Typical => {
            let z = Point::ORIGIN;
            let (im, xm) = scene.nearest(Tier::Macro, z);
            let (i_f, xf) = scene.nearest(Tier::Femto, z);
            let ul = law.ul_tier(xm, xf);
            let bs = if ul == Tier::Macro { im } else { i_f };
            Tagged {
                ue: z,
                dl: law.dl_tier(xm, xf),
                ul,
                bs,
                load: None,
            }
        }
        UePlacement::Explicit => {
            if r.ues.is_empty() {
                return Err(SimError::NoUe);
            }
            let mut count: [Vec<u32>; 2] = [vec![0; r.macro_bs.len()], vec![0; r.femto_bs.len()]];
            let mut best = (usize::MAX, f64::INFINITY);
            let mut serving = Vec::with_capacity(r.ues.len());
            for (u, &z) in r.ues.iter().enumerate() {
                let (im, xm) = scene.nearest(Tier::Macro, z);
                let (i_f, xf) = scene.nearest(Tier::Femto, z);
                let ul = law.ul_tier(xm, xf);
                let bs = if ul == Tier::Macro { im } else { i_f };
                let c = &mut count[ul.index()][bs];
                *c += 1;
                // reservoir choice keeps the scheduled UE uniform over the cell
                if rng.random_range(0..*c) == 0 {
                    scheduled[ul.index()][bs] = Some(z);
                }
                let n = z.norm();
                if n < best.1 {
                    best = (u, n);
                }
                serving.push((law.dl_tier(xm, xf), ul, bs));
            }
            let (dl, ul, bs) = serving[best.0];
            let bs_pos = r.bs(ul)[bs];
            let guard = 0.6 * r.half_width;
            if bs_pos.x.abs() > guard || bs_pos.y.abs() > guard {
                return Err(SimError::TaggedNearEdge);
            }
            Tagged {
                ue: r.ues[best.0],
                dl,
                ul,
                bs,
                load: Some(count[ul.index()][bs]),
            }
        }
    };

    let k = tagged.ul;
    let (alpha_k, eta) = (cfg.tier(k).alpha, cfg.eta);
    let bs0 = r.bs(k)[tagged.bs];
    let x0 = tagged.ue.dist(bs0);

    if opts.placement == UePlacement::Typical {
        scheduled = scene.schedule_all(&mut rng, (k, tagged.bs));
    }

    let (gain, fading) = Fading::signal(opts.fading, cfg.tier(k).antennas, &mut rng);
    let mut interferers = Vec::with_capacity(r.macro_bs.len() + r.femto_bs.len());
    for t in Tier::BOTH {
        for (i, ue) in scheduled[t.index()].iter().enumerate() {
            if t == k && i == tagged.bs {
                continue;
            }
            if let Some(u) = ue {
                interferers.push(Interferer {
                    gain: fading.interference(&mut rng),
                    link_distance: u.dist(r.bs(t)[i]),
                    link_alpha: cfg.tier(t).alpha,
                    distance: u.dist(bs0),
                });
            }
        }
    }
    let sir = tagged_sir(gain, x0, alpha_k, eta, &interferers);

    let load = match (tagged.load, opts.track_load) {
        (Some(l), _) => Some(l),
        (None, true) => {
            Some(1 + scene.cell_count(&mut rng, k, tagged.bs))
        }
        (None, false) => None,
    };
    let rate = load.map(|l| cfg.bandwidth_hz / l as f64 * (1.0 + sir).log2());

    Ok(DropResult {
        dl_tier: tagged.dl,
        ul_tier: k,
        serving_distance: x0,
        sir,
        load,
        rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_network_sir() {
        let i = Interferer {
            gain: 1.0,
            link_distance: 0.3,
            link_alpha: 4.0,
            distance: 0.9,
        };
        let sir = tagged_sir(1.0, 0.5, 4.0, 0.0, &[i]);
        assert!((sir - 0.5f64.powf(-4.0) / 0.9f64.powf(-4.0)).abs() < 1e-12 * sir);
    }

    #[test]
    fn full_inversion_removes_serving_distance() {
        let i = Interferer {
            gain: 0.7,
            link_distance: 0.3,
            link_alpha: 3.0,
            distance: 0.9,
        };
        let a = tagged_sir(2.0, 0.1, 3.5, 1.0, &[i]);
        let b = tagged_sir(2.0, 1.7, 3.5, 1.0, &[i]);
        assert!((a - b).abs() < 1e-12 * a);
        assert_eq!(tagged_sir(1.0, 0.4, 4.0, 0.0, &[]), f64::INFINITY);
    }
}
