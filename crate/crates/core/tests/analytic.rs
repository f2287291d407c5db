use hetnet_core::analytic::*;
use hetnet_core::model::*;
use hetnet_core::numerics::{faa_di_bruno_exp, integrate, Domain, QuadratureSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[allow(clippy::too_many_arguments)]
fn net(lm: f64, lf: f64, nm: u32, nf: u32, bias_db: f64, am: f64, af: f64, eta: f64) -> NetworkConfig {
    let m = TierConfig::new(lm, 43.0, nm, 1.0, am).unwrap();
    let f = TierConfig::new(lf, 20.0, nf, db_to_linear(bias_db), af).unwrap();
    NetworkConfig::new(m, f, 3000.0, -100.0, eta, 1e7, AssociationMode::Dude).unwrap()
}

fn analyzer(cfg: &NetworkConfig, mode: LimitMode) -> Analyzer {
    Analyzer::with_options(cfg, AnalyticOptions::default().with_mode(mode)).unwrap()
}

const TAUS_DB: [f64; 4] = [-5.0, 0.0, 5.0, 10.0];

fn lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[test]
fn half_of_ues_pick_macro_when_antenna_gain_offsets_density() {
    let cfg = net(1.0, 5.0, 25, 1, 0.0, 4.0, 4.0, 0.0);
    let a = Analyzer::new(&cfg).unwrap();
    assert!((a.tier_assoc_probability(Tier::Macro).unwrap() - 0.5).abs() < 1e-6);
    let cfg = net(1.0, 5.0, 5, 1, 0.0, 4.0, 4.0, 0.0);
    let c1 = Analyzer::new(&cfg).unwrap().case_probability(AssociationCase::MacroBoth).unwrap();
    assert!((c1 - 0.30).abs() < 0.01, "{c1}");
}

#[test]
fn case_probabilities_partition_unity_on_both_branches() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut branches = [0; 2];
    for _ in 0..100 {
        let cfg = net(
            rng.random_range(0.2..5.0),
            rng.random_range(0.5..50.0),
            rng.random_range(1..=16),
            rng.random_range(1..=4),
            rng.random_range(-40.0..20.0),
            rng.random_range(2.5..5.0),
            rng.random_range(2.5..5.0),
            rng.random_range(0.0..1.0),
        );
        let a = Analyzer::new(&cfg).unwrap();
        branches[(a.law().branch == BiasBranch::MacroLeaning) as usize] += 1;
        let total: f64 = AssociationCase::ALL.iter().map(|&c| a.case_probability(c).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-8, "{total}");
        let tiers = a.ul_assoc_probability(Tier::Macro) + a.ul_assoc_probability(Tier::Femto);
        assert!((tiers - 1.0).abs() < 1e-8);
    }
    assert!(branches[0] > 0 && branches[1] > 0, "{branches:?}");
}

#[test]
fn siso_balanced_anchor_and_density_invariance() {
    let cfg = net(1.0, 3.0, 1, 1, 0.0, 4.0, 4.0, 0.0);
    let a = Analyzer::new(&cfg).unwrap();
    let v = a.corollary_coverage(Corollary::SisoBalanced, Tier::Macro, 1.0).unwrap();
    assert!((v - 0.560099).abs() < 1e-6, "{v}");
    let mut dense = cfg;
    dense.macro_tier.density *= 10.0;
    dense.femto_tier.density *= 10.0;
    let b = analyzer(&dense, LimitMode::ExclusionConditioned);
    let a = analyzer(&cfg, LimitMode::ExclusionConditioned);
    for db in TAUS_DB {
        for t in Tier::BOTH {
            let (x, y) = (a.sir_coverage(t, lin(db)).unwrap(), b.sir_coverage(t, lin(db)).unwrap());
            assert!((x - y).abs() < 1e-6, "{db} dB {t:?}: {x} vs {y}");
        }
    }
}

fn lattice(cfg: &NetworkConfig, c: Corollary, mode: LimitMode, tiers: &[Tier]) {
    let a = analyzer(cfg, mode);
    for &t in tiers {
        for db in TAUS_DB {
            let general = a.sir_coverage(t, lin(db)).unwrap();
            let special = a.corollary_coverage(c, t, lin(db)).unwrap();
            assert!(
                (general - special).abs() < 1e-6,
                "corollary {} tier {t:?} at {db} dB: general {general} special {special}",
                c.id()
            );
        }
    }
}

#[test]
fn corollaries_agree_with_general_evaluator() {
    use Corollary::*;
    use LimitMode::*;
    let both = [Tier::Macro, Tier::Femto];
    lattice(&net(2.0, 6.0, 3, 2, 3.0, 3.5, 4.0, 0.0), NoPowerControl, ExclusionConditioned, &both);
    lattice(&net(2.0, 6.0, 3, 2, 3.0, 3.5, 4.0, 1.0), FullInversion, DisplayedInfinite, &both);
    lattice(&net(1.0, 4.0, 2, 4, linear_to_db(0.5), 3.5, 3.5, 0.5), BalancedWeights, DisplayedInfinite, &both);
    lattice(&net(2.0, 2.0, 3, 3, 0.0, 3.0, 3.0, 0.3), SymmetricTiers, DisplayedInfinite, &both);
    lattice(&net(1.0, 4.0, 4, 2, linear_to_db(2.0), 4.0, 4.0, 0.0), BalancedNoPowerControl, ExclusionConditioned, &both);
    lattice(&net(1.0, 5.0, 3, 1, 5.0, 3.7, 3.7, 0.0), SingleAntenna, ExclusionConditioned, &[Tier::Femto]);
    lattice(&net(1.0, 5.0, 1, 1, 0.0, 4.0, 4.0, 0.0), SisoBalanced, ExclusionConditioned, &both);
}

#[test]
fn corollary_hypotheses_are_enforced() {
    let a = Analyzer::new(&net(1.0, 5.0, 3, 1, 5.0, 3.7, 4.0, 0.5)).unwrap();
    for c in Corollary::ALL {
        match a.corollary_coverage(c, Tier::Macro, 1.0) {
            Err(AnalyticError::CorollaryHypothesis { id, .. }) => assert_eq!(id, c.id()),
            other => panic!("corollary {} accepted: {other:?}", c.id()),
        }
    }
}

/// `f(s)` straight from its definition as a double integral over the
/// interferer's link distance `y` and its distance `u` to the tagged BS.
fn direct_exponent(a: &Analyzer, tier: Tier, s: f64) -> f64 {
    let cfg = a.config();
    let (k, j) = (cfg.tier(tier), cfg.tier(tier.other()));
    let (ak, aj, eta) = (k.alpha, j.alpha, cfg.eta);
    let zeta = a.law().zeta(tier);
    let q = QuadratureSpec::new(1e-13, 1e-18);
    let term = |law: &ServingDistance, a_link: f64, excl: &dyn Fn(f64) -> f64| {
        integrate(
            |y| {
                let w = s * y.powf(a_link * eta);
                let r0 = excl(y);
                let inner = integrate(
                    |u| {
                        let g = w * u.powf(-ak);
                        u * g / (1.0 + g)
                    },
                    Domain::UpperInfinite(r0),
                    &q.with_scale(r0.max(1e-3)),
                )
                .unwrap()
                .value;
                law.pdf(y) * inner
            },
            Domain::Finite(0.0, law.cutoff),
            &q,
        )
        .unwrap()
        .value
    };
    let own = term(a.serving_distance(tier), ak, &|y| y);
    let other = term(a.serving_distance(tier.other()), aj, &|y| (y.powf(aj) / zeta).powf(1.0 / ak));
    -2.0 * std::f64::consts::PI * (k.density * own + j.density * other)
}

#[test]
fn laplace_derivatives_match_finite_differences() {
    let cfg = net(3.0, 10.0, 4, 2, 0.0, 3.0, 3.0, 0.5);
    let a = analyzer(&cfg, LimitMode::DisplayedInfinite);
    for tier in Tier::BOTH {
        let le = a.laplace_exponent(tier, 0.2);
        for &s in &[0.03, 0.1, 0.3] {
            let d = le.derivs(s, 4).unwrap();
            // central stencils on L(s) = exp(f(s)) over offsets -4..=4
            let h = 0.05 * s;
            let l: Vec<f64> = (-4..=4).map(|i| direct_exponent(&a, tier, s + i as f64 * h).exp()).collect();
            let fd: Vec<f64> = STENCILS
                .iter()
                .enumerate()
                .map(|(n, c)| c.iter().zip(&l).map(|(c, v)| c * v).sum::<f64>() / h.powi(n as i32))
                .collect();
            for n in 0..=4 {
                let exact = faa_di_bruno_exp(n, &d[..=n]).unwrap();
                let rel = (exact - fd[n]).abs() / exact.abs();
                assert!(rel < 1e-3, "tier {tier:?} s={s} n={n}: {exact} vs {}", fd[n]);
            }
        }
    }
}

/// Central finite-difference weights for derivative orders 0..=4 on offsets -4..=4.
const STENCILS: [[f64; 9]; 5] = [
    [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
    [
        1.0 / 280.0,
        -4.0 / 105.0,
        1.0 / 5.0,
        -4.0 / 5.0,
        0.0,
        4.0 / 5.0,
        -1.0 / 5.0,
        4.0 / 105.0,
        -1.0 / 280.0,
    ],
    [
        -1.0 / 560.0,
        8.0 / 315.0,
        -1.0 / 5.0,
        8.0 / 5.0,
        -205.0 / 72.0,
        8.0 / 5.0,
        -1.0 / 5.0,
        8.0 / 315.0,
        -1.0 / 560.0,
    ],
    [
        -7.0 / 240.0,
        3.0 / 10.0,
        -169.0 / 120.0,
        61.0 / 30.0,
        0.0,
        -61.0 / 30.0,
        169.0 / 120.0,
        -3.0 / 10.0,
        7.0 / 240.0,
    ],
    [
        7.0 / 240.0,
        -2.0 / 5.0,
        169.0 / 60.0,
        -122.0 / 15.0,
        91.0 / 8.0,
        -122.0 / 15.0,
        169.0 / 60.0,
        -2.0 / 5.0,
        7.0 / 240.0,
    ],
];

#[test]
fn coverage_is_monotone_and_bounded() {
    for mode in LimitMode::ALL {
        let a = analyzer(&net(1.0, 4.0, 2, 1, 6.0, 4.0, 4.0, 0.5), mode);
        let mut prev = 1.0;
        for i in 0..12 {
            let v = a.network_sir_coverage(lin(-10.0 + 3.0 * i as f64)).unwrap();
            assert!((0.0..=1.0).contains(&v));
            assert!(v <= prev + 1e-9, "{mode:?}: {v} after {prev}");
            prev = v;
        }
    }
}

#[test]
fn serving_distance_pdf_integrates_to_one() {
    let cfg = net(1.5, 7.0, 4, 2, 4.0, 3.2, 4.1, 0.5);
    let a = Analyzer::new(&cfg).unwrap();
    for t in Tier::BOTH {
        let d = a.serving_distance(t);
        let mass = integrate(|x| d.pdf(x), Domain::UpperInfinite(0.0), &QuadratureSpec::default().with_scale(d.scale()))
            .unwrap()
            .value;
        assert!((mass - 1.0).abs() < 1e-8, "{mass}");
    }
}

#[test]
fn rate_coverage_is_monotone_and_tends_to_one() {
    let cfg = net(3.0, 18.0, 4, 1, 0.0, 3.0, 3.0, 1.0);
    let a = Analyzer::new(&cfg).unwrap();
    let rhos: Vec<f64> = (0..20).map(|i| 1e3 * 1.6f64.powi(i)).collect();
    for mode in [LoadMode::Pmf, LoadMode::Mean] {
        let r = a.network_rate_coverage_curve(&rhos, mode).unwrap();
        for w in r.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "{mode:?}: {r:?}");
        }
        let tiny = a.network_rate_coverage(1e-3, mode).unwrap();
        assert!(tiny > 0.999, "{tiny}");
    }
}

#[test]
fn rate_table_matches_direct_sum() {
    let cfg = net(3.0, 18.0, 2, 1, 0.0, 3.0, 3.0, 1.0);
    let a = Analyzer::new(&cfg).unwrap();
    let rho = 2e4;
    let load = a.load_pmf(Tier::Femto).unwrap();
    let direct: f64 = load
        .pmf
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let tau = 2f64.powf(rho * (i + 1) as f64 / cfg.bandwidth_hz) - 1.0;
            p * a.sir_coverage(Tier::Femto, tau).unwrap()
        })
        .sum();
    let table = a.rate_coverage(Tier::Femto, rho, LoadMode::Pmf).unwrap();
    assert!((direct - table).abs() < 1e-5, "{direct} vs {table}");
}
