//! Scenario configuration, association rules and the uplink power-control law.

mod config_file;

pub use config_file::{parse_config, to_config_text, ConfigError};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid {field}: {value} ({reason})")]
    InvalidParameter {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("macro power {p_m_dbm} dBm must not be below femto power {p_f_dbm} dBm")]
    PowerOrdering { p_m_dbm: f64, p_f_dbm: f64 },
    #[error("distance must be positive and finite, got {0}")]
    Distance(f64),
    #[error(
        "UE at (x_M = {x_m}, x_F = {x_f}) picks femto in the DL but macro in the UL; \
         this split only exists when B_F/B_M < P_F/P_M"
    )]
    ReverseSplit { x_m: f64, x_f: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tier {
    Macro,
    Femto,
}

impl Tier {
    pub const BOTH: [Tier; 2] = [Tier::Macro, Tier::Femto];

    pub fn other(self) -> Tier {
        match self {
            Tier::Macro => Tier::Femto,
            Tier::Femto => Tier::Macro,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Tier::Macro => "macro",
            Tier::Femto => "femto",
        }
    }
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierConfig {
    /// BSs per km^2
    pub density: f64,
    /// DL transmit power, linear mW
    pub power_mw: f64,
    pub antennas: u32,
    /// UL association bias, linear
    pub bias: f64,
    pub alpha: f64,
}

impl TierConfig {
    pub fn new(density: f64, power_dbm: f64, antennas: u32, bias: f64, alpha: f64) -> Result<Self, ModelError> {
        let t = TierConfig {
            density,
            power_mw: dbm_to_mw(power_dbm),
            antennas,
            bias,
            alpha,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn power_dbm(&self) -> f64 {
        mw_to_dbm(self.power_mw)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        check("density", self.density, self.density > 0.0, "must be positive")?;
        check("power", self.power_mw, self.power_mw > 0.0, "must be positive")?;
        check("antennas", self.antennas as f64, self.antennas >= 1, "need at least one antenna")?;
        check("bias", self.bias, self.bias > 0.0, "must be positive")?;
        check("alpha", self.alpha, self.alpha > 2.0, "path-loss exponent must exceed 2")?;
        Ok(())
    }
}

fn check(field: &'static str, value: f64, ok: bool, reason: &'static str) -> Result<(), ModelError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter { field, value, reason })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AssociationMode {
    /// UL and DL associate independently.
    Dude,
    /// Both links follow the max DL received power rule.
    NoDude,
}

impl AssociationMode {
    pub fn name(self) -> &'static str {
        match self {
            AssociationMode::Dude => "dude",
            AssociationMode::NoDude => "no-dude",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig {
    pub macro_tier: TierConfig,
    pub femto_tier: TierConfig,
    /// UEs per km^2
    pub ue_density: f64,
    /// Baseline UE power over the whole band, mW
    pub p0_mw: f64,
    pub eta: f64,
    pub bandwidth_hz: f64,
    pub mode: AssociationMode,
}

impl NetworkConfig {
    /// `p0_dbm_hz` is a spectral density; it is scaled by the bandwidth here, once.
    pub fn new(
        macro_tier: TierConfig,
        femto_tier: TierConfig,
        ue_density: f64,
        p0_dbm_hz: f64,
        eta: f64,
        bandwidth_hz: f64,
        mode: AssociationMode,
    ) -> Result<Self, ModelError> {
        let cfg = NetworkConfig {
            macro_tier,
            femto_tier,
            ue_density,
            p0_mw: dbm_to_mw(p0_dbm_hz) * bandwidth_hz,
            eta,
            bandwidth_hz,
            mode,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn tier(&self, t: Tier) -> &TierConfig {
        match t {
            Tier::Macro => &self.macro_tier,
            Tier::Femto => &self.femto_tier,
        }
    }

    pub fn tier_mut(&mut self, t: Tier) -> &mut TierConfig {
        match t {
            Tier::Macro => &mut self.macro_tier,
            Tier::Femto => &mut self.femto_tier,
        }
    }

    pub fn p0_dbm_hz(&self) -> f64 {
        mw_to_dbm(self.p0_mw / self.bandwidth_hz)
    }

    /// Femto/macro bias ratio in dB.
    pub fn bias_db(&self) -> f64 {
        linear_to_db(self.femto_tier.bias / self.macro_tier.bias)
    }

    /// Sets `B_F/B_M` with `B_M = 1`.
    pub fn set_bias_db(&mut self, db: f64) {
        self.macro_tier.bias = 1.0;
        self.femto_tier.bias = db_to_linear(db);
    }

    /// UL bias actually used by the association rule: `P_K` under No-DUDe.
    pub fn effective_bias(&self, t: Tier) -> f64 {
        match self.mode {
            AssociationMode::Dude => self.tier(t).bias,
            AssociationMode::NoDude => self.tier(t).power_mw,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        self.macro_tier.validate()?;
        self.femto_tier.validate()?;
        check("ue_density", self.ue_density, self.ue_density > 0.0, "must be positive")?;
        check("p0", self.p0_mw, self.p0_mw > 0.0, "must be positive")?;
        check("eta", self.eta, (0.0..=1.0).contains(&self.eta), "must lie in [0, 1]")?;
        check("bandwidth", self.bandwidth_hz, self.bandwidth_hz > 0.0, "must be positive")?;
        if self.macro_tier.power_mw < self.femto_tier.power_mw {
            return Err(ModelError::PowerOrdering {
                p_m_dbm: self.macro_tier.power_dbm(),
                p_f_dbm: self.femto_tier.power_dbm(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AssociationCase {
    /// Macro in both links.
    MacroBoth,
    /// Macro DL, femto UL.
    MacroDlFemtoUl,
    /// Femto in both links.
    FemtoBoth,
}

impl AssociationCase {
    pub const ALL: [AssociationCase; 3] = [
        AssociationCase::MacroBoth,
        AssociationCase::MacroDlFemtoUl,
        AssociationCase::FemtoBoth,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            AssociationCase::MacroBoth => "case1",
            AssociationCase::MacroDlFemtoUl => "case2",
            AssociationCase::FemtoBoth => "case3",
        }
    }

    pub fn ul_tier(self) -> Tier {
        match self {
            AssociationCase::MacroBoth => Tier::Macro,
            _ => Tier::Femto,
        }
    }
}

/// Which bias regime the association constants were derived in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiasBranch {
    /// `B_F/B_M >= P_F/P_M`: UL favours femto at least as much as DL does.
    FemtoLeaning,
    /// `B_F/B_M < P_F/P_M`
    MacroLeaning,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssociationLaw {
    /// `P_K N_K`, indexed by `Tier::index`
    pub dl_weight: [f64; 2],
    /// `N_K B_K` (DUDe) or `N_K P_K` (No-DUDe)
    pub ul_weight: [f64; 2],
    pub alpha: [f64; 2],
    pub branch: BiasBranch,
    /// Case-1 constant
    pub upsilon_1: f64,
    /// Case-2 constants
    pub upsilon_1p: f64,
    pub upsilon_2p: f64,
}

pub fn resolve_law(cfg: &NetworkConfig) -> Result<AssociationLaw, ModelError> {
    cfg.validate()?;
    let (m, f) = (&cfg.macro_tier, &cfg.femto_tier);
    let dl = [m.power_mw * m.antennas as f64, f.power_mw * f.antennas as f64];
    let ul = [
        cfg.effective_bias(Tier::Macro) * m.antennas as f64,
        cfg.effective_bias(Tier::Femto) * f.antennas as f64,
    ];
    let bias_ratio = cfg.effective_bias(Tier::Femto) / cfg.effective_bias(Tier::Macro);
    let power_ratio = f.power_mw / m.power_mw;
    let (ul_fm, dl_fm) = (ul[1] / ul[0], dl[1] / dl[0]);
    // Compare as ratios of weights: the antenna factors cancel, and No-DUDe
    // lands exactly on the boundary, which belongs to the femto-leaning branch.
    let femto_leaning = bias_ratio >= power_ratio || (ul_fm - dl_fm).abs() <= 1e-12 * dl_fm;
    let law = if femto_leaning {
        AssociationLaw {
            dl_weight: dl,
            ul_weight: ul,
            alpha: [m.alpha, f.alpha],
            branch: BiasBranch::FemtoLeaning,
            upsilon_1: ul_fm,
            upsilon_1p: 1.0 / ul_fm,
            upsilon_2p: 1.0 / dl_fm,
        }
    } else {
        AssociationLaw {
            dl_weight: dl,
            ul_weight: ul,
            alpha: [m.alpha, f.alpha],
            branch: BiasBranch::MacroLeaning,
            upsilon_1: dl_fm,
            upsilon_1p: 1.0 / dl_fm,
            upsilon_2p: 1.0 / ul_fm,
        }
    };
    Ok(law)
}

impl AssociationLaw {
    /// `zeta = N_J B_J / (N_K B_K)` for serving tier K.
    pub fn zeta(&self, serving: Tier) -> f64 {
        self.ul_weight[serving.other().index()] / self.ul_weight[serving.index()]
    }

    /// Constant of the tier association probability for tier K, per branch.
    pub fn tier_upsilon(&self, k: Tier) -> f64 {
        let j = k.other();
        match self.branch {
            BiasBranch::FemtoLeaning => self.ul_weight[j.index()] / self.ul_weight[k.index()],
            BiasBranch::MacroLeaning => self.dl_weight[j.index()] / self.dl_weight[k.index()],
        }
    }

    /// Tier whose weighted received power `w x^-alpha` is larger; ties go to macro.
    fn pick(&self, w: &[f64; 2], x_m: f64, x_f: f64) -> Tier {
        // Compared in log domain to stay finite for extreme distances.
        let lm = w[0].ln() - self.alpha[0] * x_m.ln();
        let lf = w[1].ln() - self.alpha[1] * x_f.ln();
        if lm >= lf {
            Tier::Macro
        } else {
            Tier::Femto
        }
    }

    pub fn ul_tier(&self, x_m: f64, x_f: f64) -> Tier {
        self.pick(&self.ul_weight, x_m, x_f)
    }

    pub fn dl_tier(&self, x_m: f64, x_f: f64) -> Tier {
        self.pick(&self.dl_weight, x_m, x_f)
    }
}

pub fn classify(x_m: f64, x_f: f64, law: &AssociationLaw) -> Result<AssociationCase, ModelError> {
    for x in [x_m, x_f] {
        if !(x > 0.0 && x.is_finite()) {
            return Err(ModelError::Distance(x));
        }
    }
    match (law.dl_tier(x_m, x_f), law.ul_tier(x_m, x_f)) {
        (Tier::Macro, Tier::Macro) => Ok(AssociationCase::MacroBoth),
        (Tier::Macro, Tier::Femto) => Ok(AssociationCase::MacroDlFemtoUl),
        (Tier::Femto, Tier::Femto) => Ok(AssociationCase::FemtoBoth),
        (Tier::Femto, Tier::Macro) => Err(ModelError::ReverseSplit { x_m, x_f }),
    }
}

/// UE transmit power under fractional path-loss inversion, `P_0 x^(eta alpha)`.
pub fn ul_tx_power(x: f64, alpha: f64, eta: f64, p0_mw: f64) -> f64 {
    p0_mw * x.powf(eta * alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fig2(n_m: u32, bias_db: f64) -> NetworkConfig {
        let m = TierConfig::new(1.0, 43.0, n_m, 1.0, 4.0).unwrap();
        let f = TierConfig::new(5.0, 20.0, 1, db_to_linear(bias_db), 4.0).unwrap();
        NetworkConfig::new(m, f, 3000.0, -100.0, 0.0, 10e6, AssociationMode::Dude).unwrap()
    }

    fn symmetric() -> NetworkConfig {
        let t = TierConfig::new(2.0, 30.0, 2, 1.0, 4.0).unwrap();
        NetworkConfig::new(t, t, 3000.0, -100.0, 0.0, 10e6, AssociationMode::Dude).unwrap()
    }

    #[test]
    fn fig2_law() {
        let law = resolve_law(&fig2(5, 0.0)).unwrap();
        assert_eq!(law.branch, BiasBranch::FemtoLeaning);
        assert!((law.upsilon_1 - 0.2).abs() < 1e-15);
        assert!((law.zeta(Tier::Macro) - 0.2).abs() < 1e-15);
        assert!((law.zeta(Tier::Femto) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_law() {
        let law = resolve_law(&symmetric()).unwrap();
        assert_eq!(law.upsilon_1, 1.0);
        assert_eq!(law.zeta(Tier::Macro), 1.0);
        assert_eq!(law.zeta(Tier::Femto), 1.0);
    }

    #[test]
    fn bias_cancels_antenna_asymmetry() {
        let law = resolve_law(&fig2(5, linear_to_db(5.0))).unwrap();
        assert!((law.ul_weight[1] / law.ul_weight[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bias_scale_invariance() {
        let mut a = fig2(5, 3.0);
        let la = resolve_law(&a).unwrap();
        a.macro_tier.bias *= 7.3;
        a.femto_tier.bias *= 7.3;
        let lb = resolve_law(&a).unwrap();
        for (x, y) in [
            (la.upsilon_1, lb.upsilon_1),
            (la.upsilon_1p, lb.upsilon_1p),
            (la.upsilon_2p, lb.upsilon_2p),
            (la.zeta(Tier::Macro), lb.zeta(Tier::Macro)),
            (la.tier_upsilon(Tier::Femto), lb.tier_upsilon(Tier::Femto)),
        ] {
            assert!((x - y).abs() <= 1e-12 * x.abs());
        }
    }

    #[test]
    fn macro_leaning_branch_swaps_constants() {
        let law = resolve_law(&fig2(5, -40.0)).unwrap();
        assert_eq!(law.branch, BiasBranch::MacroLeaning);
        let dl_fm = law.dl_weight[1] / law.dl_weight[0];
        assert!((law.upsilon_1 - dl_fm).abs() < 1e-15);
    }

    #[test]
    fn classify_examples() {
        let law = resolve_law(&symmetric()).unwrap();
        // Exact tie in both links goes to macro.
        assert_eq!(classify(0.3, 0.3, &law).unwrap(), AssociationCase::MacroBoth);

        let mut cfg = symmetric();
        cfg.macro_tier.power_mw *= 10.0;
        let law = resolve_law(&cfg).unwrap();
        assert_eq!(classify(0.3, 0.3, &law).unwrap(), AssociationCase::MacroBoth);
        assert_eq!(classify(0.3, 1e-6, &law).unwrap(), AssociationCase::FemtoBoth);
        assert!(matches!(classify(0.0, 1.0, &law), Err(ModelError::Distance(_))));
        assert!(matches!(classify(1.0, -2.0, &law), Err(ModelError::Distance(_))));
    }

    #[test]
    fn classify_never_reverse_splits_on_femto_leaning_branch() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for bias_db in [0.0, 5.0, 12.0] {
            let law = resolve_law(&fig2(5, bias_db)).unwrap();
            for _ in 0..1_000_000 / 3 {
                let x_m = rng.random_range(1e-4..3.0f64);
                let x_f = rng.random_range(1e-4..3.0f64);
                classify(x_m, x_f, &law).unwrap();
            }
        }
    }

    #[test]
    fn macro_leaning_branch_surfaces_reverse_split() {
        let law = resolve_law(&fig2(1, -40.0)).unwrap();
        // DL power ratio favours femto at x_F << x_M, the UL bias does not.
        let err = classify(1.0, 0.2, &law).unwrap_err();
        assert!(matches!(err, ModelError::ReverseSplit { .. }));
    }

    #[test]
    fn no_dude_never_splits() {
        let mut cfg = fig2(5, 10.0);
        cfg.mode = AssociationMode::NoDude;
        let law = resolve_law(&cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200_000 {
            let x_m = rng.random_range(1e-4..3.0f64);
            let x_f = rng.random_range(1e-4..3.0f64);
            assert_ne!(classify(x_m, x_f, &law).unwrap(), AssociationCase::MacroDlFemtoUl);
        }
    }

    #[test]
    fn power_control_law() {
        assert_eq!(ul_tx_power(3.7, 4.0, 0.0, 2.0), 2.0);
        assert_eq!(ul_tx_power(1.0, 4.0, 1.0, 2.0), 2.0);
        assert!((ul_tx_power(2.0, 4.0, 0.5, 2.0) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(TierConfig::new(0.0, 20.0, 1, 1.0, 4.0).is_err());
        assert!(TierConfig::new(1.0, 20.0, 0, 1.0, 4.0).is_err());
        assert!(TierConfig::new(1.0, 20.0, 1, 1.0, 2.0).is_err());
        assert!(TierConfig::new(1.0, 20.0, 1, -1.0, 4.0).is_err());
        let m = TierConfig::new(1.0, 20.0, 1, 1.0, 4.0).unwrap();
        let f = TierConfig::new(1.0, 43.0, 1, 1.0, 4.0).unwrap();
        assert!(matches!(
            NetworkConfig::new(m, f, 3000.0, -100.0, 0.0, 1e7, AssociationMode::Dude),
            Err(ModelError::PowerOrdering { .. })
        ));
        assert!(NetworkConfig::new(f, m, 3000.0, -100.0, 1.5, 1e7, AssociationMode::Dude).is_err());
        let ok = NetworkConfig::new(f, m, 3000.0, -100.0, 0.5, 1e7, AssociationMode::Dude).unwrap();
        assert!((ok.p0_mw - 1e-10 * 1e7).abs() < 1e-15);
        assert!((ok.p0_dbm_hz() + 100.0).abs() < 1e-9);
    }
}
