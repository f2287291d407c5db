//! Built-in scenarios for the figure reproductions.
//!
//! Shared defaults: P_M = 43 dBm, P_F = 20 dBm, P0 = -100 dBm/Hz, W = 10 MHz,
//! lambda_U = 3000 per km^2. Where a caption leaves a value open the choice is
//! noted on the preset.

use hetnet_core::model::{db_to_linear, linear_to_db, AssociationMode, NetworkConfig, TierConfig};

pub const P_M_DBM: f64 = 43.0;
pub const P_F_DBM: f64 = 20.0;
pub const P0_DBM_HZ: f64 = -100.0;
pub const BANDWIDTH_HZ: f64 = 10e6;
pub const UE_DENSITY: f64 = 3000.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub config: NetworkConfig,
    /// Threshold used by searches when none is given.
    pub tau_db: f64,
}

pub const NAMES: [&str; 11] = [
    "fig2", "fig3", "fig4a", "fig4b", "fig4c", "fig4d", "fig5", "fig8", "fig10a", "fig10b", "cor7",
];

#[allow(clippy::too_many_arguments)]
fn scenario(
    lam_m: f64,
    lam_f: f64,
    n_m: u32,
    n_f: u32,
    bias_db: f64,
    alpha: f64,
    eta: f64,
) -> NetworkConfig {
    let m = TierConfig::new(lam_m, P_M_DBM, n_m, 1.0, alpha).expect("preset macro tier");
    let f = TierConfig::new(lam_f, P_F_DBM, n_f, db_to_linear(bias_db), alpha).expect("preset femto tier");
    NetworkConfig::new(m, f, UE_DENSITY, P0_DBM_HZ, eta, BANDWIDTH_HZ, AssociationMode::Dude)
        .expect("preset network")
}

pub fn preset(name: &str) -> Option<Preset> {
    let (summary, config, tau_db) = match name {
        "fig2" => (
            "association vs lambda_F/lambda_M (lambda_M = 1, lambda_F = 5); alpha 4, N_M 5, N_F 1, B 1",
            scenario(1.0, 5.0, 5, 1, 0.0, 4.0, 0.5),
            0.0,
        ),
        "fig3" => (
            "fig2 with B = 5 (linear)",
            scenario(1.0, 5.0, 5, 1, linear_to_db(5.0), 4.0, 0.5),
            0.0,
        ),
        "fig4a" => (
            "lambda 3/10, N 4/2, alpha 3, B 1, eta 0.5",
            scenario(3.0, 10.0, 4, 2, 0.0, 3.0, 0.5),
            0.0,
        ),
        "fig4b" => (
            "lambda 3/10, N 4/2, alpha 3, B 1, eta 0",
            scenario(3.0, 10.0, 4, 2, 0.0, 3.0, 0.0),
            0.0,
        ),
        "fig4c" => (
            "lambda 1/4, N 1/1, alpha 4, B 10 dB, eta 0.5",
            scenario(1.0, 4.0, 1, 1, 10.0, 4.0, 0.5),
            0.0,
        ),
        "fig4d" => (
            "lambda 1/4, N 1/1, alpha 4, B 10 dB, eta 0",
            scenario(1.0, 4.0, 1, 1, 10.0, 4.0, 0.0),
            0.0,
        ),
        "fig5" => (
            "eta sweep base: lambda 2/12, N 12/4, alpha 3, B 1, eta 0.5",
            scenario(2.0, 12.0, 12, 4, 0.0, 3.0, 0.5),
            0.0,
        ),
        "fig8" => (
            "rate vs rho: lambda 3/18, N_M 20, N_F 1, alpha 3, eta 1, B 1",
            scenario(3.0, 18.0, 20, 1, 0.0, 3.0, 1.0),
            0.0,
        ),
        "fig10a" => (
            "bias search: lambda 2/10, N 20/2, alpha 3, eta 0, tau 0 dB",
            scenario(2.0, 10.0, 20, 2, 0.0, 3.0, 0.0),
            0.0,
        ),
        "fig10b" => (
            "bias search: lambda 2/10, N 20/2, alpha 3, eta 1, tau 0 dB",
            scenario(2.0, 10.0, 20, 2, 0.0, 3.0, 1.0),
            0.0,
        ),
        "cor7" => (
            "SISO, balanced UL weights: lambda 1/1, N 1/1, alpha 4, B 1, eta 0",
            scenario(1.0, 1.0, 1, 1, 0.0, 4.0, 0.0),
            0.0,
        ),
        _ => return None,
    };
    let name = NAMES.into_iter().find(|n| *n == name)?;
    Some(Preset { name, summary, config, tau_db })
}

pub fn all() -> Vec<Preset> {
    NAMES.iter().filter_map(|n| preset(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves() {
        assert_eq!(all().len(), NAMES.len());
        assert!(preset("fig99").is_none());
    }

    #[test]
    fn fig4c_bias_is_ten_db() {
        let p = preset("fig4c").unwrap();
        assert!((p.config.bias_db() - 10.0).abs() < 1e-12);
        assert_eq!(p.config.macro_tier.antennas, 1);
    }
}
