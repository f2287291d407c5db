//! Flat TOML scenario files.
//!
//! ```toml
//! lambda_m = 3.0      # macro BSs per km^2
//! lambda_f = 10.0
//! lambda_u = 3000.0
//! p_m_dbm = 43.0
//! p_f_dbm = 20.0
//! p0_dbm_hz = -100.0
//! n_m = 4
//! n_f = 2
//! bias_db = 0.0       # B_F/B_M
//! eta = 0.5
//! alpha_m = 3.0
//! alpha_f = 3.0
//! w_hz = 10e6
//! mode = "dude"       # or "no-dude"; optional
//! ```

use std::fmt;
use std::ops::Range;

use serde::Deserialize;
use toml::Spanned;

use super::{db_to_linear, AssociationMode, NetworkConfig, TierConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    lambda_m: Spanned<f64>,
    lambda_f: Spanned<f64>,
    lambda_u: Spanned<f64>,
    p_m_dbm: Spanned<f64>,
    p_f_dbm: Spanned<f64>,
    p0_dbm_hz: Spanned<f64>,
    n_m: Spanned<i64>,
    n_f: Spanned<i64>,
    bias_db: Spanned<f64>,
    eta: Spanned<f64>,
    alpha_m: Spanned<f64>,
    alpha_f: Spanned<f64>,
    w_hz: Spanned<f64>,
    mode: Option<Spanned<String>>,
}

fn line_of(text: &str, span: Range<usize>) -> usize {
    text[..span.start.min(text.len())].matches('\n').count() + 1
}

pub fn parse_config(text: &str) -> Result<NetworkConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError {
        line: e.span().map(|s| line_of(text, s)),
        message: e.message().trim().to_string(),
    })?;

    let fail = |key: &str, span: Range<usize>, why: &str| ConfigError {
        line: Some(line_of(text, span)),
        message: format!("{key}: {why}"),
    };
    let positive = |key: &str, v: &Spanned<f64>| {
        if v.get_ref().is_finite() && *v.get_ref() > 0.0 {
            Ok(*v.get_ref())
        } else {
            Err(fail(key, v.span(), "must be positive"))
        }
    };
    let finite = |key: &str, v: &Spanned<f64>| {
        if v.get_ref().is_finite() {
            Ok(*v.get_ref())
        } else {
            Err(fail(key, v.span(), "must be finite"))
        }
    };
    let antennas = |key: &str, v: &Spanned<i64>| {
        u32::try_from(*v.get_ref())
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| fail(key, v.span(), "must be a positive integer"))
    };
    let exponent = |key: &str, v: &Spanned<f64>| {
        if *v.get_ref() > 2.0 && v.get_ref().is_finite() {
            Ok(*v.get_ref())
        } else {
            Err(fail(key, v.span(), "path-loss exponent must exceed 2"))
        }
    };

    let lambda_m = positive("lambda_m", &raw.lambda_m)?;
    let lambda_f = positive("lambda_f", &raw.lambda_f)?;
    let lambda_u = positive("lambda_u", &raw.lambda_u)?;
    let p_m = finite("p_m_dbm", &raw.p_m_dbm)?;
    let p_f = finite("p_f_dbm", &raw.p_f_dbm)?;
    if p_m < p_f {
        return Err(fail("p_f_dbm", raw.p_f_dbm.span(), "femto power exceeds macro power"));
    }
    let p0 = finite("p0_dbm_hz", &raw.p0_dbm_hz)?;
    let n_m = antennas("n_m", &raw.n_m)?;
    let n_f = antennas("n_f", &raw.n_f)?;
    let bias = db_to_linear(finite("bias_db", &raw.bias_db)?);
    let eta = *raw.eta.get_ref();
    if !(0.0..=1.0).contains(&eta) {
        return Err(fail("eta", raw.eta.span(), "must lie in [0, 1]"));
    }
    let alpha_m = exponent("alpha_m", &raw.alpha_m)?;
    let alpha_f = exponent("alpha_f", &raw.alpha_f)?;
    let w = positive("w_hz", &raw.w_hz)?;
    let mode = match &raw.mode {
        None => AssociationMode::Dude,
        Some(m) => match m.get_ref().to_ascii_lowercase().as_str() {
            "dude" => AssociationMode::Dude,
            "no-dude" | "nodude" | "no_dude" => AssociationMode::NoDude,
            other => {
                return Err(fail(
                    "mode",
                    m.span(),
                    &format!("unknown mode {other:?}, expected \"dude\" or \"no-dude\""),
                ))
            }
        },
    };

    let build = || -> Result<NetworkConfig, super::ModelError> {
        let m = TierConfig::new(lambda_m, p_m, n_m, 1.0, alpha_m)?;
        let f = TierConfig::new(lambda_f, p_f, n_f, bias, alpha_f)?;
        NetworkConfig::new(m, f, lambda_u, p0, eta, w, mode)
    };
    build().map_err(|e| ConfigError {
        line: None,
        message: e.to_string(),
    })
}

/// Inverse of [`parse_config`]; values round-trip through decimal text.
pub fn to_config_text(cfg: &NetworkConfig) -> String {
    let (m, f) = (&cfg.macro_tier, &cfg.femto_tier);
    format!(
        "lambda_m = {:?}\nlambda_f = {:?}\nlambda_u = {:?}\np_m_dbm = {:?}\np_f_dbm = {:?}\n\
         p0_dbm_hz = {:?}\nn_m = {}\nn_f = {}\nbias_db = {:?}\neta = {:?}\nalpha_m = {:?}\n\
         alpha_f = {:?}\nw_hz = {:?}\nmode = \"{}\"\n",
        m.density,
        f.density,
        cfg.ue_density,
        round_db(m.power_dbm()),
        round_db(f.power_dbm()),
        round_db(cfg.p0_dbm_hz()),
        m.antennas,
        f.antennas,
        round_db(cfg.bias_db()),
        cfg.eta,
        m.alpha,
        f.alpha,
        cfg.bandwidth_hz,
        cfg.mode.name()
    )
}

// dB values pass through log10 and back; trim the last-bit noise.
fn round_db(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "lambda_m = 3\nlambda_f = 10.0\nlambda_u = 3000.0\np_m_dbm = 43.0\n\
        p_f_dbm = 20.0\np0_dbm_hz = -100.0\nn_m = 4\nn_f = 2\nbias_db = 10.0\neta = 0.5\n\
        alpha_m = 3.0\nalpha_f = 3.0\nw_hz = 10e6\n";

    #[test]
    fn parses_and_converts_units() {
        let cfg = parse_config(GOOD).unwrap();
        assert_eq!(cfg.macro_tier.density, 3.0);
        assert_eq!(cfg.femto_tier.antennas, 2);
        assert!((cfg.femto_tier.bias - 10.0).abs() < 1e-12);
        assert!((cfg.macro_tier.power_mw - 19952.62314968879).abs() < 1e-6);
        assert!((cfg.p0_mw - 1e-3).abs() < 1e-15);
        assert_eq!(cfg.mode, AssociationMode::Dude);
    }

    #[test]
    fn round_trips() {
        let mut cfg = parse_config(GOOD).unwrap();
        cfg.mode = AssociationMode::NoDude;
        let again = parse_config(&to_config_text(&cfg)).unwrap();
        assert_eq!(again.mode, AssociationMode::NoDude);
        assert!((again.femto_tier.bias - cfg.femto_tier.bias).abs() < 1e-9);
        assert!((again.p0_mw - cfg.p0_mw).abs() < 1e-12);
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        let bad_eta = GOOD.replace("eta = 0.5", "eta = 1.5");
        let e = parse_config(&bad_eta).unwrap_err();
        assert_eq!(e.line, Some(10));
        assert!(e.message.contains("eta"));

        let unknown = format!("{GOOD}colour = \"blue\"\n");
        let e = parse_config(&unknown).unwrap_err();
        assert_eq!(e.line, Some(14));

        let missing = GOOD.replace("n_f = 2\n", "");
        let e = parse_config(&missing).unwrap_err();
        assert!(e.message.contains("n_f"), "{e}");

        let bad_type = GOOD.replace("n_m = 4", "n_m = \"four\"");
        assert_eq!(parse_config(&bad_type).unwrap_err().line, Some(7));

        let bad_alpha = GOOD.replace("alpha_f = 3.0", "alpha_f = 2.0");
        assert_eq!(parse_config(&bad_alpha).unwrap_err().line, Some(12));
    }
}
