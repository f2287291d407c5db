//! Gauss hypergeometric function on the negative real axis.
//!
//! Branches:
//! * `|z| <= 0.5`: direct power series.
//! * `-3 <= z < -0.5`: Pfaff transformation, series argument `z/(z-1)` in `(1/3, 3/4]`.
//! * `z < -3`: the `1/(1-z)` connection formula, series argument in `(0, 1/4)`.
//!   When `a - b` is (nearly) an integer the connection formula degenerates and the
//!   Pfaff branch is used with its term budget instead.

use statrs::function::gamma::gamma;

use super::NumericsError;

const MAX_TERMS: usize = 20_000;
const PFAFF_LIMIT: f64 = -3.0;

pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64, NumericsError> {
    if !(a.is_finite() && b.is_finite() && c.is_finite() && z.is_finite()) {
        return Err(NumericsError::Hyp2f1Divergence { a, b, c, z });
    }
    if is_nonpositive_int(c) {
        return Err(NumericsError::Hyp2f1Pole { c });
    }
    if z > 0.0 {
        return Err(NumericsError::Hyp2f1Domain { z });
    }
    if z == 0.0 || a == 0.0 || b == 0.0 {
        return Ok(1.0);
    }
    // Terminating series are exact polynomials for any argument.
    if is_nonpositive_int(a) || is_nonpositive_int(b) {
        return series(a, b, c, z).ok_or(NumericsError::Hyp2f1Divergence { a, b, c, z });
    }
    let value = if z >= -0.5 {
        series(a, b, c, z)
    } else if z >= PFAFF_LIMIT || is_near_int(a - b) {
        pfaff(a, b, c, z)
    } else {
        connection(a, b, c, z)
    };
    value.ok_or(NumericsError::Hyp2f1Divergence { a, b, c, z })
}

/// m-th derivative in z: (a)_m (b)_m / (c)_m · 2F1(a+m, b+m; c+m; z).
pub fn hyp2f1_deriv(a: f64, b: f64, c: f64, m: usize, z: f64) -> Result<f64, NumericsError> {
    let mut coef = 1.0;
    for i in 0..m {
        let i = i as f64;
        coef *= (a + i) * (b + i) / (c + i);
    }
    if coef == 0.0 {
        return Ok(0.0);
    }
    let mf = m as f64;
    Ok(coef * hyp2f1(a + mf, b + mf, c + mf, z)?)
}

/// `x^m * 2F1(a, b; c; -x)` for `x >= 0`, finite even when `x^m` alone overflows.
pub fn hyp2f1_neg_scaled(a: f64, b: f64, c: f64, x: f64, m: i32) -> Result<f64, NumericsError> {
    let z = -x;
    if x <= -PFAFF_LIMIT || is_nonpositive_int(a) || is_nonpositive_int(b) {
        return Ok(x.powi(m) * hyp2f1(a, b, c, z)?);
    }
    if is_nonpositive_int(c) {
        return Err(NumericsError::Hyp2f1Pole { c });
    }
    if !x.is_finite() {
        return Err(NumericsError::Hyp2f1Divergence { a, b, c, z });
    }
    let mf = m as f64;
    let lead = (x / (1.0 + x)).powi(m);
    let v = if is_near_int(a - b) {
        let w = z / (z - 1.0);
        series(a, c - b, c, w).map(|s| lead * (1.0 + x).powf(mf - a) * s)
    } else {
        let y = 1.0 / (1.0 + x);
        let gc = gamma(c);
        let t1 = gc * gamma(b - a) * rgamma(b) * rgamma(c - a);
        let t2 = gc * gamma(a - b) * rgamma(a) * rgamma(c - b);
        let mut out = Some(0.0);
        if t1 != 0.0 {
            out = out.zip(series(a, c - b, a - b + 1.0, y))
                .map(|(o, s)| o + t1 * (1.0 + x).powf(mf - a) * s);
        }
        if t2 != 0.0 {
            out = out.zip(series(b, c - a, b - a + 1.0, y))
                .map(|(o, s)| o + t2 * (1.0 + x).powf(mf - b) * s);
        }
        out.map(|o| lead * o)
    };
    v.filter(|v| v.is_finite())
        .ok_or(NumericsError::Hyp2f1Divergence { a, b, c, z })
}

fn pfaff(a: f64, b: f64, c: f64, z: f64) -> Option<f64> {
    let w = z / (z - 1.0);
    Some((1.0 - z).powf(-a) * series(a, c - b, c, w)?)
}

fn connection(a: f64, b: f64, c: f64, z: f64) -> Option<f64> {
    let x = 1.0 / (1.0 - z);
    let gc = gamma(c);
    let t1 = gc * gamma(b - a) * rgamma(b) * rgamma(c - a);
    let t2 = gc * gamma(a - b) * rgamma(a) * rgamma(c - b);
    let mut out = 0.0;
    if t1 != 0.0 {
        out += t1 * x.powf(a) * series(a, c - b, a - b + 1.0, x)?;
    }
    if t2 != 0.0 {
        out += t2 * x.powf(b) * series(b, c - a, b - a + 1.0, x)?;
    }
    out.is_finite().then_some(out)
}

/// Plain Maclaurin series, `|x| < 1`. Returns `None` when the budget runs out.
fn series(a: f64, b: f64, c: f64, x: f64) -> Option<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let ax = x.abs();
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * x;
        sum += term;
        if term == 0.0 {
            return Some(sum);
        }
        if !sum.is_finite() {
            return None;
        }
        let n1 = nf + 1.0;
        let ratio = ((a + n1) * (b + n1) / ((c + n1) * (n1 + 1.0)) * x).abs();
        let q = ratio.max(ax);
        if q < 1.0 && term.abs() * q / (1.0 - q) <= 1e-17 * sum.abs() {
            return Some(sum);
        }
    }
    None
}

fn rgamma(x: f64) -> f64 {
    if is_nonpositive_int(x) {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

fn is_nonpositive_int(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

fn is_near_int(x: f64) -> bool {
    (x - x.round()).abs() < 1e-6
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: 200-term Maclaurin series after a Pfaff step.
    fn oracle(a: f64, b: f64, c: f64, z: f64) -> f64 {
        let (scale, bb, x) = if z >= -0.5 {
            (1.0, b, z)
        } else {
            ((1.0 - z).powf(-a), c - b, z / (z - 1.0))
        };
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 0..200 {
            let n = n as f64;
            term *= (a + n) * (bb + n) / ((c + n) * (n + 1.0)) * x;
            sum += term;
        }
        scale * sum
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn zero_argument_is_one() {
        assert_eq!(hyp2f1(1.0, 0.5, 1.5, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn arctan_identity_values() {
        let v1 = hyp2f1(1.0, 0.5, 1.5, -1.0).unwrap();
        assert!(rel(v1, oracle(1.0, 0.5, 1.5, -1.0)) < 1e-12);
        assert!(rel(v1, std::f64::consts::FRAC_PI_4) < 1e-12);

        // arctan(sqrt 3)/sqrt 3 = pi/(3 sqrt 3) = 0.6045997881
        let v3 = hyp2f1(1.0, 0.5, 1.5, -3.0).unwrap();
        assert!((v3 - 0.604_599_788_1).abs() < 1e-10);
        assert!(rel(v3, oracle(1.0, 0.5, 1.5, -3.0)) < 1e-12);
        assert!(rel(v3, 3f64.sqrt().atan() / 3f64.sqrt()) < 1e-12);
    }

    #[test]
    fn large_argument_via_connection() {
        for &x in &[2.5f64, 10.0, 1e3, 1e6] {
            let v = hyp2f1(1.0, 0.5, 1.5, -x * x).unwrap();
            assert!(rel(v, x.atan() / x) < 1e-12, "x={x} v={v}");
        }
    }

    #[test]
    fn connection_matches_pfaff_in_overlap() {
        // Both branches converge comfortably for z in [-20, -3.5].
        for k in 0..8 {
            let kf = k as f64;
            for &alpha in &[2.5, 3.0, 4.0, 5.5] {
                let (a, b, c) = (kf + 1.0, kf - 2.0 / alpha, kf + 1.0 - 2.0 / alpha);
                for &z in &[-3.5, -7.0, -20.0] {
                    let p = pfaff(a, b, c, z).unwrap();
                    let q = connection(a, b, c, z).unwrap();
                    assert!(rel(q, p) < 1e-11, "k={k} alpha={alpha} z={z}: {p} vs {q}");
                }
            }
        }
    }

    #[test]
    fn elementary_closed_forms() {
        // 2F1(1,1;2;z) = -ln(1-z)/z
        for &z in &[-0.3, -0.9, -2.0, -50.0, -300.0] {
            let v = hyp2f1(1.0, 1.0, 2.0, z).unwrap();
            assert!(rel(v, -(1.0 - z).ln() / z) < 1e-11, "z={z}");
        }
        // 2F1(a,b;b;z) = (1-z)^-a
        for &z in &[-0.2, -1.7, -40.0] {
            let v = hyp2f1(2.5, 0.7, 0.7, z).unwrap();
            assert!(rel(v, (1.0 - z).powf(-2.5)) < 1e-11, "z={z}");
        }
    }

    #[test]
    fn derivative_identity_against_finite_differences() {
        let cases = [(1.0, 0.5, 1.5), (1.0, 1.0 / 3.0, 4.0 / 3.0), (3.0, 2.5, 3.5)];
        for &(a, b, c) in &cases {
            for i in 0..=40 {
                let z = -10.0 + 0.25 * i as f64;
                let h = 1e-5 * (1.0 + z.abs());
                let zp = (z + h).min(0.0);
                let zm = zp - 2.0 * h;
                let fd = (hyp2f1(a, b, c, zp).unwrap() - hyp2f1(a, b, c, zm).unwrap())
                    / (zp - zm);
                let id = a * b / c * hyp2f1(a + 1.0, b + 1.0, c + 1.0, 0.5 * (zp + zm)).unwrap();
                assert!(rel(fd, id) < 1e-6, "a={a} b={b} c={c} z={z}: {fd} vs {id}");
                let d1 = hyp2f1_deriv(a, b, c, 1, 0.5 * (zp + zm)).unwrap();
                assert!(rel(d1, id) < 1e-14);
            }
        }
    }

    #[test]
    fn errors_carry_parameters() {
        assert_eq!(
            hyp2f1(1.0, 1.0, -2.0, -1.0),
            Err(NumericsError::Hyp2f1Pole { c: -2.0 })
        );
        assert!(matches!(
            hyp2f1(1.0, 1.0, 2.0, 0.5),
            Err(NumericsError::Hyp2f1Domain { .. })
        ));
        // Integer a-b forces the Pfaff branch, which cannot reach z = -1e9.
        match hyp2f1(2.0, 1.0, 2.5, -1e9) {
            Err(NumericsError::Hyp2f1Divergence { a, b, c, z }) => {
                assert_eq!((a, b, c, z), (2.0, 1.0, 2.5, -1e9));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn scaled_variant_matches_plain_and_survives_overflow() {
        for k in 0..10 {
            let kf = k as f64;
            let (a, b, c) = (kf + 1.0, kf - 0.5, kf + 0.5);
            for &x in &[0.1f64, 2.0, 5.0, 80.0, 1e4] {
                let plain = x.powi(k) * hyp2f1(a, b, c, -x).unwrap();
                let scaled = hyp2f1_neg_scaled(a, b, c, x, k).unwrap();
                assert!(rel(scaled, plain) < 1e-11, "k={k} x={x}: {scaled} vs {plain}");
            }
        }
        // x^20 * 2F1 with x = 1e40 overflows when formed naively; the scaled value
        // behaves like x^(2/alpha) = 1e20 for alpha = 4.
        let v = hyp2f1_neg_scaled(21.0, 19.5, 20.5, 1e40, 20).unwrap();
        assert!(v.is_finite() && v > 1e18 && v < 1e22, "{v}");
        // 2F1(1, 1/2; 3/2; -x) = atan(sqrt x)/sqrt x
        let x = 1e30f64;
        let v = hyp2f1_neg_scaled(1.0, 0.5, 1.5, x, 1).unwrap();
        assert!(rel(v, x.sqrt().atan() * x.sqrt()) < 1e-12);
    }

    #[test]
    fn terminating_series() {
        // 2F1(-2, b; c; z) = 1 - 2bz/c + b(b+1)z^2/(c(c+1))
        let (b, c, z) = (1.5, 2.5, -7.0);
        let exact = 1.0 - 2.0 * b * z / c + b * (b + 1.0) * z * z / (c * (c + 1.0));
        assert!(rel(hyp2f1(-2.0, b, c, z).unwrap(), exact) < 1e-14);
    }
}
