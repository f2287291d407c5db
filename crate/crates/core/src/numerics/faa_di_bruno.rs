//! Integer partitions and the Faà di Bruno expansion of `d^n/ds^n exp(f(s))`.

use std::sync::OnceLock;

use statrs::function::gamma::ln_gamma;

use super::NumericsError;

/// Highest supported derivative order.
pub const N_MAX: usize = 24;

/// One solution of `b_1 + 2 b_2 + ... + n b_n = n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    mult: Vec<u32>,
    parts: u32,
    coef: f64,
}

impl Partition {
    fn new(mult: Vec<u32>) -> Self {
        let parts = mult.iter().sum();
        let coef = coefficient(&mult);
        Partition { mult, parts, coef }
    }

    pub fn order(&self) -> usize {
        self.mult.len()
    }

    /// `k = b_1 + ... + b_n`
    pub fn parts(&self) -> u32 {
        self.parts
    }

    /// `b_1, ..., b_n`
    pub fn multiplicities(&self) -> &[u32] {
        &self.mult
    }

    /// `n! / prod_j (b_j! (j!)^{b_j})`
    pub fn coefficient(&self) -> f64 {
        self.coef
    }
}

fn coefficient(mult: &[u32]) -> f64 {
    let n = mult.len();
    if n <= 12 {
        let fact = |m: u64| (1..=m).product::<u64>();
        let mut den: u64 = 1;
        for (j, &b) in mult.iter().enumerate() {
            den *= fact(b as u64) * fact(j as u64 + 1).pow(b);
        }
        (fact(n as u64) / den) as f64
    } else {
        let mut ln = ln_gamma(n as f64 + 1.0);
        for (j, &b) in mult.iter().enumerate() {
            if b > 0 {
                ln -= ln_gamma(b as f64 + 1.0) + b as f64 * ln_gamma(j as f64 + 2.0);
            }
        }
        let v = ln.exp();
        if v < 4.0e15 {
            v.round()
        } else {
            v
        }
    }
}

fn table() -> &'static [Vec<Partition>] {
    static TABLE: OnceLock<Vec<Vec<Partition>>> = OnceLock::new();
    TABLE.get_or_init(|| (1..=N_MAX).map(enumerate).collect())
}

/// Ascending lexicographic order on `(b_n, ..., b_1)`: for n = 4 this yields
/// (4,0,0,0), (2,1,0,0), (0,2,0,0), (1,0,1,0), (0,0,0,1) written as `(b_1..b_4)`.
fn enumerate(n: usize) -> Vec<Partition> {
    fn rec(j: usize, rest: usize, mult: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if j == 1 {
            mult[0] = rest as u32;
            out.push(Partition::new(mult.clone()));
            return;
        }
        for b in 0..=rest / j {
            mult[j - 1] = b as u32;
            rec(j - 1, rest - b * j, mult, out);
        }
        mult[j - 1] = 0;
    }
    let mut out = Vec::new();
    let mut mult = vec![0u32; n];
    rec(n, n, &mut mult, &mut out);
    out
}

pub fn partitions(n: usize) -> Result<&'static [Partition], NumericsError> {
    if n == 0 || n > N_MAX {
        return Err(NumericsError::OrderOutOfRange { n, max: N_MAX });
    }
    Ok(&table()[n - 1])
}

/// `d^n/ds^n exp(f(s))` from `f_derivs = [f, f', ..., f^(n)]`.
pub fn faa_di_bruno_exp(n: usize, f_derivs: &[f64]) -> Result<f64, NumericsError> {
    if f_derivs.len() != n + 1 {
        return Err(NumericsError::LengthMismatch {
            expected: n + 1,
            got: f_derivs.len(),
        });
    }
    let ef = f_derivs[0].exp();
    if n == 0 {
        return Ok(ef);
    }
    let mut sum = 0.0;
    for p in partitions(n)? {
        let mut term = p.coef;
        for (j, &b) in p.mult.iter().enumerate() {
            if b > 0 {
                term *= f_derivs[j + 1].powi(b as i32);
            }
        }
        sum += term;
    }
    Ok(ef * sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_count(n: usize) -> usize {
        // Count multisets of positive parts summing to n with non-increasing parts.
        fn go(rest: usize, max_part: usize) -> usize {
            if rest == 0 {
                return 1;
            }
            (1..=max_part.min(rest)).map(|p| go(rest - p, p)).sum()
        }
        go(n, n)
    }

    fn binom(n: usize, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    /// d^n exp(f) via the recurrence L^(m+1) = sum_k C(m,k) f^(k+1) L^(m-k).
    fn bell_recurrence(f: &[f64]) -> Vec<f64> {
        let n = f.len() - 1;
        let mut l = vec![f[0].exp()];
        for m in 0..n {
            let v = (0..=m).map(|k| binom(m, k) * f[k + 1] * l[m - k]).sum();
            l.push(v);
        }
        l
    }

    #[test]
    fn small_orders() {
        let p1 = partitions(1).unwrap();
        assert_eq!(p1.len(), 1);
        assert_eq!(p1[0].multiplicities(), &[1]);

        let p4: Vec<&[u32]> = partitions(4).unwrap().iter().map(|p| p.multiplicities()).collect();
        assert_eq!(
            p4,
            vec![&[4, 0, 0, 0][..], &[2, 1, 0, 0], &[0, 2, 0, 0], &[1, 0, 1, 0], &[0, 0, 0, 1]]
        );
    }

    #[test]
    fn counts_match_brute_force() {
        assert_eq!(partitions(10).unwrap().len(), 42);
        for n in 1..=N_MAX {
            let ps = partitions(n).unwrap();
            assert_eq!(ps.len(), brute_force_count(n), "n={n}");
            for p in ps {
                let weight: usize = p.mult.iter().enumerate().map(|(j, &b)| (j + 1) * b as usize).sum();
                assert_eq!(weight, n);
                assert!(p.parts as usize <= n);
            }
        }
    }

    #[test]
    fn coefficients_sum_to_bell_numbers() {
        let mut bell = vec![1.0f64];
        for m in 0..N_MAX {
            let next = (0..=m).map(|k| binom(m, k) * bell[k]).sum();
            bell.push(next);
        }
        for n in 1..=N_MAX {
            let s: f64 = partitions(n).unwrap().iter().map(|p| p.coefficient()).sum();
            assert!((s - bell[n]).abs() <= 1e-12 * bell[n], "n={n}: {s} vs {}", bell[n]);
        }
    }

    #[test]
    fn spec_examples() {
        assert_eq!(faa_di_bruno_exp(0, &[0.0]).unwrap(), 1.0);
        assert_eq!(faa_di_bruno_exp(1, &[0.0, 2.0]).unwrap(), 2.0);
        assert_eq!(faa_di_bruno_exp(2, &[0.0, 1.0, 1.0]).unwrap(), 2.0);
        assert_eq!(
            faa_di_bruno_exp(2, &[0.0, 1.0]),
            Err(NumericsError::LengthMismatch { expected: 3, got: 2 })
        );
        assert!(partitions(0).is_err());
        assert!(partitions(N_MAX + 1).is_err());
    }

    #[test]
    fn matches_bell_recurrence_for_laplace_like_exponent() {
        // f(s) = -a s^(2/alpha): every derivative alternates in sign.
        for &(a, alpha, s) in &[(1.3, 4.0, 0.7), (0.4, 3.0, 2.5), (2.0, 2.5, 0.1)] {
            let q = 2.0 / alpha;
            let mut f = Vec::new();
            let mut c = -a;
            for j in 0..=N_MAX {
                f.push(c * f64::powf(s, q - j as f64));
                c *= q - j as f64;
            }
            let oracle = bell_recurrence(&f);
            for n in 0..=N_MAX {
                let v = faa_di_bruno_exp(n, &f[..=n]).unwrap();
                let rel = (v - oracle[n]).abs() / oracle[n].abs();
                assert!(rel < 1e-9, "n={n}: {v} vs {}", oracle[n]);
            }
        }
    }

    #[test]
    fn matches_taylor_coefficients_of_polynomial_exponent() {
        // f(s) = 0.3 s - 0.2 s^2 + 0.05 s^3 expanded about s0 = 0.5.
        let poly = [0.0, 0.3, -0.2, 0.05];
        let s0: f64 = 0.5;
        let mut f = [0.0; N_MAX + 1];
        for (j, fj) in f.iter_mut().enumerate() {
            // j-th derivative of the cubic at s0
            for (p, &c) in poly.iter().enumerate().skip(j) {
                let falling: f64 = (0..j).map(|i| (p - i) as f64).product();
                *fj += c * falling * s0.powi((p - j) as i32);
            }
        }
        // exp of the shifted polynomial as a power series: c_{m} = sum_k k a_k c_{m-k} / m.
        let a: Vec<f64> = (0..=3)
            .map(|j| f[j] / (1..=j).map(|i| i as f64).product::<f64>())
            .collect();
        let mut c = vec![a[0].exp()];
        for m in 1..=N_MAX {
            let v: f64 = (1..=m.min(3)).map(|k| k as f64 * a[k] * c[m - k]).sum::<f64>() / m as f64;
            c.push(v);
        }
        let mut fact = 1.0;
        for n in 0..=N_MAX {
            if n > 0 {
                fact *= n as f64;
            }
            let want = c[n] * fact;
            let got = faa_di_bruno_exp(n, &f[..=n]).unwrap();
            assert!((got - want).abs() <= 1e-9 * want.abs().max(1e-300), "n={n}: {got} vs {want}");
        }
    }

    #[test]
    fn derivative_chain_against_central_differences() {
        // Order n checked as the central difference of order n-1, h = 1e-4 (1 + |s|).
        let derivs = |s: f64| -> Vec<f64> {
            let (a, q) = (0.8, 0.5);
            let mut out = Vec::new();
            let mut c = -a;
            for j in 0..=9 {
                out.push(c * s.powf(q - j as f64) + if j == 1 { 0.2 } else if j == 0 { 0.2 * s } else { 0.0 });
                c *= q - j as f64;
            }
            out
        };
        for &s in &[0.3, 1.0, 3.0] {
            let h = 1e-4 * (1.0 + s);
            let (fp, fm, f0) = (derivs(s + h), derivs(s - h), derivs(s));
            for n in 1..=8 {
                let up = faa_di_bruno_exp(n - 1, &fp[..n]).unwrap();
                let dn = faa_di_bruno_exp(n - 1, &fm[..n]).unwrap();
                let fd = (up - dn) / (2.0 * h);
                let exact = faa_di_bruno_exp(n, &f0[..=n]).unwrap();
                assert!((fd - exact).abs() <= 1e-4 * exact.abs(), "s={s} n={n}: {fd} vs {exact}");
            }
        }
    }
}
