//! Globally adaptive Gauss-Kronrod (G7/K15) quadrature for finite and
//! upper-unbounded intervals, scalar or vector valued.
//!
//! `[a, inf)` is mapped to `[0, 1)` by `x = a + scale * t / (1 - t)` before
//! bisection starts. Error per panel follows the QUADPACK rescaling of `|K15 - G7|`.

use super::NumericsError;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SemiInfiniteMap {
    /// `x = a + scale * t / (1 - t)`; `scale` should sit near the integrand's decay length.
    Rational { scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub map: SemiInfiniteMap,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 2000,
            map: SemiInfiniteMap::Rational { scale: 1.0 },
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        QuadratureSpec {
            rel_tol,
            abs_tol,
            ..Default::default()
        }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.map = SemiInfiniteMap::Rational { scale };
        self
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    fn validate(&self) -> Result<(), NumericsError> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(NumericsError::InvalidSpec("tolerances must be positive"));
        }
        if self.max_subdivisions == 0 {
            return Err(NumericsError::InvalidSpec("need at least one subdivision"));
        }
        let SemiInfiniteMap::Rational { scale } = self.map;
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(NumericsError::InvalidSpec("semi-infinite scale must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Finite(f64, f64),
    /// `[a, inf)`
    UpperInfinite(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VecEstimate {
    pub value: Vec<f64>,
    pub error: Vec<f64>,
    pub evaluations: usize,
}

pub fn integrate<F>(mut f: F, domain: Domain, spec: &QuadratureSpec) -> Result<Estimate, NumericsError>
where
    F: FnMut(f64) -> f64,
{
    let est = integrate_vec(1, |x, out: &mut [f64]| out[0] = f(x), domain, spec)?;
    Ok(Estimate {
        value: est.value[0],
        error: est.error[0],
        evaluations: est.evaluations,
    })
}

/// Integrates every component of `f` over the same domain. The subdivision
/// strategy refines whichever panel is worst relative to each component's own
/// tolerance, so all components meet `spec` on return.
pub fn integrate_vec<F>(
    dim: usize,
    mut f: F,
    domain: Domain,
    spec: &QuadratureSpec,
) -> Result<VecEstimate, NumericsError>
where
    F: FnMut(f64, &mut [f64]),
{
    spec.validate()?;
    if dim == 0 {
        return Err(NumericsError::InvalidSpec("zero-dimensional integrand"));
    }
    let (lo, hi, mapped) = match domain {
        Domain::Finite(a, b) => {
            if !(a.is_finite() && b.is_finite()) {
                return Err(NumericsError::InvalidSpec("finite domain needs finite limits"));
            }
            if a == b {
                return Ok(VecEstimate {
                    value: vec![0.0; dim],
                    error: vec![0.0; dim],
                    evaluations: 0,
                });
            }
            (a, b, None)
        }
        Domain::UpperInfinite(a) => {
            if !a.is_finite() {
                return Err(NumericsError::InvalidSpec("lower limit must be finite"));
            }
            let SemiInfiniteMap::Rational { scale } = spec.map;
            (0.0, 1.0, Some((a, scale)))
        }
    };

    let mut scratch = vec![0.0; dim];
    let mut eval = |t: f64, out: &mut [f64]| -> Result<(), NumericsError> {
        match mapped {
            None => {
                f(t, out);
                if out.iter().any(|v| !v.is_finite()) {
                    return Err(NumericsError::NonFinite { x: t });
                }
            }
            Some((a, scale)) => {
                let one_m = 1.0 - t;
                let x = a + scale * t / one_m;
                let jac = scale / (one_m * one_m);
                f(x, out);
                for v in out.iter_mut() {
                    if !v.is_finite() {
                        return Err(NumericsError::NonFinite { x });
                    }
                    *v *= jac;
                }
            }
        }
        Ok(())
    };

    let mut panels = Panels::new(dim);
    let mut work = Work::new(dim);
    work.rule(&mut eval, lo, hi, &mut scratch)?;
    panels.push(lo, hi, &work.res, &work.err);
    let mut evaluations = 15;

    let mut tol = vec![0.0; dim];
    let mut total = vec![0.0; dim];
    let mut total_err = vec![0.0; dim];
    loop {
        panels.totals(&mut total, &mut total_err);
        let mut done = true;
        for i in 0..dim {
            tol[i] = spec.abs_tol.max(spec.rel_tol * total[i].abs());
            if total_err[i] > tol[i] {
                done = false;
            }
        }
        if done {
            return Ok(VecEstimate {
                value: total,
                error: total_err,
                evaluations,
            });
        }
        if panels.len() >= spec.max_subdivisions {
            return Err(NumericsError::Accuracy {
                value: total,
                error: total_err,
                subdivisions: panels.len(),
            });
        }
        let j = panels.worst(&tol);
        let (a, b) = panels.bounds[j];
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // Panel cannot be split further in floating point.
            return Err(NumericsError::Accuracy {
                value: total,
                error: total_err,
                subdivisions: panels.len(),
            });
        }
        work.rule(&mut eval, a, mid, &mut scratch)?;
        panels.replace(j, a, mid, &work.res, &work.err);
        work.rule(&mut eval, mid, b, &mut scratch)?;
        panels.push(mid, b, &work.res, &work.err);
        evaluations += 30;
    }
}

struct Panels {
    dim: usize,
    bounds: Vec<(f64, f64)>,
    res: Vec<f64>,
    err: Vec<f64>,
}

impl Panels {
    fn new(dim: usize) -> Self {
        Panels {
            dim,
            bounds: Vec::new(),
            res: Vec::new(),
            err: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.bounds.len()
    }

    fn push(&mut self, a: f64, b: f64, res: &[f64], err: &[f64]) {
        self.bounds.push((a, b));
        self.res.extend_from_slice(res);
        self.err.extend_from_slice(err);
    }

    fn replace(&mut self, j: usize, a: f64, b: f64, res: &[f64], err: &[f64]) {
        self.bounds[j] = (a, b);
        let d = self.dim;
        self.res[j * d..(j + 1) * d].copy_from_slice(res);
        self.err[j * d..(j + 1) * d].copy_from_slice(err);
    }

    fn totals(&self, total: &mut [f64], total_err: &mut [f64]) {
        total.iter_mut().for_each(|v| *v = 0.0);
        total_err.iter_mut().for_each(|v| *v = 0.0);
        for (r, e) in self.res.chunks(self.dim).zip(self.err.chunks(self.dim)) {
            for i in 0..self.dim {
                total[i] += r[i];
                total_err[i] += e[i];
            }
        }
    }

    fn worst(&self, tol: &[f64]) -> usize {
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (j, e) in self.err.chunks(self.dim).enumerate() {
            let score = e
                .iter()
                .zip(tol)
                .map(|(e, t)| e / t)
                .fold(f64::NEG_INFINITY, f64::max);
            if score > best_score {
                best_score = score;
                best = j;
            }
        }
        best
    }
}

struct Work {
    res: Vec<f64>,
    err: Vec<f64>,
    fv: Vec<f64>,
    resg: Vec<f64>,
    resabs: Vec<f64>,
}

impl Work {
    fn new(dim: usize) -> Self {
        Work {
            res: vec![0.0; dim],
            err: vec![0.0; dim],
            fv: vec![0.0; 15 * dim],
            resg: vec![0.0; dim],
            resabs: vec![0.0; dim],
        }
    }

    fn rule<E>(&mut self, eval: &mut E, a: f64, b: f64, scratch: &mut [f64]) -> Result<(), NumericsError>
    where
        E: FnMut(f64, &mut [f64]) -> Result<(), NumericsError>,
    {
        let dim = self.res.len();
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        // fv layout: node 0 is the centre, then pairs (c - h x_j, c + h x_j).
        eval(c, scratch)?;
        self.fv[..dim].copy_from_slice(scratch);
        for j in 0..7 {
            let dx = h * XGK[j];
            eval(c - dx, scratch)?;
            let o = (1 + 2 * j) * dim;
            self.fv[o..o + dim].copy_from_slice(scratch);
            eval(c + dx, scratch)?;
            self.fv[o + dim..o + 2 * dim].copy_from_slice(scratch);
        }
        for i in 0..dim {
            let fc = self.fv[i];
            let mut rk = WGK[7] * fc;
            let mut rg = WG[3] * fc;
            let mut rabs = rk.abs();
            for j in 0..7 {
                let o = (1 + 2 * j) * dim;
                let (f1, f2) = (self.fv[o + i], self.fv[o + dim + i]);
                rk += WGK[j] * (f1 + f2);
                rabs += WGK[j] * (f1.abs() + f2.abs());
                if j % 2 == 1 {
                    rg += WG[j / 2] * (f1 + f2);
                }
            }
            let mean = 0.5 * rk;
            let mut rasc = WGK[7] * (fc - mean).abs();
            for j in 0..7 {
                let o = (1 + 2 * j) * dim;
                rasc += WGK[j] * ((self.fv[o + i] - mean).abs() + (self.fv[o + dim + i] - mean).abs());
            }
            self.resg[i] = rg * h;
            self.resabs[i] = rabs * h.abs();
            self.res[i] = rk * h;
            self.err[i] = rescale_error((rk - rg) * h, rabs * h.abs(), rasc * h.abs());
        }
        Ok(())
    }
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut e = err.abs();
    if resasc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / resasc).powf(1.5);
        e = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * resabs);
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exponential_tail() {
        let e = integrate(|x| (-x).exp(), Domain::UpperInfinite(0.0), &QuadratureSpec::default())
            .unwrap();
        assert!((e.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rayleigh_normalisation() {
        let lam = 2.0;
        let spec = QuadratureSpec::default().with_scale(0.3);
        let e = integrate(
            |x| 2.0 * PI * lam * x * (-PI * lam * x * x).exp(),
            Domain::UpperInfinite(0.0),
            &spec,
        )
        .unwrap();
        assert!((e.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn vector_components_share_nodes() {
        let e = integrate_vec(
            3,
            |x, out: &mut [f64]| {
                out[0] = (-x).exp();
                out[1] = x * (-x).exp();
                out[2] = x * x * (-x).exp();
            },
            Domain::UpperInfinite(0.0),
            &QuadratureSpec::default(),
        )
        .unwrap();
        for (v, want) in e.value.iter().zip([1.0, 1.0, 2.0]) {
            assert!((v - want).abs() < 1e-9, "{v} vs {want}");
        }
    }

    #[test]
    fn error_estimate_bounds_true_error() {
        type Case = (&'static str, fn(f64) -> f64, Domain, f64);
        let suite: [Case; 10] = [
            ("exp", |x| (-x).exp(), Domain::UpperInfinite(0.0), 1.0),
            ("lorentz", |x| 1.0 / (1.0 + x * x), Domain::UpperInfinite(0.0), PI / 2.0),
            ("gauss", |x| (-x * x).exp(), Domain::UpperInfinite(0.0), PI.sqrt() / 2.0),
            ("cubic tail", |x| (1.0 + x).powi(-3), Domain::UpperInfinite(0.0), 0.5),
            ("gamma3", |x| x * x * (-x).exp(), Domain::UpperInfinite(0.0), 2.0),
            ("sin", f64::sin, Domain::Finite(0.0, PI), 2.0),
            ("sqrt", f64::sqrt, Domain::Finite(0.0, 1.0), 2.0 / 3.0),
            ("log", |x| x.ln(), Domain::Finite(0.0, 1.0), -1.0),
            ("oscillatory", |x| (10.0 * x).cos(), Domain::Finite(0.0, 1.0), 10f64.sin() / 10.0),
            ("inv sqrt", |x| 1.0 / x.sqrt(), Domain::Finite(0.0, 1.0), 2.0),
        ];
        for spec in [QuadratureSpec::new(1e-4, 1e-12), QuadratureSpec::new(1e-8, 1e-14)] {
            for (name, f, dom, exact) in suite.iter() {
                let e = integrate(f, *dom, &spec.with_max_subdivisions(5000)).unwrap();
                let err = (e.value - exact).abs();
                assert!(err <= e.error, "{name}: true error {err:e} > estimate {:e}", e.error);
            }
        }
    }

    #[test]
    fn simpson_oracle_for_hypergeometric_integrand() {
        use crate::numerics::hyp2f1;
        let f = |x: f64| x * (-x * x).exp() * hyp2f1(1.0, 0.5, 1.5, -x).unwrap();
        // Composite Simpson with 10^6 panels on [0, 50].
        let n = 1_000_000;
        let h = 50.0 / n as f64;
        let mut s = f(0.0) + f(50.0);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        let oracle = s * h / 3.0;
        let e = integrate(f, Domain::UpperInfinite(0.0), &QuadratureSpec::default()).unwrap();
        assert!((e.value - oracle).abs() < 1e-10, "{} vs {}", e.value, oracle);
    }

    #[test]
    fn budget_exhaustion_attaches_estimate() {
        let spec = QuadratureSpec::new(1e-14, 1e-300).with_max_subdivisions(3);
        let err = integrate(|x| (50.0 * x).sin().abs(), Domain::Finite(0.0, 3.0), &spec).unwrap_err();
        match err {
            NumericsError::Accuracy { value, subdivisions, .. } => {
                assert_eq!(subdivisions, 3);
                assert!(value[0] > 1.0 && value[0] < 3.0);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let spec = QuadratureSpec::new(0.0, 1e-10);
        assert!(integrate(|x| x, Domain::Finite(0.0, 1.0), &spec).is_err());
        assert!(integrate(|x| x, Domain::Finite(0.0, f64::INFINITY), &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let r = integrate(|_| f64::NAN, Domain::Finite(0.0, 1.0), &QuadratureSpec::default());
        assert!(matches!(r, Err(NumericsError::NonFinite { .. })));
    }
}
