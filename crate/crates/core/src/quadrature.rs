//! One-dimensional quadrature: Gauss–Hermite rules for the standard Gaussian
//! weight and globally adaptive Gauss–Kronrod (7/15) on finite and infinite
//! intervals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Plain quadrature settings shared by every integrating operation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSettings {
    /// Node count for Gauss–Hermite rules.
    pub nodes: usize,
    /// Cap on adaptive bisections per integral.
    pub max_subdivisions: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self { nodes: 80, max_subdivisions: 400, rel_tol: 1e-10, abs_tol: 1e-14 }
    }
}

impl QuadSettings {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

/// Value and error estimate of an adaptive integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadOutcome {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

impl QuadOutcome {
    fn zero() -> Self {
        Self { value: 0.0, error: 0.0, evaluations: 0 }
    }

    fn add(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            error: self.error + other.error,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

/// Gauss–Hermite rule for the weight `e^{-x²/2}/√(2π)`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Build an `n`-node rule by Newton iteration on the orthonormal Hermite recurrence.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("Gauss-Hermite needs at least 2 nodes, got {n}")));
        }
        const PIM4: f64 = 0.751_125_544_464_942_5;
        let nf = n as f64;
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        let mut z = 0.0f64;
        for i in 0..n.div_ceil(2) {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * x[0],
                3 => 1.91 * z - 0.91 * x[1],
                _ => 2.0 * z - x[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..200 {
                let mut p1 = PIM4;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            x[i] = z;
            x[n - 1 - i] = -z;
            w[i] = 2.0 / (pp * pp);
            w[n - 1 - i] = w[i];
        }
        let scale = std::f64::consts::PI.sqrt();
        let nodes = x.iter().rev().map(|v| v * std::f64::consts::SQRT_2).collect();
        let weights = w.iter().rev().map(|v| v / scale).collect();
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `E f(Z)` for `Z ~ N(0,1)`, failing if `f` is non-finite at a node.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> Result<f64> {
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let v = f(*x);
            if !v.is_finite() {
                return Err(Error::NonFinite("integrand at a Gauss-Hermite node"));
            }
            acc += w * v;
        }
        Ok(acc)
    }
}

/// `E f(Z)`, `Z ~ N(0,1)`, with an `nodes`-point Gauss–Hermite rule.
pub fn gauss_hermite_integrate<F: FnMut(f64) -> f64>(f: F, nodes: usize) -> Result<f64> {
    GaussHermite::new(nodes)?.integrate(f)
}

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

#[derive(Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    resabs: f64,
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let h = half.abs();
    let value = resk * half;
    resabs *= h;
    resasc *= h;
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Segment { a, b, value, error, resabs }
}

/// Globally adaptive G7K15 on the finite interval `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, settings: &QuadSettings) -> Result<QuadOutcome> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::NonFinite("integration limits"));
    }
    if a == b {
        return Ok(QuadOutcome::zero());
    }
    let mut segments = vec![kronrod(&mut f, a, b)];
    let mut evaluations = 15;
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if !value.is_finite() {
            return Err(Error::NonFinite("adaptive integrand"));
        }
        let tol = settings.abs_tol.max(settings.rel_tol * value.abs());
        let roundoff: f64 = 100.0 * f64::EPSILON * segments.iter().map(|s| s.resabs).sum::<f64>();
        if error <= tol || error <= roundoff {
            return Ok(QuadOutcome { value, error, evaluations });
        }
        if segments.len() > settings.max_subdivisions {
            return Err(Error::Quadrature { achieved: error, requested: tol });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty segment list");
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            return Err(Error::Quadrature { achieved: error, requested: tol });
        }
        segments.push(kronrod(&mut f, s.a, mid));
        segments.push(kronrod(&mut f, mid, s.b));
        evaluations += 30;
    }
}

/// `∫_a^∞ f` via `x = a + (1-u)/u`.
pub fn integrate_upper<F: FnMut(f64) -> f64>(mut f: F, a: f64, settings: &QuadSettings) -> Result<QuadOutcome> {
    integrate(
        |u| {
            if u <= 0.0 {
                return 0.0;
            }
            let x = a + (1.0 - u) / u;
            let v = f(x) / (u * u);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        settings,
    )
}

/// `∫_{-∞}^b f`.
pub fn integrate_lower<F: FnMut(f64) -> f64>(mut f: F, b: f64, settings: &QuadSettings) -> Result<QuadOutcome> {
    integrate_upper(|x| f(2.0 * b - x), b, settings)
}

/// `∫_R f`, split at `center`.
pub fn integrate_real_line<F: FnMut(f64) -> f64>(mut f: F, center: f64, settings: &QuadSettings) -> Result<QuadOutcome> {
    let left = integrate_lower(&mut f, center, settings)?;
    let right = integrate_upper(&mut f, center, settings)?;
    Ok(left.add(right))
}

/// `∫_a^b f` split at the interior `breaks` (which need not be sorted).
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    settings: &QuadSettings,
) -> Result<QuadOutcome> {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|x| *x > a && *x < b).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut out = QuadOutcome::zero();
    let mut lo = a;
    for hi in pts.into_iter().chain(std::iter::once(b)) {
        out = out.add(integrate(&mut f, lo, hi, settings)?);
        lo = hi;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_hermite_moments() {
        let gh = GaussHermite::new(12).unwrap();
        assert!((gh.integrate(|_| 1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((gh.integrate(|x| x * x).unwrap() - 1.0).abs() < 1e-13);
        assert!((gh.integrate(|x| x.powi(4)).unwrap() - 3.0).abs() < 1e-13);
        let gh3 = GaussHermite::new(3).unwrap();
        assert!((gh3.integrate(|x| x.powi(4)).unwrap() - 3.0).abs() < 1e-13);
        assert!((gh3.integrate(|x| x.powi(5)).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn gauss_hermite_large_rule_is_normalized() {
        for n in [40, 80, 150] {
            let gh = GaussHermite::new(n).unwrap();
            assert!((gh.integrate(|_| 1.0).unwrap() - 1.0).abs() < 1e-12, "n = {n}");
            assert!((gh.integrate(|x| x.powi(10)).unwrap() - 945.0).abs() < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn gauss_hermite_rejects_bad_input() {
        assert!(GaussHermite::new(1).is_err());
        assert!(gauss_hermite_integrate(|x| 1.0 / (x - x), 4).is_err());
    }

    #[test]
    fn adaptive_finite_and_infinite() {
        let s = QuadSettings::default();
        let r = integrate(|x| x.sqrt(), 0.0, 1.0, &s).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-10);
        let r = integrate_upper(|x| (-x).exp(), 0.0, &s).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        let r = integrate_real_line(|x| (-x * x).exp(), 0.3, &s).unwrap();
        assert!((r.value - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        let r = integrate_with_breaks(|x: f64| x.abs(), -1.0, 2.0, &[0.0], &s).unwrap();
        assert!((r.value - 2.5).abs() < 1e-13);
    }

    #[test]
    fn adaptive_reports_nonconvergence() {
        let s = QuadSettings { max_subdivisions: 3, ..QuadSettings::default() };
        let err = integrate(|x: f64| (1.0 / x).sin() / x, 1e-6, 1.0, &s).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }
}
