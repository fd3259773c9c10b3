//! The Mehler kernel `p_t(x, y)`, density of the Ornstein–Uhlenbeck transition
//! law with respect to the standard Gaussian measure, and integrals against it.

use crate::error::{ensure_finite, invalid, Error, Result};
use crate::quadrature::{integrate_lower, integrate_upper, GaussHermite, QuadSettings};
use crate::special::chi_pdf;

/// A point of `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelPoint {
    coords: Vec<f64>,
}

impl KernelPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(invalid("points need d ≥ 1"));
        }
        ensure_finite(&coords, "kernel point")?;
        Ok(Self { coords })
    }

    /// The origin of `R^d`.
    pub fn origin(d: usize) -> Result<Self> {
        Self::new(vec![0.0; d])
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm_sq(&self) -> f64 {
        self.coords.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum()
    }
}

impl From<f64> for KernelPoint {
    fn from(x: f64) -> Self {
        Self { coords: vec![x] }
    }
}

/// A strictly positive time `t` with `a = e^{-t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelTime {
    t: f64,
    a: f64,
}

impl KernelTime {
    /// Accepts `t ∈ (0, ∞]`.
    pub fn new(t: f64) -> Result<Self> {
        if t.is_nan() || t <= 0.0 {
            return Err(invalid(format!("kernel time must be > 0, got {t}")));
        }
        Ok(Self { t, a: (-t).exp() })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// `1 - a²`, accurate for small `t`.
    pub fn one_minus_a2(&self) -> f64 {
        -(-2.0 * self.t).exp_m1()
    }

    /// `1 - a`, accurate for small `t`.
    pub fn one_minus_a(&self) -> f64 {
        -(-self.t).exp_m1()
    }
}

/// `ln p_t` from `|x|²`, `|y|²` and `x·y`.
///
/// The exponent is split as `a|x-y|²/(2(1-a²)) - a(|x|²+|y|²)/(2(1+a))`,
/// which never cancels catastrophically as `t → 0`.
#[inline]
pub(crate) fn ln_kernel_parts(d: usize, t: f64, xx: f64, yy: f64, xy: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let a = (-t).exp();
    let one_minus_a2 = -(-2.0 * t).exp_m1();
    let dist_sq = (xx + yy - 2.0 * xy).max(0.0);
    -0.5 * d as f64 * one_minus_a2.ln() - a * dist_sq / (2.0 * one_minus_a2) + a * (xx + yy) / (2.0 * (1.0 + a))
}

fn check_dims(x: &KernelPoint, y: &KernelPoint) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), found: y.dim() });
    }
    Ok(())
}

/// `ln p_t(x, y)`; finite for every finite input.
pub fn ln_mehler_kernel(t: KernelTime, x: &KernelPoint, y: &KernelPoint) -> Result<f64> {
    check_dims(x, y)?;
    Ok(ln_kernel_parts(x.dim(), t.t, x.norm_sq(), y.norm_sq(), x.dot(y)))
}

/// `p_t(x, y)`.
pub fn mehler_kernel(t: KernelTime, x: &KernelPoint, y: &KernelPoint) -> Result<f64> {
    let v = ln_mehler_kernel(t, x, y)?.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite("kernel value overflows; use ln_mehler_kernel"))
    }
}

/// `ln p_t(x, x) = -(d/2) ln(1-a²) + a|x|²/(1+a)`.
pub fn ln_mehler_diagonal(t: KernelTime, x: &KernelPoint) -> f64 {
    let d = x.dim() as f64;
    -0.5 * d * t.one_minus_a2().ln() + t.a * x.norm_sq() / (1.0 + t.a)
}

/// `p_t(x, x)`.
pub fn mehler_diagonal(t: KernelTime, x: &KernelPoint) -> Result<f64> {
    let v = ln_mehler_diagonal(t, x).exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite("diagonal kernel value overflows"))
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(invalid(format!("time must be ≥ 0, got {t}")));
    }
    Ok(())
}

/// `∫|x-y|² p_t(x,y) dμ(y) = (1-e^{-t})²|x|² + d(1-e^{-2t})` for `t ≥ 0`.
pub fn kernel_second_moment(t: f64, x: &KernelPoint) -> Result<f64> {
    check_time(t)?;
    let one_minus_a = -(-t).exp_m1();
    let one_minus_a2 = -(-2.0 * t).exp_m1();
    Ok(one_minus_a * one_minus_a * x.norm_sq() + x.dim() as f64 * one_minus_a2)
}

/// `∫|x-y|^p p_t(x,y) dμ(y)`, i.e. `E|b e₁ + σZ|^p` with `b = (1-e^{-t})|x|`,
/// `σ² = 1-e^{-2t}`, by nested radial quadrature.
pub fn kernel_p_cost(t: f64, x: &KernelPoint, p: f64, quad: &QuadSettings) -> Result<f64> {
    check_time(t)?;
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid(format!("p must be ≥ 1, got {p}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let b = -(-t).exp_m1() * x.norm();
    let sigma = (-(-2.0 * t).exp_m1()).sqrt();
    shifted_gaussian_abs_moment(b, sigma, x.dim(), p, quad)
}

/// `E|b e₁ + σZ|^p` for `Z ~ N(0, I_d)`.
pub(crate) fn shifted_gaussian_abs_moment(b: f64, sigma: f64, d: usize, p: f64, quad: &QuadSettings) -> Result<f64> {
    let phi = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let z0 = -b / sigma;
    if d == 1 {
        let f = |z: f64| (b + sigma * z).abs().powf(p) * phi(z);
        let lo = integrate_lower(f, z0, quad)?;
        let hi = integrate_upper(f, z0, quad)?;
        return Ok(lo.value + hi.value);
    }
    let perp = d - 1;
    let mut failure = None;
    let mut outer = |z: f64| {
        let along = (b + sigma * z).powi(2);
        let inner = integrate_upper(
            |r| (along + sigma * sigma * r * r).powf(0.5 * p) * chi_pdf(r, perp),
            0.0,
            quad,
        );
        match inner {
            Ok(o) => o.value * phi(z),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let lo = integrate_lower(&mut outer, z0, quad)?;
    let hi = integrate_upper(&mut outer, z0, quad)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(lo.value + hi.value)
}

/// Value of `∫ p_t(x,y)^q dμ(y)` together with the hypercontractive envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerIntegral {
    pub value: f64,
    pub ln_value: f64,
    /// `(1-a²)^{-(q-1)d/2} e^{(q-1)|x|²/2}`.
    pub bound: f64,
    pub within_bound: bool,
}

/// `ln ∫ p_t(x,y)^q dμ(y)` for any `q > 0`.
///
/// The integrand factorizes along `x̂` and its orthogonal complement. The
/// axial factor is a Gauss–Hermite rule recentred and rescaled to the
/// integrand's own Gaussian profile; the orthogonal factor is a radial
/// integral against the chi law with `d - 1` degrees of freedom.
pub fn ln_kernel_integral(t: KernelTime, x: &KernelPoint, q: f64, quad: &QuadSettings) -> Result<f64> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(invalid(format!("q must be > 0, got {q}")));
    }
    let d = x.dim();
    let a = t.a;
    let oma2 = t.one_minus_a2();
    let r = x.norm();
    let xx = r * r;
    // ln p^q along u = y·x̂ (constant part dropped), plus the Gaussian weight
    let g = |u: f64| -q * (a * a * u * u - 2.0 * a * r * u) / (2.0 * oma2) - 0.5 * u * u;
    let precision = 1.0 + q * a * a / oma2;
    let mode = q * a * r / (oma2 * precision);
    let scale = 1.0 / precision.sqrt();
    let gm = g(mode);
    let gh = GaussHermite::new(quad.nodes.max(2))?;
    let axial = gh.integrate(|z| (g(mode + scale * z) - gm + 0.5 * z * z).exp())? * scale;
    let ln_axial = axial.ln() + gm;
    let ln_perp = if d == 1 {
        0.0
    } else {
        let kappa = q * a * a / (2.0 * oma2);
        integrate_upper(|s| (-kappa * s * s).exp() * chi_pdf(s, d - 1), 0.0, quad)?.value.ln()
    };
    let ln_const = -0.5 * q * d as f64 * oma2.ln() - q * a * a * xx / (2.0 * oma2);
    Ok(ln_const + ln_axial + ln_perp)
}

/// `∫ p_t(x,y)^q dμ(y)` for `q ≥ 2`, with the bound flag.
pub fn kernel_power_integral(t: KernelTime, x: &KernelPoint, q: f64, quad: &QuadSettings) -> Result<PowerIntegral> {
    if !(q >= 2.0) {
        return Err(invalid(format!("q must be ≥ 2, got {q}")));
    }
    let ln_value = ln_kernel_integral(t, x, q, quad)?;
    let ln_bound = -(q - 1.0) * 0.5 * x.dim() as f64 * t.one_minus_a2().ln() + 0.5 * (q - 1.0) * x.norm_sq();
    Ok(PowerIntegral {
        value: ln_value.exp(),
        ln_value,
        bound: ln_bound.exp(),
        within_bound: ln_value <= ln_bound + 1e-12 * ln_bound.abs().max(1.0),
    })
}
