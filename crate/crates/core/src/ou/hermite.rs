//! One-dimensional Hermite spectral calculus for the Ornstein–Uhlenbeck
//! generator `L = d²/dx² - x d/dx`.
//!
//! Expansions use the probabilists' polynomials `H_k` with `∫H_k² dμ = k!`,
//! so that `L H_k = -k H_k` and `P_t H_k = e^{-kt} H_k`.

use crate::error::{ensure_finite, invalid, Error, Result};
use crate::quadrature::{GaussHermite, QuadSettings};

/// `f = Σ_k c_k H_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteExpansion {
    coeffs: Vec<f64>,
}

#[cfg(test)]
fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

impl HermiteExpansion {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        ensure_finite(&coeffs, "Hermite coefficients")?;
        Ok(Self { coeffs })
    }

    /// The single polynomial `H_k`.
    pub fn basis(k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = 1.0;
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// Highest stored index (0 for the empty expansion).
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_mean_zero(&self) -> bool {
        self.coeff(0) == 0.0
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self { coeffs: (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect() }
    }

    /// The expansion without its constant term.
    pub fn centered(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        if let Some(c0) = coeffs.first_mut() {
            *c0 = 0.0;
        }
        Self { coeffs }
    }

    /// Pointwise value by the three-term recurrence `H_{k+1} = x H_k - k H_{k-1}`.
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        let (mut h_prev, mut h) = (0.0, 1.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            acc += c * h;
            let next = x * h - k as f64 * h_prev;
            h_prev = h;
            h = next;
        }
        acc
    }

    /// Exact derivative, from `H_k' = k H_{k-1}`.
    pub fn derivative(&self) -> Self {
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect();
        Self { coeffs }
    }

    /// `∫ f g dμ = Σ c_k e_k k!`.
    pub fn inner(&self, other: &Self) -> f64 {
        let mut fact = 1.0;
        let mut acc = 0.0;
        for k in 0..self.coeffs.len().min(other.coeffs.len()) {
            if k > 0 {
                fact *= k as f64;
            }
            acc += self.coeffs[k] * other.coeffs[k] * fact;
        }
        acc
    }

    /// `∫ f² dμ`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.inner(self)
    }
}

/// `P_t f`: coefficient `k` times `e^{-kt}`.
pub fn semigroup_apply(f: &HermiteExpansion, t: f64) -> Result<HermiteExpansion> {
    if t.is_nan() || t < 0.0 {
        return Err(invalid(format!("semigroup time must be ≥ 0, got {t}")));
    }
    let coeffs = f.coeffs.iter().enumerate().map(|(k, c)| c * (-(k as f64) * t).exp()).collect();
    Ok(HermiteExpansion { coeffs })
}

/// `(-L)^e f`: coefficient `k ≥ 1` times `k^e`; `c_0` must vanish for `e < 0`.
pub fn spectral_apply(f: &HermiteExpansion, exponent: f64) -> Result<HermiteExpansion> {
    if !exponent.is_finite() {
        return Err(invalid("spectral exponent must be finite"));
    }
    if exponent < 0.0 && !f.is_mean_zero() {
        return Err(Error::NotMeanZero(f.coeff(0)));
    }
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| if k == 0 { if exponent == 0.0 { *c } else { 0.0 } } else { c * (k as f64).powf(exponent) })
        .collect();
    Ok(HermiteExpansion { coeffs })
}

/// `∫ f (-L)^{-1} h dμ = Σ_{k≥1} f_k h_k k!/k`.
pub fn inverse_generator_form(f: &HermiteExpansion, h: &HermiteExpansion) -> f64 {
    let mut fact = 1.0;
    let mut acc = 0.0;
    for k in 1..f.coeffs.len().min(h.coeffs.len()) {
        fact *= k as f64;
        acc += f.coeffs[k] * h.coeffs[k] * fact / k as f64;
    }
    acc
}

/// `P_t f(x) = E f(e^{-t}x + √(1-e^{-2t}) Z)` by Gauss–Hermite quadrature.
pub fn mehler_average<F: Fn(f64) -> f64>(f: F, t: f64, x: f64, rule: &GaussHermite) -> Result<f64> {
    let a = (-t).exp();
    let sigma = (-(-2.0 * t).exp_m1()).sqrt();
    rule.integrate(|z| f(a * x + sigma * z))
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid(format!("p must be ≥ 1, got {p}")));
    }
    Ok(())
}

/// `∫ |f|^p dμ` (the `p`-th power of the `L^p(μ)` norm) by Gauss–Hermite.
pub fn lp_norm(f: &HermiteExpansion, p: f64, quad: &QuadSettings) -> Result<f64> {
    check_p(p)?;
    let rule = GaussHermite::new(quad.nodes.max(f.degree() + 2))?;
    rule.integrate(|x| f.eval(x).abs().powf(p))
}

/// `∫ |f'|^p dμ` with the derivative taken exactly.
pub fn gradient_lp_norm(f: &HermiteExpansion, p: f64, quad: &QuadSettings) -> Result<f64> {
    lp_norm(&f.derivative(), p, quad)
}

/// `∫ |∇f|² dμ = Σ k c_k² k!`, the `p = 2` Riesz identity in coefficient form.
pub fn dirichlet_form(f: &HermiteExpansion) -> f64 {
    let mut fact = 1.0;
    let mut acc = 0.0;
    for (k, c) in f.coeffs.iter().enumerate().skip(1) {
        fact *= k as f64;
        acc += k as f64 * c * c * fact;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recurrence_matches_explicit_polynomials() {
        for &x in &[-2.0, -0.3, 0.0, 1.7] {
            let x: f64 = x;
            assert!((HermiteExpansion::basis(2).eval(x) - (x * x - 1.0)).abs() < 1e-14);
            assert!((HermiteExpansion::basis(3).eval(x) - (x.powi(3) - 3.0 * x)).abs() < 1e-13);
            assert!((HermiteExpansion::basis(4).eval(x) - (x.powi(4) - 6.0 * x * x + 3.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn norms_are_factorials() {
        let q = QuadSettings::default();
        for k in 0..8 {
            let h = HermiteExpansion::basis(k);
            assert!((lp_norm(&h, 2.0, &q).unwrap() - factorial(k)).abs() < 1e-9 * factorial(k));
            assert_eq!(h.l2_norm_sq(), factorial(k));
        }
    }

    #[test]
    fn spectral_examples() {
        let h1 = HermiteExpansion::basis(1);
        assert_eq!(spectral_apply(&h1, -0.5).unwrap(), h1);
        let h4 = HermiteExpansion::basis(4);
        assert_eq!(spectral_apply(&h4, -1.0).unwrap().coeff(4), 0.25);
        let f = HermiteExpansion::new(vec![0.0, 0.3, -1.2, 0.5, 2.0]).unwrap();
        let twice = spectral_apply(&spectral_apply(&f, -0.5).unwrap(), -0.5).unwrap();
        let once = spectral_apply(&f, -1.0).unwrap();
        for k in 0..5 {
            assert!((twice.coeff(k) - once.coeff(k)).abs() < 1e-15);
        }
        let up = spectral_apply(&spectral_apply(&f, 0.5).unwrap(), 0.5).unwrap();
        for k in 0..5 {
            assert!((up.coeff(k) - k as f64 * f.coeff(k)).abs() < 1e-14);
        }
        assert!(matches!(spectral_apply(&HermiteExpansion::basis(0), -1.0), Err(Error::NotMeanZero(_))));
    }

    #[test]
    fn semigroup_examples() {
        let h0 = HermiteExpansion::basis(0);
        assert_eq!(semigroup_apply(&h0, 3.0).unwrap(), h0);
        let half = semigroup_apply(&HermiteExpansion::basis(1), std::f64::consts::LN_2).unwrap();
        assert!((half.coeff(1) - 0.5).abs() < 1e-16);
    }

    #[test]
    fn gradient_examples() {
        let q = QuadSettings::default();
        for k in 1..7 {
            let h = HermiteExpansion::basis(k);
            let expected = k as f64 * factorial(k);
            assert!((gradient_lp_norm(&h, 2.0, &q).unwrap() - expected).abs() < 1e-9 * expected);
            assert_eq!(dirichlet_form(&h), expected);
        }
        assert_eq!(gradient_lp_norm(&HermiteExpansion::basis(0), 3.0, &q).unwrap(), 0.0);
    }
}
