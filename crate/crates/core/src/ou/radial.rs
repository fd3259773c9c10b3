//! Radial functions in the eigenbasis of the Ornstein–Uhlenbeck generator.
//!
//! A radial function `h(|y|)` on `(R^d, μ)` expands in the generalized
//! Laguerre polynomials `L_j^{(α)}(|y|²/2)` with `α = d/2 - 1`, which are
//! eigenfunctions of the generator with eigenvalue `-2j`. In this basis the
//! semigroup is the diagonal damping `e^{-2js}` and `(-L)^{-1/2}` is division by
//! `√(2j)`, so the norms of radial fields reduce to weighted coefficient sums.
//! Under `μ`, `x = |y|²/2` has the Gamma(`α + 1`) law, in which
//! `‖L_j‖² = Γ(j+α+1) / (j! Γ(α+1))`.

use crate::error::{invalid, Result};
use crate::special::{gamma_p, ln_gamma};

/// `L_0^{(α)}(x), …, L_J^{(α)}(x)` by the three-term recurrence.
pub fn laguerre_values(alpha: f64, x: f64, jmax: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(jmax + 1);
    out.push(1.0);
    if jmax == 0 {
        return out;
    }
    out.push(1.0 + alpha - x);
    for j in 1..jmax {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + alpha - x) * out[j] - (jf + alpha) * out[j - 1]) / (jf + 1.0);
        out.push(next);
    }
    out
}

/// `‖L_j^{(α)}‖²` under Gamma(`α + 1`), `j = 0..=J`.
pub fn laguerre_norms_sq(alpha: f64, jmax: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(jmax + 1);
    out.push(1.0);
    for j in 1..=jmax {
        let jf = j as f64;
        out.push(out[j - 1] * (jf + alpha) / jf);
    }
    out
}

/// `E[L_j^{(α)}(X) 1{lo ≤ X < hi}]` for `X ~ Gamma(α + 1)`, `j = 0..=J`.
///
/// Uses `d/dx [x^{α+1} e^{-x} L_{j-1}^{(α+1)}(x)] = j x^α e^{-x} L_j^{(α)}(x)`.
pub fn laguerre_shell_projection(alpha: f64, lo: f64, hi: f64, jmax: usize) -> Vec<f64> {
    let mut out = vec![0.0; jmax + 1];
    out[0] = gamma_p(alpha + 1.0, hi) - gamma_p(alpha + 1.0, lo);
    if jmax == 0 {
        return out;
    }
    let edge = |x: f64| -> Vec<f64> {
        if x <= 0.0 {
            return vec![0.0; jmax];
        }
        let w = ((alpha + 1.0) * x.ln() - x - ln_gamma(alpha + 1.0)).exp();
        laguerre_values(alpha + 1.0, x, jmax - 1).into_iter().map(|l| w * l).collect()
    };
    let (a, b) = (edge(lo), edge(hi));
    for j in 1..=jmax {
        out[j] = (b[j - 1] - a[j - 1]) / j as f64;
    }
    out
}

/// A radial function `Σ_j c_j L_j^{(α)}(|y|²/2)` truncated at degree `J`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSpectrum {
    d: usize,
    alpha: f64,
    coeffs: Vec<f64>,
    norms_sq: Vec<f64>,
}

/// One evolved shell `weight · P_time 1{lo ≤ |y| < hi}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolvedShell {
    pub lo: f64,
    pub hi: f64,
    pub time: f64,
    pub weight: f64,
}

impl RadialSpectrum {
    /// Degree at which `e^{-2J t}` drops below `e^{-40}` for the smallest time.
    pub fn degree_for_time(t_min: f64) -> usize {
        (20.0 / t_min).ceil().max(16.0) as usize
    }

    pub fn from_coeffs(d: usize, coeffs: Vec<f64>) -> Result<Self> {
        if d == 0 || coeffs.is_empty() {
            return Err(invalid("radial spectrum needs d ≥ 1 and at least one coefficient"));
        }
        let alpha = 0.5 * d as f64 - 1.0;
        let norms_sq = laguerre_norms_sq(alpha, coeffs.len() - 1);
        Ok(Self { d, alpha, coeffs, norms_sq })
    }

    /// Sum of evolved shell indicators, exact up to the truncation degree.
    pub fn from_shells(d: usize, shells: &[EvolvedShell], jmax: usize) -> Result<Self> {
        let alpha = 0.5 * d as f64 - 1.0;
        let norms_sq = laguerre_norms_sq(alpha, jmax);
        let mut coeffs = vec![0.0; jmax + 1];
        for s in shells {
            if !(s.time >= 0.0) || !(s.lo >= 0.0 && s.hi >= s.lo) {
                return Err(invalid(format!("invalid shell {s:?}")));
            }
            let proj = laguerre_shell_projection(alpha, 0.5 * s.lo * s.lo, 0.5 * s.hi * s.hi, jmax);
            let damp = (-2.0 * s.time).exp();
            let mut decay = s.weight;
            for j in 0..=jmax {
                coeffs[j] += decay * proj[j] / norms_sq[j];
                decay *= damp;
            }
        }
        Ok(Self { d, alpha, coeffs, norms_sq })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `∫ h dμ`.
    pub fn mean(&self) -> f64 {
        self.coeffs[0]
    }

    /// Same function with the constant term added to.
    pub fn shifted(mut self, c: f64) -> Self {
        self.coeffs[0] += c;
        self
    }

    /// `Σ_j w_j c_j L_j(ρ²/2)`.
    fn weighted_eval(&self, rho: f64, w: impl Fn(usize) -> f64) -> f64 {
        let l = laguerre_values(self.alpha, 0.5 * rho * rho, self.degree());
        l.iter().zip(&self.coeffs).enumerate().map(|(j, (l, c))| w(j) * c * l).sum()
    }

    /// `h(ρ)`.
    pub fn eval(&self, rho: f64) -> f64 {
        self.weighted_eval(rho, |_| 1.0)
    }

    /// `P_s h(ρ)`.
    pub fn semigroup_eval(&self, s: f64, rho: f64) -> f64 {
        let damp = (-2.0 * s).exp();
        self.weighted_eval(rho, |j| damp.powi(j as i32))
    }

    /// `(-L)^{-1/2} h(ρ)`, ignoring the constant term.
    pub fn riesz_eval(&self, rho: f64) -> f64 {
        self.weighted_eval(rho, |j| if j == 0 { 0.0 } else { (2.0 * j as f64).powf(-0.5) })
    }

    /// `∫_0^∞ P_{u+t} h(ρ) du`, ignoring the constant term.
    pub fn resolvent_eval(&self, t: f64, rho: f64) -> f64 {
        let damp = (-2.0 * t).exp();
        self.weighted_eval(rho, |j| if j == 0 { 0.0 } else { damp.powi(j as i32) / (2.0 * j as f64) })
    }

    /// `∫ h² dμ`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().zip(&self.norms_sq).map(|(c, n)| c * c * n).sum()
    }

    /// `∫ |(-L)^{-1/2} h|² dμ = 2 ∫_0^∞ ∫ (P_s h)² dμ ds` for mean-zero `h`.
    pub fn inverse_norm_sq(&self) -> f64 {
        self.coeffs.iter().zip(&self.norms_sq).enumerate().skip(1).map(|(j, (c, n))| c * c * n / (2.0 * j as f64)).sum()
    }
}
