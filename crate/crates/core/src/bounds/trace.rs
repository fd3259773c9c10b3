//! `I(t, R) = ∫_{2t}^∞ ∫_{B_R} [p_s(x, x) - 1] dμ^R(x) ds`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::quadrature::{integrate, integrate_with_breaks, QuadSettings};
use crate::special::chi_square_cdf;

/// `∫_{B_R} p_s(x, x) dμ(x) / μ(B_R) = (1-a)^{-d} F_d(λR²) / F_d(R²)`,
/// `a = e^{-s}`, `λ = (1-a)/(1+a)`.
pub fn restricted_diagonal_mass(s: f64, radius: f64, d: usize) -> Result<f64> {
    if !(s > 0.0) || !(radius > 0.0) || d == 0 {
        return Err(invalid(format!("need s > 0, R > 0, d ≥ 1; got s = {s}, R = {radius}, d = {d}")));
    }
    let one_minus_a = -(-s).exp_m1();
    let lambda = one_minus_a / (1.0 + (-s).exp());
    let r2 = radius * radius;
    if s.is_infinite() {
        return Ok(1.0);
    }
    Ok(one_minus_a.powi(-(d as i32)) * chi_square_cdf(lambda * r2, d) / chi_square_cdf(r2, d))
}

/// Parameters of the lower-bound main term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundConfig {
    pub n: f64,
    pub d: usize,
    pub t: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    /// Truncation level of the fluctuation, `0 < c ≤ 1/2`.
    pub c: f64,
    pub delta: f64,
    /// Exponent of the error control, `α > 1`.
    pub alpha: f64,
}

impl LowerBoundConfig {
    /// `t = n^{-1/d}`, `R² = (log n)/64`, `c = 1/2`, `δ = 1/n`, `α = 8`.
    pub fn defaults(n: f64, d: usize) -> Result<Self> {
        if !(n > 1.0) || d == 0 {
            return Err(invalid(format!("need n > 1 and d ≥ 1, got n = {n}, d = {d}")));
        }
        let cfg = Self { n, d, t: n.powf(-1.0 / d as f64), radius: (n.ln() / 64.0).sqrt(), c: 0.5, delta: 1.0 / n, alpha: 8.0 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t > 0.0) || !(self.radius > 0.0) || !(self.n > 1.0) || self.d == 0 {
            return Err(invalid(format!("need t > 0, R > 0, n > 1, d ≥ 1 in {self:?}")));
        }
        if !(self.c > 0.0 && self.c <= 0.5) || !(self.alpha > 1.0) || !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(invalid(format!("need 0 < c ≤ 1/2, 0 < δ ≤ 1, α > 1 in {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceIntegralResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// `I(t, R)`: adaptive quadrature on `(2t, 1)` with breaks at `2t·10^j`, and
/// `v = e^{-s}` on the tail.
pub fn trace_integral(cfg: &LowerBoundConfig) -> Result<TraceIntegralResult> {
    cfg.validate()?;
    let quad = QuadSettings::default().with_rel_tol(1e-8).with_abs_tol(1e-300);
    let (r, d) = (cfg.radius, cfg.d);
    let lo = 2.0 * cfg.t;
    let f = |s: f64| restricted_diagonal_mass(s, r, d).map_or(f64::NAN, |m| m - 1.0);
    let mut value = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    let split = lo.max(1.0);
    if lo < 1.0 {
        let breaks: Vec<f64> = (1..).map(|j| lo * 10f64.powi(j)).take_while(|b| *b < 1.0).collect();
        let head = integrate_with_breaks(f, lo, 1.0, &breaks, &quad)?;
        value += head.value;
        error += head.error;
        evaluations += head.evaluations;
    }
    let tail = integrate(|v: f64| if v <= 0.0 { 0.0 } else { f(-v.ln()) / v }, 0.0, (-split).exp(), &quad)?;
    value += tail.value;
    error += tail.error;
    evaluations += tail.evaluations;
    Ok(TraceIntegralResult { value, error, evaluations })
}

/// `I(t, R) / (2n)`; the `O(1/n)` error term is not subtracted.
pub fn lower_bound_main_term(cfg: &LowerBoundConfig) -> Result<f64> {
    Ok(trace_integral(cfg)?.value / (2.0 * cfg.n))
}

/// One serialized evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundRow {
    pub n: f64,
    pub d: usize,
    pub t: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(rename = "I")]
    pub trace: f64,
    pub main_term: f64,
    /// The `O(1/n)` remainder is known only in order, never bounded here.
    pub error_term_certified: bool,
}

pub fn lower_bound_row(cfg: &LowerBoundConfig) -> Result<LowerBoundRow> {
    let i = trace_integral(cfg)?;
    Ok(LowerBoundRow {
        n: cfg.n,
        d: cfg.d,
        t: cfg.t,
        radius: cfg.radius,
        trace: i.value,
        main_term: i.value / (2.0 * cfg.n),
        error_term_certified: false,
    })
}
