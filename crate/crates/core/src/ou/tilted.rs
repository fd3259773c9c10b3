//! The product of two Mehler kernels integrated over an annulus collapses to a
//! diagonal kernel times the Gaussian mass of a shifted, dilated annulus:
//!
//! `∫_{D} p_u(x,y) p_v(x,y) dμ(x) = p_{u+v}(y,y) · μ(-(β/α)y + αD)`,
//!
//! with `α² = 1 + a²/(1-a²) + b²/(1-b²)`, `β = a/(1-a²) + b/(1-b²)`,
//! `a = e^{-u}`, `b = e^{-v}`. Both sides are computed here by unrelated
//! quadratures so the identity can be checked numerically.

use crate::error::{invalid, Result};
use crate::ou::geometry::shifted_ball_probability;
use crate::ou::kernel::{ln_kernel_parts, KernelPoint};
use crate::quadrature::{integrate, QuadSettings};
use crate::schedule::AnnulusSchedule;
use crate::special::sphere_area;

/// Tilt parameters for annulus `k` and times `s, s'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltedAnnulus {
    pub alpha: f64,
    pub beta: f64,
    pub k: usize,
    pub s: f64,
    pub s_prime: f64,
    pub t_k: f64,
}

impl TiltedAnnulus {
    pub fn new(k: usize, s: f64, s_prime: f64, t_k: f64) -> Result<Self> {
        if !(s > 0.0 && s_prime > 0.0 && t_k > 0.0) || !(s + s_prime + t_k).is_finite() {
            return Err(invalid(format!("tilt needs positive finite times, got s={s}, s'={s_prime}, t={t_k}")));
        }
        let (a, b) = ((-s - t_k).exp(), (-s_prime - t_k).exp());
        let (oa, ob) = (-(-2.0 * (s + t_k)).exp_m1(), -(-2.0 * (s_prime + t_k)).exp_m1());
        let alpha = (1.0 + a * a / oa + b * b / ob).sqrt();
        let beta = a / oa + b / ob;
        Ok(Self { alpha, beta, k, s, s_prime, t_k })
    }

    pub fn from_schedule(k: usize, s: f64, s_prime: f64, schedule: &AnnulusSchedule) -> Result<Self> {
        Self::new(k, s, s_prime, schedule.time(k)?)
    }

    pub fn a(&self) -> f64 {
        (-self.s - self.t_k).exp()
    }

    pub fn b(&self) -> f64 {
        (-self.s_prime - self.t_k).exp()
    }

    /// The shift vector `(β/α) y` of the tilted annulus (it is translated by its negative).
    pub fn shift(&self, y: &KernelPoint) -> Vec<f64> {
        y.coords().iter().map(|v| self.beta / self.alpha * v).collect()
    }

    /// `μ(-(β/α)y + α{lo ≤ |x| < hi})`.
    pub fn tilted_mass(&self, lo: f64, hi: f64, y_norm: f64, d: usize, quad: &QuadSettings) -> Result<f64> {
        let c = self.beta / self.alpha * y_norm;
        let outer = shifted_ball_probability(c, 1.0, self.alpha * hi, d, quad)?;
        let inner = if lo > 0.0 { shifted_ball_probability(c, 1.0, self.alpha * lo, d, quad)? } else { 0.0 };
        Ok(outer - inner)
    }
}

/// Both sides of the identity for an explicit shell `lo ≤ |x| < hi`.
pub fn tilted_shell_identity(
    lo: f64,
    hi: f64,
    tilt: &TiltedAnnulus,
    y: &KernelPoint,
    quad: &QuadSettings,
) -> Result<(f64, f64)> {
    if !(0.0 <= lo && lo < hi) {
        return Err(invalid(format!("need 0 ≤ lo < hi, got [{lo}, {hi})")));
    }
    let d = y.dim();
    let rho = y.norm();
    let (u, v) = (tilt.s + tilt.t_k, tilt.s_prime + tilt.t_k);
    let yy = rho * rho;
    let log_product = |xx: f64, xy: f64| ln_kernel_parts(d, u, xx, yy, xy) + ln_kernel_parts(d, v, xx, yy, xy);

    let lhs = if d == 1 {
        let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let right = integrate(|x| (log_product(x * x, x * rho)).exp() * phi(x), lo, hi, quad)?;
        let left = integrate(|x| (log_product(x * x, -x * rho)).exp() * phi(x), lo, hi, quad)?;
        right.value + left.value
    } else {
        let sphere = sphere_area(d - 1);
        let ln_norm = -0.5 * d as f64 * (2.0 * std::f64::consts::PI).ln();
        let mut failure = None;
        let radial = |r: f64| {
            let weight = (ln_norm + (d as f64 - 1.0) * r.ln() - 0.5 * r * r).exp();
            if rho == 0.0 {
                return weight * sphere_area(d) * log_product(r * r, 0.0).exp();
            }
            let ang = integrate(
                |th: f64| log_product(r * r, r * rho * th.cos()).exp() * th.sin().powi(d as i32 - 2),
                0.0,
                std::f64::consts::PI,
                quad,
            );
            match ang {
                Ok(o) => weight * sphere * o.value,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        };
        let out = integrate(radial, lo, hi, quad)?;
        if let Some(e) = failure {
            return Err(e);
        }
        out.value
    };

    let ln_diag = ln_kernel_parts(d, u + v, yy, yy, yy);
    let rhs = ln_diag.exp() * tilt.tilted_mass(lo, hi, rho, d, quad)?;
    Ok((lhs, rhs))
}

/// Both sides of the identity for annulus `D_k` of a schedule.
pub fn tilted_annulus_identity(
    k: usize,
    s: f64,
    s_prime: f64,
    schedule: &AnnulusSchedule,
    y: &KernelPoint,
    quad: &QuadSettings,
) -> Result<(f64, f64)> {
    if y.dim() != schedule.d {
        return Err(crate::error::Error::DimensionMismatch { expected: schedule.d, found: y.dim() });
    }
    let tilt = TiltedAnnulus::from_schedule(k, s, s_prime, schedule)?;
    let (lo, hi) = schedule.annulus_bounds(k)?;
    tilted_shell_identity(lo, hi, &tilt, y, quad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{build_schedule, Variant};

    #[test]
    fn one_dimensional_example() {
        let q = QuadSettings::default();
        let tilt = TiltedAnnulus::new(1, 0.1, 0.1, 0.1).unwrap();
        let (lhs, rhs) = tilted_shell_identity(0.0, 1.0, &tilt, &KernelPoint::from(0.5), &q).unwrap();
        assert!((lhs - rhs).abs() < 1e-6 * rhs, "{lhs} vs {rhs}");
    }

    #[test]
    fn alpha_beta_relation() {
        for &(s, sp, t) in &[(0.1, 0.2, 0.05), (1.0, 0.3, 0.7), (2.5, 2.5, 0.01)] {
            let tilt = TiltedAnnulus::new(1, s, sp, t).unwrap();
            let (a, b) = (tilt.a(), tilt.b());
            let lhs = tilt.alpha * tilt.alpha / tilt.beta - 1.0;
            let rhs = (1.0 - a) * (1.0 - b) / (a + b);
            assert!((lhs - rhs).abs() < 1e-12 * rhs);
        }
    }

    #[test]
    fn schedule_annuli_in_higher_dimension() {
        let q = QuadSettings::default().with_rel_tol(1e-11);
        let sched = build_schedule(500, 3, 2.0, Variant::General, None).unwrap();
        for (k, y) in [(1, vec![0.0, 0.0, 0.0]), (2, vec![0.4, -0.2, 0.9]), (3, vec![1.5, 0.0, 0.5])] {
            let y = KernelPoint::new(y).unwrap();
            let (lhs, rhs) = tilted_annulus_identity(k, 0.2, 0.35, &sched, &y, &q).unwrap();
            assert!((lhs - rhs).abs() < 1e-6 * rhs, "k={k}: {lhs} vs {rhs}");
        }
    }
}
