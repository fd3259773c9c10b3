//! Gaussian masses of balls, annuli and their boundaries, tail moments, and
//! the pointwise semigroup action on radial indicators.

use crate::error::{invalid, Result};
use crate::quadrature::{integrate_with_breaks, QuadSettings};
use crate::schedule::AnnulusSchedule;
use crate::special::{chi_square_cdf, gamma_q, ln_gamma, normal_cdf, sphere_area};

/// `μ(B_R)`, the chi-square(d) CDF at `R²`.
pub fn gaussian_ball_mass(radius: f64, d: usize) -> Result<f64> {
    if !(radius >= 0.0) {
        return Err(invalid(format!("radius must be ≥ 0, got {radius}")));
    }
    Ok(chi_square_cdf(radius * radius, d))
}

/// `μ(D_k)` for the half-open annulus `r_{k-1} ≤ |x| < r_k`.
pub fn annulus_mass(k: usize, schedule: &AnnulusSchedule) -> Result<f64> {
    let (lo, hi) = schedule.annulus_bounds(k)?;
    Ok(gaussian_ball_mass(hi, schedule.d)? - gaussian_ball_mass(lo, schedule.d)?)
}

/// Gaussian surface measure of the sphere of radius `r` in `R^d`.
pub fn sphere_surface_measure(r: f64, d: usize) -> f64 {
    if r <= 0.0 {
        return if d == 1 { 2.0 * (2.0 * std::f64::consts::PI).powf(-0.5) } else { 0.0 };
    }
    let df = d as f64;
    sphere_area(d) * (-(0.5 * df) * (2.0 * std::f64::consts::PI).ln() + (df - 1.0) * r.ln() - 0.5 * r * r).exp()
}

/// `μ(∂D_k)`: both bounding spheres, the degenerate `r_0` sphere contributing zero.
pub fn annulus_surface(k: usize, schedule: &AnnulusSchedule) -> Result<f64> {
    let (lo, hi) = schedule.annulus_bounds(k)?;
    let inner = if lo > 0.0 { sphere_surface_measure(lo, schedule.d) } else { 0.0 };
    Ok(inner + sphere_surface_measure(hi, schedule.d))
}

/// Same as [`annulus_surface`] for explicit radii in any dimension (including `d = 1`).
pub fn shell_surface(lo: f64, hi: f64, d: usize) -> f64 {
    let inner = if lo > 0.0 { sphere_surface_measure(lo, d) } else { 0.0 };
    inner + sphere_surface_measure(hi, d)
}

/// `∫_{|x|>R} |x|^p dμ = 2^{p/2} Γ((d+p)/2)/Γ(d/2) · Q((d+p)/2, R²/2)`.
pub fn tail_second_moment(radius: f64, d: usize, p: f64) -> Result<f64> {
    if !(radius >= 0.0) || !(p >= 0.0) {
        return Err(invalid(format!("need R ≥ 0 and p ≥ 0, got R = {radius}, p = {p}")));
    }
    let df = d as f64;
    let s = 0.5 * (df + p);
    let ln_pref = 0.5 * p * 2f64.ln() + ln_gamma(s) - ln_gamma(0.5 * df);
    Ok(ln_pref.exp() * gamma_q(s, 0.5 * radius * radius))
}

/// `P(|c e₁ + σZ| < ρ)` for `Z ~ N(0, I_d)`.
///
/// For `d ≥ 2` the axial coordinate `u = c + σz₁` is written `u = ρ cos θ`,
/// which turns the square-root edge of the remaining chi-square(d-1) CDF into
/// a smooth integrand; only the window where `|z₁| ≤ 12` is integrated.
pub fn shifted_ball_probability(c: f64, sigma: f64, rho: f64, d: usize, quad: &QuadSettings) -> Result<f64> {
    if rho <= 0.0 {
        return Ok(0.0);
    }
    if sigma <= 0.0 {
        return Ok(if c.abs() < rho { 1.0 } else { 0.0 });
    }
    let c = c.abs();
    if d == 1 {
        let hi = (rho - c) / sigma;
        let lo = (-rho - c) / sigma;
        return Ok(if lo > 0.0 {
            normal_cdf(-lo) - normal_cdf(-hi)
        } else {
            normal_cdf(hi) - normal_cdf(lo)
        });
    }
    const WINDOW: f64 = 12.0;
    let u_hi = (c + WINDOW * sigma).min(rho);
    let u_lo = (c - WINDOW * sigma).max(-rho);
    if u_lo >= u_hi {
        return Ok(0.0);
    }
    let th_lo = (u_hi / rho).clamp(-1.0, 1.0).acos();
    let th_hi = (u_lo / rho).clamp(-1.0, 1.0).acos();
    let th_mid = (c / rho).clamp(-1.0, 1.0).acos();
    let inv_sqrt_2pi = (2.0 * std::f64::consts::PI).powf(-0.5);
    let f = |th: f64| {
        let (s, co) = th.sin_cos();
        let z = (rho * co - c) / sigma;
        let w = rho * s / sigma;
        inv_sqrt_2pi * (-0.5 * z * z).exp() * chi_square_cdf(w * w, d - 1) * w
    };
    let out = integrate_with_breaks(f, th_lo, th_hi, &[th_mid], quad)?;
    Ok(out.value.clamp(0.0, 1.0))
}

/// `P_τ 1_{lo ≤ |·| < hi}(y)` for `|y| = rho`.
pub fn semigroup_shell(tau: f64, rho: f64, lo: f64, hi: f64, d: usize, quad: &QuadSettings) -> Result<f64> {
    let a = (-tau).exp();
    let sigma = (-(-2.0 * tau).exp_m1()).sqrt();
    let c = a * rho;
    let outer = shifted_ball_probability(c, sigma, hi, d, quad)?;
    let inner = if lo > 0.0 { shifted_ball_probability(c, sigma, lo, d, quad)? } else { 0.0 };
    Ok((outer - inner).max(0.0))
}

/// `P_τ 1_{D_k}(y)` for `|y| = rho`.
pub fn semigroup_annulus(k: usize, schedule: &AnnulusSchedule, tau: f64, rho: f64, quad: &QuadSettings) -> Result<f64> {
    let (lo, hi) = schedule.annulus_bounds(k)?;
    semigroup_shell(tau, rho, lo, hi, schedule.d, quad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{build_schedule, Variant};
    use crate::special::{chi_square_cdf, ln_gamma};

    // noncentral chi-square CDF as a Poisson mixture of central ones
    fn noncentral_cdf(x: f64, d: usize, lambda: f64) -> f64 {
        if lambda == 0.0 {
            return chi_square_cdf(x, d);
        }
        let mut acc = 0.0;
        for j in 0..400 {
            let jf = j as f64;
            let w = (-0.5 * lambda + jf * (0.5 * lambda).ln() - ln_gamma(jf + 1.0)).exp();
            acc += w * chi_square_cdf(x, d + 2 * j);
        }
        acc
    }

    #[test]
    fn ball_and_annulus_examples() {
        let r = (2.0 * 4f64.ln()).sqrt();
        assert!((gaussian_ball_mass(r, 2).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(gaussian_ball_mass(0.0, 3).unwrap(), 0.0);
        assert!((gaussian_ball_mass(60.0, 4).unwrap() - 1.0).abs() < 1e-15);
        let s = build_schedule(1000, 2, 1.0, Variant::General, None).unwrap();
        assert!((annulus_mass(1, &s).unwrap() - (1.0 - (-0.5f64).exp())).abs() < 1e-15);
        let total: f64 = (1..=s.m).map(|k| annulus_mass(k, &s).unwrap()).sum();
        assert!((total - gaussian_ball_mass(s.radius, 2).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn surface_examples() {
        let phi1 = (-0.5f64).exp() / (2.0 * std::f64::consts::PI).sqrt();
        assert!((shell_surface(0.0, 1.0, 1) - 2.0 * phi1).abs() < 1e-15);
        let s = build_schedule(1000, 2, 1.0, Variant::General, None).unwrap();
        // d = 2: circle of radius 1 has Gaussian length e^{-1/2}
        assert!((annulus_surface(1, &s).unwrap() - (-0.5f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn tail_moment_examples() {
        assert!((tail_second_moment(1.0, 2, 2.0).unwrap() - 3.0 * (-0.5f64).exp()).abs() < 1e-14);
        for d in 1..6 {
            assert!((tail_second_moment(0.0, d, 2.0).unwrap() - d as f64).abs() < 1e-13);
        }
        for r in [0.5, 2.0, 7.0] {
            let exact = (r * r + 2.0) * (-0.5 * r * r as f64).exp();
            assert!((tail_second_moment(r, 2, 2.0).unwrap() - exact).abs() < 1e-14 * exact.max(1e-300) + 1e-300);
        }
    }

    #[test]
    fn shifted_ball_matches_noncentral_chi_square() {
        let q = QuadSettings::default();
        for d in [2, 3, 5] {
            for (c, sigma, rho) in [(0.0, 1.0, 1.5), (0.7, 0.6, 1.2), (2.0, 0.3, 2.1), (1.0, 1.0, 0.4), (3.0, 0.9, 1.0)] {
                let lambda = (c / sigma) * (c / sigma);
                let expected = noncentral_cdf((rho / sigma) * (rho / sigma), d, lambda);
                let got = shifted_ball_probability(c, sigma, rho, d, &q).unwrap();
                assert!((got - expected).abs() < 1e-10, "d={d} c={c} σ={sigma} ρ={rho}: {got} vs {expected}");
            }
        }
        let got = shifted_ball_probability(0.5, 0.8, 1.1, 1, &q).unwrap();
        let expected = normal_cdf((1.1 - 0.5) / 0.8) - normal_cdf((-1.1 - 0.5) / 0.8);
        assert!((got - expected).abs() < 1e-15);
    }

    #[test]
    fn narrow_kernel_near_boundary() {
        let q = QuadSettings::default();
        // σ ≪ ρ: probability of landing inside a unit ball from just inside the boundary
        let got = shifted_ball_probability(0.999, 1e-3, 1.0, 3, &q).unwrap();
        assert!(got > 0.8 && got < 0.9, "{got}");
        let got = semigroup_shell(1e-8, 0.5, 0.0, 1.0, 3, &q).unwrap();
        assert!((got - 1.0).abs() < 1e-12);
    }
}
