//! The centering field `φ(y) = E p_T(X^R, y) - 1`.
//!
//! With `X^R ~ μ^R` and `T = t_k` on `D_k`,
//! `φ = (1/μ(B_R)) Σ_k [P_{t_k} 1_{D_k} - μ(D_k)]`, a radial function. It is
//! held in the radial eigenbasis, where its semigroup flow, its
//! `(-L)^{-1/2}` image and its negative Sobolev norms are exact sums.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::ou::geometry::gaussian_ball_mass;
use crate::ou::radial::{EvolvedShell, RadialSpectrum};
use crate::quadrature::{integrate_with_breaks, QuadSettings};
use crate::schedule::AnnulusSchedule;
use crate::special::chi_pdf;

#[derive(Debug, Clone, PartialEq)]
pub struct CenteringField {
    spectrum: RadialSpectrum,
    radii: Vec<f64>,
    ball_mass: f64,
}

impl CenteringField {
    pub fn new(schedule: &AnnulusSchedule) -> Result<Self> {
        let ball_mass = gaussian_ball_mass(schedule.radius, schedule.d)?;
        let shells: Vec<EvolvedShell> = (1..=schedule.m)
            .map(|k| {
                let (lo, hi) = schedule.annulus_bounds(k)?;
                Ok(EvolvedShell { lo, hi, time: schedule.time(k)?, weight: 1.0 / ball_mass })
            })
            .collect::<Result<_>>()?;
        let t_min = schedule.times().iter().copied().fold(f64::INFINITY, f64::min);
        let spectrum = RadialSpectrum::from_shells(schedule.d, &shells, RadialSpectrum::degree_for_time(t_min))?.shifted(-1.0);
        Ok(Self { spectrum, radii: schedule.radii().to_vec(), ball_mass })
    }

    pub fn spectrum(&self) -> &RadialSpectrum {
        &self.spectrum
    }

    pub fn ball_mass(&self) -> f64 {
        self.ball_mass
    }

    /// `∫ φ dμ` (zero up to rounding).
    pub fn mean(&self) -> f64 {
        self.spectrum.mean()
    }

    /// `φ(y)` for `|y| = rho`.
    pub fn eval(&self, rho: f64) -> f64 {
        self.spectrum.eval(rho)
    }

    /// `P_s φ(y)` for `|y| = rho`.
    pub fn semigroup_eval(&self, s: f64, rho: f64) -> f64 {
        self.spectrum.semigroup_eval(s, rho)
    }

    /// `(-L)^{-1/2} φ(y) = (1/√π) ∫_0^∞ s^{-1/2} P_s φ(y) ds` for `|y| = rho`.
    pub fn riesz_eval(&self, rho: f64) -> f64 {
        self.spectrum.riesz_eval(rho)
    }

    /// `∫_0^∞ P_{u+t} φ(y) du` for `|y| = rho`.
    pub fn resolvent_eval(&self, t: f64, rho: f64) -> f64 {
        self.spectrum.resolvent_eval(t, rho)
    }

    /// `∫ |(-L)^{-1/2} φ|^p dμ`; exact for `p = 2`, radial quadrature otherwise.
    pub fn riesz_lp_norm(&self, p: f64, quad: &QuadSettings) -> Result<(f64, f64)> {
        if !(p >= 1.0) {
            return Err(invalid(format!("p must be ≥ 1, got {p}")));
        }
        if p == 2.0 {
            return Ok((self.spectrum.inverse_norm_sq(), 0.0));
        }
        let d = self.spectrum.dim();
        let r_max = self.radii.last().copied().unwrap_or(0.0).max((d as f64).sqrt()) + 9.0;
        let out = integrate_with_breaks(|r| self.riesz_eval(r).abs().powf(p) * chi_pdf(r, d), 0.0, r_max, &self.radii, quad)?;
        Ok((out.value, out.error))
    }
}

/// Size of the centering contribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenteringNorm {
    /// `p = 2`: `∫_0^∞ ∫ (P_s φ)² dμ ds`; otherwise `∫ |∫_0^∞ s^{-1/2} P_s φ ds|^p dμ`.
    pub value: f64,
    /// The same quantity on the `(-L)^{-1/2}` scale, `∫ |(-L)^{-1/2} φ|^p dμ`.
    pub riesz_value: f64,
    pub p: f64,
    pub degree: usize,
    pub quad_error: f64,
}

pub fn centering_norm(schedule: &AnnulusSchedule, p: f64, quad: &QuadSettings) -> Result<CenteringNorm> {
    let field = CenteringField::new(schedule)?;
    let (riesz_value, quad_error) = field.riesz_lp_norm(p, quad)?;
    let value = if p == 2.0 { 0.5 * riesz_value } else { std::f64::consts::PI.powf(0.5 * p) * riesz_value };
    Ok(CenteringNorm { value, riesz_value, p, degree: field.spectrum.degree(), quad_error })
}
