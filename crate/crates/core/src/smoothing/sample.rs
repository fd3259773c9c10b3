use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, invalid, Error, Result};
use crate::ot::DiscreteMeasure;
use crate::sampling::standard_normal;
use crate::schedule::AnnulusSchedule;

/// Draws allowed per replaced point before the rejection sampler gives up.
pub const MAX_REJECTION_ATTEMPTS: usize = 100_000;

/// Record of a localization pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Localization {
    pub radius: f64,
    /// Points that were outside `B_R` and redrawn from `μ^R`.
    pub resampled: usize,
    /// Total Gaussian draws spent by the rejection sampler.
    pub attempts: usize,
    /// `(2^p/n) Σ |X_i|^p 1{|X_i| ≥ R}`.
    pub cost: f64,
}

/// `n` points in `R^d`, row-major, with optional seed provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSample {
    d: usize,
    points: Vec<f64>,
    seed: Option<u64>,
    localization: Option<Localization>,
}

impl EmpiricalSample {
    pub fn new(d: usize, points: Vec<f64>, seed: Option<u64>) -> Result<Self> {
        if d == 0 || points.is_empty() || points.len() % d != 0 {
            return Err(invalid("a sample needs d ≥ 1 and a positive multiple of d coordinates"));
        }
        ensure_finite(&points, "sample points")?;
        Ok(Self { d, points, seed, localization: None })
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.d..(i + 1) * self.d]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn localization(&self) -> Option<&Localization> {
        self.localization.as_ref()
    }

    pub fn is_localized(&self) -> bool {
        self.localization.is_some()
    }

    pub fn norm(&self, i: usize) -> f64 {
        self.point(i).iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// The empirical measure with weights `1/n`.
    pub fn to_measure(&self) -> Result<DiscreteMeasure> {
        DiscreteMeasure::uniform(self.d, self.points.clone())
    }
}

/// Replace every point with `|X_i| ≥ R` by a fresh draw from `μ` conditioned
/// on `|Z| < R`, and return the realized `W_p^p` cost of that coupling,
/// `(2^p/n) Σ |X_i|^p 1{|X_i| ≥ R}`.
pub fn localize<R: RngCore + ?Sized>(
    sample: &EmpiricalSample,
    schedule: &AnnulusSchedule,
    rng: &mut R,
) -> Result<(EmpiricalSample, f64)> {
    localize_to(sample, schedule.radius, schedule.p, rng)
}

/// [`localize`] with an explicit radius and exponent.
pub fn localize_to<R: RngCore + ?Sized>(sample: &EmpiricalSample, radius: f64, p: f64, rng: &mut R) -> Result<(EmpiricalSample, f64)> {
    if sample.is_localized() {
        return Err(invalid("sample is already localized"));
    }
    if !(radius > 0.0) || !(p >= 1.0) {
        return Err(invalid(format!("need R > 0 and p ≥ 1, got R = {radius}, p = {p}")));
    }
    let (n, d) = (sample.len(), sample.d);
    let mut points = sample.points.clone();
    let mut resampled = 0;
    let mut attempts = 0;
    let mut acc = 0.0;
    let r2 = radius * radius;
    for i in 0..n {
        let norm = sample.norm(i);
        if norm < radius {
            continue;
        }
        acc += norm.powf(p);
        resampled += 1;
        let slot = &mut points[i * d..(i + 1) * d];
        let mut tries = 0;
        loop {
            if tries == MAX_REJECTION_ATTEMPTS {
                return Err(Error::SamplerExhausted(tries));
            }
            tries += 1;
            slot.iter_mut().for_each(|v| *v = standard_normal(rng));
            if slot.iter().map(|v| v * v).sum::<f64>() < r2 {
                break;
            }
        }
        attempts += tries;
    }
    let cost = 2f64.powf(p) * acc / n as f64;
    let localization = Localization { radius, resampled, attempts, cost };
    Ok((EmpiricalSample { d, points, seed: sample.seed, localization: Some(localization) }, cost))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::gaussian_points;
    use crate::schedule::{build_schedule, Variant};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn inside_points_are_untouched() {
        let s = build_schedule(1000, 3, 2.0, Variant::General, None).unwrap();
        let x = EmpiricalSample::new(3, vec![0.1, 0.2, 0.3, -1.0, 0.5, 0.0], Some(4)).unwrap();
        let (y, cost) = localize(&x, &s, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(cost, 0.0);
        assert_eq!(y.points(), x.points());
        assert_eq!(y.localization().unwrap().resampled, 0);
        assert_eq!(y.seed(), Some(4));
    }

    #[test]
    fn outside_points_are_redrawn_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = EmpiricalSample::new(2, gaussian_points(4000, 2, &mut rng), None).unwrap();
        let (y, cost) = localize_to(&x, 1.5, 2.0, &mut rng).unwrap();
        assert!((0..y.len()).all(|i| y.norm(i) < 1.5));
        let expected: f64 = (0..x.len()).filter(|i| x.norm(*i) >= 1.5).map(|i| 4.0 * x.norm(i).powi(2)).sum::<f64>() / 4000.0;
        assert!((cost - expected).abs() < 1e-12);
        assert!(localize_to(&y, 1.5, 2.0, &mut rng).is_err());
    }
}
