//! Annulus schedules: the truncation radius `R`, radii `r_k = √k`, and the
//! per-annulus regularization times `t_k` and split times `s_k`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Default smallest admissible sample size.
pub const DEFAULT_MIN_N: usize = 16;

/// Which time schedule is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// `1 ≤ p < d`, `t_k = n^{-2/d} e^{k/d}`.
    General,
    /// `p = d`, `t_k = e^{k/d} / (n^{2/d} √k)`.
    PEqualsD,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::General => "general",
            Variant::PEqualsD => "p-equals-d",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" | "general-p" => Ok(Variant::General),
            "p-equals-d" => Ok(Variant::PEqualsD),
            other => Err(Error::Config(format!("unknown variant `{other}`"))),
        }
    }
}

/// Partition of `B_R` into half-open annuli `D_k = {r_{k-1} ≤ |x| < r_k}` with times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusSchedule {
    pub n: usize,
    pub d: usize,
    pub p: f64,
    pub variant: Variant,
    pub c: f64,
    pub radius: f64,
    pub m: usize,
    radii: Vec<f64>,
    times: Vec<f64>,
}

/// Build a schedule with the default minimum sample size.
pub fn build_schedule(n: usize, d: usize, p: f64, variant: Variant, c: Option<f64>) -> Result<AnnulusSchedule> {
    AnnulusSchedule::new(n, d, p, variant, c, DEFAULT_MIN_N)
}

impl AnnulusSchedule {
    /// `m = ⌊2c ln n⌋` annuli with `r_m = R`, so the outermost annulus absorbs the
    /// fractional part of `R²` and `t_m ≤ n^{-2(1-c)/d}` holds exactly.
    pub fn new(n: usize, d: usize, p: f64, variant: Variant, c: Option<f64>, min_n: usize) -> Result<Self> {
        if n < min_n {
            return Err(invalid(format!("n = {n} is below the minimum sample size {min_n}")));
        }
        if d < 2 {
            return Err(invalid(format!("annulus schedules need d ≥ 2, got {d}")));
        }
        if !p.is_finite() || p < 1.0 {
            return Err(invalid(format!("p must be ≥ 1, got {p}")));
        }
        let df = d as f64;
        let c = match variant {
            Variant::General => {
                if p >= df {
                    return Err(invalid(format!("general variant needs p < d, got p = {p}, d = {d}")));
                }
                let c = c.unwrap_or(0.5 * (p / df + 1.0));
                if !(c > p / df && c < 1.0) {
                    return Err(invalid(format!("c must lie in (p/d, 1) = ({}, 1), got {c}", p / df)));
                }
                c
            }
            Variant::PEqualsD => {
                if p != df {
                    return Err(invalid(format!("p-equals-d variant needs p = d, got p = {p}, d = {d}")));
                }
                let c = c.unwrap_or(1.0);
                if !(c > 0.0 && c <= 1.0) {
                    return Err(invalid(format!("c must lie in (0, 1], got {c}")));
                }
                c
            }
        };
        let nf = n as f64;
        let r2 = 2.0 * c * nf.ln();
        let m = r2.floor() as usize;
        if m < 1 {
            return Err(invalid(format!("R² = {r2} < 1 leaves no annulus; increase n")));
        }
        let radius = r2.sqrt();
        let mut radii: Vec<f64> = (0..m).map(|k| (k as f64).sqrt()).collect();
        radii.push(radius);
        let base = nf.powf(-2.0 / df);
        let times = (1..=m)
            .map(|k| {
                let kf = k as f64;
                match variant {
                    Variant::General => base * (kf / df).exp(),
                    Variant::PEqualsD => base * (kf / df).exp() / kf.sqrt(),
                }
            })
            .collect();
        let s = Self { n, d, p, variant, c, radius, m, radii, times };
        s.validate()?;
        Ok(s)
    }

    /// Check every structural invariant, reporting the first violation.
    pub fn validate(&self) -> Result<()> {
        let viol = |msg: String| Err(Error::BoundViolated(msg));
        if self.radii.len() != self.m + 1 || self.times.len() != self.m {
            return viol("schedule arrays have inconsistent lengths".into());
        }
        if self.radii[0] != 0.0 || self.radii[self.m] != self.radius {
            return viol("radii must run from 0 to R".into());
        }
        if self.radii.windows(2).any(|w| w[1] <= w[0]) {
            return viol("radii are not strictly increasing".into());
        }
        if let Some(t) = self.times.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
            return viol(format!("time {t} outside (0, 1)"));
        }
        // p = d times are unimodal: e^{k/d}/√k decreases until k = d/2.
        let first_increasing = match self.variant {
            Variant::General => 1,
            Variant::PEqualsD => self.d.div_ceil(2),
        };
        for k in first_increasing..self.m {
            if self.times[k] <= self.times[k - 1] {
                return viol(format!("t_{} ≥ t_{}", k, k + 1));
            }
        }
        if self.variant == Variant::General {
            let cap = (self.n as f64).powf(-2.0 * (1.0 - self.c) / self.d as f64);
            let tm = self.times[self.m - 1];
            if tm > cap * (1.0 + 1e-12) {
                return viol(format!("t_m = {tm} exceeds n^(-2(1-c)/d) = {cap}"));
            }
        }
        Ok(())
    }

    /// Radii `r_0 = 0 < r_1 < … < r_m = R`.
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Times `t_1, …, t_m` (index `k - 1`).
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.m {
            Err(Error::IndexOutOfRange { index: k, max: self.m })
        } else {
            Ok(())
        }
    }

    /// Inner and outer radius of `D_k`.
    pub fn annulus_bounds(&self, k: usize) -> Result<(f64, f64)> {
        self.check_index(k)?;
        Ok((self.radii[k - 1], self.radii[k]))
    }

    pub fn time(&self, k: usize) -> Result<f64> {
        self.check_index(k)?;
        Ok(self.times[k - 1])
    }

    /// Split time `s_k = 1/√k`.
    pub fn split_time(&self, k: usize) -> Result<f64> {
        self.check_index(k)?;
        Ok(1.0 / (k as f64).sqrt())
    }

    /// Index of the annulus containing radius `r`, or `None` when `r ≥ R`.
    pub fn annulus_of(&self, r: f64) -> Option<usize> {
        if !(r >= 0.0) || r >= self.radius {
            return None;
        }
        Some(self.radii[1..].partition_point(|rk| *rk <= r) + 1)
    }

    /// Map `T(x) = t_k` for `x ∈ D_k`.
    pub fn time_of(&self, r: f64) -> Option<f64> {
        self.annulus_of(r).map(|k| self.times[k - 1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn general_ratio_and_cap() {
        let s = build_schedule(1000, 3, 2.0, Variant::General, None).unwrap();
        assert!((s.c - 5.0 / 6.0).abs() < 1e-15);
        for w in s.times().windows(2) {
            assert!((w[1] / w[0] - (1.0f64 / 3.0).exp()).abs() < 1e-13);
        }
        let cap = 1000f64.powf(-2.0 * (1.0 - s.c) / 3.0);
        assert!(s.times()[s.m - 1] <= cap);
    }

    #[test]
    fn p_equals_d_value() {
        let n = 4f64.exp().round() as usize; // 55
        let s = build_schedule(n, 2, 2.0, Variant::PEqualsD, None).unwrap();
        let expected = 2f64.exp() / (n as f64 * 2.0);
        assert!((s.time(4).unwrap() - expected).abs() < 1e-15 * expected);
    }

    #[test]
    fn half_open_membership() {
        let s = build_schedule(10_000, 3, 2.0, Variant::General, None).unwrap();
        assert_eq!(s.annulus_of(0.5), Some(1));
        assert_eq!(s.annulus_of(1.0), Some(2));
        assert_eq!(s.annulus_of(0.0), Some(1));
        assert_eq!(s.annulus_of(s.radius), None);
        assert_eq!(s.annulus_of(s.radius * (1.0 - 1e-12)), Some(s.m));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_schedule(15, 3, 2.0, Variant::General, None).is_err());
        assert!(build_schedule(100, 3, 3.0, Variant::General, None).is_err());
        assert!(build_schedule(100, 3, 2.0, Variant::General, Some(0.5)).is_err());
        assert!(build_schedule(100, 3, 2.0, Variant::PEqualsD, None).is_err());
        assert!(build_schedule(100, 1, 0.5, Variant::General, None).is_err());
        assert!(build_schedule(100, 3, 2.0, Variant::General, None).unwrap().annulus_bounds(0).is_err());
    }
}
