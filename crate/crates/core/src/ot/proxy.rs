//! One-sample transport cost estimated against a large Gaussian reference sample.
//!
//! `W_p(μ_n, μ)` has no closed form; replacing `μ` by a fresh `ν_m` with
//! `m = multiplier · n` costs at most `W_p(ν_m, μ)` by the triangle
//! inequality, which shrinks as the multiplier grows.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::ot::{solve_general_ot, DiscreteMeasure, MAX_DENSE_ENTRIES};
use crate::sampling::gaussian_points;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProxyEstimate {
    /// Exact `W_p^p(μ_n, ν_m)`.
    pub cost: f64,
    pub multiplier: usize,
    /// Reference sample size `m`.
    pub m: usize,
}

/// `W_p^p(x, ν_m)` for a fresh standard Gaussian sample `ν_m` drawn from `rng`.
pub fn gaussian_proxy_wp<R: RngCore + ?Sized>(x: &DiscreteMeasure, p: f64, multiplier: usize, rng: &mut R) -> Result<ProxyEstimate> {
    if multiplier < 4 {
        return Err(invalid(format!("proxy multiplier must be ≥ 4, got {multiplier}")));
    }
    let n = x.len();
    let m = n.checked_mul(multiplier).ok_or(Error::TooLarge { rows: n, cols: usize::MAX })?;
    if n.checked_mul(m).is_none_or(|e| e > MAX_DENSE_ENTRIES) {
        return Err(Error::TooLarge { rows: n, cols: m });
    }
    let y = DiscreteMeasure::uniform(x.dim(), gaussian_points(m, x.dim(), rng))?;
    let r = solve_general_ot(x, &y, p)?;
    Ok(ProxyEstimate { cost: r.cost, multiplier, m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn deterministic_and_validated() {
        let x = DiscreteMeasure::uniform(2, gaussian_points(16, 2, &mut ChaCha8Rng::seed_from_u64(1))).unwrap();
        let a = gaussian_proxy_wp(&x, 2.0, 8, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let b = gaussian_proxy_wp(&x, 2.0, 8, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.m, 128);
        assert!(gaussian_proxy_wp(&x, 2.0, 3, &mut ChaCha8Rng::seed_from_u64(2)).is_err());
    }

    #[test]
    fn single_atom_magnitude() {
        // E|x - Y|^2 = |x|^2 + d for Y ~ N(0, I_d)
        let x = DiscreteMeasure::uniform(2, vec![0.5, -0.5]).unwrap();
        let r = gaussian_proxy_wp(&x, 2.0, 4096, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert!((r.cost - 2.5).abs() < 0.2, "{}", r.cost);
    }
}
