//! One-dimensional functional inequalities behind the lower bound: the
//! entropy-type coefficient under a one-sided bound `g ≥ -c` and the dual
//! lower bound on `W_2²` tested against a bounded-above `h`.

use crate::error::{invalid, Error, Result};
use crate::ou::{inverse_generator_form, HermiteExpansion};

/// `max h ≤ c` is checked on this many equispaced points of `[-W, W]`.
pub const GRID_POINTS: usize = 4001;
pub const GRID_HALF_WIDTH: f64 = 8.0;

fn check_c(c: f64) -> Result<()> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(invalid(format!("c must lie in (0, 1], got {c}")));
    }
    Ok(())
}

/// `(4/c²)(1 - √(1-c))²`; equals 4 at `c = 1` and `1 + c/2 + O(c²)` near 0.
pub fn prop71_coefficient(c: f64) -> Result<f64> {
    check_c(c)?;
    // 1 - √(1-c) = c / (1 + √(1-c)) avoids cancellation for small c
    let q = 1.0 / (1.0 + (1.0 - c).sqrt());
    Ok(4.0 * q * q)
}

/// `θ(s) = (q)(2s - c q s²)` with `q = (1 - √(1-c))/c`; `θ(0) = 0`, `θ(1) = 1`.
pub fn prop71_theta(s: f64, c: f64) -> Result<f64> {
    check_c(c)?;
    if !(0.0..=1.0).contains(&s) {
        return Err(invalid(format!("s must lie in [0, 1], got {s}")));
    }
    let q = 1.0 / (1.0 + (1.0 - c).sqrt());
    Ok(q * (2.0 * s - c * q * s * s))
}

/// `2 ∫ g (-L)^{-1} h dμ - ((e^c - 1)/c) ∫ h (-L)^{-1} h dμ`, exact in the
/// Hermite coefficients; `h` must be mean zero and satisfy `h ≤ c` on the grid.
pub fn prop72_lower(g: &HermiteExpansion, h: &HermiteExpansion, c: f64) -> Result<f64> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(invalid(format!("c must be positive, got {c}")));
    }
    if !h.is_mean_zero() {
        return Err(Error::NotMeanZero(h.coeff(0)));
    }
    let step = 2.0 * GRID_HALF_WIDTH / (GRID_POINTS - 1) as f64;
    for i in 0..GRID_POINTS {
        let x = -GRID_HALF_WIDTH + i as f64 * step;
        let v = h.eval(x);
        if v > c {
            return Err(Error::BoundViolated(format!("h({x}) = {v} > c = {c}")));
        }
    }
    Ok(2.0 * inverse_generator_form(g, h) - c.exp_m1() / c * inverse_generator_form(h, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, integrate_upper, QuadSettings};
    use crate::special::{normal_cdf, normal_pdf, normal_quantile};

    #[test]
    fn coefficient_values() {
        assert!((prop71_coefficient(1.0).unwrap() - 4.0).abs() < 1e-15);
        for c in [1e-3, 1e-5] {
            assert!((prop71_coefficient(c).unwrap() - (1.0 + c / 2.0)).abs() < c * c);
        }
        for c in [0.01, 0.3, 1.0] {
            assert_eq!(prop71_theta(0.0, c).unwrap(), 0.0);
            assert!((prop71_theta(1.0, c).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!(prop71_coefficient(0.0).is_err() && prop71_coefficient(1.5).is_err());
    }

    #[test]
    fn first_hermite_value() {
        let eps = 0.01;
        let g = HermiteExpansion::basis(1).scale(eps);
        for c in [0.1, 0.5] {
            let v = prop72_lower(&g, &g, c).unwrap();
            assert!((v - (2.0 - c.exp_m1() / c) * eps * eps).abs() < 1e-18);
        }
        assert_eq!(prop72_lower(&g, &HermiteExpansion::zero(), 0.3).unwrap(), 0.0);
        assert!(prop72_lower(&g, &HermiteExpansion::basis(1), 0.3).is_err());
        assert!(prop72_lower(&g, &HermiteExpansion::new(vec![0.1, 0.01]).unwrap(), 0.3).is_err());
    }

    #[test]
    fn small_c_limit() {
        let shape = HermiteExpansion::new(vec![0.0, 1.0, -0.5, 0.2]).unwrap();
        let top = (0..GRID_POINTS)
            .map(|i| shape.eval(-GRID_HALF_WIDTH + i as f64 * 2.0 * GRID_HALF_WIDTH / (GRID_POINTS - 1) as f64))
            .fold(f64::NEG_INFINITY, f64::max);
        for c in [1e-2, 1e-4] {
            let g = shape.scale(0.99 * c / top);
            let full = inverse_generator_form(&g, &g);
            let v = prop72_lower(&g, &g, c).unwrap();
            assert!((v / full - 1.0).abs() < c, "c={c}: {v} vs {full}");
        }
    }

    /// `W_2²` between `(1 + εx) dμ` and `μ` by the monotone rearrangement.
    fn w2_sq_first_hermite(eps: f64) -> f64 {
        let q = QuadSettings::default().with_rel_tol(1e-11);
        let f = |x: f64| {
            let cdf = normal_cdf(x) - eps * normal_pdf(x);
            (x - normal_quantile(cdf)).powi(2) * (1.0 + eps * x) * normal_pdf(x)
        };
        // the signed density is negative only below -1/ε, far outside the window
        integrate(f, -10.0, 0.0, &q).unwrap().value + integrate_upper(f, 0.0, &q).unwrap().value
    }

    #[test]
    fn below_transport_cost() {
        for eps in [0.01, 0.02] {
            let g = HermiteExpansion::basis(1).scale(eps);
            let c = eps * GRID_HALF_WIDTH;
            let lower = prop72_lower(&g, &g, c).unwrap();
            let w2 = w2_sq_first_hermite(eps);
            assert!(lower <= w2, "ε={eps}: {lower} > {w2}");
            assert!(lower > 0.8 * w2);
        }
    }
}
