//! Weighted least-squares power-law fits on log-log axes.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::harness::experiment::{Aggregate, ResultTable};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub intercept_se: f64,
    /// False when some point lacked a usable standard error and all points
    /// were weighted equally.
    pub weighted: bool,
    /// `log mean - (intercept + slope log n)` per point.
    pub residuals: Vec<f64>,
    pub points: Vec<Aggregate>,
    pub warnings: Vec<String>,
}

/// Fit `log mean = intercept + slope · log n` with weights `(mean/se)²`.
pub fn fit_points(points: &[Aggregate]) -> Result<RateFit> {
    let usable: Vec<Aggregate> = points.iter().copied().filter(|a| a.mean > 0.0 && a.mean.is_finite()).collect();
    let mut warnings = Vec::new();
    if usable.len() < points.len() {
        warnings.push(format!("{} grid points with non-positive mean excluded", points.len() - usable.len()));
    }
    if usable.len() < 3 {
        return Err(invalid(format!("rate fit needs ≥ 3 grid points with positive means, got {}", usable.len())));
    }
    let xs: Vec<f64> = usable.iter().map(|a| (a.n as f64).ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|a| a.mean.ln()).collect();
    let weighted = usable.iter().all(|a| a.se > 0.0 && a.se.is_finite());
    let ws: Vec<f64> = if weighted { usable.iter().map(|a| (a.mean / a.se).powi(2)).collect() } else { vec![1.0; usable.len()] };
    let sw: f64 = ws.iter().sum();
    let xbar = ws.iter().zip(&xs).map(|(w, x)| w * x).sum::<f64>() / sw;
    let ybar = ws.iter().zip(&ys).map(|(w, y)| w * y).sum::<f64>() / sw;
    let sxx: f64 = ws.iter().zip(&xs).map(|(w, x)| w * (x - xbar).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(invalid("rate fit needs at least two distinct n"));
    }
    let sxy: f64 = ws.iter().zip(xs.iter().zip(&ys)).map(|(w, (x, y))| w * (x - xbar) * (y - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let residuals: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y - intercept - slope * x).collect();
    let (slope_se, intercept_se) = if weighted {
        // weights are inverse variances of log means
        ((1.0 / sxx).sqrt(), (1.0 / sw + xbar * xbar / sxx).sqrt())
    } else {
        let dof = (usable.len() - 2) as f64;
        let s2 = residuals.iter().map(|r| r * r).sum::<f64>() / dof;
        ((s2 / sxx).sqrt(), (s2 * (1.0 / sw + xbar * xbar / sxx)).sqrt())
    };
    Ok(RateFit { slope, intercept, slope_se, intercept_se, weighted, residuals, points: usable, warnings })
}

/// Fit the per-`n` means of a result table.
pub fn fit_rate(table: &ResultTable) -> Result<RateFit> {
    let zero_rows = table.rows.iter().filter(|r| r.cost <= 0.0).count();
    let mut filtered = table.clone();
    filtered.rows.retain(|r| r.cost > 0.0);
    let mut fit = fit_points(&filtered.aggregate())?;
    if zero_rows > 0 {
        fit.warnings.insert(0, format!("{zero_rows} rows with zero cost excluded from the fit"));
    }
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pts(mut f: impl FnMut(usize) -> (f64, f64)) -> Vec<Aggregate> {
        [64usize, 128, 256, 512, 1024].iter().map(|&n| {
            let (mean, se) = f(n);
            Aggregate { n, mean, se, count: 10 }
        }).collect()
    }

    #[test]
    fn exact_power_law() {
        let fit = fit_points(&pts(|n| ((n as f64).powf(-0.5), 0.01))).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12);
        let flat = fit_points(&pts(|_| (2.0, 0.1))).unwrap();
        assert!(flat.slope.abs() < 1e-12);
    }

    #[test]
    fn noisy_fits_stay_close() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let fit = fit_points(&pts(|n| ((n as f64).powf(-2.0 / 3.0) * (1.0 + 0.05 * (2.0 * rng.random::<f64>() - 1.0)), 0.05 * (n as f64).powf(-2.0 / 3.0)))).unwrap();
            assert!((fit.slope + 2.0 / 3.0).abs() < 0.05, "{}", fit.slope);
        }
    }

    #[test]
    fn degenerate_grids() {
        assert!(fit_points(&pts(|_| (0.0, 0.0))).is_err());
        let unweighted = fit_points(&pts(|n| (1.0 / n as f64, 0.0))).unwrap();
        assert!(!unweighted.weighted && (unweighted.slope + 1.0).abs() < 1e-12);
    }
}
