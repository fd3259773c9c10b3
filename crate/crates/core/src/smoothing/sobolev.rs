//! Negative Sobolev norms of the smoothed fluctuation `g = f - 1` and the
//! per-atom regularization cost.
//!
//! By the semigroup property every quantity reduces to Mehler kernels
//! evaluated at the atoms: `∫ P_a g P_b g dμ` is a double sum of
//! `p_{a+b+T_i+T_j}(X_i, X_j) - 1`, and `P_s g(y)` is a single sum.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::ou::{kernel_p_cost, kernel_second_moment, KernelPoint};
use crate::quadrature::{integrate, integrate_with_breaks, QuadOutcome, QuadSettings};
use crate::sampling::standard_normal;
use crate::smoothing::{CenteringField, SmoothedEmpirical};

/// Per-time constants of `ln p_τ = c0 + c1 |x-y|² + c2 (|x|² + |y|²)`.
#[derive(Clone, Copy)]
struct LnKernelCoeffs {
    c0: f64,
    c1: f64,
    c2: f64,
}

impl LnKernelCoeffs {
    fn new(d: usize, tau: f64) -> Self {
        let a = (-tau).exp();
        let one_minus_a2 = -(-2.0 * tau).exp_m1();
        Self { c0: -0.5 * d as f64 * one_minus_a2.ln(), c1: -a / (2.0 * one_minus_a2), c2: a / (2.0 * (1.0 + a)) }
    }

    #[inline]
    fn kernel_minus_one(&self, dist_sq: f64, sum_sq: f64) -> f64 {
        (self.c0 + self.c1 * dist_sq + self.c2 * sum_sq).exp_m1()
    }
}

/// Atoms grouped by their distinct smoothing times.
struct TimeClasses {
    times: Vec<f64>,
    class: Vec<usize>,
}

impl TimeClasses {
    fn new(times: &[f64]) -> Self {
        let mut distinct = times.to_vec();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        let class = times.iter().map(|t| distinct.partition_point(|u| u < t)).collect();
        Self { times: distinct, class }
    }

    fn min_time(&self) -> f64 {
        self.times[0]
    }
}

fn dist_sq(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Pairs `(|X_i - X_j|², |X_i|² + |X_j|²)` bucketed by the time classes of
/// `i` and `j`, so each quadrature node needs one set of kernel constants per
/// bucket and one exponential per pair.
struct PairBuckets {
    d: usize,
    n: usize,
    buckets: Vec<Bucket>,
}

struct Bucket {
    time: f64,
    weight: f64,
    dist_sq: Vec<f64>,
    sum_sq: Vec<f64>,
}

impl PairBuckets {
    fn new(sm: &SmoothedEmpirical, classes: &TimeClasses) -> Self {
        let (n, k) = (sm.len(), classes.times.len());
        // slot 2·(a·k + b) holds off-diagonal pairs, the next slot the diagonal
        let mut buckets: Vec<Bucket> = (0..2 * k * k)
            .map(|slot| {
                let (a, b) = ((slot / 2) / k, (slot / 2) % k);
                let weight = if slot % 2 == 0 { 2.0 } else { 1.0 };
                Bucket { time: classes.times[a] + classes.times[b], weight, dist_sq: Vec::new(), sum_sq: Vec::new() }
            })
            .collect();
        for i in 0..n {
            let ci = classes.class[i];
            let diag = &mut buckets[2 * (ci * k + ci) + 1];
            diag.dist_sq.push(0.0);
            diag.sum_sq.push(2.0 * sm.norm_sq(i));
            for j in i + 1..n {
                let cj = classes.class[j];
                let b = &mut buckets[2 * (ci.min(cj) * k + ci.max(cj))];
                b.dist_sq.push(dist_sq(sm.atom(i), sm.atom(j)));
                b.sum_sq.push(sm.norm_sq(i) + sm.norm_sq(j));
            }
        }
        buckets.retain(|b| !b.dist_sq.is_empty());
        Self { d: sm.dim(), n, buckets }
    }

    /// `(1/n²) Σ_{i,j} [p_{u+T_i+T_j}(X_i, X_j) - 1]`.
    fn eval(&self, u: f64) -> f64 {
        let mut total = 0.0;
        for b in &self.buckets {
            let k = LnKernelCoeffs::new(self.d, u + b.time);
            // Σ(e^l - 1) loses at most n²·ε absolutely against the exact form
            let s: f64 = b.dist_sq.iter().zip(&b.sum_sq).map(|(ds, ss)| (k.c0 + k.c1 * ds + k.c2 * ss).exp()).sum();
            total += b.weight * (s - b.dist_sq.len() as f64);
        }
        total / (self.n * self.n) as f64
    }
}

/// `∫_0^∞ F(u) du` split as adaptive quadrature on `(0, 1)` with breaks at
/// `t_min·10^j` and `v = e^{-u}` on the tail.
fn integrate_time<F: FnMut(f64) -> f64>(mut f: F, t_min: f64, quad: &QuadSettings) -> Result<QuadOutcome> {
    let breaks: Vec<f64> = (0..).map(|j| t_min * 10f64.powi(j)).take_while(|b| *b < 1.0).collect();
    let head = integrate_with_breaks(&mut f, 0.0, 1.0, &breaks, quad)?;
    let tail = integrate(|v: f64| if v <= 0.0 { 0.0 } else { f(-v.ln()) / v }, 0.0, (-1.0f64).exp(), quad)?;
    Ok(QuadOutcome { value: head.value + tail.value, error: head.error + tail.error, evaluations: head.evaluations + tail.evaluations })
}

/// `‖f - 1‖²_{H^{-1,2}} = 2 ∫_0^∞ ∫ (P_s g)² dμ ds
///  = ∫_0^∞ (1/n²) Σ_{i,j} [p_{u+T_i+T_j}(X_i, X_j) - 1] du`.
pub fn h12_norm_sq(sm: &SmoothedEmpirical, quad: &QuadSettings) -> Result<QuadOutcome> {
    let classes = TimeClasses::new(sm.times());
    if classes.min_time() <= 0.0 {
        return Err(invalid("h12_norm_sq needs strictly positive times"));
    }
    let pairs = PairBuckets::new(sm, &classes);
    let mut out = integrate_time(|u| pairs.eval(u), classes.min_time(), quad)?;
    // the double sum is a Gram form, so a negative result is quadrature noise
    out.value = out.value.max(0.0);
    Ok(out)
}

/// `⟨g, φ⟩_{H^{-1,2}} = (1/n) Σ_i ((-L)^{-1} φ)` evolved by `T_i` at `X_i`.
pub fn h12_cross_term(sm: &SmoothedEmpirical, field: &CenteringField) -> f64 {
    (0..sm.len()).map(|i| field.resolvent_eval(sm.times()[i], sm.norm_sq(i).sqrt())).sum::<f64>() / sm.len() as f64
}

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    /// Largest inner quadrature error estimate over all samples.
    pub max_quad_error: f64,
}

/// Smallest accepted number of outer samples.
pub const MIN_Y_SAMPLES: usize = 1000;

/// `(1/√π) ∫_0^∞ s^{-1/2} P_s g(y) ds = (2/√π) ∫_0^∞ P_{u²} g(y) du`.
fn riesz_fluctuation(sm: &SmoothedEmpirical, classes: &TimeClasses, y: &[f64], quad: &QuadSettings) -> Result<QuadOutcome> {
    let n = sm.len();
    let yy: f64 = y.iter().map(|v| v * v).sum();
    let geometry: Vec<(f64, f64)> = (0..n).map(|i| (dist_sq(sm.atom(i), y), sm.norm_sq(i) + yy)).collect();
    let k = classes.times.len();
    let integrand = |u: f64| {
        let s = u * u;
        let table: Vec<LnKernelCoeffs> = classes.times.iter().map(|t| LnKernelCoeffs::new(sm.dim(), t + s)).collect();
        debug_assert_eq!(table.len(), k);
        let sum: f64 = geometry.iter().zip(&classes.class).map(|((ds, ss), c)| table[*c].kernel_minus_one(*ds, *ss)).sum();
        2.0 / std::f64::consts::PI.sqrt() * sum / n as f64
    };
    // P_s g decays like e^{-s}, so s = 64 is far past double precision
    let tmin = classes.min_time().sqrt();
    let tmax = classes.times[k - 1].sqrt();
    integrate_with_breaks(integrand, 0.0, 8.0, &[tmin, tmax, 1.0, 3.0], quad)
}

fn check_mc_args(sm: &SmoothedEmpirical, p: f64, y_samples: usize) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid(format!("p must be ≥ 1, got {p}")));
    }
    if y_samples < MIN_Y_SAMPLES {
        return Err(invalid(format!("need at least {MIN_Y_SAMPLES} y-samples, got {y_samples}")));
    }
    if sm.times().iter().any(|t| *t <= 0.0) {
        return Err(invalid("Monte Carlo norm needs strictly positive times"));
    }
    Ok(())
}

fn mc_norm<R: RngCore + ?Sized>(
    sm: &SmoothedEmpirical,
    p: f64,
    y_samples: usize,
    subtract: Option<&CenteringField>,
    quad: &QuadSettings,
    rng: &mut R,
) -> Result<MonteCarloEstimate> {
    check_mc_args(sm, p, y_samples)?;
    if let Some(f) = subtract {
        if f.spectrum().dim() != sm.dim() {
            return Err(Error::DimensionMismatch { expected: sm.dim(), found: f.spectrum().dim() });
        }
    }
    let classes = TimeClasses::new(sm.times());
    let inner_quad = quad.with_abs_tol(quad.abs_tol.max(1e-12));
    let mut y = vec![0.0; sm.dim()];
    let (mut sum, mut sum_sq, mut max_err) = (0.0, 0.0, 0.0f64);
    for _ in 0..y_samples {
        y.iter_mut().for_each(|v| *v = standard_normal(rng));
        let inner = riesz_fluctuation(sm, &classes, &y, &inner_quad)?;
        let shift = subtract.map_or(0.0, |f| f.riesz_eval(y.iter().map(|v| v * v).sum::<f64>().sqrt()));
        let v = (inner.value - shift).abs().powf(p);
        sum += v;
        sum_sq += v * v;
        max_err = max_err.max(inner.error);
    }
    let m = y_samples as f64;
    let mean = sum / m;
    let var = ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0);
    Ok(MonteCarloEstimate { mean, std_error: (var / m).sqrt(), samples: y_samples, max_quad_error: max_err })
}

/// `∫ |(1/√π) ∫_0^∞ s^{-1/2} P_s g ds|^p dμ` by Monte Carlo over `y ~ μ`.
pub fn h1p_norm_estimate<R: RngCore + ?Sized>(
    sm: &SmoothedEmpirical,
    p: f64,
    y_samples: usize,
    quad: &QuadSettings,
    rng: &mut R,
) -> Result<MonteCarloEstimate> {
    mc_norm(sm, p, y_samples, None, quad, rng)
}

/// Same as [`h1p_norm_estimate`] for the centered fluctuation `g - φ`.
pub fn centered_h1p_estimate<R: RngCore + ?Sized>(
    sm: &SmoothedEmpirical,
    field: &CenteringField,
    p: f64,
    y_samples: usize,
    quad: &QuadSettings,
    rng: &mut R,
) -> Result<MonteCarloEstimate> {
    mc_norm(sm, p, y_samples, Some(field), quad, rng)
}

/// `(1/n) Σ W_p^p(δ_{X_i}, p_{T_i}(X_i, ·) dμ)`; closed form at `p = 2`.
pub fn regularization_cost(sm: &SmoothedEmpirical, p: f64, quad: &QuadSettings) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid(format!("p must be ≥ 1, got {p}")));
    }
    let mut total = 0.0;
    for i in 0..sm.len() {
        let x = KernelPoint::new(sm.atom(i).to_vec())?;
        let t = sm.times()[i];
        total += if p == 2.0 { kernel_second_moment(t, &x)? } else { kernel_p_cost(t, &x, p, quad)? };
    }
    Ok(total / sm.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::gaussian_points;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q6() -> QuadSettings {
        QuadSettings::default().with_rel_tol(1e-8)
    }

    #[test]
    fn single_atom_closed_form() {
        for t in [0.01, 0.1, 0.5] {
            let sm = SmoothedEmpirical::from_parts(2, vec![0.0, 0.0], vec![t]).unwrap();
            let v = h12_norm_sq(&sm, &q6()).unwrap().value;
            let expected = -0.5 * (-(-4.0 * t).exp_m1()).ln();
            assert!((v - expected).abs() < 1e-8, "t={t}: {v} vs {expected}");
        }
    }

    #[test]
    fn duplicated_atoms_change_nothing() {
        let one = SmoothedEmpirical::from_parts(3, vec![0.4, -0.2, 1.1], vec![0.2]).unwrap();
        let two = SmoothedEmpirical::from_parts(3, vec![0.4, -0.2, 1.1, 0.4, -0.2, 1.1], vec![0.2, 0.2]).unwrap();
        let (a, b) = (h12_norm_sq(&one, &q6()).unwrap().value, h12_norm_sq(&two, &q6()).unwrap().value);
        assert!((a - b).abs() < 1e-9 * a);
    }

    #[test]
    fn mc_p2_agrees_with_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let atoms = gaussian_points(12, 2, &mut rng);
        let times: Vec<f64> = (0..12).map(|i| 0.05 + 0.02 * (i % 3) as f64).collect();
        let sm = SmoothedEmpirical::from_parts(2, atoms, times).unwrap();
        let exact = h12_norm_sq(&sm, &q6()).unwrap().value;
        let mc = h1p_norm_estimate(&sm, 2.0, 4000, &QuadSettings::default().with_rel_tol(1e-7), &mut rng).unwrap();
        assert!((mc.mean - exact).abs() < 3.0 * mc.std_error, "{} ± {} vs {exact}", mc.mean, mc.std_error);
    }

    #[test]
    fn general_p_is_positive_and_decreasing_in_time() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let q = QuadSettings::default().with_rel_tol(1e-7);
        let vals: Vec<f64> = [0.05, 0.2, 0.8]
            .iter()
            .map(|t| {
                let sm = SmoothedEmpirical::from_parts(3, vec![0.3, 0.0, -0.5], vec![*t]).unwrap();
                let mut r = ChaCha8Rng::seed_from_u64(9);
                h1p_norm_estimate(&sm, 2.5, 2000, &q, &mut r).unwrap().mean
            })
            .collect();
        assert!(vals.iter().all(|v| v.is_finite() && *v > 0.0));
        assert!(vals[0] > vals[1] && vals[1] > vals[2], "{vals:?}");
        let sm = SmoothedEmpirical::from_parts(3, vec![0.0; 3], vec![0.1]).unwrap();
        assert!(h1p_norm_estimate(&sm, 2.0, 999, &q, &mut rng).is_err());
    }

    #[test]
    fn regularization_closed_form_and_zero_time() {
        let q = QuadSettings::default();
        let sm = SmoothedEmpirical::from_parts(2, vec![1.0, 2.0], vec![0.3]).unwrap();
        let expected = (-(-0.3f64).exp_m1()).powi(2) * 5.0 + 2.0 * -(-0.6f64).exp_m1();
        assert!((regularization_cost(&sm, 2.0, &q).unwrap() - expected).abs() < 1e-14);
        let zero = SmoothedEmpirical::from_parts(2, vec![1.0, 2.0, -1.0, 0.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(regularization_cost(&zero, 2.0, &q).unwrap(), 0.0);
        assert_eq!(regularization_cost(&zero, 3.0, &q).unwrap(), 0.0);
        let p3 = regularization_cost(&sm, 3.0, &q).unwrap();
        assert!(p3 > 0.0 && p3.is_finite());
    }
}
