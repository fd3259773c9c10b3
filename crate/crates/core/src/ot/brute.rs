//! Exhaustive permutation search, used as a testing oracle.

use crate::error::{invalid, Result};
use crate::ot::{check_p, check_same_dim, cost_matrix, CostMatrix, DiscreteMeasure};

/// Largest size accepted by the exhaustive oracle.
pub const MAX_BRUTE_FORCE: usize = 8;

/// Mean cost of the best permutation of a square matrix (Heap's algorithm).
pub fn brute_force_cost(cost: &CostMatrix) -> Result<f64> {
    let n = cost.rows();
    if cost.cols() != n {
        return Err(invalid("brute force needs a square matrix"));
    }
    if n > MAX_BRUTE_FORCE {
        return Err(invalid(format!("brute force refuses n = {n} > {MAX_BRUTE_FORCE}")));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let total = |perm: &[usize]| perm.iter().enumerate().map(|(i, j)| cost.get(i, *j)).sum::<f64>();
    let mut best = total(&perm);
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.min(total(&perm));
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(best / n as f64)
}

/// `min_σ (1/n) Σ |x_i - y_σ(i)|^p` over all `n!` permutations; uniform weights, `n ≤ 8`.
pub fn brute_force_wp(x: &DiscreteMeasure, y: &DiscreteMeasure, p: f64) -> Result<f64> {
    check_p(p)?;
    check_same_dim(x, y)?;
    if x.len() != y.len() || !x.is_uniform() || !y.is_uniform() {
        return Err(invalid("brute force needs two uniform measures of equal size"));
    }
    brute_force_cost(&cost_matrix(x, y, p)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let x = DiscreteMeasure::uniform(1, vec![0.0, 2.0]).unwrap();
        let y = DiscreteMeasure::uniform(1, vec![1.0, 3.0]).unwrap();
        assert_eq!(brute_force_wp(&x, &y, 2.0).unwrap(), 1.0);
        let y_rev = DiscreteMeasure::uniform(1, vec![3.0, 1.0]).unwrap();
        assert_eq!(brute_force_wp(&x, &y_rev, 2.0).unwrap(), 1.0);
        let a = DiscreteMeasure::uniform(2, vec![0.0, 0.0]).unwrap();
        let b = DiscreteMeasure::uniform(2, vec![3.0, 4.0]).unwrap();
        assert!((brute_force_wp(&a, &b, 1.5).unwrap() - 5f64.powf(1.5)).abs() < 1e-12);
        let big = DiscreteMeasure::uniform(1, (0..9).map(f64::from).collect()).unwrap();
        assert!(brute_force_wp(&big, &big, 1.0).is_err());
    }
}
