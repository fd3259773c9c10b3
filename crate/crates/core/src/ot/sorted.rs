//! One-dimensional transport by monotone rearrangement.

use crate::error::{invalid, ensure_finite, Result};
use crate::ot::{check_p, DiscreteMeasure, Diagnostics, Plan, SolverKind, TransportResult};

fn sorted_copy(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// `(1/n) Σ |x_(i) - y_(i)|^p`; inputs are sorted internally if needed.
pub fn sorted_1d_wp(x: &[f64], y: &[f64], p: f64) -> Result<f64> {
    check_p(p)?;
    if x.len() != y.len() {
        return Err(invalid(format!("sorted transport needs equal sizes, got {} and {}", x.len(), y.len())));
    }
    if x.is_empty() {
        return Ok(0.0);
    }
    ensure_finite(x, "sample")?;
    ensure_finite(y, "sample")?;
    let xs = if x.is_sorted() { x.to_vec() } else { sorted_copy(x) };
    let ys = if y.is_sorted() { y.to_vec() } else { sorted_copy(y) };
    let total: f64 = xs.iter().zip(&ys).map(|(a, b)| (a - b).abs().powf(p)).sum();
    Ok(total / xs.len() as f64)
}

/// Monotone matching between two uniform one-dimensional measures.
pub fn sorted_1d_transport(x: &DiscreteMeasure, y: &DiscreteMeasure, p: f64) -> Result<TransportResult> {
    if x.dim() != 1 || y.dim() != 1 {
        return Err(invalid("sorted transport needs d = 1"));
    }
    if !x.is_uniform() || !y.is_uniform() {
        return Err(invalid("sorted transport needs uniform weights"));
    }
    let cost = sorted_1d_wp(x.coords(), y.coords(), p)?;
    let order = |v: &[f64]| {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|a, b| v[*a].total_cmp(&v[*b]));
        idx
    };
    let (ox, oy) = (order(x.coords()), order(y.coords()));
    let mut perm = vec![0; ox.len()];
    for (i, j) in ox.iter().zip(&oy) {
        perm[*i] = *j;
    }
    Ok(TransportResult { cost, plan: Plan::Permutation(perm), solver: SolverKind::Sorted1d, p, diagnostics: Diagnostics::default() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(sorted_1d_wp(&[0.0, 1.0], &[0.5, 1.5], 1.0).unwrap(), 0.5);
        assert_eq!(sorted_1d_wp(&[3.0, -1.0, 2.0], &[3.0, -1.0, 2.0], 2.0).unwrap(), 0.0);
        assert_eq!(sorted_1d_wp(&[2.0, 0.0], &[3.0, 1.0], 2.0).unwrap(), 1.0);
        assert!(sorted_1d_wp(&[0.0], &[0.0, 1.0], 1.0).is_err());
    }

    #[test]
    fn plan_is_monotone() {
        let x = DiscreteMeasure::uniform(1, vec![0.3, -2.0, 1.0]).unwrap();
        let y = DiscreteMeasure::uniform(1, vec![5.0, 0.0, -1.0]).unwrap();
        let r = sorted_1d_transport(&x, &y, 2.0).unwrap();
        assert_eq!(r.plan, Plan::Permutation(vec![1, 2, 0]));
        assert!((r.recompute_cost(&x, &y) - r.cost).abs() < 1e-12);
    }
}
