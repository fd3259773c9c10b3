//! Optimal transport between discrete measures.
//!
//! | solver | use |
//! |---|---|
//! | [`solve_assignment`] | equal-size uniform measures, shortest augmenting paths |
//! | [`solve_general_ot`] | arbitrary weights, network simplex on integerized masses |
//! | [`sinkhorn`] | entropic approximation with ε-scaling for large instances |
//! | [`sorted_1d_wp`] | one-dimensional monotone rearrangement |
//! | [`brute_force_wp`] | exhaustive oracle for `n ≤ 8` |

pub mod assignment;
pub mod brute;
pub mod cost;
pub mod io;
pub mod network_simplex;
pub mod proxy;
pub mod sinkhorn;
pub mod sorted;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, invalid, Error, Result};

pub use assignment::{lapjv, solve_assignment};
pub use brute::brute_force_wp;
pub use cost::{cost_matrix, pow_dist, CostMatrix, MAX_DENSE_ENTRIES};
pub use network_simplex::solve_general_ot;
pub use proxy::{gaussian_proxy_wp, ProxyEstimate};
pub use sinkhorn::{sinkhorn, SinkhornSettings};
pub use sorted::{sorted_1d_transport, sorted_1d_wp};

/// Atoms in `R^d` with nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    d: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Measure from row-major coordinates (`len = n·d`) and weights.
    pub fn new(d: usize, coords: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(invalid("measures need d ≥ 1"));
        }
        if coords.len() != weights.len() * d {
            return Err(Error::DimensionMismatch { expected: weights.len() * d, found: coords.len() });
        }
        if weights.is_empty() {
            return Err(invalid("measures need at least one atom"));
        }
        ensure_finite(&coords, "measure coordinates")?;
        ensure_finite(&weights, "measure weights")?;
        if weights.iter().any(|w| *w < 0.0) {
            return Err(invalid("weights must be nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        // summation error of n terms grows like n·ε
        if (total - 1.0).abs() > 1e-12 + 4.0 * weights.len() as f64 * f64::EPSILON {
            return Err(invalid(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { d, coords, weights })
    }

    /// Uniform weights `1/n` on row-major coordinates.
    pub fn uniform(d: usize, coords: Vec<f64>) -> Result<Self> {
        if d == 0 || coords.len() % d != 0 {
            return Err(invalid("coordinate count is not a multiple of d"));
        }
        let n = coords.len() / d;
        Self::new(d, coords, vec![1.0 / n as f64; n])
    }

    /// Uniform measure on a list of points.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let d = points.first().map(Vec::len).unwrap_or(0);
        if let Some(bad) = points.iter().find(|p| p.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: bad.len() });
        }
        Self::uniform(d, points.concat())
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Whether every weight equals `1/n` exactly.
    pub fn is_uniform(&self) -> bool {
        let w = 1.0 / self.len() as f64;
        self.weights.iter().all(|v| *v == w)
    }

    /// Same atoms with every coordinate multiplied by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self { d: self.d, coords: self.coords.iter().map(|v| v * lambda).collect(), weights: self.weights.clone() }
    }
}

/// Which algorithm produced a [`TransportResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    ExactAssignment,
    GeneralExact,
    Sinkhorn,
    Sorted1d,
    BruteForce,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::ExactAssignment => "exact-assignment",
            SolverKind::GeneralExact => "general-exact",
            SolverKind::Sinkhorn => "sinkhorn",
            SolverKind::Sorted1d => "sorted-1d",
            SolverKind::BruteForce => "brute-force",
        })
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact-assignment" => Ok(Self::ExactAssignment),
            "general-exact" => Ok(Self::GeneralExact),
            "sinkhorn" => Ok(Self::Sinkhorn),
            "sorted-1d" => Ok(Self::Sorted1d),
            "brute-force" => Ok(Self::BruteForce),
            other => Err(Error::Config(format!("unknown solver `{other}`"))),
        }
    }
}

/// A coupling between two discrete measures.
#[derive(Debug, Clone, PartialEq)]
pub enum Plan {
    /// Row `i` is matched to column `perm[i]`, each pair carrying mass `1/n`.
    Permutation(Vec<usize>),
    /// Entries `(i, j, mass)`.
    Sparse(Vec<(usize, usize, f64)>),
    /// Row-major dense coupling.
    Dense { rows: usize, cols: usize, mass: Vec<f64> },
}

impl Plan {
    /// Visit every `(i, j, mass)` with nonzero mass.
    pub fn for_each(&self, mut f: impl FnMut(usize, usize, f64)) {
        match self {
            Plan::Permutation(perm) => {
                let w = 1.0 / perm.len() as f64;
                for (i, j) in perm.iter().enumerate() {
                    f(i, *j, w);
                }
            }
            Plan::Sparse(entries) => entries.iter().for_each(|(i, j, m)| f(*i, *j, *m)),
            Plan::Dense { cols, mass, .. } => {
                for (idx, m) in mass.iter().enumerate() {
                    if *m != 0.0 {
                        f(idx / cols, idx % cols, *m);
                    }
                }
            }
        }
    }

    /// Row and column sums.
    pub fn marginals(&self, rows: usize, cols: usize) -> (Vec<f64>, Vec<f64>) {
        let mut r = vec![0.0; rows];
        let mut c = vec![0.0; cols];
        self.for_each(|i, j, m| {
            r[i] += m;
            c[j] += m;
        });
        (r, c)
    }
}

/// Solver-specific numbers attached to a result.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub iterations: usize,
    /// Terminal regularization (Sinkhorn only).
    pub epsilon: Option<f64>,
    /// L1 distance between plan marginals and the input weights.
    pub marginal_violation: Option<f64>,
    /// Primal cost minus dual value, when duals are available.
    pub duality_gap: Option<f64>,
    /// Cost `Σ P_ij C_ij` of the returned plan, when `cost` is something else.
    pub plan_cost: Option<f64>,
    pub warning: Option<String>,
}

/// Value of `W_p^p` together with the coupling that attains it.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportResult {
    pub cost: f64,
    pub plan: Plan,
    pub solver: SolverKind,
    pub p: f64,
    pub diagnostics: Diagnostics,
}

impl TransportResult {
    /// `W_p = cost^{1/p}`.
    pub fn distance(&self) -> f64 {
        self.cost.max(0.0).powf(1.0 / self.p)
    }

    /// Largest absolute deviation of the plan marginals from the given weights.
    pub fn max_marginal_error(&self, a: &[f64], b: &[f64]) -> f64 {
        let (r, c) = self.plan.marginals(a.len(), b.len());
        r.iter().zip(a).chain(c.iter().zip(b)).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    /// `Σ P_ij |x_i - y_j|^p` recomputed from the plan.
    pub fn recompute_cost(&self, x: &DiscreteMeasure, y: &DiscreteMeasure) -> f64 {
        let mut acc = 0.0;
        self.plan.for_each(|i, j, m| acc += m * pow_dist(x.point(i), y.point(j), self.p));
        acc
    }
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid(format!("transport exponent must be ≥ 1, got {p}")));
    }
    Ok(())
}

pub(crate) fn check_same_dim(x: &DiscreteMeasure, y: &DiscreteMeasure) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), found: y.dim() });
    }
    Ok(())
}
