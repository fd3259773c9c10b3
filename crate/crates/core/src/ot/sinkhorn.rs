//! Entropic transport by stabilized Sinkhorn scaling with ε-scaling.
//!
//! The coupling is `P_ij = a_i b_j u_i K_ij v_j` with the stabilized kernel
//! `K_ij = exp((f_i + g_j - C_ij)/ε)`. Large scalings are periodically absorbed
//! into the potentials `f, g`, which keeps every stored number moderate and
//! lets the kernel drop entries whose exponent is below `-truncation`. At small
//! ε the surviving kernel is very sparse, which is what makes `n` in the
//! thousands affordable.

use crate::error::{invalid, Result};
use crate::ot::{check_p, check_same_dim, cost_matrix, CostMatrix, Diagnostics, DiscreteMeasure, Plan, SolverKind, TransportResult};

/// ε-scaling schedule and stopping rules.
#[derive(Debug, Clone, PartialEq)]
pub struct SinkhornSettings {
    /// Terminal regularization, in cost units.
    pub eps_min: f64,
    /// Per-stage multiplier on ε, in `(0, 1)`.
    pub factor: f64,
    /// L1 marginal violation at which the terminal stage stops.
    pub tol: f64,
    /// Violation at which intermediate stages hand over to the next ε.
    pub stage_tol: f64,
    pub max_iter_per_stage: usize,
    /// Report `OT_ε(X,Y) - ½OT_ε(X,X) - ½OT_ε(Y,Y)` instead of `OT_ε(X,Y)`.
    pub debiased: bool,
    /// Kernel entries with exponent below `-truncation` are dropped.
    pub truncation: f64,
}

impl Default for SinkhornSettings {
    fn default() -> Self {
        Self {
            eps_min: 1e-3,
            factor: 0.7,
            tol: 1e-6,
            stage_tol: 1e-3,
            max_iter_per_stage: 10_000,
            debiased: true,
            truncation: 50.0,
        }
    }
}

impl SinkhornSettings {
    pub fn with_eps_min(mut self, eps_min: f64) -> Self {
        self.eps_min = eps_min;
        self
    }

    pub fn with_debiased(mut self, debiased: bool) -> Self {
        self.debiased = debiased;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps_min > 0.0) || !(self.factor > 0.0 && self.factor < 1.0) || !(self.tol > 0.0) || !(self.truncation > 0.0) {
            return Err(invalid(format!("invalid Sinkhorn settings {self:?}")));
        }
        Ok(())
    }
}

// scalings beyond e^{±ABSORB} are folded into the potentials
const ABSORB: f64 = 20.0;

struct Kernel {
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl Kernel {
    /// `None` when some row or column loses every entry to truncation.
    fn build(cost: &CostMatrix, f: &[f64], g: &[f64], eps: f64, theta: f64) -> Option<Self> {
        let (n, m) = (cost.rows(), cost.cols());
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut col_seen = vec![false; m];
        row_ptr.push(0);
        let inv = 1.0 / eps;
        for i in 0..n {
            let row = cost.row(i);
            let start = cols.len();
            for j in 0..m {
                let e = (f[i] + g[j] - row[j]) * inv;
                if e >= -theta {
                    cols.push(j as u32);
                    vals.push(e.exp());
                    col_seen[j] = true;
                }
            }
            if cols.len() == start {
                return None;
            }
            row_ptr.push(cols.len());
        }
        col_seen.iter().all(|s| *s).then_some(Self { row_ptr, cols, vals })
    }
}

struct Outcome {
    f: Vec<f64>,
    g: Vec<f64>,
    eps: f64,
    iterations: usize,
    converged: bool,
}

impl Outcome {
    fn dual(&self, a: &[f64], b: &[f64]) -> f64 {
        self.f.iter().zip(a).map(|(f, a)| f * a).sum::<f64>() + self.g.iter().zip(b).map(|(g, b)| g * b).sum::<f64>()
    }
}

fn entropic(cost: &CostMatrix, a: &[f64], b: &[f64], s: &SinkhornSettings) -> Result<Outcome> {
    s.validate()?;
    let (n, m) = (cost.rows(), cost.cols());
    let mut f = vec![0.0; n];
    let mut g = vec![0.0; m];
    let mut eps = cost.mean().max(s.eps_min);
    let mut iterations = 0;
    loop {
        let last = eps <= s.eps_min;
        let tol = if last { s.tol } else { s.stage_tol.max(s.tol) };
        let (converged, its) = stage(cost, a, b, &mut f, &mut g, eps, tol, s)?;
        iterations += its;
        if last {
            return Ok(Outcome { f, g, eps, iterations, converged });
        }
        eps = (eps * s.factor).max(s.eps_min);
    }
}

/// One ε stage; potentials are updated in place. Returns (converged, iterations).
#[allow(clippy::too_many_arguments)]
fn stage(
    cost: &CostMatrix,
    a: &[f64],
    b: &[f64],
    f: &mut [f64],
    g: &mut [f64],
    eps: f64,
    tol: f64,
    s: &SinkhornSettings,
) -> Result<(bool, usize)> {
    let (n, m) = (cost.rows(), cost.cols());
    let mut theta = s.truncation;
    let mut kernel = build_kernel(cost, f, g, eps, &mut theta)?;
    let mut u = vec![1.0; n];
    let mut v = vec![1.0; m];
    let mut t = vec![0.0; m];
    let mut rs = vec![0.0; n];
    let mut violation = f64::INFINITY;
    let mut it = 0;
    while it < s.max_iter_per_stage {
        it += 1;
        // row update; the violation is measured on the incoming coupling
        let mut viol = 0.0;
        let mut bad = false;
        for i in 0..n {
            let (lo, hi) = (kernel.row_ptr[i], kernel.row_ptr[i + 1]);
            let mut acc = 0.0;
            for k in lo..hi {
                let j = kernel.cols[k] as usize;
                acc += kernel.vals[k] * b[j] * v[j];
            }
            viol += (a[i] * u[i] * acc - a[i]).abs();
            rs[i] = acc;
        }
        violation = viol;
        if it > 1 && viol < tol {
            break;
        }
        for (ui, acc) in u.iter_mut().zip(&rs) {
            if *acc > 0.0 && acc.is_finite() {
                *ui = 1.0 / acc;
            } else {
                bad = true;
            }
        }
        // column update
        t.iter_mut().for_each(|x| *x = 0.0);
        for i in 0..n {
            let w = a[i] * u[i];
            for k in kernel.row_ptr[i]..kernel.row_ptr[i + 1] {
                t[kernel.cols[k] as usize] += w * kernel.vals[k];
            }
        }
        for j in 0..m {
            if t[j] > 0.0 && t[j].is_finite() {
                v[j] = 1.0 / t[j];
            } else {
                bad = true;
            }
        }
        let wild = |x: &f64| x.ln().abs() > ABSORB;
        if bad || u.iter().any(wild) || v.iter().any(wild) {
            absorb(f, &mut u, eps);
            absorb(g, &mut v, eps);
            if bad {
                theta *= 2.0;
            }
            kernel = build_kernel(cost, f, g, eps, &mut theta)?;
        }
    }
    absorb(f, &mut u, eps);
    absorb(g, &mut v, eps);
    Ok((violation < tol, it))
}

fn build_kernel(cost: &CostMatrix, f: &[f64], g: &[f64], eps: f64, theta: &mut f64) -> Result<Kernel> {
    for _ in 0..4 {
        if let Some(k) = Kernel::build(cost, f, g, eps, *theta) {
            return Ok(k);
        }
        *theta *= 2.0;
    }
    Err(invalid(format!("Sinkhorn kernel underflowed at ε = {eps}")))
}

fn absorb(pot: &mut [f64], scale: &mut [f64], eps: f64) {
    for (p, s) in pot.iter_mut().zip(scale.iter_mut()) {
        if *s > 0.0 && s.is_finite() {
            *p += eps * s.ln();
        }
        *s = 1.0;
    }
}

/// Entropic `W_p^p` estimate; see [`SinkhornSettings`] for the schedule.
///
/// The returned plan is the entropic coupling at the terminal ε; its cost is
/// in `diagnostics.plan_cost`. `cost` is the debiased divergence when
/// `settings.debiased` is set and the dual value otherwise. Hitting the
/// iteration cap is reported in `diagnostics.warning`, not as an error.
pub fn sinkhorn(x: &DiscreteMeasure, y: &DiscreteMeasure, p: f64, settings: &SinkhornSettings) -> Result<TransportResult> {
    check_p(p)?;
    check_same_dim(x, y)?;
    let cost = cost_matrix(x, y, p)?;
    let (a, b) = (x.weights(), y.weights());
    let out = entropic(&cost, a, b, settings)?;

    let (n, m) = (cost.rows(), cost.cols());
    let mut mass = vec![0.0; n * m];
    let mut plan_cost = 0.0;
    let mut cols = vec![0.0; m];
    let mut rows = vec![0.0; n];
    for i in 0..n {
        let row = cost.row(i);
        for j in 0..m {
            let pij = a[i] * b[j] * ((out.f[i] + out.g[j] - row[j]) / out.eps).exp();
            mass[i * m + j] = pij;
            plan_cost += pij * row[j];
            rows[i] += pij;
            cols[j] += pij;
        }
    }
    let violation: f64 = rows.iter().zip(a).chain(cols.iter().zip(b)).map(|(r, w)| (r - w).abs()).sum();

    let mut iterations = out.iterations;
    let mut converged = out.converged;
    let dual = out.dual(a, b);
    let value = if settings.debiased {
        let mut self_term = |z: &DiscreteMeasure| -> Result<f64> {
            let c = cost_matrix(z, z, p)?;
            let o = entropic(&c, z.weights(), z.weights(), settings)?;
            iterations += o.iterations;
            converged &= o.converged;
            Ok(o.dual(z.weights(), z.weights()))
        };
        dual - 0.5 * self_term(x)? - 0.5 * self_term(y)?
    } else {
        dual
    };
    let warning = (!converged).then(|| format!("iteration cap reached before marginal violation {}", settings.tol));
    Ok(TransportResult {
        cost: value,
        plan: Plan::Dense { rows: n, cols: m, mass },
        solver: SolverKind::Sinkhorn,
        p,
        diagnostics: Diagnostics {
            iterations,
            epsilon: Some(out.eps),
            marginal_violation: Some(violation),
            duality_gap: Some(plan_cost - dual),
            plan_cost: Some(plan_cost),
            warning,
        },
    })
}
