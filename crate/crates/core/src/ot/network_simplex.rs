//! Primal network simplex for the transportation problem.
//!
//! The spanning-tree bookkeeping (`parent`, `pred`, `thread`, `rev_thread`,
//! `succ_num`, `last_succ`) follows the LEMON implementation: an artificial
//! root joined to every node, block-search pivoting, and the strongly feasible
//! leaving-arc rule that rules out cycling. Masses are integers (weights
//! scaled by `1e12` with largest-remainder rounding), so flow updates are
//! exact and only potentials carry floating point.

use crate::error::{invalid, Error, Result};
use crate::ot::{check_p, check_same_dim, cost_matrix, CostMatrix, Diagnostics, DiscreteMeasure, Plan, SolverKind, TransportResult};

/// Total integer mass each side is scaled to.
pub const MASS_SCALE: i64 = 1_000_000_000_000;

const NONE: usize = usize::MAX;
const STATE_LOWER: i8 = 1;
const STATE_TREE: i8 = 0;
const DIR_UP: i8 = 1;
const DIR_DOWN: i8 = -1;

/// Integer masses summing to exactly `total`, each within one unit of `w_i · total`.
pub fn integerize(weights: &[f64], total: i64) -> Vec<i64> {
    let sum: f64 = weights.iter().sum();
    let scaled: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut out: Vec<i64> = scaled.iter().map(|v| v.floor() as i64).collect();
    let mut deficit = total - out.iter().sum::<i64>();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    // largest fractional part first; index breaks ties for determinism
    order.sort_by(|a, b| {
        let fa = scaled[*a] - scaled[*a].floor();
        let fb = scaled[*b] - scaled[*b].floor();
        fb.total_cmp(&fa).then(a.cmp(b))
    });
    let mut k = 0;
    while deficit > 0 {
        out[order[k % order.len()]] += 1;
        deficit -= 1;
        k += 1;
    }
    let mut k = order.len();
    while deficit < 0 {
        k = if k == 0 { order.len() - 1 } else { k - 1 };
        if out[order[k]] > 0 {
            out[order[k]] -= 1;
            deficit += 1;
        }
    }
    out
}

struct Simplex<'a> {
    n: usize,
    m: usize,
    node_num: usize,
    arc_num: usize,
    cost: &'a [f64],
    art_source: Vec<usize>,
    art_target: Vec<usize>,
    art_cost: Vec<f64>,
    flow: Vec<i64>,
    state: Vec<i8>,
    pi: Vec<f64>,
    parent: Vec<usize>,
    pred: Vec<usize>,
    thread: Vec<usize>,
    rev_thread: Vec<usize>,
    succ_num: Vec<usize>,
    last_succ: Vec<usize>,
    pred_dir: Vec<i8>,
    dirty_revs: Vec<usize>,
    in_arc: usize,
    join: usize,
    u_in: usize,
    v_in: usize,
    u_out: usize,
    delta: i64,
    next_arc: usize,
    block_size: usize,
    eps: f64,
}

impl<'a> Simplex<'a> {
    fn new(cost: &'a CostMatrix, supply: &[i64], demand: &[i64]) -> Self {
        let (n, m) = (cost.rows(), cost.cols());
        let node_num = n + m;
        let arc_num = n * m;
        let root = node_num;
        let art_cost_value = (cost.max() + 1.0) * node_num as f64;
        let mut s = Simplex {
            n,
            m,
            node_num,
            arc_num,
            cost: cost.data(),
            art_source: vec![0; node_num],
            art_target: vec![0; node_num],
            art_cost: vec![0.0; node_num],
            flow: vec![0; arc_num + node_num],
            state: vec![STATE_LOWER; arc_num + node_num],
            pi: vec![0.0; node_num + 1],
            parent: vec![NONE; node_num + 1],
            pred: vec![NONE; node_num + 1],
            thread: vec![0; node_num + 1],
            rev_thread: vec![0; node_num + 1],
            succ_num: vec![0; node_num + 1],
            last_succ: vec![0; node_num + 1],
            pred_dir: vec![0; node_num + 1],
            dirty_revs: Vec::new(),
            in_arc: 0,
            join: 0,
            u_in: 0,
            v_in: 0,
            u_out: 0,
            delta: 0,
            next_arc: 0,
            block_size: ((arc_num as f64).sqrt().ceil() as usize).max(10),
            eps: 64.0 * f64::EPSILON * art_cost_value,
        };
        s.thread[root] = 0;
        s.rev_thread[0] = root;
        s.succ_num[root] = node_num + 1;
        s.last_succ[root] = root - 1;
        for u in 0..node_num {
            let e = arc_num + u;
            let sup = if u < n { supply[u] } else { -demand[u - n] };
            s.parent[u] = root;
            s.pred[u] = e;
            s.thread[u] = u + 1;
            s.rev_thread[u + 1] = u;
            s.succ_num[u] = 1;
            s.last_succ[u] = u;
            s.state[e] = STATE_TREE;
            if sup >= 0 {
                s.pred_dir[u] = DIR_UP;
                s.pi[u] = 0.0;
                s.art_source[u] = u;
                s.art_target[u] = root;
                s.flow[e] = sup;
                s.art_cost[u] = 0.0;
            } else {
                s.pred_dir[u] = DIR_DOWN;
                s.pi[u] = art_cost_value;
                s.art_source[u] = root;
                s.art_target[u] = u;
                s.flow[e] = -sup;
                s.art_cost[u] = art_cost_value;
            }
        }
        s
    }

    #[inline]
    fn source(&self, e: usize) -> usize {
        if e < self.arc_num {
            e / self.m
        } else {
            self.art_source[e - self.arc_num]
        }
    }

    #[inline]
    fn target(&self, e: usize) -> usize {
        if e < self.arc_num {
            self.n + e % self.m
        } else {
            self.art_target[e - self.arc_num]
        }
    }

    #[inline]
    fn arc_cost(&self, e: usize) -> f64 {
        if e < self.arc_num {
            self.cost[e]
        } else {
            self.art_cost[e - self.arc_num]
        }
    }

    fn find_entering(&mut self) -> bool {
        let total = self.arc_num;
        let (n, m) = (self.n, self.m);
        let mut min = -self.eps;
        let mut found = NONE;
        let mut cnt = self.block_size;
        let mut e = self.next_arc;
        let (mut i, mut j) = (e / m, e % m);
        for _ in 0..total {
            let st = self.state[e];
            if st != STATE_TREE {
                let c = st as f64 * (self.cost[e] + self.pi[i] - self.pi[n + j]);
                if c < min {
                    min = c;
                    found = e;
                }
            }
            e += 1;
            j += 1;
            if j == m {
                j = 0;
                i += 1;
                if e == total {
                    e = 0;
                    i = 0;
                }
            }
            cnt -= 1;
            if cnt == 0 {
                if found != NONE {
                    break;
                }
                cnt = self.block_size;
            }
        }
        if found == NONE {
            return false;
        }
        self.in_arc = found;
        self.next_arc = e;
        true
    }

    fn find_join(&mut self) {
        let mut u = self.source(self.in_arc);
        let mut v = self.target(self.in_arc);
        while u != v {
            if self.succ_num[u] < self.succ_num[v] {
                u = self.parent[u];
            } else {
                v = self.parent[v];
            }
        }
        self.join = u;
    }

    fn find_leaving(&mut self) -> bool {
        let (first, second) = if self.state[self.in_arc] == STATE_LOWER {
            (self.source(self.in_arc), self.target(self.in_arc))
        } else {
            (self.target(self.in_arc), self.source(self.in_arc))
        };
        self.delta = i64::MAX;
        let mut result = 0;
        let mut u = first;
        while u != self.join {
            let d = if self.pred_dir[u] == DIR_DOWN { i64::MAX } else { self.flow[self.pred[u]] };
            if d < self.delta {
                self.delta = d;
                self.u_out = u;
                result = 1;
            }
            u = self.parent[u];
        }
        let mut u = second;
        while u != self.join {
            let d = if self.pred_dir[u] == DIR_UP { i64::MAX } else { self.flow[self.pred[u]] };
            if d <= self.delta {
                self.delta = d;
                self.u_out = u;
                result = 2;
            }
            u = self.parent[u];
        }
        if result == 1 {
            self.u_in = first;
            self.v_in = second;
        } else {
            self.u_in = second;
            self.v_in = first;
        }
        result != 0
    }

    fn change_flow(&mut self) {
        if self.delta > 0 {
            let val = self.state[self.in_arc] as i64 * self.delta;
            self.flow[self.in_arc] += val;
            let mut u = self.source(self.in_arc);
            while u != self.join {
                self.flow[self.pred[u]] -= self.pred_dir[u] as i64 * val;
                u = self.parent[u];
            }
            let mut u = self.target(self.in_arc);
            while u != self.join {
                self.flow[self.pred[u]] += self.pred_dir[u] as i64 * val;
                u = self.parent[u];
            }
        }
        self.state[self.in_arc] = STATE_TREE;
        let out = self.pred[self.u_out];
        debug_assert_eq!(self.flow[out], 0, "uncapacitated arcs leave at zero flow");
        self.state[out] = STATE_LOWER;
    }

    fn update_tree(&mut self) {
        let (u_in, v_in, u_out, join, in_arc) = (self.u_in, self.v_in, self.u_out, self.join, self.in_arc);
        let old_rev_thread = self.rev_thread[u_out];
        let old_succ_num = self.succ_num[u_out];
        let old_last_succ = self.last_succ[u_out];
        let v_out = self.parent[u_out];
        let in_dir = if u_in == self.source(in_arc) { DIR_UP } else { DIR_DOWN };

        if u_in == u_out {
            self.parent[u_in] = v_in;
            self.pred[u_in] = in_arc;
            self.pred_dir[u_in] = in_dir;
            if self.thread[v_in] != u_out {
                let mut after = self.thread[old_last_succ];
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
                after = self.thread[v_in];
                self.thread[v_in] = u_out;
                self.rev_thread[u_out] = v_in;
                self.thread[old_last_succ] = after;
                self.rev_thread[after] = old_last_succ;
            }
        } else {
            let thread_continue = if old_rev_thread == v_in { self.thread[old_last_succ] } else { self.thread[v_in] };
            let mut stem = u_in;
            let mut par_stem = v_in;
            let mut last = self.last_succ[u_in];
            let mut after = self.thread[last];
            self.thread[v_in] = u_in;
            self.dirty_revs.clear();
            self.dirty_revs.push(v_in);
            while stem != u_out {
                let next_stem = self.parent[stem];
                self.thread[last] = next_stem;
                self.dirty_revs.push(last);
                let before = self.rev_thread[stem];
                self.thread[before] = after;
                self.rev_thread[after] = before;
                self.parent[stem] = par_stem;
                par_stem = stem;
                stem = next_stem;
                last = if self.last_succ[stem] == self.last_succ[par_stem] {
                    self.rev_thread[par_stem]
                } else {
                    self.last_succ[stem]
                };
                after = self.thread[last];
            }
            self.parent[u_out] = par_stem;
            self.thread[last] = thread_continue;
            self.rev_thread[thread_continue] = last;
            self.last_succ[u_out] = last;
            if old_rev_thread != v_in {
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
            }
            for k in 0..self.dirty_revs.len() {
                let u = self.dirty_revs[k];
                let t = self.thread[u];
                self.rev_thread[t] = u;
            }
            let mut tmp_sc = 0usize;
            let tmp_ls = self.last_succ[u_out];
            let mut u = u_out;
            let mut p = self.parent[u];
            while u != u_in {
                self.pred[u] = self.pred[p];
                self.pred_dir[u] = -self.pred_dir[p];
                tmp_sc += self.succ_num[u] - self.succ_num[p];
                self.succ_num[u] = tmp_sc;
                self.last_succ[p] = tmp_ls;
                u = p;
                p = self.parent[u];
            }
            self.pred[u_in] = in_arc;
            self.pred_dir[u_in] = in_dir;
            self.succ_num[u_in] = old_succ_num;
        }

        let up_limit_out = if self.last_succ[join] == v_in { join } else { NONE };
        let last_succ_out = self.last_succ[u_out];
        let mut u = v_in;
        while u != NONE && self.last_succ[u] == v_in {
            self.last_succ[u] = last_succ_out;
            u = self.parent[u];
        }
        if join != old_rev_thread && v_in != old_rev_thread {
            let mut u = v_out;
            while u != up_limit_out && self.last_succ[u] == old_last_succ {
                self.last_succ[u] = old_rev_thread;
                u = self.parent[u];
            }
        } else if last_succ_out != old_last_succ {
            let mut u = v_out;
            while u != up_limit_out && self.last_succ[u] == old_last_succ {
                self.last_succ[u] = last_succ_out;
                u = self.parent[u];
            }
        }
        let mut u = v_in;
        while u != join {
            self.succ_num[u] += old_succ_num;
            u = self.parent[u];
        }
        let mut u = v_out;
        while u != join {
            self.succ_num[u] -= old_succ_num;
            u = self.parent[u];
        }
    }

    fn update_potential(&mut self) {
        let c = self.arc_cost(self.in_arc);
        let sigma = self.pi[self.v_in] - self.pi[self.u_in] - if self.pred_dir[self.u_in] == DIR_UP { c } else { -c };
        let end = self.thread[self.last_succ[self.u_in]];
        let mut u = self.u_in;
        while u != end {
            self.pi[u] += sigma;
            u = self.thread[u];
        }
    }

    fn run(&mut self) -> usize {
        let mut pivots = 0;
        while self.find_entering() {
            self.find_join();
            let change = self.find_leaving();
            debug_assert!(change && self.delta < i64::MAX, "transportation problems are bounded");
            self.change_flow();
            self.update_tree();
            self.update_potential();
            pivots += 1;
        }
        pivots
    }
}

/// Exact min-cost flow on a dense bipartite cost matrix with integer masses.
///
/// Returns `(i, j, flow)` for every positive flow, the pivot count, and the
/// dual value `-Σ π_u b_u` in cost units times mass units.
pub fn transport_integer(cost: &CostMatrix, supply: &[i64], demand: &[i64]) -> Result<(Vec<(usize, usize, i64)>, usize, f64)> {
    if supply.len() != cost.rows() || demand.len() != cost.cols() {
        return Err(Error::DimensionMismatch { expected: cost.rows() + cost.cols(), found: supply.len() + demand.len() });
    }
    if supply.iter().sum::<i64>() != demand.iter().sum::<i64>() {
        return Err(invalid("supply and demand totals differ"));
    }
    let mut s = Simplex::new(cost, supply, demand);
    let pivots = s.run();
    if (0..s.node_num).any(|u| s.flow[s.arc_num + u] != 0) {
        return Err(invalid("transport problem is infeasible"));
    }
    let mut flows: Vec<(usize, usize, i64)> = (0..s.node_num)
        .map(|u| s.pred[u])
        .filter(|e| *e < s.arc_num && s.flow[*e] > 0)
        .map(|e| (e / s.m, e % s.m, s.flow[e]))
        .collect();
    flows.sort_unstable();
    let dual: f64 = -(0..s.n).map(|i| s.pi[i] * supply[i] as f64).sum::<f64>()
        + (0..s.m).map(|j| s.pi[s.n + j] * demand[j] as f64).sum::<f64>();
    Ok((flows, pivots, dual))
}

/// Exact `W_p^p` between two discrete measures of any sizes and weights.
pub fn solve_general_ot(x: &DiscreteMeasure, y: &DiscreteMeasure, p: f64) -> Result<TransportResult> {
    check_p(p)?;
    check_same_dim(x, y)?;
    let cost = cost_matrix(x, y, p)?;
    let supply = integerize(x.weights(), MASS_SCALE);
    let demand = integerize(y.weights(), MASS_SCALE);
    let (flows, pivots, dual) = transport_integer(&cost, &supply, &demand)?;
    let scale = MASS_SCALE as f64;
    let primal: f64 = flows.iter().map(|(i, j, f)| *f as f64 * cost.get(*i, *j)).sum();
    let entries = flows.iter().map(|(i, j, f)| (*i, *j, *f as f64 / scale)).collect();
    Ok(TransportResult {
        cost: primal / scale,
        plan: Plan::Sparse(entries),
        solver: SolverKind::GeneralExact,
        p,
        diagnostics: Diagnostics {
            iterations: pivots,
            duality_gap: Some((primal - dual) / scale),
            ..Diagnostics::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ot::brute::brute_force_cost;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn integerize_is_exact() {
        let w = vec![1.0 / 7.0; 7];
        let v = integerize(&w, MASS_SCALE);
        assert_eq!(v.iter().sum::<i64>(), MASS_SCALE);
        assert!(v.iter().all(|x| (*x - MASS_SCALE / 7).abs() <= 1));
        let v = integerize(&[0.5, 0.25, 0.25], 4);
        assert_eq!(v, vec![2, 1, 1]);
    }

    #[test]
    fn split_mass_example() {
        let x = DiscreteMeasure::uniform(1, vec![0.0]).unwrap();
        let y = DiscreteMeasure::uniform(1, vec![-1.0, 1.0]).unwrap();
        let r = solve_general_ot(&x, &y, 2.0).unwrap();
        assert!((r.cost - 1.0).abs() < 1e-15);
        assert!(r.max_marginal_error(x.weights(), y.weights()) < 1e-12);
    }

    #[test]
    fn uniform_square_matches_exhaustive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..300 {
            let n = 1 + trial % 8;
            let d = 1 + trial % 3;
            let pts = |rng: &mut ChaCha8Rng| (0..n * d).map(|_| rng.random_range(-2.0..2.0)).collect::<Vec<f64>>();
            let x = DiscreteMeasure::uniform(d, pts(&mut rng)).unwrap();
            let y = DiscreteMeasure::uniform(d, pts(&mut rng)).unwrap();
            let p = [1.0, 2.0, 3.0][trial % 3];
            let r = solve_general_ot(&x, &y, p).unwrap();
            let best = brute_force_cost(&cost_matrix(&x, &y, p).unwrap()).unwrap();
            assert!((r.cost - best).abs() < 1e-9, "trial {trial}: {} vs {best}", r.cost);
            assert!(r.max_marginal_error(x.weights(), y.weights()) < 1e-9);
            assert!(r.diagnostics.duality_gap.unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn unequal_sizes_respect_marginals() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = DiscreteMeasure::uniform(2, (0..2 * 13).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        let wy: Vec<f64> = (0..40).map(|_| rng.random::<f64>()).collect();
        let total: f64 = wy.iter().sum();
        let y = DiscreteMeasure::new(2, (0..80).map(|_| rng.random_range(-1.0..1.0)).collect(), wy.iter().map(|w| w / total).collect()).unwrap();
        let r = solve_general_ot(&x, &y, 2.0).unwrap();
        assert!(r.max_marginal_error(x.weights(), y.weights()) < 1e-11);
        assert!((r.recompute_cost(&x, &y) - r.cost).abs() < 1e-12);
        assert!(r.diagnostics.duality_gap.unwrap().abs() < 1e-9);
    }
}
