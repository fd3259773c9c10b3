//! Dense linear assignment by the Jonker–Volgenant method: column reduction,
//! two rounds of augmenting row reduction, then Dijkstra-style shortest
//! augmenting paths for the rows still free.

use crate::error::{invalid, ensure_finite, Result};
use crate::ot::{CostMatrix, Diagnostics, Plan, SolverKind, TransportResult};

/// Minimum-cost perfect matching; returns `row → column` and the column duals.
pub fn lapjv(cost: &CostMatrix) -> Result<(Vec<usize>, Vec<f64>)> {
    let n = cost.rows();
    if cost.cols() != n {
        return Err(invalid(format!("assignment needs a square matrix, got {}x{}", n, cost.cols())));
    }
    ensure_finite(cost.data(), "cost matrix")?;
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    if n == 1 {
        return Ok((vec![0], vec![cost.get(0, 0)]));
    }
    let mut x = vec![usize::MAX; n];
    let mut y = vec![usize::MAX; n];
    let mut v = vec![0.0; n];
    let mut free_rows = vec![0usize; n];
    let mut n_free = column_reduction(cost, &mut free_rows, &mut x, &mut y, &mut v);
    let mut rounds = 0;
    while n_free > 0 && rounds < 2 {
        n_free = augmenting_row_reduction(cost, n_free, &mut free_rows, &mut x, &mut y, &mut v);
        rounds += 1;
    }
    if n_free > 0 {
        augment(cost, &free_rows[..n_free], &mut x, &mut y, &mut v);
    }
    Ok((x, v))
}

fn column_reduction(c: &CostMatrix, free_rows: &mut [usize], x: &mut [usize], y: &mut [usize], v: &mut [f64]) -> usize {
    let n = c.rows();
    v.iter_mut().for_each(|vj| *vj = f64::MAX);
    for i in 0..n {
        for (j, cij) in c.row(i).iter().enumerate() {
            if *cij < v[j] {
                v[j] = *cij;
                y[j] = i;
            }
        }
    }
    let mut unique = vec![true; n];
    for j in (0..n).rev() {
        let i = y[j];
        if x[i] == usize::MAX {
            x[i] = j;
        } else {
            unique[i] = false;
            y[j] = usize::MAX;
        }
    }
    let mut n_free = 0;
    for i in 0..n {
        if x[i] == usize::MAX {
            free_rows[n_free] = i;
            n_free += 1;
        } else if unique[i] {
            let j = x[i];
            let min = c.row(i).iter().enumerate().filter(|(j2, _)| *j2 != j).map(|(j2, cij)| cij - v[j2]).fold(f64::MAX, f64::min);
            v[j] -= min;
        }
    }
    n_free
}

fn augmenting_row_reduction(
    c: &CostMatrix,
    n_free_rows: usize,
    free_rows: &mut [usize],
    x: &mut [usize],
    y: &mut [usize],
    v: &mut [f64],
) -> usize {
    let n = c.rows();
    let mut current = 0;
    let mut new_free = 0;
    let mut rr_cnt = 0usize;
    while current < n_free_rows {
        rr_cnt += 1;
        let free_i = free_rows[current];
        current += 1;
        let row = c.row(free_i);
        let mut j1 = 0;
        let mut v1 = row[0] - v[0];
        let mut j2 = usize::MAX;
        let mut v2 = f64::MAX;
        for j in 1..n {
            let h = row[j] - v[j];
            if h < v2 {
                if h >= v1 {
                    v2 = h;
                    j2 = j;
                } else {
                    v2 = v1;
                    v1 = h;
                    j2 = j1;
                    j1 = j;
                }
            }
        }
        let mut i0 = y[j1];
        let v1_new = v[j1] - (v2 - v1);
        let v1_lowers = v1_new < v[j1];
        if rr_cnt < current * n {
            if v1_lowers {
                v[j1] = v1_new;
            } else if i0 != usize::MAX && j2 != usize::MAX {
                j1 = j2;
                i0 = y[j2];
            }
            if i0 != usize::MAX {
                if v1_lowers {
                    current -= 1;
                    free_rows[current] = i0;
                } else {
                    free_rows[new_free] = i0;
                    new_free += 1;
                }
            }
        } else if i0 != usize::MAX {
            free_rows[new_free] = i0;
            new_free += 1;
        }
        x[free_i] = j1;
        y[j1] = free_i;
    }
    new_free
}

fn find_minimum(lo: usize, d: &[f64], cols: &mut [usize]) -> usize {
    let n = cols.len();
    let mut hi = lo + 1;
    let mut mind = d[cols[lo]];
    for k in hi..n {
        let j = cols[k];
        if d[j] <= mind {
            if d[j] < mind {
                hi = lo;
                mind = d[j];
            }
            cols[k] = cols[hi];
            cols[hi] = j;
            hi += 1;
        }
    }
    hi
}

#[allow(clippy::too_many_arguments)]
fn scan(
    c: &CostMatrix,
    lo: &mut usize,
    hi: &mut usize,
    d: &mut [f64],
    cols: &mut [usize],
    pred: &mut [usize],
    y: &[usize],
    v: &[f64],
) -> Option<usize> {
    let n = cols.len();
    while *lo != *hi {
        let j = cols[*lo];
        *lo += 1;
        let i = y[j];
        let mind = d[j];
        let row = c.row(i);
        let h = row[j] - v[j] - mind;
        let mut k = *hi;
        while k < n {
            let j = cols[k];
            let cred = row[j] - v[j] - h;
            if cred < d[j] {
                d[j] = cred;
                pred[j] = i;
                if cred == mind {
                    if y[j] == usize::MAX {
                        return Some(j);
                    }
                    cols[k] = cols[*hi];
                    cols[*hi] = j;
                    *hi += 1;
                }
            }
            k += 1;
        }
    }
    None
}

fn find_path(c: &CostMatrix, start: usize, y: &[usize], v: &mut [f64], pred: &mut [usize], d: &mut [f64], cols: &mut [usize]) -> usize {
    let n = c.rows();
    let (mut lo, mut hi) = (0, 0);
    let mut n_ready = 0;
    for (j, col) in cols.iter_mut().enumerate() {
        *col = j;
        pred[j] = start;
        d[j] = c.get(start, j) - v[j];
    }
    let final_j = loop {
        if lo == hi {
            n_ready = lo;
            hi = find_minimum(lo, d, cols);
            if let Some(j) = cols[lo..hi].iter().copied().find(|j| y[*j] == usize::MAX) {
                break j;
            }
        }
        if let Some(j) = scan(c, &mut lo, &mut hi, d, cols, pred, y, v) {
            break j;
        }
        debug_assert!(hi <= n);
    };
    // the terminal column lies in the current minimum set; `cols[lo]` need not
    let mind = d[final_j];
    for &j in &cols[..n_ready] {
        v[j] += d[j] - mind;
    }
    final_j
}

fn augment(c: &CostMatrix, free_rows: &[usize], x: &mut [usize], y: &mut [usize], v: &mut [f64]) {
    let n = c.rows();
    let mut pred = vec![0usize; n];
    let mut d = vec![0.0; n];
    let mut cols = vec![0usize; n];
    for &free_i in free_rows {
        let mut j = find_path(c, free_i, y, v, &mut pred, &mut d, &mut cols);
        loop {
            let i = pred[j];
            y[j] = i;
            std::mem::swap(&mut j, &mut x[i]);
            if i == free_i {
                break;
            }
        }
    }
}

/// Optimal matching between two uniform measures of equal size; the cost is the mean.
pub fn solve_assignment(cost: &CostMatrix) -> Result<TransportResult> {
    solve_assignment_with_p(cost, f64::NAN)
}

pub(crate) fn solve_assignment_with_p(cost: &CostMatrix, p: f64) -> Result<TransportResult> {
    let (perm, _) = lapjv(cost)?;
    let n = perm.len();
    let total: f64 = perm.iter().enumerate().map(|(i, j)| cost.get(i, *j)).sum();
    Ok(TransportResult {
        cost: if n == 0 { 0.0 } else { total / n as f64 },
        plan: Plan::Permutation(perm),
        solver: SolverKind::ExactAssignment,
        p,
        diagnostics: Diagnostics::default(),
    })
}
