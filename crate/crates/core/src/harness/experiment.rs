//! Monte Carlo replication over an `n` grid.

use std::time::Instant;

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{lower_bound_main_term, LowerBoundConfig};
use crate::error::{Error, Result};
use crate::harness::config::{Estimator, ExperimentConfig, SolverChoice, AUTO_EXACT_MAX_N};
use crate::harness::rng::{stream_rng, stream_seed, Purpose};
use crate::ot::{cost_matrix, gaussian_proxy_wp, sinkhorn, solve_assignment, sorted_1d_wp, SinkhornSettings};
use crate::sampling::gaussian_points;
use crate::smoothing::{upper_bound_certificate, CertificateOptions, CertificateReport, EmpiricalSample};

/// `n` i.i.d. standard Gaussian points in `R^d` from the given stream.
pub fn sample_gaussian<R: RngCore + ?Sized>(n: usize, d: usize, stream: &mut R) -> Result<EmpiricalSample> {
    EmpiricalSample::new(d, gaussian_points(n, d, stream), None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub n: usize,
    pub replicate: usize,
    /// Seed of the replicate's primary sample stream.
    pub seed: u64,
    pub cost: f64,
    pub estimator: Estimator,
    pub wall_time_ms: f64,
}

/// Mean and standard error at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub n: usize,
    pub mean: f64,
    pub se: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
    pub warnings: Vec<String>,
}

impl ResultTable {
    /// Per-`n` aggregates in grid order, recomputed from the rows.
    pub fn aggregate(&self) -> Vec<Aggregate> {
        let mut ns: Vec<usize> = self.rows.iter().map(|r| r.n).collect();
        ns.sort_unstable();
        ns.dedup();
        ns.into_iter()
            .map(|n| {
                let costs: Vec<f64> = self.rows.iter().filter(|r| r.n == n).map(|r| r.cost).collect();
                let count = costs.len();
                let mean = costs.iter().sum::<f64>() / count as f64;
                let se = if count > 1 {
                    (costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / ((count - 1) * count) as f64).sqrt()
                } else {
                    0.0
                };
                Aggregate { n, mean, se, count }
            })
            .collect()
    }
}

/// The solver [`SolverChoice::Auto`] picks for `(n, d)`.
pub fn resolve_solver(choice: SolverChoice, n: usize, d: usize) -> SolverChoice {
    match choice {
        SolverChoice::Auto if d == 1 => SolverChoice::Sorted1d,
        SolverChoice::Auto if n <= AUTO_EXACT_MAX_N => SolverChoice::Exact,
        SolverChoice::Auto => SolverChoice::Sinkhorn,
        other => other,
    }
}

struct Outcome {
    cost: f64,
    warning: Option<String>,
}

fn matching_cost(cfg: &ExperimentConfig, n: usize, rep: usize) -> Result<Outcome> {
    let x = sample_gaussian(n, cfg.d, &mut stream_rng(cfg.seed, n, rep, Purpose::SampleX))?.to_measure()?;
    let y = sample_gaussian(n, cfg.d, &mut stream_rng(cfg.seed, n, rep, Purpose::SampleY))?.to_measure()?;
    let solver = resolve_solver(cfg.solver, n, cfg.d);
    let mut warning = None;
    let cost = match solver {
        SolverChoice::Sorted1d => sorted_1d_wp(x.coords(), y.coords(), cfg.p)?,
        SolverChoice::Exact => solve_assignment(&cost_matrix(&x, &y, cfg.p)?)?.cost,
        SolverChoice::Sinkhorn | SolverChoice::Auto => {
            if cfg.solver == SolverChoice::Auto {
                warning = Some(format!("n = {n} > {AUTO_EXACT_MAX_N}: auto solver fell back to Sinkhorn"));
            }
            let r = sinkhorn(&x, &y, cfg.p, &SinkhornSettings::default().with_eps_min(cfg.eps_min))?;
            if let Some(w) = r.diagnostics.warning {
                warning = Some(format!("n = {n}: {w}"));
            }
            r.cost
        }
    };
    Ok(Outcome { cost, warning })
}

fn replicate_cost(cfg: &ExperimentConfig, n: usize, rep: usize) -> Result<Outcome> {
    match cfg.estimator {
        Estimator::Matching => matching_cost(cfg, n, rep),
        Estimator::Proxy => {
            let x = sample_gaussian(n, cfg.d, &mut stream_rng(cfg.seed, n, rep, Purpose::SampleX))?.to_measure()?;
            let est = gaussian_proxy_wp(&x, cfg.p, cfg.proxy_mult, &mut stream_rng(cfg.seed, n, rep, Purpose::Reference))?;
            Ok(Outcome { cost: est.cost, warning: None })
        }
        Estimator::Certificate => {
            let r = certificate_report(cfg, n, rep)?;
            Ok(Outcome { cost: r.total, warning: r.caveat })
        }
        Estimator::LowerBound => {
            if cfg.p != 2.0 {
                return Err(Error::Config("the lower-bound estimator is defined for p = 2".into()));
            }
            Ok(Outcome { cost: lower_bound_main_term(&LowerBoundConfig::defaults(n as f64, cfg.d)?)?, warning: None })
        }
    }
}

/// Full certificate for replicate `rep` at size `n`, on the same streams the
/// certificate estimator uses.
pub fn certificate_report(cfg: &ExperimentConfig, n: usize, rep: usize) -> Result<CertificateReport> {
    let seed = stream_seed(cfg.seed, n, rep, Purpose::SampleX);
    let points = gaussian_points(n, cfg.d, &mut stream_rng(cfg.seed, n, rep, Purpose::SampleX));
    let x = EmpiricalSample::new(cfg.d, points, Some(seed))?;
    let opts = CertificateOptions { c: cfg.c, min_n: cfg.min_n, ..Default::default() };
    upper_bound_certificate(&x, cfg.p, cfg.variant, &opts, &mut stream_rng(cfg.seed, n, rep, Purpose::Localize))
}

/// Run every `(n, replicate)` task; rows come back in grid then replicate
/// order whatever the thread count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let tasks: Vec<(usize, usize)> = cfg.n_grid.iter().flat_map(|&n| (0..cfg.replicates(n)).map(move |r| (n, r))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let results: Vec<Result<(ResultRow, Option<String>)>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(n, rep)| {
                let start = Instant::now();
                let out = replicate_cost(cfg, n, rep)?;
                let wall_time_ms = if cfg.timing { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
                let row = ResultRow {
                    n,
                    replicate: rep,
                    seed: stream_seed(cfg.seed, n, rep, Purpose::SampleX),
                    cost: out.cost,
                    estimator: cfg.estimator,
                    wall_time_ms,
                };
                Ok((row, out.warning))
            })
            .collect()
    });
    let mut table = ResultTable::default();
    for r in results {
        let (row, warning) = r?;
        if let Some(w) = warning {
            if !table.warnings.contains(&w) {
                table.warnings.push(w);
            }
        }
        table.rows.push(row);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_run_is_sorted_1d() {
        let cfg = ExperimentConfig { d: 1, p: 2.0, n_grid: vec![4], reps: Some(1), seed: 3, ..Default::default() };
        let t = run_experiment(&cfg).unwrap();
        assert_eq!(t.rows.len(), 1);
        let x = gaussian_points(4, 1, &mut stream_rng(3, 4, 0, Purpose::SampleX));
        let y = gaussian_points(4, 1, &mut stream_rng(3, 4, 0, Purpose::SampleY));
        assert_eq!(t.rows[0].cost, sorted_1d_wp(&x, &y, 2.0).unwrap());
    }

    #[test]
    fn sample_stream_is_reproducible() {
        let a = sample_gaussian(100, 2, &mut stream_rng(1, 100, 0, Purpose::SampleX)).unwrap();
        let b = sample_gaussian(100, 2, &mut stream_rng(1, 100, 0, Purpose::SampleX)).unwrap();
        assert_eq!(a.points(), b.points());
        let big = sample_gaussian(100_000, 2, &mut stream_rng(1, 100_000, 0, Purpose::SampleX)).unwrap();
        for k in 0..2 {
            let mean = big.points().iter().skip(k).step_by(2).sum::<f64>() / 1e5;
            assert!(mean.abs() < 5.0 / 1e5f64.sqrt());
        }
    }

    #[test]
    fn thread_count_does_not_change_rows() {
        let base = ExperimentConfig { d: 2, n_grid: vec![16, 32], reps: Some(6), seed: 5, ..Default::default() };
        let one = run_experiment(&ExperimentConfig { threads: 1, ..base.clone() }).unwrap();
        let three = run_experiment(&ExperimentConfig { threads: 3, ..base }).unwrap();
        assert_eq!(one, three);
        let agg = one.aggregate();
        assert_eq!(agg.len(), 2);
        assert_eq!(agg[0].count, 6);
    }

    #[test]
    fn auto_solver_rules() {
        assert_eq!(resolve_solver(SolverChoice::Auto, 5000, 1), SolverChoice::Sorted1d);
        assert_eq!(resolve_solver(SolverChoice::Auto, 1024, 3), SolverChoice::Exact);
        assert_eq!(resolve_solver(SolverChoice::Auto, 1025, 3), SolverChoice::Sinkhorn);
        assert_eq!(resolve_solver(SolverChoice::Exact, 5000, 3), SolverChoice::Exact);
    }
}
