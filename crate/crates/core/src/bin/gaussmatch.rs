//! `gaussmatch`: rate experiments, certificates, lower bounds and checks.
//!
//! Exit status: 0 on success, 1 on failed checks or runtime failures,
//! 2 on configuration errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gaussmatch::bounds::{lower_bound_row, LowerBoundConfig};
use gaussmatch::harness::{
    certificate_report, check_with, emit_outputs, fit_rate, read_config_file, read_csv, render_svg,
    run_experiment, CheckOptions, ExperimentConfig, Mutation, OutputPaths, Suite,
};
use gaussmatch::Error;

#[derive(Parser)]
#[command(name = "gaussmatch", version, about = "Transport rates of Gaussian empirical measures")]
struct Cli {
    /// Flat key=value file; command-line flags override its entries.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo rate experiment over the n grid.
    Simulate(Flags),
    /// Upper-bound certificates, one JSON report per replicate.
    Certify(Flags),
    /// Analytic lower-bound main term over the n grid.
    LowerBound(Flags),
    /// Refit an existing results CSV.
    Fit {
        #[command(flatten)]
        flags: Flags,
        /// Results file; defaults to <out>/results.csv.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run property suites: kernel, spectral, ot, pipeline, bounds or all.
    Check {
        #[arg(long, default_value = "all")]
        suite: String,
        #[command(flatten)]
        flags: Flags,
        /// Inject a defect to show the suite catches it.
        #[arg(long, hide = true)]
        mutate: Option<String>,
    },
    /// Redraw the log-log plot from an existing results CSV.
    Plot {
        #[command(flatten)]
        flags: Flags,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// Every flag mirrors a config-file key.
#[derive(Args, Default)]
struct Flags {
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    p: Option<String>,
    /// Comma-separated increasing sample sizes, e.g. 64,128,256.
    #[arg(long)]
    n_grid: Option<String>,
    /// Replicates per n; default ⌈2^14/n⌉ clamped to [8, 512].
    #[arg(long)]
    reps: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// matching, proxy, certificate or lower-bound.
    #[arg(long)]
    estimator: Option<String>,
    /// exact, sinkhorn, sorted-1d or auto.
    #[arg(long)]
    solver: Option<String>,
    /// Reference sample size as a multiple of n for the proxy estimator.
    #[arg(long)]
    proxy_mult: Option<String>,
    /// general or p-equals-d.
    #[arg(long)]
    variant: Option<String>,
    /// Localization exponent.
    #[arg(long)]
    c: Option<String>,
    /// Worker threads; 0 picks the core count.
    #[arg(long)]
    threads: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    min_n: Option<String>,
    #[arg(long)]
    eps_min: Option<String>,
    /// Record wall times in the CSV (makes output run-dependent).
    #[arg(long)]
    timing: bool,
}

impl Flags {
    fn pairs(&self) -> BTreeMap<String, String> {
        let fields = [
            ("d", &self.d),
            ("p", &self.p),
            ("n-grid", &self.n_grid),
            ("reps", &self.reps),
            ("seed", &self.seed),
            ("estimator", &self.estimator),
            ("solver", &self.solver),
            ("proxy-mult", &self.proxy_mult),
            ("variant", &self.variant),
            ("c", &self.c),
            ("threads", &self.threads),
            ("out", &self.out),
            ("min-n", &self.min_n),
            ("eps-min", &self.eps_min),
        ];
        let mut out: BTreeMap<String, String> =
            fields.into_iter().filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone()))).collect();
        if self.timing {
            out.insert("timing".into(), "true".into());
        }
        out
    }
}

fn resolve(config: Option<&Path>, flags: &Flags) -> Result<ExperimentConfig, Error> {
    let mut pairs = match config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    pairs.extend(flags.pairs());
    ExperimentConfig::default().apply(&pairs)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), Error> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn simulate(cfg: &ExperimentConfig) -> Result<ExitCode, Error> {
    let table = run_experiment(cfg)?;
    let fit = match fit_rate(&table) {
        Ok(f) => Some(f),
        Err(e) => {
            eprintln!("warning: no rate fit: {e}");
            None
        }
    };
    let paths = OutputPaths::in_dir(&cfg.out);
    let summary = emit_outputs(cfg, &table, fit, &paths)?;
    for a in &summary.aggregates {
        println!("n={:<8} mean={:.6e} se={:.2e} reps={}", a.n, a.mean, a.se, a.count);
    }
    if let Some(f) = &summary.fit {
        println!("slope {:.4} ± {:.4} (reference {:.4})", f.slope, f.slope_se, summary.reference_slope);
    }
    for w in &summary.warnings {
        eprintln!("warning: {w}");
    }
    println!("wrote {}, {}, {}", paths.csv.display(), paths.json.display(), paths.svg.display());
    Ok(ExitCode::SUCCESS)
}

fn certify(cfg: &ExperimentConfig) -> Result<ExitCode, Error> {
    let mut reports = Vec::new();
    for &n in &cfg.n_grid {
        for rep in 0..cfg.replicates(n) {
            let r = certificate_report(cfg, n, rep)?;
            println!(
                "n={n:<8} rep={rep:<4} loc={:.4e} reg={:.4e} sob={:.4e} total={:.4e}",
                r.localization, r.regularization, r.sobolev, r.total
            );
            reports.push(r);
        }
    }
    let path = cfg.out.join("certificates.json");
    write_json(&path, &reports)?;
    println!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn lower_bound(cfg: &ExperimentConfig) -> Result<ExitCode, Error> {
    if cfg.p != 2.0 {
        return Err(Error::Config("lower-bound is defined for p = 2".into()));
    }
    let mut rows = Vec::new();
    for &n in &cfg.n_grid {
        let mut lb = LowerBoundConfig::defaults(n as f64, cfg.d)?;
        if let Some(c) = cfg.c {
            lb.c = c;
        }
        let row = lower_bound_row(&lb)?;
        println!("n={n:<10} t={:.4e} R={:.4} I={:.6e} main_term={:.6e}", row.t, row.radius, row.trace, row.main_term);
        rows.push(row);
    }
    let path = cfg.out.join("lower_bound.json");
    write_json(&path, &rows)?;
    println!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn fit(cfg: &ExperimentConfig, csv: Option<PathBuf>) -> Result<ExitCode, Error> {
    let path = csv.unwrap_or_else(|| OutputPaths::in_dir(&cfg.out).csv);
    let table = read_csv(&path)?;
    let f = fit_rate(&table)?;
    println!("{}", serde_json::to_string_pretty(&f)?);
    Ok(ExitCode::SUCCESS)
}

fn plot(cfg: &ExperimentConfig, csv: Option<PathBuf>) -> Result<ExitCode, Error> {
    let paths = OutputPaths::in_dir(&cfg.out);
    let table = read_csv(csv.as_ref().unwrap_or(&paths.csv))?;
    let f = fit_rate(&table).ok();
    let title = format!("d = {}, p = {}", cfg.d, cfg.p);
    let svg = render_svg(&table.aggregate(), f.as_ref(), -cfg.p / cfg.d as f64, &title);
    std::fs::create_dir_all(&cfg.out)?;
    std::fs::write(&paths.svg, svg)?;
    println!("wrote {}", paths.svg.display());
    Ok(ExitCode::SUCCESS)
}

fn check(cfg: &ExperimentConfig, suite: &str, mutate: Option<&str>, write: bool) -> Result<ExitCode, Error> {
    let suite: Suite = suite.parse()?;
    let mutation = match mutate {
        None => None,
        Some("assignment-off-by-one") => Some(Mutation::AssignmentOffByOne),
        Some(other) => return Err(Error::Config(format!("unknown mutation `{other}`"))),
    };
    let report = check_with(suite, &CheckOptions { mutation });
    for e in &report.entries {
        let status = if e.passed { "PASS" } else { "FAIL" };
        println!("{status} {:<9} {:<32} measured={:.3e} threshold={:.3e}  {}", e.suite.to_string(), e.name, e.measured, e.threshold, e.detail);
    }
    if write {
        let path = cfg.out.join("check.json");
        write_json(&path, &report)?;
        println!("wrote {}", path.display());
    }
    let failed = report.failures().count();
    println!("{} of {} checks passed", report.entries.len() - failed, report.entries.len());
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let config = cli.config.as_deref();
    match cli.command {
        Command::Simulate(flags) => simulate(&resolve(config, &flags)?),
        Command::Certify(flags) => {
            let mut cfg = resolve(config, &flags)?;
            cfg.estimator = gaussmatch::harness::Estimator::Certificate;
            certify(&cfg)
        }
        Command::LowerBound(flags) => lower_bound(&resolve(config, &flags)?),
        Command::Fit { flags, csv } => fit(&resolve(config, &flags)?, csv),
        Command::Plot { flags, csv } => plot(&resolve(config, &flags)?, csv),
        Command::Check { suite, flags, mutate } => {
            let write = flags.out.is_some();
            check(&resolve(config, &flags)?, &suite, mutate.as_deref(), write)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e @ (Error::Config(_) | Error::InvalidParameter(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
