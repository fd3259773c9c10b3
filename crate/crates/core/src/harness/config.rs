//! Experiment configuration: typed fields, a flat `key=value` file format and
//! command-line overrides sharing the same keys.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::{Variant, DEFAULT_MIN_N};

/// What a replicate measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    /// `W_p^p` between two independent empirical measures.
    Matching,
    /// `W_p^p(μ_n, ν_m)` against a large Gaussian reference sample.
    Proxy,
    /// Total of the smoothing upper-bound certificate.
    Certificate,
    /// Analytic lower-bound main term (no sampling).
    LowerBound,
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Estimator::Matching => "matching",
            Estimator::Proxy => "proxy",
            Estimator::Certificate => "certificate",
            Estimator::LowerBound => "lower-bound",
        })
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matching" => Ok(Estimator::Matching),
            "proxy" => Ok(Estimator::Proxy),
            "certificate" => Ok(Estimator::Certificate),
            "lower-bound" => Ok(Estimator::LowerBound),
            other => Err(Error::Config(format!("unknown estimator `{other}`"))),
        }
    }
}

/// Transport solver for the matching estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverChoice {
    Exact,
    Sinkhorn,
    Sorted1d,
    /// `d = 1` sorted, `n ≤ 1024` exact, Sinkhorn beyond.
    Auto,
}

/// Largest `n` that [`SolverChoice::Auto`] sends to the exact solver.
pub const AUTO_EXACT_MAX_N: usize = 1024;

impl fmt::Display for SolverChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverChoice::Exact => "exact",
            SolverChoice::Sinkhorn => "sinkhorn",
            SolverChoice::Sorted1d => "sorted-1d",
            SolverChoice::Auto => "auto",
        })
    }
}

impl FromStr for SolverChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(SolverChoice::Exact),
            "sinkhorn" => Ok(SolverChoice::Sinkhorn),
            "sorted-1d" => Ok(SolverChoice::Sorted1d),
            "auto" => Ok(SolverChoice::Auto),
            other => Err(Error::Config(format!("unknown solver `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub d: usize,
    pub p: f64,
    pub n_grid: Vec<usize>,
    /// Replicates per grid point; `None` uses [`default_replicates`].
    pub reps: Option<usize>,
    pub seed: u64,
    pub estimator: Estimator,
    pub solver: SolverChoice,
    pub proxy_mult: usize,
    pub variant: Variant,
    pub c: Option<f64>,
    /// Worker threads; 0 lets rayon decide. Left out of serialized echoes so
    /// summaries do not depend on parallelism.
    #[serde(skip)]
    pub threads: usize,
    pub out: PathBuf,
    pub min_n: usize,
    /// Terminal Sinkhorn regularization.
    pub eps_min: f64,
    /// Record real wall times; off by default so outputs are byte-stable.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            d: 3,
            p: 2.0,
            n_grid: vec![64, 128, 256, 512, 1024],
            reps: None,
            seed: 0,
            estimator: Estimator::Matching,
            solver: SolverChoice::Auto,
            proxy_mult: 32,
            variant: Variant::General,
            c: None,
            threads: 0,
            out: PathBuf::from("out"),
            min_n: DEFAULT_MIN_N,
            eps_min: 1e-3,
            timing: false,
        }
    }
}

/// `⌈2^14/n⌉` clamped to `[8, 512]`.
pub fn default_replicates(n: usize) -> usize {
    (1usize << 14).div_ceil(n.max(1)).clamp(8, 512)
}

/// Keys accepted in config files and as overrides.
pub const CONFIG_KEYS: [&str; 16] = [
    "d", "p", "n-grid", "reps", "seed", "estimator", "solver", "proxy-mult", "variant", "c", "threads", "out", "min-n",
    "eps-min", "timing", "config",
];

/// Parse a flat UTF-8 `key=value` document; `#` starts a comment line.
pub fn parse_config_str(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key=value, got `{line}`", lineno + 1)))?;
        let key = k.trim().replace('_', "-");
        if !CONFIG_KEYS.contains(&key.as_str()) || key == "config" {
            return Err(Error::Config(format!("line {}: unknown key `{}`", lineno + 1, k.trim())));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

pub fn read_config_file(path: impl AsRef<Path>) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.as_ref().display())))?;
    parse_config_str(&text)
}

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("invalid value `{v}` for `{key}`")))
}

/// Parse `64,128,256`.
pub fn parse_n_grid(v: &str) -> Result<Vec<usize>> {
    v.split(',').map(|s| parse::<usize>("n-grid", s.trim())).collect()
}

impl ExperimentConfig {
    /// Apply `key=value` pairs over the current values, then validate.
    pub fn apply(mut self, pairs: &BTreeMap<String, String>) -> Result<Self> {
        for (k, v) in pairs {
            match k.as_str() {
                "d" => self.d = parse(k, v)?,
                "p" => self.p = parse(k, v)?,
                "n-grid" => self.n_grid = parse_n_grid(v)?,
                "reps" => self.reps = Some(parse(k, v)?),
                "seed" => self.seed = parse(k, v)?,
                "estimator" => self.estimator = v.parse()?,
                "solver" => self.solver = v.parse()?,
                "proxy-mult" => self.proxy_mult = parse(k, v)?,
                "variant" => self.variant = v.parse()?,
                "c" => self.c = Some(parse(k, v)?),
                "threads" => self.threads = parse(k, v)?,
                "out" => self.out = PathBuf::from(v),
                "min-n" => self.min_n = parse(k, v)?,
                "eps-min" => self.eps_min = parse(k, v)?,
                "timing" => self.timing = parse(k, v)?,
                "config" => {}
                other => return Err(Error::Config(format!("unknown key `{other}`"))),
            }
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.d == 0 {
            return bad("d must be ≥ 1".into());
        }
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return bad(format!("p must be ≥ 1, got {}", self.p));
        }
        if self.n_grid.is_empty() || self.n_grid.windows(2).any(|w| w[1] <= w[0]) || self.n_grid[0] == 0 {
            return bad(format!("n-grid must be strictly increasing positive integers, got {:?}", self.n_grid));
        }
        if self.reps == Some(0) {
            return bad("reps must be ≥ 1".into());
        }
        if self.solver == SolverChoice::Sorted1d && self.d != 1 {
            return bad("solver sorted-1d requires d = 1".into());
        }
        if self.proxy_mult < 4 {
            return bad(format!("proxy-mult must be ≥ 4, got {}", self.proxy_mult));
        }
        if !(self.eps_min > 0.0) {
            return bad(format!("eps-min must be positive, got {}", self.eps_min));
        }
        Ok(())
    }

    pub fn replicates(&self, n: usize) -> usize {
        self.reps.unwrap_or_else(|| default_replicates(n))
    }
}
