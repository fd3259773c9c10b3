//! Reproducible Monte Carlo rate experiments: configuration, deterministic
//! random streams, replication over an `n` grid, power-law fits, result
//! files, and the runtime property suites.

pub mod check;
pub mod config;
pub mod experiment;
pub mod fit;
pub mod output;
pub mod rng;

pub use check::{check, check_with, CheckEntry, CheckOptions, CheckReport, Mutation, Suite};
pub use config::{default_replicates, parse_config_str, read_config_file, Estimator, ExperimentConfig, SolverChoice};
pub use experiment::{certificate_report, run_experiment, sample_gaussian, Aggregate, ResultRow, ResultTable};
pub use fit::{fit_points, fit_rate, RateFit};
pub use output::{emit_outputs, read_csv, render_svg, write_csv, OutputPaths, Summary};
pub use rng::{stream_rng, stream_seed, Purpose};
