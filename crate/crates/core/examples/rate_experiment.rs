//! Small matching-rate experiment in d = 3 with outputs written to a
//! temporary directory.

use gaussmatch::harness::{emit_outputs, fit_rate, run_experiment, ExperimentConfig, OutputPaths};
use gaussmatch::Result;

fn main() -> Result<()> {
    let cfg = ExperimentConfig { d: 3, p: 2.0, n_grid: vec![32, 64, 128, 256], reps: Some(16), seed: 5, ..Default::default() };
    let table = run_experiment(&cfg)?;
    let fit = fit_rate(&table)?;
    for a in table.aggregate() {
        println!("n = {:4}  mean W_2^2 = {:.5} ± {:.5}", a.n, a.mean, a.se);
    }
    println!("slope {:.3} ± {:.3}, reference {:.3}", fit.slope, fit.slope_se, -cfg.p / cfg.d as f64);
    let dir = std::env::temp_dir().join("gaussmatch-rate-example");
    emit_outputs(&cfg, &table, Some(fit), &OutputPaths::in_dir(&dir))?;
    println!("outputs in {}", dir.display());
    Ok(())
}
