//! Experiment outputs depend only on the configuration, never on threads.

use gaussmatch::harness::{emit_outputs, fit_rate, run_experiment, Estimator, ExperimentConfig, OutputPaths};

fn outputs(cfg: &ExperimentConfig) -> (Vec<u8>, Vec<u8>) {
    let dir = tempfile::tempdir().unwrap();
    let table = run_experiment(cfg).unwrap();
    let paths = OutputPaths::in_dir(dir.path());
    emit_outputs(cfg, &table, fit_rate(&table).ok(), &paths).unwrap();
    (std::fs::read(&paths.csv).unwrap(), std::fs::read(&paths.json).unwrap())
}

#[test]
fn csv_and_json_are_byte_identical_across_thread_counts() {
    for estimator in [Estimator::Matching, Estimator::Proxy, Estimator::Certificate, Estimator::LowerBound] {
        let cfg = ExperimentConfig { d: 3, p: 2.0, n_grid: vec![32, 64, 128], reps: Some(6), seed: 99, estimator, ..Default::default() };
        let one = outputs(&ExperimentConfig { threads: 1, ..cfg.clone() });
        let three = outputs(&ExperimentConfig { threads: 3, ..cfg.clone() });
        assert!(one == three, "{estimator} outputs differ");
    }
}

#[test]
fn different_seeds_give_different_rows() {
    let cfg = ExperimentConfig { d: 2, p: 1.0, n_grid: vec![16, 32, 64], reps: Some(4), seed: 1, ..Default::default() };
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&ExperimentConfig { seed: 2, ..cfg }).unwrap();
    assert_ne!(a.rows, b.rows);
}
