//! Invariants checked over random inputs.

use gaussmatch::bounds::restricted_diagonal_mass;
use gaussmatch::harness::{fit_points, parse_config_str, Aggregate, ExperimentConfig};
use gaussmatch::ot::{brute_force_wp, cost_matrix, solve_assignment, solve_general_ot, sorted_1d_wp, DiscreteMeasure};
use gaussmatch::ou::{mehler_kernel, semigroup_apply, HermiteExpansion, KernelPoint, KernelTime};
use gaussmatch::smoothing::{assign_times, localize, EmpiricalSample};
use gaussmatch::{AnnulusSchedule, Error, Variant};
use proptest::collection::vec;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn points(n: usize, d: usize) -> impl Strategy<Value = Vec<f64>> {
    vec(-3.0f64..3.0, n * d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn schedules_satisfy_invariants(n in 16usize..2_000_000, d in 2usize..9, frac in 0.0f64..0.999, equal in any::<bool>()) {
        let (p, variant) = if equal { (d as f64, Variant::PEqualsD) } else { (1.0 + (d as f64 - 1.0) * frac, Variant::General) };
        match AnnulusSchedule::new(n, d, p, variant, None, 16) {
            Ok(s) => {
                prop_assert!(s.validate().is_ok());
                prop_assert_eq!(s.radii().len(), s.m + 1);
                prop_assert!(s.times().iter().all(|t| *t > 0.0 && *t < 1.0));
                if variant == Variant::General {
                    let ratio = s.times().windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
                    prop_assert!(s.m < 2 || (ratio - (1.0 / d as f64).exp()).abs() < 1e-12);
                }
            }
            Err(Error::InvalidParameter(_)) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn assignment_matches_brute_force(n in 1usize..7, d in 1usize..4, p in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0]), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = DiscreteMeasure::uniform(d, gaussmatch::sampling::gaussian_points(n, d, &mut rng)).unwrap();
        let y = DiscreteMeasure::uniform(d, gaussmatch::sampling::gaussian_points(n, d, &mut rng)).unwrap();
        let brute = brute_force_wp(&x, &y, p).unwrap();
        let exact = solve_assignment(&cost_matrix(&x, &y, p).unwrap()).unwrap().cost;
        let general = solve_general_ot(&x, &y, p).unwrap().cost;
        prop_assert!((exact - brute).abs() <= 1e-9 * brute.max(1.0));
        prop_assert!((general - brute).abs() <= 1e-9 * brute.max(1.0));
    }

    #[test]
    fn sorting_is_optimal_in_one_dimension(xs in points(8, 1), ys in points(8, 1), p in 1.0f64..4.0) {
        let x = DiscreteMeasure::uniform(1, xs.clone()).unwrap();
        let y = DiscreteMeasure::uniform(1, ys.clone()).unwrap();
        let exact = solve_assignment(&cost_matrix(&x, &y, p).unwrap()).unwrap().cost;
        let sorted = sorted_1d_wp(&xs, &ys, p).unwrap();
        prop_assert!((exact - sorted).abs() <= 1e-9 * exact.max(1.0));
    }

    #[test]
    fn kernel_is_symmetric_and_positive(x in points(1, 3), y in points(1, 3), t in 1e-3f64..5.0) {
        let t = KernelTime::new(t).unwrap();
        let (x, y) = (KernelPoint::new(x).unwrap(), KernelPoint::new(y).unwrap());
        let a = mehler_kernel(t, &x, &y).unwrap();
        let b = mehler_kernel(t, &y, &x).unwrap();
        prop_assert!(a >= 0.0);
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
    }

    #[test]
    fn semigroup_composes_and_contracts(coeffs in vec(-1.0f64..1.0, 1..9), s in 0.0f64..2.0, t in 0.0f64..2.0) {
        let f = HermiteExpansion::new(coeffs).unwrap();
        let two_step = semigroup_apply(&semigroup_apply(&f, s).unwrap(), t).unwrap();
        let one_step = semigroup_apply(&f, s + t).unwrap();
        for (a, b) in two_step.coeffs().iter().zip(one_step.coeffs()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        prop_assert!(one_step.l2_norm_sq() <= f.l2_norm_sq() * (1.0 + 1e-12));
    }

    #[test]
    fn restricted_trace_is_at_least_one_and_decreasing(s in 0.01f64..5.0, r in 0.1f64..6.0, d in 1usize..4) {
        let here = restricted_diagonal_mass(s, r, d).unwrap();
        let later = restricted_diagonal_mass(1.5 * s, r, d).unwrap();
        prop_assert!(here >= 1.0);
        prop_assert!(later <= here);
    }

    #[test]
    fn localized_points_stay_in_the_ball_and_get_their_annulus_time(seed in any::<u64>(), n in 16usize..200) {
        let s = AnnulusSchedule::new(n, 3, 2.0, Variant::General, None, 16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = EmpiricalSample::new(3, gaussmatch::sampling::gaussian_points(n, 3, &mut rng), Some(seed)).unwrap();
        let (loc, cost) = localize(&x, &s, &mut rng).unwrap();
        prop_assert!(cost >= 0.0);
        prop_assert!((0..n).all(|i| loc.norm(i) < s.radius));
        let sm = assign_times(&loc, &s).unwrap();
        for i in 0..n {
            prop_assert_eq!(Some(sm.times()[i]), s.time_of(loc.norm(i)));
        }
    }

    #[test]
    fn exact_power_laws_are_recovered(slope in -2.0f64..0.0, scale in 0.01f64..100.0) {
        let points: Vec<Aggregate> = [16usize, 64, 256, 1024]
            .iter()
            .map(|&n| Aggregate { n, mean: scale * (n as f64).powf(slope), se: 0.0, count: 1 })
            .collect();
        let fit = fit_points(&points).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-10);
    }

    #[test]
    fn config_files_round_trip(d in 1usize..6, seed in any::<u64>(), reps in 1usize..100, threads in 0usize..8) {
        let text = format!("# generated\nd = {d}\nseed={seed}\nreps = {reps}\nthreads = {threads}\nn_grid = 16, 32,64\n");
        let cfg = ExperimentConfig::default().apply(&parse_config_str(&text).unwrap()).unwrap();
        prop_assert_eq!(cfg.d, d);
        prop_assert_eq!(cfg.seed, seed);
        prop_assert_eq!(cfg.reps, Some(reps));
        prop_assert_eq!(cfg.threads, threads);
        prop_assert_eq!(cfg.n_grid, vec![16, 32, 64]);
    }
}
