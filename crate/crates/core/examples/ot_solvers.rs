//! The exact assignment, network simplex, sorted and Sinkhorn solvers on the
//! same Gaussian samples.

use gaussmatch::ot::{brute_force_wp, cost_matrix, sinkhorn, solve_assignment, solve_general_ot, sorted_1d_wp, DiscreteMeasure, SinkhornSettings};
use gaussmatch::sampling::gaussian_points;
use gaussmatch::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (n, d, p) = (6, 2, 2.0);
    let x = DiscreteMeasure::uniform(d, gaussian_points(n, d, &mut rng))?;
    let y = DiscreteMeasure::uniform(d, gaussian_points(n, d, &mut rng))?;
    println!("n = {n}, d = {d}, p = {p}");
    println!("  brute force      {:.12}", brute_force_wp(&x, &y, p)?);
    println!("  assignment       {:.12}", solve_assignment(&cost_matrix(&x, &y, p)?)?.cost);
    println!("  network simplex  {:.12}", solve_general_ot(&x, &y, p)?.cost);
    let s = sinkhorn(&x, &y, p, &SinkhornSettings::default())?;
    println!("  sinkhorn         {:.12}  (ε = {:?})", s.cost, s.diagnostics.epsilon);

    let n = 100_000;
    let a = gaussian_points(n, 1, &mut rng);
    let b = gaussian_points(n, 1, &mut rng);
    println!("d = 1, n = {n}: W_1 by sorting = {:.6}", sorted_1d_wp(&a, &b, 1.0)?);
    Ok(())
}
