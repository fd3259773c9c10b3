//! Trace integral and lower-bound main term with the default t and R.

use gaussmatch::bounds::{lower_bound_row, prop71_coefficient, LowerBoundConfig};
use gaussmatch::Result;

fn main() -> Result<()> {
    for d in [1, 2] {
        println!("d = {d}");
        for n in [1e3, 1e6, 1e9, 1e12] {
            let row = lower_bound_row(&LowerBoundConfig::defaults(n, d)?)?;
            println!("  n = {n:.0e}  t = {:.3e}  R = {:.4}  I = {:.5}  main term = {:.4e}", row.t, row.radius, row.trace, row.main_term);
        }
    }
    for c in [1.0, 0.5, 0.1, 0.01] {
        println!("coefficient at c = {c}: {:.6}", prop71_coefficient(c)?);
    }
    Ok(())
}
