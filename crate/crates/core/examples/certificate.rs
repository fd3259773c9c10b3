//! Upper-bound certificate for one Gaussian sample in d = 3, p = 2.

use gaussmatch::sampling::gaussian_points;
use gaussmatch::smoothing::{upper_bound_certificate, CertificateOptions, EmpiricalSample};
use gaussmatch::{Result, Variant};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let seed = 11;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in [64, 256, 1024] {
        let x = EmpiricalSample::new(3, gaussian_points(n, 3, &mut rng), Some(seed))?;
        let r = upper_bound_certificate(&x, 2.0, Variant::General, &CertificateOptions::default(), &mut rng)?;
        println!(
            "n = {n:5}  R = {:.3}  m = {:2}  loc = {:.4}  reg = {:.4}  sob = {:.4}  total = {:.4}",
            r.radius, r.m, r.localization, r.regularization, r.sobolev, r.total
        );
    }
    Ok(())
}
