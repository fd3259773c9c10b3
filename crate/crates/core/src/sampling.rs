//! Deterministic Gaussian draws.
//!
//! Each normal variate is the inverse CDF of one 53-bit uniform, so a stream
//! consumes exactly one `u64` per coordinate and streams never drift apart
//! between platforms.

use rand::RngCore;

use crate::special::normal_quantile_fast;

const TWO_POW_53: f64 = 9_007_199_254_740_992.0;

/// One standard normal draw.
#[inline]
pub fn standard_normal<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    let k = rng.next_u64() >> 11;
    normal_quantile_fast((k as f64 + 0.5) / TWO_POW_53)
}

/// `n` points of `N(0, I_d)`, row-major.
pub fn gaussian_points<R: RngCore + ?Sized>(n: usize, d: usize, rng: &mut R) -> Vec<f64> {
    (0..n * d).map(|_| standard_normal(rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn moments_and_determinism() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xs = gaussian_points(200_000, 1, &mut rng);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 0.01 && (var - 1.0).abs() < 0.01, "{mean} {var}");
        let again = gaussian_points(200_000, 1, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(xs, again);
    }
}
