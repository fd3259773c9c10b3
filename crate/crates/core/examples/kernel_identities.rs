//! Mehler kernel values, the semigroup property checked by quadrature, and
//! hypercontractivity on a small Hermite expansion.

use gaussmatch::ou::{lp_norm, mehler_diagonal, mehler_kernel, semigroup_apply, HermiteExpansion, KernelPoint, KernelTime};
use gaussmatch::quadrature::integrate_real_line;
use gaussmatch::{QuadSettings, Result};

fn main() -> Result<()> {
    let x = KernelPoint::new(vec![0.4])?;
    let y = KernelPoint::new(vec![-1.2])?;
    let (s, t) = (KernelTime::new(0.3)?, KernelTime::new(0.7)?);
    let st = KernelTime::new(1.0)?;

    let phi = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let q = QuadSettings::default();
    let composed = integrate_real_line(
        |z| {
            let z = KernelPoint::from(z);
            mehler_kernel(s, &x, &z).unwrap_or(0.0) * mehler_kernel(t, &z, &y).unwrap_or(0.0) * phi(z.coords()[0])
        },
        0.0,
        &q,
    )?;
    println!("p_1(x, y)                   = {:.15}", mehler_kernel(st, &x, &y)?);
    println!("∫ p_0.3(x, z) p_0.7(z, y) dμ = {:.15}", composed.value);
    println!("p_1(x, x)                   = {:.15}", mehler_diagonal(st, &x)?);

    // ‖P_t f‖_q ≤ ‖f‖_p once e^{2t} ≥ (q-1)/(p-1)
    let f = HermiteExpansion::new(vec![1.0, 0.5, 0.25])?;
    let (p, qq) = (2.0f64, 4.0f64);
    let t_star = 0.5 * ((qq - 1.0) / (p - 1.0)).ln();
    let lhs = lp_norm(&semigroup_apply(&f, t_star)?, qq, &q)?.powf(1.0 / qq);
    let rhs = lp_norm(&f, p, &q)?.powf(1.0 / p);
    println!("hypercontractivity at t* = {t_star:.4}: ‖P_t f‖_4 = {lhs:.6} ≤ ‖f‖_2 = {rhs:.6}");
    Ok(())
}
