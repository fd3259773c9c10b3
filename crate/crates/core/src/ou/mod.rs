//! Ornstein–Uhlenbeck analytics: the Mehler kernel, Gaussian geometry of
//! balls and annuli, the one-dimensional Hermite calculus, and the tilted
//! annulus identity.

pub mod geometry;
pub mod hermite;
pub mod kernel;
pub mod radial;
pub mod tilted;

pub use geometry::{
    annulus_mass, annulus_surface, gaussian_ball_mass, semigroup_annulus, semigroup_shell, shell_surface,
    shifted_ball_probability, sphere_surface_measure, tail_second_moment,
};
pub use hermite::{
    dirichlet_form, gradient_lp_norm, inverse_generator_form, lp_norm, mehler_average, semigroup_apply,
    spectral_apply, HermiteExpansion,
};
pub use kernel::{
    kernel_p_cost, kernel_power_integral, kernel_second_moment, ln_kernel_integral, ln_mehler_diagonal,
    ln_mehler_kernel, mehler_diagonal, mehler_kernel, KernelPoint, KernelTime, PowerIntegral,
};
pub use radial::{laguerre_shell_projection, laguerre_values, EvolvedShell, RadialSpectrum};
pub use tilted::{tilted_annulus_identity, tilted_shell_identity, TiltedAnnulus};
