//! Constructive upper bounds: localization to a ball, annulus-dependent
//! Mehler smoothing of the empirical measure, and transport certificates
//! assembled from the localization, regularization and Sobolev terms.

pub mod centering;
pub mod certificate;
pub mod sample;
pub mod smoothed;
pub mod sobolev;

pub use centering::{centering_norm, CenteringField, CenteringNorm};
pub use certificate::{upper_bound_certificate, CertificateOptions, CertificateReport, QuadDiagnostics};
pub use sample::{localize, localize_to, EmpiricalSample, Localization, MAX_REJECTION_ATTEMPTS};
pub use smoothed::{assign_times, SmoothedEmpirical};
pub use sobolev::{
    centered_h1p_estimate, h12_cross_term, h12_norm_sq, h1p_norm_estimate, regularization_cost, MonteCarloEstimate,
    MIN_Y_SAMPLES,
};
