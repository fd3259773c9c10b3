//! Numerical laboratory for transport rates of Gaussian empirical measures.
//!
//! The crate bundles four layers:
//!
//! - [`ou`]: Mehler kernel, Ornstein–Uhlenbeck semigroup and Gaussian geometry;
//! - [`ot`]: exact and entropic optimal transport solvers;
//! - [`smoothing`]: localization, annulus schedules, smoothed empirical
//!   densities and negative-Sobolev transport certificates;
//! - [`bounds`]: trace integrals and the functional inequalities behind the
//!   lower bounds;
//!
//! plus [`harness`], which runs reproducible Monte Carlo rate experiments.

pub mod bounds;
pub mod error;
pub mod harness;
pub mod ot;
pub mod ou;
pub mod quadrature;
pub mod sampling;
pub mod schedule;
pub mod smoothing;
pub mod special;

pub use error::{Error, Result};
pub use quadrature::QuadSettings;
pub use schedule::{build_schedule, AnnulusSchedule, Variant};
