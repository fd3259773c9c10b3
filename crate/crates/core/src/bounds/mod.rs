//! Lower-bound quantities: the restricted diagonal trace integral whose
//! growth drives the matching lower bounds, and the one-dimensional
//! functional inequalities that turn it into a transport bound.

pub mod functional;
pub mod trace;

pub use functional::{prop71_coefficient, prop71_theta, prop72_lower, GRID_HALF_WIDTH, GRID_POINTS};
pub use trace::{
    lower_bound_main_term, lower_bound_row, restricted_diagonal_mass, trace_integral, LowerBoundConfig, LowerBoundRow,
    TraceIntegralResult,
};
