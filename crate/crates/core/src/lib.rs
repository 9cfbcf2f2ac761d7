//! Coverage planning over stationary Gaussian random fields.
//!
//! Given squared-exponential field hyperparameters and an error tolerance,
//! the planners place measurements (and order them into a tour) so that the
//! kriging estimation error stays within the tolerance everywhere in a
//! convex environment.

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli_bench;
pub mod error;
pub mod field_model;
pub mod geometry;
pub mod planners;
pub mod tsp;
pub mod verification;

pub use error::{Error, Result};
pub use field_model::{FieldParams, Kernel, PlanningQuery};
pub use geometry::{Environment, Point2};
pub use planners::{MeasurementSet, Origin, PlanOptions, PlanReport};
