//! Compact self-shrinking hypersurfaces of the mean curvature flow built from isoparametric
//! foliations of spheres, found by shooting geodesics of a reduced two-dimensional
//! metric.

// `!(x > 0.0)` style checks are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod isoparam;
pub mod ode;
pub mod reduced;
pub mod shooting;
pub mod tolerances;

pub use error::{Error, Result};
pub use isoparam::{make_params, FoliationParams};
pub use tolerances::Tolerances;
