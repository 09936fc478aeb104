//! Flat surface templates: the double regular n-gon, the staircase model
//! and their images under linear maps, with cylinder decompositions.

mod build;
mod cylinders;
mod template;
mod trace;

pub use build::{build_double_ngon, build_one_cylinder_fixture, build_staircase, check_n, staircase_lengths};
pub use cylinders::{canonical_direction, cylinder_decomposition, Cylinder};
pub use template::{ccw_angle, cross, polygon_area, rotate, Corner, EdgeTag, Model, Piece, Singularity, SurfaceTemplate, V2};
pub use trace::{Trace, TraceEnd};
