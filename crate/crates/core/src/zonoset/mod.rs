//! Zonotope and matrix-zonotope algebra.
//!
//! All operations are pure: they take their operands by reference and
//! return new values. Containment queries are posed as box-constrained
//! linear feasibility problems and solved exactly up to [`FEAS_TOL`].

mod feasibility;
mod interval;
mod matrix;
mod polygon;
mod zonotope;

use thiserror::Error;

pub use feasibility::{solve_box_feasibility, BOUND_SLACK, FEAS_TOL};
pub use interval::IntervalBox;
pub use matrix::{MatrixZonotope, Sign};
pub use polygon::Polygon2D;
pub use zonotope::Zonotope;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZonoError {
    #[error("{op}: dimension mismatch (expected {expected}, found {found})")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{op}: shape mismatch (expected {expected:?}, found {found:?})")]
    ShapeMismatch {
        op: &'static str,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("set contains non-finite values")]
    NonFinite,
    #[error("polygon vertices are not convex and counter-clockwise")]
    NotConvex,
    #[error("interval box has lower > upper")]
    InvertedBounds,
    #[error("polygon conversion needs a 2-D zonotope, got dimension {0}")]
    NotPlanar(usize),
    #[error("max order must be a finite value >= 1, got {0}")]
    InvalidOrder(f64),
    #[error("feasibility solver did not converge after {iterations} iterations")]
    SolverStalled { iterations: usize },
}
