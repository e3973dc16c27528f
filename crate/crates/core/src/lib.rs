//! Dual curves of piecewise-smooth plane curves.
//!
//! The point `(a, b)` and the line `a·x + b·y = 1` are dual to each other.
//! A smooth curve maps to the curve traced by the dual points of its tangent
//! lines; corners map to segments and straight segments map to points. The
//! crate also carries the slope/intercept (Legendre) transformation and the
//! five classic worked examples as golden fixtures.

pub mod corpus;
pub mod curves;
pub mod dualizer;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod legendre;

pub use error::{Error, ParseError, Result};
pub use geometry::{Line, Point, Slope};
