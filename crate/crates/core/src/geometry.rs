//! Point/line duality in a single identified plane.
//!
//! The point `(a, b)` corresponds to the line `a·x + b·y = 1`, and a line
//! `a·x + b·y = c` with `c ≠ 0` corresponds to the point `(a/c, b/c)`. Lines
//! through the origin have no dual point and are rejected with
//! [`Error::LineThroughOrigin`].

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lines with `|c| < ORIGIN_TOL` after normalization are treated as passing
/// through the origin.
pub const ORIGIN_TOL: f64 = 1e-12;

/// Determinant threshold below which two normalized lines count as parallel.
pub const PARALLEL_TOL: f64 = 1e-12;

/// Coefficients at or below this magnitude do not decide the sign convention.
const SIGN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Point {
        Point { x, y }
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    #[inline]
    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    #[inline]
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn is_origin(self) -> bool {
        self.x == 0.0 && self.y == 0.0
    }

    /// Largest componentwise difference.
    pub fn max_abs_diff(self, other: Point) -> f64 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Point {
        Point::new(x, y)
    }
}

/// Slope of a line, or the vertical direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Slope {
    Finite(f64),
    Vertical,
}

impl Slope {
    /// Direction angle in `(-π/2, π/2]`.
    pub fn angle(self) -> f64 {
        match self {
            Slope::Finite(m) => m.atan(),
            Slope::Vertical => std::f64::consts::FRAC_PI_2,
        }
    }

    pub fn from_angle(theta: f64) -> Slope {
        let (s, c) = theta.sin_cos();
        if c.abs() <= 1e-15 {
            Slope::Vertical
        } else {
            Slope::Finite(s / c)
        }
    }
}

/// Tangent of the angle between two lines; `Right` when they are perpendicular.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleMeasure {
    Tan(f64),
    Right,
}

/// The line `a·x + b·y = c`, stored with `max(|a|, |b|) = 1` and the first
/// nonzero of `(a, b)` positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Line {
    a: f64,
    b: f64,
    c: f64,
}

impl Line {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Line> {
        let scale = a.abs().max(b.abs());
        if !(a.is_finite() && b.is_finite() && c.is_finite()) || !(scale > 0.0) {
            return Err(Error::InvalidLine(a, b, c));
        }
        let (mut a, mut b, mut c) = (a / scale, b / scale, c / scale);
        let flip = if a.abs() > SIGN_TOL { a < 0.0 } else { b < 0.0 };
        if flip {
            a = -a;
            b = -b;
            c = -c;
        }
        // Canonical zero so componentwise comparison sees +0.0.
        if c == 0.0 {
            c = 0.0;
        }
        Ok(Line { a, b, c })
    }

    /// `y = m·x + intercept`.
    pub fn from_slope_intercept(m: f64, intercept: f64) -> Result<Line> {
        Line::new(-m, 1.0, intercept)
    }

    /// `x = x0`.
    pub fn vertical(x0: f64) -> Result<Line> {
        Line::new(1.0, 0.0, x0)
    }

    /// `y = y0`.
    pub fn horizontal(y0: f64) -> Result<Line> {
        Line::new(0.0, 1.0, y0)
    }

    /// Line through `p` with direction vector `dir`.
    pub fn through_with_direction(p: Point, dir: Point) -> Result<Line> {
        let n = Point::new(-dir.y, dir.x);
        Line::new(n.x, n.y, n.dot(p))
    }

    pub fn through_with_slope(p: Point, slope: Slope) -> Result<Line> {
        match slope {
            Slope::Finite(m) => Line::new(-m, 1.0, p.y - m * p.x),
            Slope::Vertical => Line::vertical(p.x),
        }
    }

    pub fn through_points(p: Point, q: Point) -> Result<Line> {
        Line::through_with_direction(p, q - p)
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn b(&self) -> f64 {
        self.b
    }

    #[inline]
    pub fn c(&self) -> f64 {
        self.c
    }

    /// `a·x + b·y − c` at `p`, in canonical scale.
    pub fn residual(&self, p: Point) -> f64 {
        self.a * p.x + self.b * p.y - self.c
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        self.residual(p).abs() < tol
    }

    pub fn passes_through_origin(&self) -> bool {
        self.c.abs() < ORIGIN_TOL
    }

    pub fn is_dualizable(&self) -> bool {
        !self.passes_through_origin()
    }

    pub fn direction(&self) -> Point {
        Point::new(self.b, -self.a)
    }

    pub fn slope(&self) -> Slope {
        if self.b.abs() <= SIGN_TOL {
            Slope::Vertical
        } else {
            Slope::Finite(-self.a / self.b)
        }
    }

    /// Componentwise comparison of canonical coefficients.
    pub fn approx_eq(&self, other: &Line, tol: f64) -> bool {
        (self.a - other.a).abs() <= tol
            && (self.b - other.b).abs() <= tol
            && (self.c - other.c).abs() <= tol
    }

    pub fn max_coeff_diff(&self, other: &Line) -> f64 {
        (self.a - other.a)
            .abs()
            .max((self.b - other.b).abs())
            .max((self.c - other.c).abs())
    }
}

/// The line `p.x·x + p.y·y = 1`.
pub fn dual_of_point(p: Point) -> Result<Line> {
    if p.is_origin() {
        return Err(Error::OriginNotDualizable);
    }
    Line::new(p.x, p.y, 1.0)
}

/// The point `(a/c, b/c)` of a line `a·x + b·y = c` missing the origin.
pub fn dual_of_line(l: &Line) -> Result<Point> {
    if l.passes_through_origin() {
        return Err(Error::LineThroughOrigin);
    }
    Ok(Point::new(l.a / l.c, l.b / l.c))
}

pub fn intersect_lines(l1: &Line, l2: &Line) -> Result<Point> {
    let det = l1.a * l2.b - l2.a * l1.b;
    if det.abs() < PARALLEL_TOL {
        return Err(Error::ParallelLines);
    }
    Ok(Point::new(
        (l1.c * l2.b - l2.c * l1.b) / det,
        (l1.a * l2.c - l2.a * l1.c) / det,
    ))
}

/// The line through the origin perpendicular to `l`.
pub fn perpendicular_through_origin(l: &Line) -> Line {
    // Direction (a, b) is normal to l; canonical (a, b) is never (0, 0).
    Line::new(l.b, -l.a, 0.0).expect("canonical line has a nonzero normal")
}

/// Foot of the perpendicular dropped from the origin onto `l`.
pub fn foot_of_perpendicular(l: &Line) -> Result<Point> {
    if l.passes_through_origin() {
        return Err(Error::LineThroughOrigin);
    }
    let n2 = l.a * l.a + l.b * l.b;
    Ok(Point::new(l.c * l.a / n2, l.c * l.b / n2))
}

/// Inversion in the unit circle: `p / |p|²`.
pub fn invert_in_unit_circle(p: Point) -> Result<Point> {
    let r2 = p.norm_sq();
    if r2 == 0.0 {
        return Err(Error::OriginNotInvertible);
    }
    Ok(Point::new(p.x / r2, p.y / r2))
}

/// The dual point of `l` obtained by inverting the foot of the perpendicular
/// from the origin. Agrees with [`dual_of_line`].
pub fn dual_by_inversion(l: &Line) -> Result<Point> {
    invert_in_unit_circle(foot_of_perpendicular(l)?)
}

/// Carrier line through the origin holding the dual points of every
/// dualizable line with the given slope.
pub fn parallel_dual_carrier(slope: Slope) -> Line {
    // y = -x/m  <=>  x + m·y = 0; m = 0 gives x = 0.
    match slope {
        Slope::Finite(m) => Line::new(1.0, m, 0.0),
        Slope::Vertical => Line::horizontal(0.0),
    }
    .expect("carrier normal is nonzero")
}

/// Tangent of the angle from `l1` to `l2`, `(m2 − m1) / (1 + m1·m2)` for
/// finite slopes. Vertical lines are handled through direction vectors.
pub fn angle_tangent_between(l1: &Line, l2: &Line) -> AngleMeasure {
    let d1 = l1.direction();
    let d2 = l2.direction();
    let dot = d1.dot(d2);
    let cross = d1.cross(d2);
    if dot.abs() <= 1e-12 * d1.norm() * d2.norm() {
        AngleMeasure::Right
    } else {
        AngleMeasure::Tan(cross / dot)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(p: Point, q: Point, tol: f64) -> bool {
        p.max_abs_diff(q) <= tol
    }

    #[test]
    fn point_dual_is_canonical() {
        let l = dual_of_point(Point::new(2.0, 3.0)).unwrap();
        assert!(l.approx_eq(&Line::new(2.0, 3.0, 1.0).unwrap(), 0.0));
        assert_eq!((l.a(), l.b(), l.c()), (2.0 / 3.0, 1.0, 1.0 / 3.0));
        assert_eq!(dual_of_point(Point::ORIGIN), Err(Error::OriginNotDualizable));
    }

    #[test]
    fn tangent_of_example_parabola_dualizes_to_known_point() {
        let tangent = Line::from_slope_intercept(-0.5, 29.0 / 16.0).unwrap();
        let p = dual_of_line(&tangent).unwrap();
        assert!(close(p, Point::new(8.0 / 29.0, 16.0 / 29.0), 1e-15));
        let back = dual_of_point(Point::new(8.0 / 29.0, 16.0 / 29.0)).unwrap();
        assert!(back.approx_eq(&tangent, 1e-15));
    }

    #[test]
    fn vertical_line_dual() {
        let p = dual_of_line(&Line::vertical(4.0).unwrap()).unwrap();
        assert_eq!(p, Point::new(0.25, 0.0));
        assert_eq!(
            dual_of_line(&Line::from_slope_intercept(2.0, 0.0).unwrap()),
            Err(Error::LineThroughOrigin)
        );
    }

    #[test]
    fn line_normalization() {
        let l = Line::new(-4.0, 2.0, -8.0).unwrap();
        assert_eq!((l.a(), l.b(), l.c()), (1.0, -0.5, 2.0));
        let h = Line::new(0.0, -3.0, 6.0).unwrap();
        assert_eq!((h.a(), h.b(), h.c()), (0.0, 1.0, -2.0));
        assert!(Line::new(0.0, 0.0, 1.0).is_err());
        assert!(Line::new(f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn intersections() {
        let p = intersect_lines(&Line::vertical(1.0).unwrap(), &Line::horizontal(1.0).unwrap());
        assert_eq!(p.unwrap(), Point::new(1.0, 1.0));

        // Duals of (1,3) and (2,5), both on y = 2x + 1.
        let l1 = dual_of_point(Point::new(1.0, 3.0)).unwrap();
        let l2 = dual_of_point(Point::new(2.0, 5.0)).unwrap();
        let q = intersect_lines(&l1, &l2).unwrap();
        assert!(close(q, Point::new(-2.0, 1.0), 1e-14));
        let carrier = Line::from_slope_intercept(2.0, 1.0).unwrap();
        assert!(close(q, dual_of_line(&carrier).unwrap(), 1e-14));

        assert_eq!(
            intersect_lines(&Line::vertical(1.0).unwrap(), &Line::vertical(2.0).unwrap()),
            Err(Error::ParallelLines)
        );
    }

    #[test]
    fn perpendicular_feet() {
        let foot = |l: Line| foot_of_perpendicular(&l).unwrap();
        assert!(close(foot(Line::horizontal(2.0).unwrap()), Point::new(0.0, 2.0), 0.0));
        assert!(close(foot(Line::vertical(3.0).unwrap()), Point::new(3.0, 0.0), 0.0));
        let l = Line::from_slope_intercept(1.0, 2.0).unwrap();
        assert!(close(foot(l), Point::new(-1.0, 1.0), 1e-15));
        // (−bm/(m²+1), b/(m²+1)) for y = mx + b.
        let (m, b) = (-3.0_f64, 0.7_f64);
        let expected = Point::new(-b * m / (m * m + 1.0), b / (m * m + 1.0));
        assert!(close(foot(Line::from_slope_intercept(m, b).unwrap()), expected, 1e-15));
        assert_eq!(
            foot_of_perpendicular(&Line::from_slope_intercept(1.0, 0.0).unwrap()),
            Err(Error::LineThroughOrigin)
        );
    }

    #[test]
    fn unit_circle_inversion() {
        assert_eq!(invert_in_unit_circle(Point::new(0.0, 2.0)).unwrap(), Point::new(0.0, 0.5));
        assert_eq!(invert_in_unit_circle(Point::new(1.0, 0.0)).unwrap(), Point::new(1.0, 0.0));
        assert!(close(
            invert_in_unit_circle(Point::new(3.0, 4.0)).unwrap(),
            Point::new(3.0 / 25.0, 4.0 / 25.0),
            1e-16
        ));
        assert_eq!(invert_in_unit_circle(Point::ORIGIN), Err(Error::OriginNotInvertible));
    }

    #[test]
    fn inversion_route_matches_direct_dual() {
        let l = Line::horizontal(2.0).unwrap();
        assert!(close(dual_by_inversion(&l).unwrap(), Point::new(0.0, 0.5), 1e-16));
        let t = Line::from_slope_intercept(-0.5, 29.0 / 16.0).unwrap();
        assert!(close(
            dual_by_inversion(&t).unwrap(),
            Point::new(8.0 / 29.0, 16.0 / 29.0),
            1e-15
        ));
    }

    #[test]
    fn parallel_carriers() {
        let c = parallel_dual_carrier(Slope::Finite(2.0));
        assert!(c.approx_eq(&Line::from_slope_intercept(-0.5, 0.0).unwrap(), 1e-15));
        assert!(parallel_dual_carrier(Slope::Vertical).approx_eq(&Line::horizontal(0.0).unwrap(), 0.0));
        assert!(parallel_dual_carrier(Slope::Finite(0.0)).approx_eq(&Line::vertical(0.0).unwrap(), 0.0));
    }

    #[test]
    fn angle_tangents() {
        let y_eq_x = Line::from_slope_intercept(1.0, 0.0).unwrap();
        let l2 = Line::from_slope_intercept(2.0, 1.0).unwrap();
        match angle_tangent_between(&y_eq_x, &l2) {
            AngleMeasure::Tan(t) => assert!((t - 1.0 / 3.0).abs() < 1e-15),
            AngleMeasure::Right => panic!("not perpendicular"),
        }
        assert_eq!(angle_tangent_between(&l2, &l2), AngleMeasure::Tan(0.0));
        let anti = Line::from_slope_intercept(-1.0, 0.0).unwrap();
        assert_eq!(angle_tangent_between(&y_eq_x, &anti), AngleMeasure::Right);
    }

    #[test]
    fn slope_angles_round_trip() {
        assert_eq!(Slope::from_angle(Slope::Vertical.angle()), Slope::Vertical);
        match Slope::from_angle(Slope::Finite(-1.25).angle()) {
            Slope::Finite(m) => assert!((m + 1.25).abs() < 1e-14),
            Slope::Vertical => panic!(),
        }
    }
}
