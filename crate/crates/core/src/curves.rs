//! Piecewise plane curves built from graph arcs `y = y(x)` and straight
//! segments, with corners detected at slope-discontinuous junctions.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{eval_jet2, eval_jet2_raw, eval_value, parse_expression, ExprNode, Jet2, Params};
use crate::geometry::{Line, Point};

/// Consecutive pieces must meet within this distance.
pub const CONTINUITY_TOL: f64 = 1e-10;

/// Junctions turning by more than this angle (radians) carry a corner.
pub const CORNER_TOL: f64 = 1e-9;

/// Interior samples used to reject arcs with vanishing curvature.
const CURVATURE_SAMPLES: usize = 16;
const CURVATURE_TOL: f64 = 1e-12;

/// A graph arc `y = expr(x)` over `[x_lo, x_hi]`, traversed in increasing `x`
/// unless reversed.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothArc {
    expr: ExprNode,
    x_lo: f64,
    x_hi: f64,
    params: Params,
    reversed: bool,
    inflectional: bool,
}

impl SmoothArc {
    pub fn new(expr: ExprNode, x_lo: f64, x_hi: f64, params: Params) -> Result<SmoothArc> {
        SmoothArc::build(expr, x_lo, x_hi, params, false, false)
    }

    pub fn parse(src: &str, x_lo: f64, x_hi: f64, params: Params) -> Result<SmoothArc> {
        SmoothArc::new(parse_expression(src)?, x_lo, x_hi, params)
    }

    /// An arc allowed to have points of zero curvature.
    pub fn new_inflectional(expr: ExprNode, x_lo: f64, x_hi: f64, params: Params) -> Result<SmoothArc> {
        SmoothArc::build(expr, x_lo, x_hi, params, false, true)
    }

    fn build(
        expr: ExprNode,
        x_lo: f64,
        x_hi: f64,
        params: Params,
        reversed: bool,
        inflectional: bool,
    ) -> Result<SmoothArc> {
        if !(x_lo.is_finite() && x_hi.is_finite() && x_lo < x_hi) {
            return Err(Error::InvalidDomain(x_lo, x_hi));
        }
        if let Some(missing) = expr.param_names().into_iter().find(|p| !params.contains_key(p)) {
            return Err(Error::UnboundParameter(missing));
        }
        let arc = SmoothArc {
            expr,
            x_lo,
            x_hi,
            params,
            reversed,
            inflectional,
        };
        for x in [x_lo, x_hi] {
            let y = arc.value(x)?;
            if !y.is_finite() {
                return Err(Error::Domain(format!("`{}` is not finite at x = {x}", arc.expr)));
            }
        }
        for i in 1..=CURVATURE_SAMPLES {
            let x = x_lo + (x_hi - x_lo) * i as f64 / (CURVATURE_SAMPLES + 1) as f64;
            let j = arc.jet(x)?;
            if !inflectional && !(j.d2.abs() > CURVATURE_TOL) {
                return Err(Error::LinearPortion {
                    expr: arc.expr.to_string(),
                    x,
                });
            }
        }
        Ok(arc)
    }

    /// The same arc traversed in decreasing `x`.
    pub fn reversed(mut self) -> SmoothArc {
        self.reversed = !self.reversed;
        self
    }

    pub fn expr(&self) -> &ExprNode {
        &self.expr
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x_lo, self.x_hi)
    }

    pub fn is_reversed(&self) -> bool {
        self.reversed
    }

    pub fn is_inflectional(&self) -> bool {
        self.inflectional
    }

    pub fn start_param(&self) -> f64 {
        if self.reversed {
            self.x_hi
        } else {
            self.x_lo
        }
    }

    pub fn end_param(&self) -> f64 {
        if self.reversed {
            self.x_lo
        } else {
            self.x_hi
        }
    }

    pub fn contains_param(&self, x: f64) -> bool {
        x >= self.x_lo && x <= self.x_hi
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        eval_value(&self.expr, x, &self.params)
    }

    pub fn point_at(&self, x: f64) -> Result<Point> {
        Ok(Point::new(x, self.value(x)?))
    }

    /// `(y, y', y'')` at `x`; fails where a derivative is unbounded.
    pub fn jet(&self, x: f64) -> Result<Jet2> {
        if !self.contains_param(x) {
            return Err(Error::Domain(format!(
                "x = {x} is outside [{}, {}]",
                self.x_lo, self.x_hi
            )));
        }
        eval_jet2(&self.expr, x, &self.params)
    }

    /// Like [`SmoothArc::jet`] but lets `y'` be infinite (vertical tangent).
    pub fn jet_raw(&self, x: f64) -> Result<Jet2> {
        if !self.contains_param(x) {
            return Err(Error::Domain(format!(
                "x = {x} is outside [{}, {}]",
                self.x_lo, self.x_hi
            )));
        }
        let j = eval_jet2_raw(&self.expr, x, &self.params)?;
        if !j.value.is_finite() || j.d1.is_nan() {
            return Err(Error::Domain(format!("`{}` has no tangent at x = {x}", self.expr)));
        }
        Ok(j)
    }

    /// Unit tangent in the direction of traversal.
    pub fn direction_at(&self, x: f64) -> Result<Point> {
        let j = self.jet_raw(x)?;
        let forward = if j.d1.is_infinite() {
            Point::new(0.0, j.d1.signum())
        } else {
            let n = 1.0_f64.hypot(j.d1);
            Point::new(1.0 / n, j.d1 / n)
        };
        Ok(if self.reversed { forward * -1.0 } else { forward })
    }

    /// `n` parameters spaced uniformly over the domain, in traversal order.
    pub fn uniform_params(&self, n: usize) -> Vec<f64> {
        let n = n.max(2);
        let last = (n - 1) as f64;
        let mut params: Vec<f64> = (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.x_hi
                } else {
                    self.x_lo + (self.x_hi - self.x_lo) * (i as f64 / last)
                }
            })
            .collect();
        if self.reversed {
            params.reverse();
        }
        params
    }

    /// The arc of `λ·y(x/λ)` over the scaled domain.
    pub fn scaled(&self, factor: f64) -> Result<SmoothArc> {
        let inner = ExprNode::Div(Box::new(ExprNode::Var), Box::new(ExprNode::Const(factor)));
        let expr = ExprNode::Mul(
            Box::new(ExprNode::Const(factor)),
            Box::new(self.expr.substitute_x(&inner)),
        );
        SmoothArc::build(
            expr,
            self.x_lo * factor,
            self.x_hi * factor,
            self.params.clone(),
            self.reversed,
            self.inflectional,
        )
    }
}

impl fmt::Display for SmoothArc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y = {} on [{}, {}]", self.expr, self.x_lo, self.x_hi)?;
        if self.reversed {
            f.write_str(" (reversed)")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSegment {
    start: Point,
    end: Point,
}

impl LinearSegment {
    pub fn new(start: Point, end: Point) -> Result<LinearSegment> {
        if !(start.is_finite() && end.is_finite()) {
            return Err(Error::InvalidParam("segment endpoints must be finite".into()));
        }
        if start == end {
            return Err(Error::DegenerateSegment);
        }
        Ok(LinearSegment { start, end })
    }

    pub fn start(&self) -> Point {
        self.start
    }

    pub fn end(&self) -> Point {
        self.end
    }

    pub fn direction(&self) -> Point {
        let d = self.end - self.start;
        d * (1.0 / d.norm())
    }

    pub fn carrier(&self) -> Line {
        Line::through_points(self.start, self.end).expect("segment endpoints are distinct")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Piece {
    Arc(SmoothArc),
    Segment(LinearSegment),
}

impl Piece {
    pub fn start_point(&self) -> Result<Point> {
        match self {
            Piece::Arc(a) => a.point_at(a.start_param()),
            Piece::Segment(s) => Ok(s.start),
        }
    }

    pub fn end_point(&self) -> Result<Point> {
        match self {
            Piece::Arc(a) => a.point_at(a.end_param()),
            Piece::Segment(s) => Ok(s.end),
        }
    }

    pub fn start_direction(&self) -> Result<Point> {
        match self {
            Piece::Arc(a) => a.direction_at(a.start_param()),
            Piece::Segment(s) => Ok(s.direction()),
        }
    }

    pub fn end_direction(&self) -> Result<Point> {
        match self {
            Piece::Arc(a) => a.direction_at(a.end_param()),
            Piece::Segment(s) => Ok(s.direction()),
        }
    }

    fn scaled(&self, factor: f64) -> Result<Piece> {
        Ok(match self {
            Piece::Arc(a) => Piece::Arc(a.scaled(factor)?),
            Piece::Segment(s) => Piece::Segment(LinearSegment::new(s.start * factor, s.end * factor)?),
        })
    }
}

impl From<SmoothArc> for Piece {
    fn from(a: SmoothArc) -> Piece {
        Piece::Arc(a)
    }
}

impl From<LinearSegment> for Piece {
    fn from(s: LinearSegment) -> Piece {
        Piece::Segment(s)
    }
}

/// A slope-discontinuous junction. Supporting lines at the corner have
/// directions sweeping from the incoming tangent (`start_angle`) through
/// the signed turn `sweep`; directions are taken modulo π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerJoint {
    pub at: Point,
    /// Index of the piece ending at this corner; the next piece follows
    /// cyclically for closed curves.
    pub after_piece: usize,
    pub start_angle: f64,
    pub sweep: f64,
    /// Unit tangent of the preceding piece at the corner.
    pub incoming: Point,
    /// Unit tangent of the following piece at the corner.
    pub outgoing: Point,
}

impl CornerJoint {
    /// Direction angle at fraction `s ∈ [0, 1]` of the sweep.
    pub fn angle_at_fraction(&self, s: f64) -> f64 {
        self.start_angle + s * self.sweep
    }

    /// Whether the line direction `theta` (taken modulo π) lies in the sweep.
    pub fn contains_direction(&self, theta: f64) -> bool {
        self.fraction_of(theta).is_some()
    }

    /// Fraction of the sweep at which the line direction `theta` occurs.
    pub fn fraction_of(&self, theta: f64) -> Option<f64> {
        const TOL: f64 = 1e-12;
        let width = self.sweep.abs();
        let r = ((theta - self.start_angle) * self.sweep.signum()).rem_euclid(PI);
        if r <= width + TOL {
            Some((r / width).min(1.0))
        } else if r >= PI - TOL {
            Some(0.0)
        } else {
            None
        }
    }

    pub fn supporting_line_at_fraction(&self, s: f64) -> Line {
        let theta = self.angle_at_fraction(s);
        Line::through_with_direction(self.at, Point::new(theta.cos(), theta.sin()))
            .expect("unit direction")
    }

    /// Endpoint supporting lines: the incoming and outgoing tangents.
    pub fn extreme_lines(&self) -> (Line, Line) {
        let through = |d: Point| Line::through_with_direction(self.at, d).expect("unit direction");
        (through(self.incoming), through(self.outgoing))
    }
}

/// The supporting line through the corner with direction angle `theta`.
pub fn corner_supporting_lines(j: &CornerJoint, theta: f64) -> Result<Line> {
    if !j.contains_direction(theta) {
        return Err(Error::DirectionOutsideInterval(theta));
    }
    Ok(Line::through_with_direction(j.at, Point::new(theta.cos(), theta.sin()))?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseCurve {
    pieces: Vec<Piece>,
    joints: Vec<CornerJoint>,
    closed: bool,
}

/// Validates continuity and detects corners from one-sided tangent directions.
pub fn build_piecewise_curve(pieces: Vec<Piece>, closed: bool) -> Result<PiecewiseCurve> {
    if pieces.is_empty() {
        return Err(Error::EmptyCurve);
    }
    let n = pieces.len();
    let junctions = if closed { n } else { n - 1 };
    let mut joints = Vec::new();
    for i in 0..junctions {
        let next = (i + 1) % n;
        let end = pieces[i].end_point()?;
        let start = pieces[next].start_point()?;
        let gap = end.distance(start);
        if !(gap <= CONTINUITY_TOL) {
            return Err(Error::DiscontinuousCurve { index: i, next, gap });
        }
        let d_in = pieces[i].end_direction()?;
        let d_out = pieces[next].start_direction()?;
        let turn = d_in.cross(d_out).atan2(d_in.dot(d_out));
        if turn.abs() > CORNER_TOL {
            joints.push(CornerJoint {
                at: end,
                after_piece: i,
                start_angle: d_in.y.atan2(d_in.x),
                sweep: turn,
                incoming: d_in,
                outgoing: d_out,
            });
        }
    }
    Ok(PiecewiseCurve {
        pieces,
        joints,
        closed,
    })
}

impl PiecewiseCurve {
    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn joints(&self) -> &[CornerJoint] {
        &self.joints
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Points along the curve: `n` per arc, endpoints per segment.
    pub fn sample_points(&self, n: usize) -> Result<Vec<Point>> {
        let mut out = Vec::new();
        for piece in &self.pieces {
            match piece {
                Piece::Arc(a) => {
                    for x in a.uniform_params(n) {
                        out.push(a.point_at(x)?);
                    }
                }
                Piece::Segment(s) => {
                    out.push(s.start);
                    out.push(s.end);
                }
            }
        }
        Ok(out)
    }
}

/// Expands the curve about the origin by `factor`.
pub fn scale_curve(c: &PiecewiseCurve, factor: f64) -> Result<PiecewiseCurve> {
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(Error::NonpositiveFactor(factor));
    }
    let pieces = c
        .pieces
        .iter()
        .map(|p| p.scaled(factor))
        .collect::<Result<Vec<_>>>()?;
    build_piecewise_curve(pieces, c.closed)
}

/// Tangent line at `(a, y(a))`; vertical where `y'` is unbounded.
pub fn tangent_line_at(arc: &SmoothArc, a: f64) -> Result<Line> {
    let j = arc.jet_raw(a)?;
    let p = Point::new(a, j.value);
    if j.d1.is_infinite() {
        Line::vertical(a)
    } else {
        Line::new(-j.d1, 1.0, p.y - j.d1 * p.x)
    }
}

/// Builtin curves.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `y = x²/(4p)` over `[lo, hi]`.
    ParabolaStd { p: f64, lo: f64, hi: f64 },
    /// `y = −p·x²` over `[lo, hi]`.
    ParabolaNeg { p: f64, lo: f64, hi: f64 },
    /// `|x|^p + |y|^p = 1` as four quadrant arcs, counterclockwise.
    PnormCircle { p: f64 },
    /// `|x| + |y| = 1`.
    TaxicabDiamond,
    /// Square with vertices `(±s, ±s)`.
    SquareAxisAligned { s: f64 },
    /// Two parabola arcs meeting at corners `(±2.5, 0)`.
    Example1Outer,
    /// Quarter circle, two segments, quarter circle; open.
    Example5Curve,
}

pub const FAMILY_NAMES: &[&str] = &[
    "parabola_std",
    "parabola_neg",
    "pnorm_circle",
    "unit_circle",
    "taxicab_diamond",
    "square_axis_aligned",
    "example1_outer",
    "example5_curve",
];

impl Family {
    /// Looks up a family by name. Recognized parameters: `p`, `s`, `lo`, `hi`.
    pub fn from_name(name: &str, params: &Params) -> Result<Family> {
        let get = |key: &str, default: f64| params.get(key).copied().unwrap_or(default);
        Ok(match name {
            "parabola_std" => Family::ParabolaStd {
                p: get("p", 1.0),
                lo: get("lo", -4.0),
                hi: get("hi", 4.0),
            },
            "parabola_neg" => Family::ParabolaNeg {
                p: get("p", 1.0),
                lo: get("lo", -4.0),
                hi: get("hi", 4.0),
            },
            "pnorm_circle" => Family::PnormCircle { p: get("p", 2.0) },
            "unit_circle" => Family::PnormCircle { p: 2.0 },
            "taxicab_diamond" => Family::TaxicabDiamond,
            "square_axis_aligned" => Family::SquareAxisAligned { s: get("s", 1.0) },
            "example1_outer" => Family::Example1Outer,
            "example5_curve" => Family::Example5Curve,
            other => return Err(Error::UnknownFamily(other.to_string())),
        })
    }
}

fn p_params(p: f64) -> Params {
    Params::from([("p".to_string(), p)])
}

fn parse_arc(src: &str, lo: f64, hi: f64, params: Params) -> Result<SmoothArc> {
    SmoothArc::parse(src, lo, hi, params)
}

/// The first-quadrant arc `y = (1 − x^p)^(1/p)` on `[0, 1]`.
pub fn pnorm_quadrant_arc(p: f64) -> Result<SmoothArc> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParam(format!("p-norm exponent must exceed 1, got {p}")));
    }
    parse_arc("(1 - x^p)^(1/p)", 0.0, 1.0, p_params(p))
}

pub fn make_family(family: &Family) -> Result<PiecewiseCurve> {
    match *family {
        Family::ParabolaStd { p, lo, hi } | Family::ParabolaNeg { p, lo, hi } => {
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::InvalidParam(format!("parabola parameter must be positive, got {p}")));
            }
            let src = if matches!(family, Family::ParabolaStd { .. }) {
                "x^2/(4*p)"
            } else {
                "-p*x^2"
            };
            build_piecewise_curve(vec![parse_arc(src, lo, hi, p_params(p))?.into()], false)
        }
        Family::PnormCircle { p } => {
            let q1 = pnorm_quadrant_arc(p)?;
            let params = p_params(p);
            let q2 = parse_arc("(1 - (-x)^p)^(1/p)", -1.0, 0.0, params.clone())?;
            let q3 = parse_arc("-(1 - (-x)^p)^(1/p)", -1.0, 0.0, params.clone())?;
            let q4 = parse_arc("-(1 - x^p)^(1/p)", 0.0, 1.0, params)?;
            build_piecewise_curve(
                vec![
                    q1.reversed().into(),
                    q2.reversed().into(),
                    q3.into(),
                    q4.into(),
                ],
                true,
            )
        }
        Family::TaxicabDiamond => polygon(&[(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]),
        Family::SquareAxisAligned { s } => {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidParam(format!("square half-width must be positive, got {s}")));
            }
            polygon(&[(s, -s), (s, s), (-s, s), (-s, -s)])
        }
        Family::Example1Outer => {
            let upper = parse_arc("-x^2/4 + 25/16", -2.5, 2.5, Params::new())?;
            let lower = parse_arc("x^2/4 - 25/16", -2.5, 2.5, Params::new())?;
            build_piecewise_curve(vec![upper.into(), lower.reversed().into()], true)
        }
        Family::Example5Curve => {
            let left = parse_arc("sqrt(1 - x^2)", -1.0, 0.0, Params::new())?;
            let right = parse_arc("sqrt(1 - (x - 2)^2)", 2.0, 3.0, Params::new())?;
            let b = Point::new(1.0, 2.0 / 3.0);
            build_piecewise_curve(
                vec![
                    left.into(),
                    LinearSegment::new(Point::new(0.0, 1.0), b)?.into(),
                    LinearSegment::new(b, Point::new(2.0, 1.0))?.into(),
                    right.into(),
                ],
                false,
            )
        }
    }
}

/// Closed polygon through the given vertices in order.
pub fn polygon(vertices: &[(f64, f64)]) -> Result<PiecewiseCurve> {
    let n = vertices.len();
    let pieces = (0..n)
        .map(|i| {
            LinearSegment::new(vertices[i].into(), vertices[(i + 1) % n].into()).map(Piece::from)
        })
        .collect::<Result<Vec<_>>>()?;
    build_piecewise_curve(pieces, true)
}
