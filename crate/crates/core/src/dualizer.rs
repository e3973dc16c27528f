//! Dualization of piecewise curves.
//!
//! A tangent line `y = y(a) + y'(a)(x − a)` of an arc has dual point
//! `(−y'/w, 1/w)` with `w = y(a) − a·y'(a)`. Corners dualize to segments on
//! the dual line of the corner point, and straight segments to single points.
//! Parameters whose tangent passes through the origin have no dual point and
//! are recorded as gaps.

use serde::Serialize;

use crate::curves::{scale_curve, tangent_line_at, CornerJoint, LinearSegment, Piece, PiecewiseCurve, SmoothArc};
use crate::error::{Error, Result};
use crate::geometry::{dual_of_line, dual_of_point, Line, Point, Slope};
use crate::legendre::InvertibleArc;

/// Relative tolerance on `|y − a·y'|` below which the tangent is taken to pass
/// through the origin.
pub const TOL_ORIGIN: f64 = 1e-10;

/// Second derivatives below this magnitude count as inflections.
pub const INFLECTION_TOL: f64 = 1e-12;

/// Refinement bisects sample intervals longer than this multiple of the median.
const REFINE_FACTOR: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SamplingPlan {
    pub samples: usize,
    pub refine: bool,
}

impl SamplingPlan {
    pub const fn new(samples: usize, refine: bool) -> SamplingPlan {
        SamplingPlan { samples, refine }
    }

    /// Uniform sampling without refinement.
    pub const fn uniform(samples: usize) -> SamplingPlan {
        SamplingPlan::new(samples, false)
    }
}

impl Default for SamplingPlan {
    fn default() -> SamplingPlan {
        SamplingPlan::new(201, true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "type", content = "index")]
pub enum PieceSource {
    Piece(usize),
    Joint(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DualKind {
    SampledArc,
    Segment,
    IsolatedPoint,
}

impl DualKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DualKind::SampledArc => "sampled_arc",
            DualKind::Segment => "segment",
            DualKind::IsolatedPoint => "isolated_point",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualPiece {
    pub source: PieceSource,
    pub kind: DualKind,
    pub points: Vec<Point>,
    /// Source parameter of each point: `x` for arcs, sweep fraction for
    /// corners, 0 for segments.
    pub params: Vec<f64>,
    /// Arc parameters whose tangent passes through the origin.
    pub gaps: Vec<f64>,
    /// Indices `i` such that a gap lies between `points[i - 1]` and `points[i]`.
    pub breaks: Vec<usize>,
}

impl DualPiece {
    fn single(source: PieceSource, kind: DualKind, points: Vec<Point>, params: Vec<f64>) -> DualPiece {
        DualPiece {
            source,
            kind,
            points,
            params,
            gaps: Vec::new(),
            breaks: Vec::new(),
        }
    }

    /// Maximal gap-free runs of points.
    pub fn runs(&self) -> Vec<&[Point]> {
        let mut out = Vec::new();
        let mut start = 0;
        for &b in &self.breaks {
            out.push(&self.points[start..b]);
            start = b;
        }
        out.push(&self.points[start..]);
        out.retain(|r| !r.is_empty());
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualizationResult {
    pub closed: bool,
    pub pieces: Vec<DualPiece>,
}

impl DualizationResult {
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.pieces.iter().flat_map(|p| p.points.iter().copied())
    }

    /// Largest distance between the end of one dual piece and the start of
    /// the next, skipping junctions where an arc boundary falls in a gap.
    pub fn max_junction_gap(&self, curve: &PiecewiseCurve) -> f64 {
        let n = self.pieces.len();
        let junctions = if self.closed { n } else { n.saturating_sub(1) };
        let mut worst: f64 = 0.0;
        for k in 0..junctions {
            let a = &self.pieces[k];
            let b = &self.pieces[(k + 1) % n];
            if !ends_at_boundary(a, curve, true) || !ends_at_boundary(b, curve, false) {
                continue;
            }
            let (Some(end), Some(start)) = (a.points.last(), b.points.first()) else {
                continue;
            };
            worst = worst.max(end.distance(*start));
        }
        worst
    }
}

fn ends_at_boundary(piece: &DualPiece, curve: &PiecewiseCurve, at_end: bool) -> bool {
    match (piece.source, piece.kind) {
        (PieceSource::Piece(i), DualKind::SampledArc) => {
            let Piece::Arc(arc) = &curve.pieces()[i] else {
                return true;
            };
            let (boundary, param) = if at_end {
                (arc.end_param(), piece.params.last())
            } else {
                (arc.start_param(), piece.params.first())
            };
            param == Some(&boundary)
        }
        _ => true,
    }
}

/// Dual point of the tangent at `a`, `(−y'/w, 1/w)` with `w = y − a·y'`.
/// At a vertical tangent `x = a` the dual point is `(1/a, 0)`.
pub fn dual_point_of_arc(arc: &SmoothArc, a: f64) -> Result<Point> {
    let j = arc.jet_raw(a)?;
    if j.d1.is_infinite() {
        if a == 0.0 {
            return Err(Error::TangentThroughOrigin(a));
        }
        return Ok(Point::new(1.0 / a, 0.0));
    }
    let w = j.value - a * j.d1;
    if w.abs() <= TOL_ORIGIN * (j.value.abs() + (a * j.d1).abs()) {
        return Err(Error::TangentThroughOrigin(a));
    }
    Ok(Point::new(-j.d1 / w, 1.0 / w))
}

/// Slope `−a/y(a)` of the dual curve at the dual of `(a, y(a))`; vertical
/// when `y(a) = 0`.
pub fn dual_tangent_slope(arc: &SmoothArc, a: f64) -> Result<Slope> {
    let y = arc.value(a)?;
    Ok(if y == 0.0 {
        Slope::Vertical
    } else {
        Slope::Finite(-a / y)
    })
}

pub fn dualize_arc(arc: &SmoothArc, plan: SamplingPlan) -> Result<DualPiece> {
    dualize_arc_from(arc, plan, PieceSource::Piece(0))
}

fn sample(arc: &SmoothArc, a: f64) -> Result<Option<Point>> {
    match dual_point_of_arc(arc, a) {
        Ok(p) => Ok(Some(p)),
        Err(Error::TangentThroughOrigin(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn dualize_arc_from(arc: &SmoothArc, plan: SamplingPlan, source: PieceSource) -> Result<DualPiece> {
    let mut entries = arc
        .uniform_params(plan.samples)
        .into_iter()
        .map(|a| sample(arc, a).map(|p| (a, p)))
        .collect::<Result<Vec<_>>>()?;

    if plan.refine {
        entries = refine(arc, entries)?;
    }

    let mut piece = DualPiece::single(source, DualKind::SampledArc, Vec::new(), Vec::new());
    let mut pending_break = false;
    for (a, p) in entries {
        match p {
            None => {
                piece.gaps.push(a);
                pending_break = true;
            }
            Some(p) => {
                if pending_break && !piece.points.is_empty() {
                    piece.breaks.push(piece.points.len());
                }
                pending_break = false;
                piece.points.push(p);
                piece.params.push(a);
            }
        }
    }
    if piece.points.is_empty() {
        return Err(Error::AllSamplesExcluded);
    }
    Ok(piece)
}

type Entry = (f64, Option<Point>);

/// One pass bisecting every interval whose dual length exceeds
/// `REFINE_FACTOR` times the median.
fn refine(arc: &SmoothArc, entries: Vec<Entry>) -> Result<Vec<Entry>> {
    let lengths: Vec<f64> = entries
        .windows(2)
        .filter_map(|w| match (w[0].1, w[1].1) {
            (Some(p), Some(q)) => Some(p.distance(q)),
            _ => None,
        })
        .collect();
    if lengths.is_empty() {
        return Ok(entries);
    }
    let mut sorted = lengths.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let threshold = REFINE_FACTOR * median;

    let mut out = Vec::with_capacity(entries.len());
    for (k, w) in entries.windows(2).enumerate() {
        if k == 0 {
            out.push(w[0]);
        }
        if let (Some(p), Some(q)) = (w[0].1, w[1].1) {
            if p.distance(q) > threshold {
                let mid = 0.5 * (w[0].0 + w[1].0);
                out.push((mid, sample(arc, mid)?));
            }
        }
        out.push(w[1]);
    }
    if entries.len() == 1 {
        out = entries;
    }
    Ok(out)
}

/// The dual of a corner: the segment of the corner's dual line between the
/// duals of the incoming and outgoing tangents, in that order.
pub fn dualize_corner(j: &CornerJoint) -> Result<DualPiece> {
    dualize_corner_from(j, PieceSource::Joint(0))
}

fn dualize_corner_from(j: &CornerJoint, source: PieceSource) -> Result<DualPiece> {
    if j.at.is_origin() {
        return Err(Error::SupportingLineThroughOrigin(j.start_angle));
    }
    let radial = j.at.y.atan2(j.at.x);
    if j.contains_direction(radial) {
        return Err(Error::SupportingLineThroughOrigin(radial));
    }
    let (first, last) = j.extreme_lines();
    let p0 = dual_of_line(&first)?;
    let p1 = dual_of_line(&last)?;
    Ok(DualPiece::single(source, DualKind::Segment, vec![p0, p1], vec![0.0, 1.0]))
}

pub fn dualize_segment(s: &LinearSegment) -> Result<DualPiece> {
    dualize_segment_from(s, PieceSource::Piece(0))
}

fn dualize_segment_from(s: &LinearSegment, source: PieceSource) -> Result<DualPiece> {
    let p = dual_of_line(&s.carrier())?;
    Ok(DualPiece::single(source, DualKind::IsolatedPoint, vec![p], vec![0.0]))
}

/// Dualizes every piece and corner in traversal order.
pub fn dualize_curve(c: &PiecewiseCurve, plan: SamplingPlan) -> Result<DualizationResult> {
    let mut pieces = Vec::with_capacity(c.pieces().len() + c.joints().len());
    for (i, piece) in c.pieces().iter().enumerate() {
        let dual = match piece {
            Piece::Arc(arc) => dualize_arc_from(arc, plan, PieceSource::Piece(i)),
            Piece::Segment(s) => dualize_segment_from(s, PieceSource::Piece(i)),
        }
        .map_err(|e| e.in_piece(format!("piece {i}")))?;
        pieces.push(dual);
        for (k, joint) in c.joints().iter().enumerate().filter(|(_, j)| j.after_piece == i) {
            let dual = dualize_corner_from(joint, PieceSource::Joint(k)).map_err(|e| {
                e.in_piece(format!("corner {k} at ({}, {})", joint.at.x, joint.at.y))
            })?;
            pieces.push(dual);
        }
    }
    Ok(DualizationResult {
        closed: c.is_closed(),
        pieces,
    })
}

/// `a·x + y(a)·y − 1` at `q`, where `a = y'^{-1}(−x/y)`; zero exactly on the
/// dual curve.
pub fn closed_form_dual_residual(ia: &InvertibleArc, q: Point) -> Result<f64> {
    if q.y == 0.0 {
        return Err(Error::Domain("closed-form residual needs q.y ≠ 0".into()));
    }
    let a = ia.inverse_derivative(-q.x / q.y)?;
    let y = ia.arc().value(a)?;
    Ok(a * q.x + y * q.y - 1.0)
}

/// `d²v/du²` of the dual curve at the dual of `(a, y(a))`:
/// `(y − a·y')³ / (y³·y'')`.
pub fn dual_second_derivative(arc: &SmoothArc, a: f64) -> Result<f64> {
    let j = arc.jet(a)?;
    if !(j.d2.abs() > INFLECTION_TOL) {
        return Err(Error::InflectionPoint(a));
    }
    if j.value == 0.0 {
        return Err(Error::ZeroOrdinate(a));
    }
    let w = j.value - a * j.d1;
    Ok(w.powi(3) / (j.value.powi(3) * j.d2))
}

/// Dualizes twice and returns the largest deviation from the original.
///
/// Arc samples are re-dualized through the dual tangent line built from the
/// analytic slope `−a/y(a)`; corner segments through their carrier line;
/// isolated points through their dual line, which must contain the source
/// segment.
pub fn reflexivity_roundtrip(c: &PiecewiseCurve, plan: SamplingPlan) -> Result<f64> {
    let result = dualize_curve(c, plan)?;
    let mut worst: f64 = 0.0;
    for piece in &result.pieces {
        let dev = match (piece.source, piece.kind) {
            (PieceSource::Piece(i), DualKind::SampledArc) => {
                let Piece::Arc(arc) = &c.pieces()[i] else {
                    unreachable!("sampled arcs come from arcs")
                };
                let mut dev: f64 = 0.0;
                for (&a, &q) in piece.params.iter().zip(&piece.points) {
                    let tangent = Line::through_with_slope(q, dual_tangent_slope(arc, a)?)?;
                    let back = dual_of_line(&tangent)?;
                    dev = dev.max(back.distance(arc.point_at(a)?));
                }
                dev
            }
            (PieceSource::Joint(k), _) => {
                let carrier = Line::through_points(piece.points[0], piece.points[1])?;
                dual_of_line(&carrier)?.distance(c.joints()[k].at)
            }
            (PieceSource::Piece(i), _) => {
                let Piece::Segment(s) = &c.pieces()[i] else {
                    unreachable!("isolated points come from segments")
                };
                let line = dual_of_point(piece.points[0])?;
                let norm = line.a().hypot(line.b());
                (line.residual(s.start()).abs() / norm).max(line.residual(s.end()).abs() / norm)
            }
        };
        worst = worst.max(dev);
    }
    Ok(worst)
}

/// Largest pointwise deviation between `dual(λ·C)` and `dual(C)/λ`.
pub fn scaling_covariance_check(c: &PiecewiseCurve, factor: f64, plan: SamplingPlan) -> Result<f64> {
    let scaled = dualize_curve(&scale_curve(c, factor)?, plan)?;
    let base = dualize_curve(c, plan)?;
    if scaled.pieces.len() != base.pieces.len() {
        return Err(Error::SampleMismatch);
    }
    let mut worst: f64 = 0.0;
    for (s, b) in scaled.pieces.iter().zip(&base.pieces) {
        if s.kind != b.kind || s.points.len() != b.points.len() {
            return Err(Error::SampleMismatch);
        }
        for (ps, pb) in s.points.iter().zip(&b.points) {
            worst = worst.max(ps.distance(*pb * (1.0 / factor)));
        }
    }
    Ok(worst)
}

/// `Q · (1, y'(a))` for the dual point `Q`: the radial direction to the dual
/// point is perpendicular to the tangent, so this vanishes.
pub fn radial_perpendicularity_check(arc: &SmoothArc, a: f64) -> Result<f64> {
    let q = dual_point_of_arc(arc, a)?;
    let j = arc.jet_raw(a)?;
    Ok(if j.d1.is_infinite() {
        q.y
    } else {
        q.x + j.d1 * q.y
    })
}

/// Finite-difference step for arc parameter `a`: relative to `|a|`, and
/// kept well inside the domain where curvature can blow up at the ends.
pub fn fd_step(arc: &SmoothArc, a: f64, rel: f64) -> f64 {
    let (lo, hi) = arc.domain();
    (rel * (1.0 + a.abs())).min(0.05 * (a - lo).min(hi - a))
}

/// Dual slope `dv/du` from central differences of dual points at `a ± h`,
/// Richardson-extrapolated over steps `h` and `h/2`.
pub fn fd_dual_slope(arc: &SmoothArc, a: f64, h: f64) -> Result<f64> {
    let coarse = central_dual_slope(arc, a, h)?;
    let fine = central_dual_slope(arc, a, h / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

fn central_dual_slope(arc: &SmoothArc, a: f64, h: f64) -> Result<f64> {
    let lo = dual_point_of_arc(arc, a - h)?;
    let hi = dual_point_of_arc(arc, a + h)?;
    Ok((hi.y - lo.y) / (hi.x - lo.x))
}

/// `d²v/du²` from parametric central differences of dual points,
/// `(u'·v'' − v'·u'') / u'³`, Richardson-extrapolated over steps `h` and `h/2`.
pub fn fd_dual_second_derivative(arc: &SmoothArc, a: f64, h: f64) -> Result<f64> {
    let coarse = central_dual_curvature(arc, a, h)?;
    let fine = central_dual_curvature(arc, a, h / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

fn central_dual_curvature(arc: &SmoothArc, a: f64, h: f64) -> Result<f64> {
    let lo = dual_point_of_arc(arc, a - h)?;
    let mid = dual_point_of_arc(arc, a)?;
    let hi = dual_point_of_arc(arc, a + h)?;
    let d1 = (hi - lo) * (0.5 / h);
    let d2 = (hi - mid * 2.0 + lo) * (1.0 / (h * h));
    Ok((d1.x * d2.y - d1.y * d2.x) / d1.x.powi(3))
}

/// Dual point through the explicit tangent line; used to cross-check
/// [`dual_point_of_arc`].
pub fn dual_point_via_tangent(arc: &SmoothArc, a: f64) -> Result<Point> {
    dual_of_line(&tangent_line_at(arc, a)?)
}
