//! The five worked examples, with residual checks for their duals.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::curves::{make_family, Family, PiecewiseCurve};
use crate::dualizer::{DualKind, DualizationResult, PieceSource};
use crate::error::{Error, Result};
use crate::geometry::Point;

pub const RESIDUAL_TOL: f64 = 1e-9;
pub const ENDPOINT_TOL: f64 = 1e-12;
pub const CROSSING_TOL: f64 = 1e-6;
pub const SELF_DUAL_TOL: f64 = 1e-8;
/// Slack on the domain conditions of a residual branch.
const DOMAIN_SLACK: f64 = 1e-9;

pub const DEFAULT_P2: f64 = 1.0;
pub const DEFAULT_P3: f64 = 4.0;

type ResidualFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;

/// One piece of a dual curve given implicitly, valid where `domain` holds.
struct Branch {
    eq: Box<dyn Fn(Point) -> f64 + Send + Sync>,
    domain: Box<dyn Fn(Point) -> bool + Send + Sync>,
}

fn branch(
    eq: impl Fn(Point) -> f64 + Send + Sync + 'static,
    domain: impl Fn(Point) -> bool + Send + Sync + 'static,
) -> Branch {
    Branch {
        eq: Box::new(eq),
        domain: Box::new(domain),
    }
}

fn within(v: f64, lo: f64, hi: f64) -> bool {
    v >= lo - DOMAIN_SLACK && v <= hi + DOMAIN_SLACK
}

/// Smallest residual among the branches whose domain contains `q`.
fn union_of(branches: Vec<Branch>) -> ResidualFn {
    Arc::new(move |q| {
        branches
            .iter()
            .filter(|b| (b.domain)(q))
            .map(|b| (b.eq)(q).abs())
            .fold(f64::INFINITY, f64::min)
    })
}

#[derive(Clone)]
pub struct GoldenExample {
    pub id: u32,
    /// Parameter of Examples 2 and 3.
    pub p: Option<f64>,
    pub original: PiecewiseCurve,
    dual_residual: ResidualFn,
    pub named_points: Vec<(String, Point)>,
}

impl fmt::Debug for GoldenExample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GoldenExample")
            .field("id", &self.id)
            .field("p", &self.p)
            .field("named_points", &self.named_points)
            .finish_non_exhaustive()
    }
}

impl GoldenExample {
    /// Absolute residual of `q` against the expected dual curve; zero on it.
    pub fn dual_residual(&self, q: Point) -> f64 {
        (self.dual_residual)(q).abs()
    }

    pub fn named_point(&self, label: &str) -> Option<Point> {
        self.named_points
            .iter()
            .find(|(l, _)| l == label)
            .map(|&(_, p)| p)
    }
}

fn named(points: &[(&str, f64, f64)]) -> Vec<(String, Point)> {
    points
        .iter()
        .map(|&(l, x, y)| (l.to_string(), Point::new(x, y)))
        .collect()
}

/// Builds example `id`. `p` applies to Examples 2 (default 1) and 3 (default 4).
pub fn make_example(id: u32, p: Option<f64>) -> Result<GoldenExample> {
    match id {
        1 => {
            // Ellipse x² + (|y| − 8/25)²/(16/25) = 4/25 split at |y| = 8/25,
            // plus the vertical segments x = ±2/5.
            let c = 8.0 / 25.0;
            let ellipse = move |q: Point| q.x * q.x + (q.y.abs() - c).powi(2) / 0.64 - 0.16;
            let residual = union_of(vec![
                branch(ellipse, move |q| q.y >= c - DOMAIN_SLACK),
                branch(ellipse, move |q| q.y <= -c + DOMAIN_SLACK),
                branch(|q| q.x - 0.4, move |q| within(q.y, -c, c)),
                branch(|q| q.x + 0.4, move |q| within(q.y, -c, c)),
            ]);
            Ok(GoldenExample {
                id,
                p: None,
                original: make_family(&Family::Example1Outer)?,
                dual_residual: residual,
                named_points: named(&[
                    ("upper_right", 0.4, c),
                    ("lower_right", 0.4, -c),
                    ("lower_left", -0.4, -c),
                    ("upper_left", -0.4, c),
                ]),
            })
        }
        2 => {
            let p = p.unwrap_or(DEFAULT_P2);
            let original = make_family(&Family::ParabolaStd { p, lo: -4.0, hi: 4.0 })?;
            Ok(GoldenExample {
                id,
                p: Some(p),
                original,
                dual_residual: Arc::new(move |q| q.y + p * q.x * q.x),
                named_points: Vec::new(),
            })
        }
        3 => {
            let p = p.unwrap_or(DEFAULT_P3);
            let original = make_family(&Family::PnormCircle { p })?;
            let q = p / (p - 1.0);
            Ok(GoldenExample {
                id,
                p: Some(p),
                original,
                dual_residual: Arc::new(move |pt| pt.x.abs().powf(q) + pt.y.abs().powf(q) - 1.0),
                named_points: Vec::new(),
            })
        }
        4 => Ok(GoldenExample {
            id,
            p: None,
            original: make_family(&Family::TaxicabDiamond)?,
            dual_residual: Arc::new(|q| q.x.abs().max(q.y.abs()) - 1.0),
            named_points: named(&[
                ("v1", 1.0, 1.0),
                ("v2", 1.0, -1.0),
                ("v3", -1.0, -1.0),
                ("v4", -1.0, 1.0),
            ]),
        }),
        5 => {
            let third = 1.0 / 3.0;
            let residual = union_of(vec![
                // self-dual quarter circle
                branch(
                    |q| q.x * q.x + q.y * q.y - 1.0,
                    |q| q.x <= DOMAIN_SLACK && q.y >= -DOMAIN_SLACK,
                ),
                branch(|q| q.y - 1.0, move |q| within(q.x, 0.0, third)),
                branch(|q| q.y - 1.5 + 1.5 * q.x, move |q| within(q.x, -1.0, third)),
                branch(|q| q.y - 1.0 + 2.0 * q.x, |q| within(q.x, -1.0, 0.0)),
                // dual of the right quarter circle
                branch(
                    |q| q.y * q.y - 1.0 + 4.0 * q.x - 3.0 * q.x * q.x,
                    move |q| within(q.x, 0.0, third) && q.y >= -DOMAIN_SLACK,
                ),
            ]);
            Ok(GoldenExample {
                id,
                p: None,
                original: make_family(&Family::Example5Curve)?,
                dual_residual: residual,
                named_points: named(&[
                    ("A", -1.0, 0.0),
                    ("B", 0.0, 1.0),
                    ("C", third, 1.0),
                    ("D", -1.0, 3.0),
                    ("E", third, 0.0),
                ]),
            })
        }
        other => Err(Error::UnknownExample(other)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
}

impl CheckOutcome {
    /// Passes when `measured <= tolerance`.
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> CheckOutcome {
        CheckOutcome {
            name: name.into(),
            passed: measured <= tolerance,
            measured,
            tolerance,
        }
    }

    /// Passes when `measured > tolerance`.
    pub fn above(name: impl Into<String>, measured: f64, tolerance: f64) -> CheckOutcome {
        CheckOutcome {
            name: name.into(),
            passed: measured > tolerance,
            measured,
            tolerance,
        }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> CheckOutcome {
        CheckOutcome {
            name: name.into(),
            passed: ok,
            measured: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoldenReport {
    pub id: u32,
    pub checks: Vec<CheckOutcome>,
}

impl GoldenReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Compares a computed dual of `example.original` with the expected dual.
pub fn golden_check(example: &GoldenExample, result: &DualizationResult) -> GoldenReport {
    let mut checks = Vec::new();
    let worst = result
        .points()
        .map(|q| example.dual_residual(q))
        .fold(0.0, f64::max);
    checks.push(CheckOutcome::at_most("dual_residual", worst, RESIDUAL_TOL));
    checks.push(CheckOutcome::flag(
        "nonempty",
        result.points().next().is_some(),
    ));

    match example.id {
        1 => {
            let expected = [
                [example.named_points[0].1, example.named_points[1].1],
                [example.named_points[2].1, example.named_points[3].1],
            ];
            let segments = segments_of(result);
            checks.push(CheckOutcome::flag("corner_segment_count", segments.len() == 2));
            let dev = segments
                .iter()
                .zip(&expected)
                .map(|(s, e)| s[0].max_abs_diff(e[0]).max(s[1].max_abs_diff(e[1])))
                .fold(0.0, f64::max);
            checks.push(CheckOutcome::at_most("corner_segment_endpoints", dev, ENDPOINT_TOL));
        }
        2 => {
            checks.push(CheckOutcome::above(
                "one_to_one",
                min_pairwise_distance(result),
                0.0,
            ));
            let vertex_used = result.pieces.iter().any(|p| p.params.contains(&0.0));
            checks.push(CheckOutcome::flag("vertex_excluded", !vertex_used));
        }
        3 => {
            if example.p == Some(2.0) {
                let dev = result
                    .points()
                    .map(|q| (q.norm() - 1.0).abs())
                    .fold(0.0, f64::max);
                checks.push(CheckOutcome::at_most("self_dual", dev, SELF_DUAL_TOL));
            }
        }
        4 => {
            let vertices: Vec<Point> = example.named_points.iter().map(|&(_, p)| p).collect();
            let isolated: Vec<Point> = result
                .pieces
                .iter()
                .filter(|p| p.kind == DualKind::IsolatedPoint)
                .flat_map(|p| p.points.iter().copied())
                .collect();
            checks.push(CheckOutcome::flag("isolated_point_count", isolated.len() == 4));
            let (dev, covered) = match_to(&isolated, &vertices);
            checks.push(CheckOutcome::at_most("isolated_points_at_vertices", dev, ENDPOINT_TOL));
            checks.push(CheckOutcome::flag("every_vertex_hit", covered));

            let segments = segments_of(result);
            checks.push(CheckOutcome::flag("segment_count", segments.len() == 4));
            let ends: Vec<Point> = segments.iter().flatten().copied().collect();
            let (dev, _) = match_to(&ends, &vertices);
            checks.push(CheckOutcome::at_most("segment_endpoints", dev, ENDPOINT_TOL));
            // Each segment must be a side: endpoints share exactly one coordinate.
            let sides = segments.iter().all(|s| {
                let dx = (s[0].x - s[1].x).abs();
                let dy = (s[0].y - s[1].y).abs();
                (dx < ENDPOINT_TOL) != (dy < ENDPOINT_TOL)
            });
            checks.push(CheckOutcome::flag("segments_are_sides", sides));
        }
        5 => {
            let flat = result
                .pieces
                .iter()
                .filter(|p| p.kind == DualKind::Segment && p.points.len() == 2)
                .map(|p| {
                    let (s, e) = (p.points[0], p.points[1]);
                    (s.y - 1.0)
                        .abs()
                        .max((e.y - 1.0).abs())
                        .max(s.x.min(e.x).abs())
                        .max((s.x.max(e.x) - 1.0 / 3.0).abs())
                })
                .fold(f64::INFINITY, f64::min);
            checks.push(CheckOutcome::at_most("flat_piece_y_eq_1", flat, RESIDUAL_TOL));

            let b = example.named_point("B").unwrap_or_default();
            let path: Vec<Point> = result.points().collect();
            let passes = passes_near(&path, b, CROSSING_TOL);
            checks.push(CheckOutcome::flag("crossing_at_B", passes.len() >= 2));
            let closest = passes.iter().copied().fold(0.0, f64::max);
            checks.push(CheckOutcome::at_most(
                "crossing_distance",
                if passes.len() >= 2 { closest } else { f64::INFINITY },
                CROSSING_TOL,
            ));
            let order = visit_order(&path, &example.named_points, CROSSING_TOL);
            checks.push(CheckOutcome::flag("path_order_ABCDBE", order == "ABCDBE"));
        }
        _ => {}
    }
    GoldenReport {
        id: example.id,
        checks,
    }
}

fn segments_of(result: &DualizationResult) -> Vec<[Point; 2]> {
    result
        .pieces
        .iter()
        .filter(|p| p.kind == DualKind::Segment && matches!(p.source, PieceSource::Joint(_)))
        .filter(|p| p.points.len() == 2)
        .map(|p| [p.points[0], p.points[1]])
        .collect()
}

/// Largest distance from each point to its nearest target, and whether every
/// target is nearest to some point.
fn match_to(points: &[Point], targets: &[Point]) -> (f64, bool) {
    let mut hit = vec![false; targets.len()];
    let mut worst: f64 = 0.0;
    for p in points {
        let (k, d) = targets
            .iter()
            .enumerate()
            .map(|(k, t)| (k, p.max_abs_diff(*t)))
            .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        if k < hit.len() {
            hit[k] = true;
        }
        worst = worst.max(d);
    }
    (worst, hit.iter().all(|&h| h))
}

fn min_pairwise_distance(result: &DualizationResult) -> f64 {
    let pts: Vec<Point> = result.points().collect();
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.min(pts[i].distance(pts[j]));
        }
    }
    best
}

/// Closest approach to `target` of each separate pass of `path` within `tol`.
fn passes_near(path: &[Point], target: Point, tol: f64) -> Vec<f64> {
    let mut passes = Vec::new();
    let mut current: Option<f64> = None;
    for p in path {
        let d = p.distance(target);
        if d <= tol {
            current = Some(current.map_or(d, |c: f64| c.min(d)));
        } else if let Some(c) = current.take() {
            passes.push(c);
        }
    }
    passes.extend(current);
    passes
}

/// Labels of the named points the path visits, consecutive repeats collapsed.
fn visit_order(path: &[Point], names: &[(String, Point)], tol: f64) -> String {
    let mut out = String::new();
    let mut last: Option<&str> = None;
    for p in path {
        if let Some((label, _)) = names.iter().find(|(_, q)| p.distance(*q) <= tol) {
            if last != Some(label.as_str()) {
                out.push_str(label);
                last = Some(label.as_str());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dualizer::{dualize_curve, SamplingPlan};

    fn run(id: u32, p: Option<f64>) -> GoldenReport {
        let ex = make_example(id, p).unwrap();
        let result = dualize_curve(&ex.original, SamplingPlan::new(101, true)).unwrap();
        golden_check(&ex, &result)
    }

    #[test]
    fn listed_points_lie_on_expected_duals() {
        for id in 1..=5 {
            let ex = make_example(id, None).unwrap();
            for (label, q) in &ex.named_points {
                assert!(ex.dual_residual(*q) < 1e-9, "example {id} point {label}");
            }
        }
    }

    #[test]
    fn all_examples_pass() {
        for (id, p) in [(1, None), (2, Some(0.5)), (2, Some(2.0)), (3, Some(2.0)), (3, None), (4, None), (5, None)] {
            let report = run(id, p);
            assert!(report.passed(), "{report:#?}");
        }
    }

    #[test]
    fn example3_default_exponent() {
        let ex = make_example(3, None).unwrap();
        assert_eq!(ex.p, Some(4.0));
        assert!(ex.dual_residual(Point::new(1.0, 0.0)).abs() < 1e-15);
    }

    #[test]
    fn wrong_dual_fails() {
        let ex = make_example(2, Some(1.0)).unwrap();
        let other = make_example(2, Some(2.0)).unwrap();
        let result = dualize_curve(&other.original, SamplingPlan::uniform(51)).unwrap();
        assert!(!golden_check(&ex, &result).passed());
    }

    #[test]
    fn example5_path() {
        let report = run(5, None);
        let names: Vec<&str> = report.checks.iter().map(|c| c.name.as_str()).collect();
        assert!(names.contains(&"path_order_ABCDBE"));
        assert!(names.contains(&"crossing_at_B"));
    }

    #[test]
    fn unknown_example() {
        assert!(matches!(make_example(6, None), Err(Error::UnknownExample(6))));
    }
}
