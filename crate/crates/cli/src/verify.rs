//! Invariant and golden-value checks over one curve.

use dualcurve::corpus::{golden_check, CheckOutcome, GoldenExample};
use dualcurve::curves::{tangent_line_at, Piece, PiecewiseCurve, SmoothArc};
use dualcurve::dualizer::{
    dual_second_derivative, dual_tangent_slope, dualize_curve, fd_dual_second_derivative,
    fd_dual_slope, fd_step, radial_perpendicularity_check, reflexivity_roundtrip,
    scaling_covariance_check, DualKind, DualizationResult, PieceSource, SamplingPlan,
};
use dualcurve::geometry::{dual_by_inversion, dual_of_line};
use dualcurve::{Error, Line, Slope};
use serde::Serialize;

pub const REFLEXIVITY_TOL: f64 = 1e-8;
pub const INVERSION_TOL: f64 = 1e-10;
pub const DUAL_SLOPE_TOL: f64 = 1e-5;
pub const DUAL_CURVATURE_TOL: f64 = 1e-4;
pub const SCALING_TOL: f64 = 1e-10;
pub const RADIAL_TOL: f64 = 1e-12;
pub const SCALE_FACTORS: [f64; 3] = [0.5, 2.0, 3.0];
/// Arc parameters probed by the finite-difference checks.
const FD_PARAMS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: &'static str,
    pub measured: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn from_outcome(o: CheckOutcome) -> Check {
        Check {
            name: o.name,
            status: if o.passed { "pass" } else { "fail" },
            measured: o.measured,
            tolerance: o.tolerance,
            note: None,
        }
    }

    fn measured(name: &str, value: Result<f64, Error>, tolerance: f64) -> Check {
        match value {
            Ok(v) => Check::from_outcome(CheckOutcome::at_most(name, v, tolerance)),
            Err(e) => Check::failed(name, tolerance, &e),
        }
    }

    fn failed(name: &str, tolerance: f64, e: &Error) -> Check {
        Check {
            name: name.to_string(),
            status: "fail",
            measured: f64::INFINITY,
            tolerance,
            note: Some(format!("error[{}] {e}", e.code())),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub target: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl RunReport {
    pub fn new(target: impl Into<String>, checks: Vec<Check>) -> RunReport {
        RunReport {
            target: target.into(),
            passed: checks.iter().all(Check::passed),
            checks,
        }
    }

    /// Report for a curve that could not be built.
    pub fn invalid_curve(target: impl Into<String>, path: &str, e: &Error) -> RunReport {
        let mut check = Check::failed("curve_valid", 0.0, e);
        check.note = Some(format!("{path}: error[{}] {e}", e.code()));
        RunReport::new(target, vec![check])
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("target: {}\n", self.target);
        for c in &self.checks {
            s.push_str(&format!(
                "{:<4} {:<32} measured {:e}  tolerance {:e}",
                c.status, c.name, c.measured, c.tolerance
            ));
            if let Some(n) = &c.note {
                s.push_str("  ");
                s.push_str(n);
            }
            s.push('\n');
        }
        s.push_str(if self.passed { "all checks passed\n" } else { "some checks failed\n" });
        s
    }
}

fn arcs(curve: &PiecewiseCurve) -> impl Iterator<Item = &SmoothArc> {
    curve.pieces().iter().filter_map(|p| match p {
        Piece::Arc(a) => Some(a),
        Piece::Segment(_) => None,
    })
}

fn probe_params(arc: &SmoothArc) -> Vec<f64> {
    let (lo, hi) = arc.domain();
    (0..FD_PARAMS)
        .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / FD_PARAMS as f64)
        .collect()
}

/// Every tangent or supporting line the dualization used.
fn used_lines(curve: &PiecewiseCurve, result: &DualizationResult) -> Result<Vec<Line>, Error> {
    let mut lines = Vec::new();
    for piece in &result.pieces {
        match (piece.source, piece.kind) {
            (PieceSource::Piece(i), DualKind::SampledArc) => {
                if let Piece::Arc(arc) = &curve.pieces()[i] {
                    for &a in &piece.params {
                        lines.push(tangent_line_at(arc, a)?);
                    }
                }
            }
            (PieceSource::Piece(i), _) => {
                if let Piece::Segment(s) = &curve.pieces()[i] {
                    lines.push(s.carrier());
                }
            }
            (PieceSource::Joint(k), _) => {
                let (first, last) = curve.joints()[k].extreme_lines();
                lines.push(first);
                lines.push(last);
            }
        }
    }
    Ok(lines)
}

fn inversion_deviation(lines: &[Line]) -> Result<f64, Error> {
    let mut worst: f64 = 0.0;
    for l in lines {
        let direct = dual_of_line(l)?;
        let inverted = dual_by_inversion(l)?;
        worst = worst.max(direct.max_abs_diff(inverted) / direct.norm().max(1.0));
    }
    Ok(worst)
}

fn dual_slope_deviation(curve: &PiecewiseCurve) -> f64 {
    let mut worst: f64 = 0.0;
    for arc in arcs(curve) {
        for a in probe_params(arc) {
            let Ok(Slope::Finite(m)) = dual_tangent_slope(arc, a) else { continue };
            let Ok(fd) = fd_dual_slope(arc, a, fd_step(arc, a, 1e-4)) else { continue };
            worst = worst.max((m - fd).abs() / (1.0 + m.abs()));
        }
    }
    worst
}

fn dual_curvature_deviation(curve: &PiecewiseCurve) -> f64 {
    let mut worst: f64 = 0.0;
    for arc in arcs(curve) {
        for a in probe_params(arc) {
            let Ok(exact) = dual_second_derivative(arc, a) else { continue };
            let Ok(fd) = fd_dual_second_derivative(arc, a, fd_step(arc, a, 1e-3)) else { continue };
            worst = worst.max(((exact - fd) / exact).abs());
        }
    }
    worst
}

fn radial_deviation(curve: &PiecewiseCurve, result: &DualizationResult) -> Result<f64, Error> {
    let mut worst: f64 = 0.0;
    for piece in &result.pieces {
        let (PieceSource::Piece(i), DualKind::SampledArc) = (piece.source, piece.kind) else {
            continue;
        };
        let Piece::Arc(arc) = &curve.pieces()[i] else { continue };
        for (&a, q) in piece.params.iter().zip(&piece.points) {
            let r = radial_perpendicularity_check(arc, a)?;
            worst = worst.max(r.abs() / q.norm().max(1.0));
        }
    }
    Ok(worst)
}

/// Runs every check on `curve`. `tol` replaces the tolerance of the generic
/// invariant checks; golden checks keep their own.
pub fn run_checks(
    target: &str,
    curve: &PiecewiseCurve,
    plan: SamplingPlan,
    golden: Option<&GoldenExample>,
    tol: Option<f64>,
) -> Result<RunReport, Error> {
    let result = dualize_curve(curve, plan)?;
    let t = |default: f64| tol.unwrap_or(default);
    let mut checks = vec![
        Check::measured("reflexivity", reflexivity_roundtrip(curve, plan), t(REFLEXIVITY_TOL)),
        Check::measured(
            "inversion_equals_duality",
            used_lines(curve, &result).and_then(|l| inversion_deviation(&l)),
            t(INVERSION_TOL),
        ),
        Check::measured("dual_slope_finite_difference", Ok(dual_slope_deviation(curve)), t(DUAL_SLOPE_TOL)),
        Check::measured(
            "dual_curvature_finite_difference",
            Ok(dual_curvature_deviation(curve)),
            t(DUAL_CURVATURE_TOL),
        ),
    ];
    for factor in SCALE_FACTORS {
        checks.push(Check::measured(
            &format!("scaling_covariance_{factor}"),
            scaling_covariance_check(curve, factor, plan),
            t(SCALING_TOL),
        ));
    }
    checks.push(Check::measured(
        "radial_perpendicularity",
        radial_deviation(curve, &result),
        t(RADIAL_TOL),
    ));
    if let Some(ex) = golden {
        for o in golden_check(ex, &result).checks {
            let mut c = Check::from_outcome(o);
            c.name = format!("golden.{}", c.name);
            checks.push(c);
        }
    }
    Ok(RunReport::new(target, checks))
}
