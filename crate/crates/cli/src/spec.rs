//! Curve-spec documents.
//!
//! ```json
//! {
//!   "params": { "p": 1.0 },
//!   "closed": false,
//!   "sampling": { "n": 201, "refine": true },
//!   "pieces": [
//!     { "type": "expr", "expr": "x^2/(4*p)", "domain": [-4, 4] },
//!     { "type": "segment", "from": [4, 4], "to": [5, 3] },
//!     { "type": "taxicab_diamond" }
//!   ]
//! }
//! ```
//!
//! A piece whose `type` is a family name expands into that family's pieces.
//! `closed` defaults to the family's own closedness when the document is a
//! single family piece, and to `false` otherwise.

use std::fmt;

use dualcurve::curves::{
    build_piecewise_curve, make_family, Family, LinearSegment, Piece, PiecewiseCurve, SmoothArc,
    FAMILY_NAMES,
};
use dualcurve::dualizer::SamplingPlan;
use dualcurve::expr::{parse_expression, Params};
use dualcurve::{Error, Point};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    pieces: Vec<PieceSpec>,
    #[serde(default)]
    closed: Option<bool>,
    #[serde(default)]
    params: Params,
    #[serde(default)]
    sampling: Option<SamplingSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SamplingSpec {
    n: Option<usize>,
    refine: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PieceSpec {
    #[serde(rename = "type")]
    kind: String,
    expr: Option<String>,
    domain: Option<[f64; 2]>,
    #[serde(default)]
    reversed: bool,
    #[serde(default)]
    inflectional: bool,
    from: Option<[f64; 2]>,
    to: Option<[f64; 2]>,
    #[serde(default)]
    params: Params,
}

/// A curve-spec document that failed to load.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecError {
    /// Malformed document text.
    Syntax { line: usize, column: usize, message: String },
    /// Well-formed text with a bad field, located by a path like `pieces[1].expr`.
    Field { path: String, message: String },
    /// The pieces are valid text but do not form a valid curve.
    Curve { path: String, error: Error },
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecError::Syntax { line, column, message } => {
                write!(f, "line {line}, column {column}: {message}")
            }
            SpecError::Field { path, message } => write!(f, "{path}: {message}"),
            SpecError::Curve { path, error } => write!(f, "{path}: error[{}] {error}", error.code()),
        }
    }
}

impl std::error::Error for SpecError {}

#[derive(Debug, Clone)]
pub struct CurveSpec {
    pub curve: PiecewiseCurve,
    pub plan: SamplingPlan,
}

fn field(path: String, message: impl Into<String>) -> SpecError {
    SpecError::Field {
        path,
        message: message.into(),
    }
}

pub fn parse_curve_spec(text: &str) -> Result<CurveSpec, SpecError> {
    let doc: Document = serde_json::from_str(text).map_err(|e| SpecError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if doc.pieces.is_empty() {
        return Err(field("pieces".into(), "at least one piece is required"));
    }

    let mut pieces = Vec::new();
    let mut family_closed = None;
    for (i, spec) in doc.pieces.iter().enumerate() {
        let path = format!("pieces[{i}]");
        let mut params = doc.params.clone();
        params.extend(spec.params.clone());
        match spec.kind.as_str() {
            "expr" => pieces.push(Piece::Arc(arc_piece(spec, params, &path)?)),
            "segment" => {
                let (Some(from), Some(to)) = (spec.from, spec.to) else {
                    return Err(field(path, "segment needs `from` and `to`"));
                };
                let seg = LinearSegment::new(Point::new(from[0], from[1]), Point::new(to[0], to[1]))
                    .map_err(|error| SpecError::Curve { path, error })?;
                pieces.push(Piece::Segment(seg));
            }
            name if FAMILY_NAMES.contains(&name) => {
                let family = Family::from_name(name, &params)
                    .map_err(|error| SpecError::Curve { path: path.clone(), error })?;
                let curve = make_family(&family).map_err(|error| SpecError::Curve { path, error })?;
                family_closed = Some(curve.is_closed());
                pieces.extend(curve.pieces().iter().cloned());
            }
            other => {
                return Err(field(
                    format!("{path}.type"),
                    format!(
                        "unknown piece type `{other}`; expected `expr`, `segment` or one of {}",
                        FAMILY_NAMES.join(", ")
                    ),
                ))
            }
        }
    }

    let closed = doc.closed.unwrap_or(match (doc.pieces.len(), family_closed) {
        (1, Some(c)) => c,
        _ => false,
    });
    let curve = build_piecewise_curve(pieces, closed).map_err(|error| SpecError::Curve {
        path: "pieces".into(),
        error,
    })?;

    let default = SamplingPlan::default();
    let plan = match doc.sampling {
        Some(s) => SamplingPlan::new(s.n.unwrap_or(default.samples), s.refine.unwrap_or(default.refine)),
        None => default,
    };
    if plan.samples < 2 {
        return Err(field("sampling.n".into(), "need at least 2 samples"));
    }
    Ok(CurveSpec { curve, plan })
}

fn arc_piece(spec: &PieceSpec, params: Params, path: &str) -> Result<SmoothArc, SpecError> {
    let Some(src) = &spec.expr else {
        return Err(field(path.to_string(), "expr piece needs `expr`"));
    };
    let Some([lo, hi]) = spec.domain else {
        return Err(field(path.to_string(), "expr piece needs `domain`"));
    };
    let expr = parse_expression(src).map_err(|e| field(format!("{path}.expr"), e.to_string()))?;
    let built = if spec.inflectional {
        SmoothArc::new_inflectional(expr, lo, hi, params)
    } else {
        SmoothArc::new(expr, lo, hi, params)
    };
    let arc = built.map_err(|error| SpecError::Curve {
        path: path.to_string(),
        error,
    })?;
    Ok(if spec.reversed { arc.reversed() } else { arc })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_piece_inherits_closedness() {
        let spec = parse_curve_spec(r#"{"pieces": [{"type": "taxicab_diamond"}]}"#).unwrap();
        assert!(spec.curve.is_closed());
        assert_eq!(spec.curve.joints().len(), 4);
        assert_eq!(spec.plan, SamplingPlan::default());
    }

    #[test]
    fn params_reach_expressions() {
        let spec = parse_curve_spec(
            r#"{"params": {"p": 2}, "sampling": {"n": 11, "refine": false},
                "pieces": [{"type": "expr", "expr": "x^2/(4*p)", "domain": [-1, 1]}]}"#,
        )
        .unwrap();
        let Piece::Arc(arc) = &spec.curve.pieces()[0] else { panic!() };
        assert_eq!(arc.value(1.0).unwrap(), 0.125);
        assert_eq!(spec.plan, SamplingPlan::new(11, false));
    }

    #[test]
    fn positioned_errors() {
        let err = parse_curve_spec("{\"pieces\": [\n  {\"type\": \"expr\",}]}").unwrap_err();
        assert!(matches!(err, SpecError::Syntax { line: 2, .. }), "{err}");

        let err = parse_curve_spec(r#"{"pieces": [{"type": "expr", "expr": "x^^2", "domain": [0, 1]}]}"#)
            .unwrap_err();
        assert_eq!(err.to_string(), "pieces[0].expr: at byte 2: expected an expression, found `^`");

        let err = parse_curve_spec(r#"{"pieces": [{"type": "spiral"}]}"#).unwrap_err();
        assert!(err.to_string().starts_with("pieces[0].type: unknown piece type `spiral`"));
    }

    #[test]
    fn linear_arc_is_a_curve_error() {
        let err = parse_curve_spec(r#"{"pieces": [{"type": "expr", "expr": "2*x + 1", "domain": [0, 1]}]}"#)
            .unwrap_err();
        match err {
            SpecError::Curve { path, error } => {
                assert_eq!(path, "pieces[0]");
                assert_eq!(error.code(), "LinearPortion");
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn gaps_between_pieces_are_rejected() {
        let err = parse_curve_spec(
            r#"{"pieces": [{"type": "segment", "from": [1, 0], "to": [0, 1]},
                           {"type": "segment", "from": [0, 2], "to": [-1, 0]}]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("DiscontinuousCurve"), "{err}");
    }
}
