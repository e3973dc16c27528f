use dualcurve::corpus::make_example;
use dualcurve::curves::{
    make_family, scale_curve, tangent_line_at, Family, Piece, PiecewiseCurve, SmoothArc,
};
use dualcurve::dualizer::{
    dual_point_of_arc, dual_point_via_tangent, dual_second_derivative, dual_tangent_slope,
    dualize_corner, dualize_curve, fd_dual_second_derivative, fd_dual_slope, fd_step,
    radial_perpendicularity_check, reflexivity_roundtrip, scaling_covariance_check, DualKind,
    PieceSource, SamplingPlan,
};
use dualcurve::expr::Params;
use dualcurve::{Point, Slope};

fn corpus() -> Vec<PiecewiseCurve> {
    let mut curves: Vec<PiecewiseCurve> = [(1, None), (2, Some(0.5)), (2, Some(1.0)), (2, Some(2.0)), (3, Some(2.0)), (3, Some(4.0)), (4, None), (5, None)]
        .into_iter()
        .map(|(id, p)| make_example(id, p).unwrap().original)
        .collect();
    curves.push(make_family(&Family::SquareAxisAligned { s: 2.0 }).unwrap());
    curves.push(make_family(&Family::ParabolaNeg { p: 1.0, lo: -3.0, hi: 3.0 }).unwrap());
    curves
}

fn arcs() -> Vec<SmoothArc> {
    corpus()
        .iter()
        .flat_map(|c| c.pieces().to_vec())
        .filter_map(|p| match p {
            Piece::Arc(a) => Some(a),
            Piece::Segment(_) => None,
        })
        .collect()
}

fn interior(arc: &SmoothArc, n: usize) -> Vec<f64> {
    let (lo, hi) = arc.domain();
    (1..=n).map(|i| lo + (hi - lo) * i as f64 / (n + 1) as f64).collect()
}

fn upper() -> SmoothArc {
    SmoothArc::parse("-x^2/4 + 25/16", -2.5, 2.5, Params::new()).unwrap()
}

fn parabola_std() -> SmoothArc {
    SmoothArc::parse("x^2/(4*p)", -4.0, 4.0, Params::from([("p".to_string(), 1.0)])).unwrap()
}

#[test]
fn dual_point_matches_dual_of_tangent_line() {
    for arc in arcs() {
        for a in interior(&arc, 40) {
            let (Ok(direct), Ok(via)) = (dual_point_of_arc(&arc, a), dual_point_via_tangent(&arc, a)) else {
                continue;
            };
            assert!(direct.max_abs_diff(via) <= 1e-12 * direct.norm().max(1.0), "{arc} at {a}");
        }
    }
}

#[test]
fn dual_slope_matches_finite_difference() {
    for arc in arcs() {
        for a in interior(&arc, 30) {
            let Ok(Slope::Finite(m)) = dual_tangent_slope(&arc, a) else { continue };
            let h = fd_step(&arc, a, 1e-4);
            let Ok(fd) = fd_dual_slope(&arc, a, h) else { continue };
            assert!((m - fd).abs() <= 1e-5 * (1.0 + m.abs()), "{arc} at {a}: {m} vs {fd}");
        }
    }
}

#[test]
fn dual_curvature_matches_finite_difference_and_is_negative() {
    let params: Vec<(SmoothArc, Vec<f64>)> = vec![
        (upper(), (0..20).map(|i| -2.0 + 4.0 * i as f64 / 19.0).collect()),
        (
            parabola_std(),
            (0..20).map(|i| if i < 10 { -3.8 + 0.35 * i as f64 } else { 0.35 + 0.35 * (i - 10) as f64 }).collect(),
        ),
    ];
    for (arc, at) in params {
        for a in at {
            let exact = dual_second_derivative(&arc, a).unwrap();
            let fd = fd_dual_second_derivative(&arc, a, 1e-3).unwrap();
            assert!(exact < 0.0, "{arc} at {a}: {exact}");
            assert!(((exact - fd) / exact).abs() < 1e-4, "{arc} at {a}: {exact} vs {fd}");
        }
    }
}

#[test]
fn corner_segments_lie_on_corner_duals() {
    for c in corpus() {
        for j in c.joints() {
            let piece = dualize_corner(j).unwrap();
            for q in &piece.points {
                assert!((j.at.x * q.x + j.at.y * q.y - 1.0).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn sampled_pieces_keep_parameter_order() {
    for c in corpus() {
        let result = dualize_curve(&c, SamplingPlan::default()).unwrap();
        for piece in &result.pieces {
            let (PieceSource::Piece(i), DualKind::SampledArc) = (piece.source, piece.kind) else {
                continue;
            };
            let Piece::Arc(arc) = &c.pieces()[i] else { unreachable!() };
            let increasing = !arc.is_reversed();
            assert!(piece.params.windows(2).all(|w| (w[0] < w[1]) == increasing));
        }
    }
}

#[test]
fn reflexivity_on_corpus() {
    for c in corpus() {
        let dev = reflexivity_roundtrip(&c, SamplingPlan::default()).unwrap();
        assert!(dev < 1e-8, "{dev}");
    }
}

#[test]
fn scaling_covariance_on_corpus() {
    for c in corpus() {
        for factor in [0.5, 2.0, 3.0] {
            let dev = scaling_covariance_check(&c, factor, SamplingPlan::default()).unwrap();
            assert!(dev < 1e-10, "factor {factor}: {dev}");
        }
    }
}

#[test]
fn scaling_round_trip() {
    for c in corpus() {
        let back = scale_curve(&scale_curve(&c, 3.0).unwrap(), 1.0 / 3.0).unwrap();
        let a = c.sample_points(50).unwrap();
        let b = back.sample_points(50).unwrap();
        assert_eq!(a.len(), b.len());
        for (p, q) in a.iter().zip(&b) {
            assert!(p.max_abs_diff(*q) < 1e-10);
        }
    }
}

#[test]
fn radial_direction_is_perpendicular() {
    for arc in arcs() {
        for a in interior(&arc, 25) {
            let Ok(r) = radial_perpendicularity_check(&arc, a) else { continue };
            assert!(r.abs() < 1e-12, "{arc} at {a}: {r}");
        }
    }
}

#[test]
fn tangent_agrees_with_secant() {
    let h = 1e-5;
    for arc in arcs() {
        for a in interior(&arc, 20) {
            let Slope::Finite(m) = tangent_line_at(&arc, a).unwrap().slope() else {
                panic!("vertical tangent inside {arc}")
            };
            let secant = (arc.value(a + h).unwrap() - arc.value(a - h).unwrap()) / (2.0 * h);
            assert!((m - secant).abs() <= 1e-6 * (1.0 + m.abs()), "{arc} at {a}");
        }
    }
}

#[test]
fn diamond_and_circles_joint_counts() {
    let diamond = make_family(&Family::TaxicabDiamond).unwrap();
    assert_eq!(diamond.joints().len(), 4);
    for j in diamond.joints() {
        assert!((j.sweep.abs() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }
    for p in [1.5, 2.0, 3.0, 4.0] {
        assert!(make_family(&Family::PnormCircle { p }).unwrap().joints().is_empty());
    }
}

#[test]
fn example1_tangent_point_value() {
    let q = dual_point_of_arc(&upper(), 1.0).unwrap();
    assert!(q.max_abs_diff(Point::new(8.0 / 29.0, 16.0 / 29.0)) < 1e-12);
}
