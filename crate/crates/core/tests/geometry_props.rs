use dualcurve::geometry::{
    angle_tangent_between, dual_by_inversion, dual_of_line, dual_of_point, intersect_lines,
    invert_in_unit_circle, parallel_dual_carrier, perpendicular_through_origin, AngleMeasure,
};
use dualcurve::{Line, Point};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn coord() -> impl Strategy<Value = f64> {
    -50.0f64..50.0
}

fn point_off_origin() -> impl Strategy<Value = Point> {
    (coord(), coord())
        .prop_filter("away from the origin", |&(x, y)| x.hypot(y) > 1e-3)
        .prop_map(|(x, y)| Point::new(x, y))
}

/// Lines `a·x + b·y = c` whose distance from the origin is at least 1e-2.
fn dualizable_line() -> impl Strategy<Value = Line> {
    (coord(), coord(), coord())
        .prop_filter("dualizable", |&(a, b, c)| {
            let n = a.hypot(b);
            n > 1e-3 && c.abs() / n > 1e-2
        })
        .prop_map(|(a, b, c)| Line::new(a, b, c).unwrap())
}

fn finite_angle(t: AngleMeasure) -> f64 {
    match t {
        AngleMeasure::Tan(v) => v,
        AngleMeasure::Right => f64::INFINITY,
    }
}

proptest! {
    #[test]
    fn point_reflexivity(p in point_off_origin()) {
        let back = dual_of_line(&dual_of_point(p).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(p) <= 1e-12 * p.norm().max(1.0));
    }

    #[test]
    fn line_reflexivity(l in dualizable_line()) {
        let back = dual_of_point(dual_of_line(&l).unwrap()).unwrap();
        prop_assert!(back.max_coeff_diff(&l) <= 1e-12, "{l:?} -> {back:?}");
    }

    #[test]
    fn dual_lines_meet_at_dual_point(l in dualizable_line(), s in -20.0f64..20.0, t in -20.0f64..20.0) {
        prop_assume!((s - t).abs() > 1e-2);
        let d = l.direction();
        let foot = dualcurve::geometry::foot_of_perpendicular(&l).unwrap();
        let p1 = foot + d * s;
        let p2 = foot + d * t;
        let meet = intersect_lines(&dual_of_point(p1).unwrap(), &dual_of_point(p2).unwrap()).unwrap();
        let expected = dual_of_line(&l).unwrap();
        prop_assert!(meet.max_abs_diff(expected) <= 1e-10 * expected.norm().max(1.0));
    }

    #[test]
    fn incidence_both_ways(l in dualizable_line(), s in -20.0f64..20.0) {
        let p = dualcurve::geometry::foot_of_perpendicular(&l).unwrap() + l.direction() * s;
        prop_assume!(p.norm() > 1e-3);
        prop_assert!(l.residual(p).abs() < 1e-12 * p.norm().max(1.0));
        let dl = dual_of_point(p).unwrap();
        let q = dual_of_line(&l).unwrap();
        prop_assert!(dl.residual(q).abs() < 1e-12 * q.norm().max(1.0));
    }

    #[test]
    fn parallel_duals_share_carrier(m in -30.0f64..30.0, c1 in 0.1f64..10.0, c2 in -10.0f64..-0.1) {
        let l1 = Line::from_slope_intercept(m, c1).unwrap();
        let l2 = Line::from_slope_intercept(m, c2).unwrap();
        let carrier = parallel_dual_carrier(l1.slope());
        for l in [l1, l2] {
            let q = dual_of_line(&l).unwrap();
            prop_assert!(carrier.residual(q).abs() < 1e-12 * q.norm().max(1.0));
        }
    }

    #[test]
    fn angle_transfers_to_perpendiculars(m1 in -20.0f64..20.0, m2 in -20.0f64..20.0, b1 in 0.5f64..5.0, b2 in 0.5f64..5.0) {
        prop_assume!(m1.abs() > 1e-3 && m2.abs() > 1e-3);
        let l1 = Line::from_slope_intercept(m1, b1).unwrap();
        let l2 = Line::from_slope_intercept(m2, -b2).unwrap();
        let direct = finite_angle(angle_tangent_between(&l1, &l2)).abs();
        let perp = finite_angle(angle_tangent_between(
            &perpendicular_through_origin(&l1),
            &perpendicular_through_origin(&l2),
        )).abs();
        if direct.is_finite() || perp.is_finite() {
            prop_assert!((direct - perp).abs() <= 1e-12 * direct.max(1.0), "{direct} vs {perp}");
        }
    }

    #[test]
    fn inversion_is_an_involution(p in point_off_origin()) {
        let twice = invert_in_unit_circle(invert_in_unit_circle(p).unwrap()).unwrap();
        prop_assert!(twice.max_abs_diff(p) <= 1e-13 * p.norm().max(1.0));
    }
}

#[test]
fn inversion_agrees_with_duality_on_seeded_lines() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst_diff: f64 = 0.0;
    let mut worst_product: f64 = 0.0;
    let mut n = 0;
    while n < 1000 {
        let (a, b, c) = (
            rng.gen_range(-10.0..10.0),
            rng.gen_range(-10.0..10.0),
            rng.gen_range(-10.0..10.0),
        );
        let Ok(l) = Line::new(a, b, c) else { continue };
        if !l.is_dualizable() {
            continue;
        }
        let direct = dual_of_line(&l).unwrap();
        let inverted = dual_by_inversion(&l).unwrap();
        worst_diff = worst_diff.max(direct.max_abs_diff(inverted) / direct.norm().max(1.0));
        let foot = dualcurve::geometry::foot_of_perpendicular(&l).unwrap();
        worst_product = worst_product.max((foot.norm_sq() * inverted.norm_sq() - 1.0).abs());
        n += 1;
    }
    assert!(worst_diff < 1e-10, "{worst_diff}");
    assert!(worst_product < 1e-10, "{worst_product}");
}

#[test]
fn seeded_incidence_on_point_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let p1 = Point::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let p2 = Point::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let Ok(l) = Line::through_points(p1, p2) else { continue };
        if !l.is_dualizable() || p1.distance(p2) < 1e-3 {
            continue;
        }
        let (Ok(d1), Ok(d2)) = (dual_of_point(p1), dual_of_point(p2)) else { continue };
        let meet = intersect_lines(&d1, &d2).unwrap();
        let q = dual_of_line(&l).unwrap();
        worst = worst.max(meet.max_abs_diff(q) / q.norm().max(1.0));
    }
    assert!(worst < 1e-10, "{worst}");
}
