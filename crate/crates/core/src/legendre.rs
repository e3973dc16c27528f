//! Slope/intercept coordinates of tangent lines.
//!
//! The tangent `y = m·x − t` at `(a, y(a))` has `m = y'(a)` and
//! `t(m) = m·a − y(a)` with `a = y'^{-1}(m)`. The negated intercept makes the
//! transform an involution. Dual-curve coordinates follow from
//! `u = m/t`, `v = −1/t`.

use std::fmt;
use std::sync::Arc;

use crate::curves::{pnorm_quadrant_arc, SmoothArc};
use crate::error::{Error, Result};
use crate::geometry::{Point, ORIGIN_TOL};

/// Number of spot checks of `y'(y'^{-1}(m)) = m` at construction.
const INVERSE_CHECKS: usize = 20;
const INVERSE_TOL: f64 = 1e-9;
/// Interior samples used to confirm `y''` keeps one sign.
const CONVEXITY_SAMPLES: usize = 64;
const BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegendrePoint {
    pub m: f64,
    pub t: f64,
}

#[derive(Clone)]
enum SlopeInverse {
    Analytic(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    Bisection,
}

/// An arc together with the inverse of its derivative over a slope range.
#[derive(Clone)]
pub struct InvertibleArc {
    arc: SmoothArc,
    inverse: SlopeInverse,
    slope_range: (f64, f64),
}

impl fmt::Debug for InvertibleArc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InvertibleArc")
            .field("arc", &self.arc)
            .field(
                "inverse",
                &match self.inverse {
                    SlopeInverse::Analytic(_) => "analytic",
                    SlopeInverse::Bisection => "bisection",
                },
            )
            .field("slope_range", &self.slope_range)
            .finish()
    }
}

impl InvertibleArc {
    /// Uses the supplied `y'^{-1}`, spot-checked across the slope range.
    pub fn analytic<F>(arc: SmoothArc, inverse: F, slope_range: (f64, f64)) -> Result<InvertibleArc>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let ia = InvertibleArc {
            arc,
            inverse: SlopeInverse::Analytic(Arc::new(inverse)),
            slope_range: check_range(slope_range)?,
        };
        ia.spot_check()?;
        Ok(ia)
    }

    /// Inverts `y'` numerically. The arc must have one-signed `y''`. Without an
    /// explicit range the endpoint slopes are used.
    pub fn bisection(arc: SmoothArc, slope_range: Option<(f64, f64)>) -> Result<InvertibleArc> {
        let (lo, hi) = arc.domain();
        let mut sign = 0.0;
        for i in 1..=CONVEXITY_SAMPLES {
            let x = lo + (hi - lo) * i as f64 / (CONVEXITY_SAMPLES + 1) as f64;
            let d2 = arc.jet(x)?.d2;
            if !(d2.abs() > 0.0) || (sign != 0.0 && d2.signum() != sign) {
                return Err(Error::NonInvertibleDerivative(format!(
                    "y'' changes sign or vanishes near x = {x}"
                )));
            }
            sign = d2.signum();
        }
        let range = match slope_range {
            Some(r) => r,
            None => {
                let s0 = arc.jet_raw(lo)?.d1;
                let s1 = arc.jet_raw(hi)?.d1;
                if !(s0.is_finite() && s1.is_finite()) {
                    return Err(Error::NonInvertibleDerivative(
                        "endpoint slope is unbounded; give a slope range".into(),
                    ));
                }
                (s0.min(s1), s0.max(s1))
            }
        };
        let ia = InvertibleArc {
            arc,
            inverse: SlopeInverse::Bisection,
            slope_range: check_range(range)?,
        };
        ia.spot_check()?;
        Ok(ia)
    }

    /// First-quadrant arc of `|x|^p + |y|^p = 1` with its closed-form
    /// derivative inverse. Slopes must be negative.
    pub fn pnorm(p: f64, slope_range: (f64, f64)) -> Result<InvertibleArc> {
        if !(p > 1.0) {
            return Err(Error::InvalidExponent(p));
        }
        if !(slope_range.1 < 0.0) {
            return Err(Error::InvalidSlope(slope_range.1));
        }
        let arc = pnorm_quadrant_arc(p)?;
        InvertibleArc::analytic(
            arc,
            move |m| {
                let s = -m;
                s.powf(1.0 / (p - 1.0)) / (1.0 + s.powf(p / (p - 1.0))).powf(1.0 / p)
            },
            slope_range,
        )
    }

    pub fn arc(&self) -> &SmoothArc {
        &self.arc
    }

    pub fn slope_range(&self) -> (f64, f64) {
        self.slope_range
    }

    fn spot_check(&self) -> Result<()> {
        let (lo, hi) = self.slope_range;
        for i in 0..INVERSE_CHECKS {
            let m = lo + (hi - lo) * i as f64 / (INVERSE_CHECKS - 1) as f64;
            let a = self.inverse_derivative(m)?;
            let slope = self.arc.jet_raw(a)?.d1;
            if !((slope - m).abs() <= INVERSE_TOL * m.abs().max(1.0)) {
                return Err(Error::NonInvertibleDerivative(format!(
                    "y'(y'^-1({m})) = {slope}"
                )));
            }
        }
        Ok(())
    }

    /// `a` with `y'(a) = m`.
    pub fn inverse_derivative(&self, m: f64) -> Result<f64> {
        let (lo, hi) = self.slope_range;
        let slack = 1e-12 * m.abs().max(1.0);
        if !(m >= lo - slack && m <= hi + slack) {
            return Err(Error::SlopeOutOfRange(m));
        }
        let a = match &self.inverse {
            SlopeInverse::Analytic(f) => f(m),
            SlopeInverse::Bisection => {
                let (x_lo, x_hi) = self.arc.domain();
                bisect(|x| Ok(self.arc.jet_raw(x)?.d1 - m), x_lo, x_hi)?
                    .ok_or(Error::SlopeOutOfRange(m))?
            }
        };
        if !self.arc.contains_param(a) {
            return Err(Error::SlopeOutOfRange(m));
        }
        Ok(a)
    }
}

fn check_range((lo, hi): (f64, f64)) -> Result<(f64, f64)> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParam(format!("invalid slope range [{lo}, {hi}]")));
    }
    Ok((lo, hi))
}

/// Root of a monotone `f` on `[lo, hi]`, or `None` if it is not bracketed.
fn bisect(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<Option<f64>> {
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(Some(lo));
    }
    if f_hi == 0.0 {
        return Ok(Some(hi));
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Ok(None);
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(Some(mid));
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// `(m, m·a − y(a))` with `a = y'^{-1}(m)`.
pub fn legendre_at(ia: &InvertibleArc, m: f64) -> Result<LegendrePoint> {
    let a = ia.inverse_derivative(m)?;
    let y = ia.arc.value(a)?;
    Ok(LegendrePoint { m, t: m * a - y })
}

/// Closed-form transform of the first-quadrant p-norm arc:
/// `t(m) = −(1 + (−m)^q)^{1/q}` with `q = p/(p − 1)`.
pub fn legendre_pnorm_closed_form(p: f64, m: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    if !(m < 0.0) {
        return Err(Error::InvalidSlope(m));
    }
    let q = p / (p - 1.0);
    Ok(-(1.0 + (-m).powf(q)).powf(1.0 / q))
}

/// Dual point `(m/t, −1/t)` of the tangent `y = m·x − t`.
pub fn bridge_to_dual(lp: LegendrePoint) -> Result<Point> {
    if lp.t.abs() / lp.m.abs().max(1.0) < ORIGIN_TOL {
        return Err(Error::ZeroIntercept);
    }
    Ok(Point::new(lp.m / lp.t, -1.0 / lp.t))
}

/// Applies the transform twice and returns the largest deviation from `y`.
///
/// The second application differentiates `t(m)` by central differences and
/// inverts `t'` by bisection.
pub fn involution_check(ia: &InvertibleArc, n_samples: usize) -> Result<f64> {
    let (m_lo, m_hi) = ia.slope_range;
    let t = |m: f64| legendre_at(ia, m).map(|lp| lp.t);
    let step = |m: f64| 1e-6 * (1.0 + m.abs());
    let t_prime = |m: f64| -> Result<f64> {
        let h = step(m);
        Ok((t(m + h)? - t(m - h)?) / (2.0 * h))
    };
    let inner_lo = m_lo + 2.0 * step(m_lo);
    let inner_hi = m_hi - 2.0 * step(m_hi);

    let x_a = ia.inverse_derivative(inner_lo)?;
    let x_b = ia.inverse_derivative(inner_hi)?;
    let n = n_samples.max(2);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let x = x_a + (x_b - x_a) * (0.05 + 0.9 * i as f64 / (n - 1) as f64);
        let m = bisect(|m| Ok(t_prime(m)? - x), inner_lo, inner_hi)?.ok_or_else(|| {
            Error::NonInvertibleDerivative(format!("t'(m) = {x} is not bracketed"))
        })?;
        let back = x * m - t(m)?;
        worst = worst.max((back - ia.arc.value(x)?).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dualizer::dual_point_of_arc;
    use crate::expr::Params;

    fn half_square() -> InvertibleArc {
        let arc = SmoothArc::parse("x^2/2", -3.0, 3.0, Params::new()).unwrap();
        InvertibleArc::analytic(arc, |m| m, (-2.0, 2.0)).unwrap()
    }

    fn unit_circle() -> InvertibleArc {
        InvertibleArc::pnorm(2.0, (-3.0, -0.1)).unwrap()
    }

    #[test]
    fn circle_tangent_with_slope_minus_one() {
        let lp = legendre_at(&unit_circle(), -1.0).unwrap();
        assert!((lp.t + 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn half_square_is_self_conjugate() {
        let ia = half_square();
        for m in [-2.0, -0.5, 0.0, 1.25, 2.0] {
            assert!((legendre_at(&ia, m).unwrap().t - m * m / 2.0).abs() < 1e-15);
        }
        assert_eq!(legendre_at(&ia, 2.5), Err(Error::SlopeOutOfRange(2.5)));
    }

    #[test]
    fn closed_form() {
        assert!((legendre_pnorm_closed_form(2.0, -1.0).unwrap() + 2f64.sqrt()).abs() < 1e-15);
        assert!((legendre_pnorm_closed_form(2.0, -1e-12).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(legendre_pnorm_closed_form(1.0, -1.0), Err(Error::InvalidExponent(1.0)));
        assert_eq!(legendre_pnorm_closed_form(2.0, 0.0), Err(Error::InvalidSlope(0.0)));
    }

    #[test]
    fn bridge() {
        let p = bridge_to_dual(LegendrePoint { m: -1.0, t: -2f64.sqrt() }).unwrap();
        assert!(p.max_abs_diff(Point::new(0.5f64.sqrt(), 0.5f64.sqrt())) < 1e-15);
        assert_eq!(bridge_to_dual(LegendrePoint { m: 1.0, t: 1.0 }).unwrap(), Point::new(1.0, -1.0));
        assert_eq!(bridge_to_dual(LegendrePoint { m: 3.0, t: 0.0 }), Err(Error::ZeroIntercept));
    }

    #[test]
    fn bridge_matches_dual_point() {
        let ia = unit_circle();
        for k in 0..25 {
            let m = -3.0 + 2.9 * k as f64 / 24.0;
            let via_bridge = bridge_to_dual(legendre_at(&ia, m).unwrap()).unwrap();
            let a = ia.inverse_derivative(m).unwrap();
            let direct = dual_point_of_arc(ia.arc(), a).unwrap();
            assert!(via_bridge.max_abs_diff(direct) < 1e-12);
        }
    }

    #[test]
    fn bisection_inverse_agrees_with_analytic() {
        let arc = pnorm_quadrant_arc(3.0).unwrap();
        let numeric = InvertibleArc::bisection(arc, Some((-4.0, -0.2))).unwrap();
        let exact = InvertibleArc::pnorm(3.0, (-4.0, -0.2)).unwrap();
        for m in [-4.0, -2.0, -1.0, -0.2] {
            let a = numeric.inverse_derivative(m).unwrap();
            let b = exact.inverse_derivative(m).unwrap();
            assert!((a - b).abs() < 1e-13, "{m}: {a} vs {b}");
        }
    }

    #[test]
    fn inflected_arc_is_not_invertible() {
        let arc = SmoothArc::new_inflectional(
            crate::expr::parse_expression("x^3").unwrap(),
            -1.0,
            1.0,
            Params::new(),
        )
        .unwrap();
        assert!(matches!(
            InvertibleArc::bisection(arc, None),
            Err(Error::NonInvertibleDerivative(_))
        ));
    }

    #[test]
    fn wrong_inverse_is_rejected() {
        let arc = SmoothArc::parse("x^2/2", -3.0, 3.0, Params::new()).unwrap();
        assert!(matches!(
            InvertibleArc::analytic(arc, |m| 2.0 * m, (-1.0, 1.0)),
            Err(Error::NonInvertibleDerivative(_))
        ));
    }

    #[test]
    fn involutions() {
        assert!(involution_check(&half_square(), 50).unwrap() < 1e-8);
        assert!(involution_check(&unit_circle(), 50).unwrap() < 1e-6);
        let p3 = InvertibleArc::pnorm(3.0, (-4.0, -0.2)).unwrap();
        assert!(involution_check(&p3, 50).unwrap() < 1e-6);
    }
}
