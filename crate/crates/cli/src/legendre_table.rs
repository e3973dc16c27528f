//! Tables of `(m, t, u, v)` over a slope range.

use dualcurve::legendre::{bridge_to_dual, legendre_at, legendre_pnorm_closed_form, InvertibleArc};
use dualcurve::Error;
use serde::Serialize;

use crate::render::fmt_f64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LegendreRow {
    pub m: f64,
    pub t: f64,
    pub u: f64,
    pub v: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_closed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

/// `n` evenly spaced slopes over `[m_lo, m_hi]`. With `closed_form_p` the
/// p-norm closed form and its difference from the direct value are added.
pub fn legendre_table(
    ia: &InvertibleArc,
    (m_lo, m_hi): (f64, f64),
    n: usize,
    closed_form_p: Option<f64>,
) -> Result<Vec<LegendreRow>, Error> {
    let n = n.max(2);
    (0..n)
        .map(|i| {
            let m = if i == n - 1 {
                m_hi
            } else {
                m_lo + (m_hi - m_lo) * i as f64 / (n - 1) as f64
            };
            let lp = legendre_at(ia, m)?;
            let d = bridge_to_dual(lp)?;
            let t_closed = closed_form_p.map(|p| legendre_pnorm_closed_form(p, m)).transpose()?;
            Ok(LegendreRow {
                m,
                t: lp.t,
                u: d.x,
                v: d.y,
                t_closed,
                delta: t_closed.map(|c| (lp.t - c).abs()),
            })
        })
        .collect()
}

pub fn table_csv(rows: &[LegendreRow]) -> String {
    let closed = rows.first().is_some_and(|r| r.t_closed.is_some());
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut header = vec!["m", "t", "u", "v"];
    if closed {
        header.extend(["t_closed", "delta"]);
    }
    w.write_record(&header).expect("writing to memory");
    for r in rows {
        let mut rec = vec![fmt_f64(r.m), fmt_f64(r.t), fmt_f64(r.u), fmt_f64(r.v)];
        if let (Some(c), Some(d)) = (r.t_closed, r.delta) {
            rec.push(fmt_f64(c));
            rec.push(fmt_f64(d));
        }
        w.write_record(&rec).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_table_lies_on_circle() {
        let ia = InvertibleArc::pnorm(2.0, (-3.0, -0.1)).unwrap();
        let rows = legendre_table(&ia, (-3.0, -0.1), 30, Some(2.0)).unwrap();
        assert_eq!(rows.len(), 30);
        assert_eq!(rows[29].m, -0.1);
        for r in &rows {
            assert!((r.u * r.u + r.v * r.v - 1.0).abs() < 1e-9);
            assert!(r.delta.unwrap() < 1e-8);
        }
        let csv = table_csv(&rows);
        assert!(csv.starts_with("m,t,u,v,t_closed,delta\n"));
    }
}
