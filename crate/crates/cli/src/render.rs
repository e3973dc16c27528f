//! CSV, JSON and SVG output.

use std::fmt::Write as _;

use dualcurve::curves::PiecewiseCurve;
use dualcurve::dualizer::DualizationResult;
use dualcurve::Point;

/// Shortest text that parses back to exactly `v`; exponent form for very
/// large or small magnitudes.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !a.is_finite() {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

pub const CSV_HEADER: [&str; 6] = ["piece_index", "kind", "point_index", "x", "y", "gap_flag"];

/// One row per dual point. `gap_flag` is 1 when an excluded parameter lies
/// between this point and the previous one.
pub fn to_csv(result: &DualizationResult) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("writing to memory");
    for (k, piece) in result.pieces.iter().enumerate() {
        for (i, p) in piece.points.iter().enumerate() {
            let gap = if piece.breaks.contains(&i) { "1" } else { "0" };
            w.write_record([
                k.to_string().as_str(),
                piece.kind.as_str(),
                i.to_string().as_str(),
                fmt_f64(p.x).as_str(),
                fmt_f64(p.y).as_str(),
                gap,
            ])
            .expect("writing to memory");
        }
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}

pub fn to_structured<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Default)]
pub struct SvgOptions {
    pub title: String,
    pub show_original: bool,
    pub show_dual: bool,
    pub labels: Vec<(String, Point)>,
}

/// Samples per arc when drawing the original curve.
const ORIGINAL_SAMPLES: usize = 201;
/// Dual points farther than this multiple of the original's extent do not
/// widen the view.
const VIEW_LIMIT: f64 = 4.0;
const MARGIN: f64 = 0.1;
const PIXEL_WIDTH: f64 = 600.0;

#[derive(Debug, Clone, Copy)]
struct Rect {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
}

impl Rect {
    fn empty() -> Rect {
        Rect {
            x0: f64::INFINITY,
            y0: f64::INFINITY,
            x1: f64::NEG_INFINITY,
            y1: f64::NEG_INFINITY,
        }
    }

    fn add(&mut self, p: Point) {
        self.x0 = self.x0.min(p.x);
        self.y0 = self.y0.min(p.y);
        self.x1 = self.x1.max(p.x);
        self.y1 = self.y1.max(p.y);
    }

    fn is_empty(&self) -> bool {
        !(self.x0 <= self.x1 && self.y0 <= self.y1)
    }

    fn contains(&self, p: Point) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    /// Point where the segment from `inside` toward `outside` leaves the box.
    fn exit_point(&self, inside: Point, outside: Point) -> Point {
        let d = outside - inside;
        let mut t: f64 = 1.0;
        for (v, dv, lo, hi) in [
            (inside.x, d.x, self.x0, self.x1),
            (inside.y, d.y, self.y0, self.y1),
        ] {
            if dv > 0.0 {
                t = t.min((hi - v) / dv);
            } else if dv < 0.0 {
                t = t.min((lo - v) / dv);
            }
        }
        inside + d * t.max(0.0)
    }
}

fn fmt_points(points: &[Point]) -> String {
    let mut s = String::new();
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{},{}", fmt_f64(p.x), fmt_f64(p.y));
    }
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Splits a run at the view boundary. Returns the visible pieces and the
/// boundary points where the run leaves or re-enters the view, each paired
/// with the nearest visible sample.
fn clip_run(run: &[Point], view: &Rect) -> (Vec<Vec<Point>>, Vec<(Point, Point)>) {
    let mut visible = Vec::new();
    let mut crossings = Vec::new();
    let mut current: Vec<Point> = Vec::new();
    for (i, &p) in run.iter().enumerate() {
        let inside = view.contains(p);
        if inside {
            if current.is_empty() && i > 0 {
                crossings.push((view.exit_point(p, run[i - 1]), p));
            }
            current.push(p);
        } else if !current.is_empty() {
            let last = *current.last().expect("nonempty");
            crossings.push((view.exit_point(last, p), last));
            visible.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        visible.push(current);
    }
    (visible, crossings)
}

/// Draws the curve and its dual in data coordinates, y up.
pub fn render_svg(
    curve: &PiecewiseCurve,
    dual: Option<&DualizationResult>,
    opts: &SvgOptions,
) -> dualcurve::Result<String> {
    let mut original = curve.sample_points(ORIGINAL_SAMPLES)?;
    if curve.is_closed() {
        if let Some(&first) = original.first() {
            original.push(first);
        }
    }

    let mut own = Rect::empty();
    original.iter().for_each(|&p| own.add(p));
    let extent = [own.x0, own.x1, own.y0, own.y1]
        .iter()
        .fold(1.0f64, |m, v| m.max(v.abs()));
    let limit = VIEW_LIMIT * extent;

    let mut bounds = if opts.show_original { own } else { Rect::empty() };
    if let (Some(d), true) = (dual, opts.show_dual) {
        for p in d.points() {
            if p.x.abs() <= limit && p.y.abs() <= limit {
                bounds.add(p);
            }
        }
    }
    for (_, p) in &opts.labels {
        bounds.add(*p);
    }
    if bounds.is_empty() {
        bounds = Rect { x0: -1.0, y0: -1.0, x1: 1.0, y1: 1.0 };
    }
    let pad_x = MARGIN * bounds.width().max(1e-9);
    let pad_y = MARGIN * bounds.height().max(1e-9);
    let view = Rect {
        x0: bounds.x0 - pad_x,
        y0: bounds.y0 - pad_y,
        x1: bounds.x1 + pad_x,
        y1: bounds.y1 + pad_y,
    };
    let (w, h) = (view.width(), view.height());
    let size = w.max(h);
    let stroke = size * 0.004;
    let pixel_height = (PIXEL_WIDTH * h / w).round().max(1.0);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{PIXEL_WIDTH}" height="{pixel_height}" viewBox="{} {} {w} {h}">"#,
        view.x0, -view.y1
    );
    let _ = writeln!(s, "<title>{}</title>", escape(&opts.title));
    let _ = writeln!(s, r#"<g transform="scale(1,-1)">"#);
    let _ = writeln!(
        s,
        r##"<line class="axis" x1="{}" y1="0" x2="{}" y2="0" stroke="#999999" stroke-width="{}"/>"##,
        view.x0,
        view.x1,
        stroke / 2.0
    );
    let _ = writeln!(
        s,
        r##"<line class="axis" x1="0" y1="{}" x2="0" y2="{}" stroke="#999999" stroke-width="{}"/>"##,
        view.y0,
        view.y1,
        stroke / 2.0
    );

    if opts.show_original {
        let (visible, _) = clip_run(&original, &view);
        for run in visible {
            let _ = writeln!(
                s,
                r##"<polyline class="original" fill="none" stroke="#000000" stroke-width="{stroke}" points="{}"/>"##,
                fmt_points(&run)
            );
        }
    }

    if let (Some(d), true) = (dual, opts.show_dual) {
        let marker = size * 0.008;
        for (k, piece) in d.pieces.iter().enumerate() {
            if piece.points.len() == 1 {
                let p = piece.points[0];
                if view.contains(p) {
                    let _ = writeln!(
                        s,
                        r##"<circle class="dual-point" data-piece="{k}" cx="{}" cy="{}" r="{}" fill="#c0392b"/>"##,
                        p.x,
                        p.y,
                        marker * 1.5
                    );
                }
                continue;
            }
            for run in piece.runs() {
                let (visible, crossings) = clip_run(run, &view);
                for part in visible {
                    let _ = writeln!(
                        s,
                        r##"<polyline class="dual" data-piece="{k}" fill="none" stroke="#c0392b" stroke-width="{stroke}" stroke-dasharray="{} {}" points="{}"/>"##,
                        stroke * 4.0,
                        stroke * 2.0,
                        fmt_points(&part)
                    );
                }
                for (edge, near) in crossings {
                    let _ = writeln!(
                        s,
                        r##"<line class="clip" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#c0392b" stroke-width="{}"/>"##,
                        near.x,
                        near.y,
                        edge.x,
                        edge.y,
                        stroke / 2.0
                    );
                    let _ = writeln!(
                        s,
                        r##"<circle class="gap-marker" cx="{}" cy="{}" r="{marker}" fill="none" stroke="#c0392b" stroke-width="{}"/>"##,
                        edge.x,
                        edge.y,
                        stroke / 2.0
                    );
                }
            }
        }
    }
    let _ = writeln!(s, "</g>");

    let font = size * 0.04;
    for (label, p) in &opts.labels {
        let _ = writeln!(
            s,
            r##"<text class="label" x="{}" y="{}" font-size="{font}" font-family="sans-serif">{}</text>"##,
            p.x + font * 0.3,
            -p.y - font * 0.3,
            escape(label)
        );
    }
    let _ = writeln!(s, "</svg>");
    Ok(s)
}
