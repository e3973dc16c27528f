//! The six figures of the worked examples.

use dualcurve::corpus::{make_example, GoldenExample};
use dualcurve::dualizer::{dualize_curve, DualizationResult, SamplingPlan};
use dualcurve::Error;

use crate::render::{render_svg, SvgOptions};

pub const FIGURE_COUNT: u32 = 6;

#[derive(Debug, Clone)]
pub struct Figure {
    pub n: u32,
    pub example: GoldenExample,
    pub dual: DualizationResult,
    pub svg: String,
}

struct Layout {
    example: u32,
    p: Option<f64>,
    title: &'static str,
    original: bool,
    dual: bool,
    labels: bool,
}

fn layout(n: u32) -> Option<Layout> {
    let l = |example, p, title, original, dual, labels| Layout {
        example,
        p,
        title,
        original,
        dual,
        labels,
    };
    Some(match n {
        1 => l(1, None, "Example 1: parabola pair with corners and its dual", true, true, false),
        2 => l(2, Some(1.0), "Example 2: y = x^2/4 and its dual y = -x^2", true, true, false),
        3 => l(3, Some(4.0), "Example 3: exponents 4 and 4/3", true, true, false),
        4 => l(4, None, "Example 4: taxicab circle and its dual square", true, true, false),
        5 => l(5, None, "Example 5: original curve", true, false, false),
        6 => l(5, None, "Example 5: dual curve, path ABCDBE", false, true, true),
        _ => return None,
    })
}

/// Builds figure `n`, or `None` when `n` is not 1 through 6.
pub fn figure(n: u32, plan: SamplingPlan) -> Option<Result<Figure, Error>> {
    let layout = layout(n)?;
    Some((|| {
        let example = make_example(layout.example, layout.p)?;
        let dual = dualize_curve(&example.original, plan)?;
        let opts = SvgOptions {
            title: layout.title.to_string(),
            show_original: layout.original,
            show_dual: layout.dual,
            labels: if layout.labels {
                example.named_points.clone()
            } else {
                Vec::new()
            },
        };
        let svg = render_svg(&example.original, Some(&dual), &opts)?;
        Ok(Figure {
            n,
            example,
            dual,
            svg,
        })
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn only_six_figures() {
        assert!(figure(0, SamplingPlan::default()).is_none());
        assert!(figure(7, SamplingPlan::default()).is_none());
        for n in 1..=FIGURE_COUNT {
            assert!(figure(n, SamplingPlan::default()).unwrap().is_ok());
        }
    }

    #[test]
    fn figure5_has_no_dual_and_figure6_no_original() {
        let f5 = figure(5, SamplingPlan::default()).unwrap().unwrap().svg;
        assert!(f5.contains(r#"class="original""#) && !f5.contains(r#"class="dual""#));
        let f6 = figure(6, SamplingPlan::default()).unwrap().unwrap().svg;
        assert!(!f6.contains(r#"class="original""#) && f6.contains(r#"class="dual""#));
        assert!(f6.contains(">B</text>"));
    }
}
