//! Command-line front end for `dualcurve`.
//!
//! Exit codes: 0 success, 1 input error, 2 computation error, 3 a
//! verification check failed.

pub mod figures;
pub mod legendre_table;
pub mod render;
pub mod spec;
pub mod verify;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dualcurve::corpus::{make_example, GoldenExample};
use dualcurve::curves::{Piece, PiecewiseCurve, SmoothArc};
use dualcurve::dualizer::{dualize_curve, SamplingPlan};
use dualcurve::expr::Params;
use dualcurve::legendre::InvertibleArc;
use dualcurve::Error;

use crate::render::{render_svg, to_csv, to_structured, SvgOptions};
use crate::spec::{parse_curve_spec, SpecError};
use crate::verify::{run_checks, RunReport};

#[derive(Debug, Parser)]
#[command(name = "dualcurve", version, about = "Dual curves under the point-line duality")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dualize a curve-spec file or a built-in example.
    Dualize(DualizeArgs),
    /// Run invariant checks, and golden checks for built-in examples.
    Verify(VerifyArgs),
    /// Draw one of the six example figures as SVG.
    Figure(FigureArgs),
    /// Tabulate the slope/intercept transform of an arc.
    Legendre(LegendreArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
    Structured,
}

#[derive(Debug, Clone, Args)]
pub struct Target {
    /// Curve-spec file.
    #[arg(long, conflicts_with = "example")]
    pub input: Option<PathBuf>,
    /// Built-in example, 1 through 5.
    #[arg(long)]
    pub example: Option<u32>,
    /// Parameter of examples 2 and 3.
    #[arg(long)]
    pub p: Option<f64>,
    /// Samples per arc; overrides the spec file.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Disable the refinement pass.
    #[arg(long)]
    pub no_refine: bool,
}

#[derive(Debug, Args)]
pub struct DualizeArgs {
    #[command(flatten)]
    pub target: Target,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub target: Target,
    /// Tolerance for the generic invariant checks.
    #[arg(long)]
    pub tol: Option<f64>,
    /// `structured` prints the report as JSON; otherwise plain text.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// Figure number, 1 through 6.
    pub n: u32,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LegendreArgs {
    /// Curve-spec file whose first piece is an expression arc.
    #[arg(long, conflicts_with = "family")]
    pub input: Option<PathBuf>,
    /// `pnorm_circle`, `unit_circle` or `parabola_std`.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub m_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub m_max: Option<f64>,
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    /// Add the p-norm closed form and its difference from the direct value.
    #[arg(long)]
    pub closed_form: bool,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Compute(Error),
    /// Checks ran and at least one failed; the report was already written.
    Verification,
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Compute(_) => 2,
            Failure::Verification => 3,
        }
    }

    pub fn message(&self) -> Option<String> {
        match self {
            Failure::Input(m) => Some(format!("error: {m}")),
            Failure::Compute(e) => Some(format!("error[{}]: {e}", e.code())),
            Failure::Verification => None,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Compute(e)
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Input(format!("stdout: {e}"))),
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn spec_failure(path: &Path, e: SpecError) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

/// A resolved dualization target.
struct Loaded {
    label: String,
    curve: PiecewiseCurve,
    plan: SamplingPlan,
    golden: Option<GoldenExample>,
}

enum LoadError {
    Failure(Failure),
    /// The spec text was fine but its pieces do not make a valid curve.
    InvalidCurve { label: String, path: String, error: Error },
}

impl From<Failure> for LoadError {
    fn from(f: Failure) -> LoadError {
        LoadError::Failure(f)
    }
}

fn load(target: &Target) -> Result<Loaded, LoadError> {
    let mut loaded = match (&target.input, target.example) {
        (Some(path), None) => {
            let label = path.display().to_string();
            match parse_curve_spec(&read_input(path)?) {
                Ok(spec) => Loaded {
                    label,
                    curve: spec.curve,
                    plan: spec.plan,
                    golden: None,
                },
                Err(SpecError::Curve { path, error }) => {
                    return Err(LoadError::InvalidCurve { label, path, error })
                }
                Err(e) => return Err(spec_failure(Path::new(&label), e).into()),
            }
        }
        (None, Some(id)) => {
            let ex = make_example(id, target.p).map_err(|e| match e {
                Error::UnknownExample(_) => Failure::Input(format!("unknown example {id}; expected 1 through 5")),
                other => Failure::Input(format!("example {id}: {other}")),
            })?;
            Loaded {
                label: format!("example {id}"),
                curve: ex.original.clone(),
                plan: SamplingPlan::default(),
                golden: Some(ex),
            }
        }
        _ => return Err(Failure::Input("give exactly one of --input or --example".into()).into()),
    };
    if let Some(n) = target.samples {
        if n < 2 {
            return Err(Failure::Input("--samples must be at least 2".into()).into());
        }
        loaded.plan.samples = n;
    }
    if target.no_refine {
        loaded.plan.refine = false;
    }
    Ok(loaded)
}

fn cmd_dualize(args: &DualizeArgs) -> Result<(), Failure> {
    let loaded = match load(&args.target) {
        Ok(l) => l,
        Err(LoadError::Failure(f)) => return Err(f),
        Err(LoadError::InvalidCurve { label, path, error }) => {
            return Err(Failure::Input(format!("{label}: {path}: error[{}] {error}", error.code())))
        }
    };
    let result = dualize_curve(&loaded.curve, loaded.plan)?;
    let text = match args.format {
        Format::Csv => to_csv(&result),
        Format::Structured => to_structured(&result),
        Format::Svg => render_svg(
            &loaded.curve,
            Some(&result),
            &SvgOptions {
                title: format!("{} and its dual", loaded.label),
                show_original: true,
                show_dual: true,
                labels: Vec::new(),
            },
        )?,
    };
    write_output(args.output.as_deref(), &text)
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let structured = match args.format {
        None => false,
        Some(Format::Structured) => true,
        Some(other) => {
            return Err(Failure::Input(format!(
                "verify writes text or structured reports, not {other:?}"
            )))
        }
    };
    let report = match load(&args.target) {
        Ok(l) => run_checks(&l.label, &l.curve, l.plan, l.golden.as_ref(), args.tol)?,
        Err(LoadError::Failure(f)) => return Err(f),
        Err(LoadError::InvalidCurve { label, path, error }) => {
            RunReport::invalid_curve(label, &path, &error)
        }
    };
    let text = if structured {
        to_structured(&report)
    } else {
        report.to_text()
    };
    write_output(args.output.as_deref(), &text)?;
    if report.passed {
        Ok(())
    } else {
        for c in report.checks.iter().filter(|c| !c.passed()) {
            match &c.note {
                Some(n) => eprintln!("check failed: {}: {n}", c.name),
                None => eprintln!("check failed: {}", c.name),
            }
        }
        Err(Failure::Verification)
    }
}

fn cmd_figure(args: &FigureArgs) -> Result<(), Failure> {
    let mut plan = SamplingPlan::default();
    if let Some(n) = args.samples {
        plan.samples = n.max(2);
    }
    let fig = figures::figure(args.n, plan).ok_or_else(|| {
        Failure::Input(format!("no figure {}; expected 1 through {}", args.n, figures::FIGURE_COUNT))
    })??;
    write_output(args.output.as_deref(), &fig.svg)
}

const DEFAULT_PNORM_SLOPES: (f64, f64) = (-3.0, -0.1);

fn cmd_legendre(args: &LegendreArgs) -> Result<(), Failure> {
    let explicit = match (args.m_min, args.m_max) {
        (Some(lo), Some(hi)) => Some((lo, hi)),
        (None, None) => None,
        _ => return Err(Failure::Input("give both --m-min and --m-max".into())),
    };
    if args.format == Format::Svg {
        return Err(Failure::Input("legendre writes csv or structured output".into()));
    }
    let (ia, closed_p) = match (&args.input, args.family.as_deref()) {
        (Some(path), None) => {
            if args.closed_form {
                return Err(Failure::Input("--closed-form needs a p-norm --family".into()));
            }
            let spec = parse_curve_spec(&read_input(path)?).map_err(|e| spec_failure(path, e))?;
            let Some(Piece::Arc(arc)) = spec.curve.pieces().first() else {
                return Err(Failure::Input(format!("{}: first piece must be an expression arc", path.display())));
            };
            (InvertibleArc::bisection(arc.clone(), explicit)?, None)
        }
        (None, Some("pnorm_circle" | "unit_circle")) => {
            let p = if args.family.as_deref() == Some("unit_circle") {
                2.0
            } else {
                args.p.unwrap_or(2.0)
            };
            let ia = InvertibleArc::pnorm(p, explicit.unwrap_or(DEFAULT_PNORM_SLOPES))?;
            (ia, args.closed_form.then_some(p))
        }
        (None, Some("parabola_std")) => {
            if args.closed_form {
                return Err(Failure::Input("--closed-form needs a p-norm --family".into()));
            }
            let p = args.p.unwrap_or(1.0);
            if !(p > 0.0) {
                return Err(Failure::Input(format!("--p must be positive, got {p}")));
            }
            let arc = SmoothArc::parse("x^2/(4*p)", -4.0, 4.0, Params::from([("p".to_string(), p)]))?;
            let range = explicit.unwrap_or((-2.0 / p, 2.0 / p));
            (InvertibleArc::analytic(arc, move |m| 2.0 * p * m, range)?, None)
        }
        (None, Some(other)) => {
            return Err(Failure::Input(format!(
                "unknown family `{other}` for legendre; expected pnorm_circle, unit_circle or parabola_std"
            )))
        }
        _ => return Err(Failure::Input("give exactly one of --input or --family".into())),
    };
    let range = ia.slope_range();
    let rows = legendre_table::legendre_table(&ia, range, args.samples, closed_p)?;
    let text = match args.format {
        Format::Structured => to_structured(&rows),
        _ => legendre_table::table_csv(&rows),
    };
    write_output(args.output.as_deref(), &text)
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Dualize(a) => cmd_dualize(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Figure(a) => cmd_figure(a),
        Command::Legendre(a) => cmd_legendre(a),
    }
}
