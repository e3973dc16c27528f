use std::fmt;

/// A malformed expression, positioned at a byte offset into the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("the origin has no dual line")]
    OriginNotDualizable,
    #[error("line passes through the origin")]
    LineThroughOrigin,
    #[error("lines are parallel")]
    ParallelLines,
    #[error("the origin cannot be inverted in the unit circle")]
    OriginNotInvertible,
    #[error("invalid line coefficients ({0}, {1}, {2})")]
    InvalidLine(f64, f64, f64),

    #[error("parse error {0}")]
    Parse(#[from] ParseError),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("not differentiable: {0}")]
    NonDifferentiable(String),
    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),

    #[error("curve has no pieces")]
    EmptyCurve,
    #[error("pieces {index} and {next} do not meet (gap {gap:e})")]
    DiscontinuousCurve { index: usize, next: usize, gap: f64 },
    #[error("invalid arc domain [{0}, {1}]")]
    InvalidDomain(f64, f64),
    #[error("arc `{expr}` has vanishing second derivative at x = {x}; declare linear portions as segments")]
    LinearPortion { expr: String, x: f64 },
    #[error("segment has coincident endpoints")]
    DegenerateSegment,
    #[error("direction {0} is not a supporting direction of this corner")]
    DirectionOutsideInterval(f64),
    #[error("scale factor must be positive, got {0}")]
    NonpositiveFactor(f64),
    #[error("unknown curve family `{0}`")]
    UnknownFamily(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("tangent line at a = {0} passes through the origin")]
    TangentThroughOrigin(f64),
    #[error("every sample of the arc has a tangent through the origin")]
    AllSamplesExcluded,
    #[error("supporting line with direction {0} passes through the origin")]
    SupportingLineThroughOrigin(f64),
    #[error("second derivative vanishes at a = {0}")]
    InflectionPoint(f64),
    #[error("y(a) = 0 at a = {0}")]
    ZeroOrdinate(f64),
    #[error("{source_desc}: {error}")]
    Piece {
        source_desc: String,
        error: Box<Error>,
    },
    #[error("samples of the two curves do not correspond")]
    SampleMismatch,

    #[error("slope {0} is outside the invertible range")]
    SlopeOutOfRange(f64),
    #[error("exponent must exceed 1, got {0}")]
    InvalidExponent(f64),
    #[error("slope must be negative, got {0}")]
    InvalidSlope(f64),
    #[error("tangent line has zero intercept")]
    ZeroIntercept,
    #[error("derivative is not invertible: {0}")]
    NonInvertibleDerivative(String),

    #[error("unknown example {0}")]
    UnknownExample(u32),
}

impl Error {
    /// Stable identifier for the error kind, used in CLI diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::OriginNotDualizable => "OriginNotDualizable",
            Error::LineThroughOrigin => "LineThroughOrigin",
            Error::ParallelLines => "ParallelLines",
            Error::OriginNotInvertible => "OriginNotInvertible",
            Error::InvalidLine(..) => "InvalidLine",
            Error::Parse(_) => "ParseError",
            Error::Domain(_) => "DomainError",
            Error::NonDifferentiable(_) => "NonDifferentiable",
            Error::UnboundParameter(_) => "UnboundParameter",
            Error::EmptyCurve => "EmptyCurve",
            Error::DiscontinuousCurve { .. } => "DiscontinuousCurve",
            Error::InvalidDomain(..) => "InvalidDomain",
            Error::LinearPortion { .. } => "LinearPortion",
            Error::DegenerateSegment => "DegenerateSegment",
            Error::DirectionOutsideInterval(_) => "DirectionOutsideInterval",
            Error::NonpositiveFactor(_) => "NonpositiveFactor",
            Error::UnknownFamily(_) => "UnknownFamily",
            Error::InvalidParam(_) => "InvalidParam",
            Error::TangentThroughOrigin(_) => "TangentThroughOrigin",
            Error::AllSamplesExcluded => "AllSamplesExcluded",
            Error::SupportingLineThroughOrigin(_) => "SupportingLineThroughOrigin",
            Error::InflectionPoint(_) => "InflectionPoint",
            Error::ZeroOrdinate(_) => "ZeroOrdinate",
            Error::Piece { error, .. } => error.code(),
            Error::SampleMismatch => "SampleMismatch",
            Error::SlopeOutOfRange(_) => "SlopeOutOfRange",
            Error::InvalidExponent(_) => "InvalidExponent",
            Error::InvalidSlope(_) => "InvalidSlope",
            Error::ZeroIntercept => "ZeroIntercept",
            Error::NonInvertibleDerivative(_) => "NonInvertibleDerivative",
            Error::UnknownExample(_) => "UnknownExample",
        }
    }

    pub(crate) fn in_piece(self, source_desc: impl Into<String>) -> Error {
        Error::Piece {
            source_desc: source_desc.into(),
            error: Box::new(self),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
