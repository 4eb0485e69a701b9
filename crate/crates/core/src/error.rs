use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NonHermitianInput { deviation: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("invalid direction {v:?}: {reason}")]
    InvalidDirection { v: [f64; 3], reason: &'static str },

    #[error("superluminal or non-finite beam velocity {beta:?}")]
    SuperluminalVelocity { beta: [f64; 3] },

    #[error("gamma {gamma} inconsistent with |beta| = {beta_mag}")]
    GammaInconsistent { gamma: f64, beta_mag: f64 },

    #[error("spin must be a positive half-integer, got 2j = {twice_j}")]
    InvalidSpin { twice_j: u32 },

    #[error("degenerate observable{}: |alpha| = {alpha_norm:e} for axis {axis:?}", setting.map(|s| format!(" at setting {s}")).unwrap_or_default())]
    DegenerateObservable {
        axis: [f64; 3],
        alpha_norm: f64,
        setting: Option<&'static str>,
    },

    #[error("oracle expectation has imaginary part {imag:e}")]
    ComplexExpectation { imag: f64 },

    #[error("grid `{axis}` is empty")]
    EmptyGrid { axis: &'static str },

    #[error("grid `{axis}` value {value} outside {range}")]
    GridOutOfRange {
        axis: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid optimizer option: {0}")]
    InvalidOption(&'static str),

    #[error("null Dirac context: p = 0 and m = 0")]
    NullContext,

    #[error("invalid Dirac context: {0}")]
    InvalidContext(&'static str),

    #[error("spectrum mismatch: max deviation {max_deviation:e}")]
    SpectrumMismatch { max_deviation: f64 },

    #[error("eigenstate residual {residual:e} exceeds tolerance")]
    EigenstateResidual { residual: f64 },

    #[error("precession identity violated by {residual:e}")]
    PrecessionMismatch { residual: f64 },

    #[error("identity `{check}` violated: full-space residual {full:e}, subspace residuals {plus:e}/{minus:e}")]
    IdentityMismatch {
        check: &'static str,
        full: f64,
        plus: f64,
        minus: f64,
    },

    #[error("helicity must be nonzero")]
    ZeroHelicity,

    #[error("helicity {0} is not a half-integer")]
    InvalidHelicity(f64),

    #[error("parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },

    #[error("superluminal sample at line {line}: |beta| = {beta_mag}")]
    SuperluminalSample { line: usize, beta_mag: f64 },

    #[error("distribution has no samples")]
    EmptyDistribution,

    #[error("alarm threshold {0} outside (0, 2*sqrt(2)]")]
    InvalidThreshold(f64),

    #[error("degenerate observable in sample {index}: {source}")]
    DegenerateSample {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Stable variant name, used on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonHermitianInput { .. } => "NonHermitianInput",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::SingularMatrix => "SingularMatrix",
            Error::InvalidDirection { .. } => "InvalidDirection",
            Error::SuperluminalVelocity { .. } => "SuperluminalVelocity",
            Error::GammaInconsistent { .. } => "GammaInconsistent",
            Error::InvalidSpin { .. } => "InvalidSpin",
            Error::DegenerateObservable { .. } => "DegenerateObservable",
            Error::ComplexExpectation { .. } => "ComplexExpectation",
            Error::EmptyGrid { .. } => "EmptyGrid",
            Error::GridOutOfRange { .. } => "GridOutOfRange",
            Error::InvalidOption(_) => "InvalidOption",
            Error::NullContext => "NullContext",
            Error::InvalidContext(_) => "InvalidContext",
            Error::SpectrumMismatch { .. } => "SpectrumMismatch",
            Error::EigenstateResidual { .. } => "EigenstateResidual",
            Error::PrecessionMismatch { .. } => "PrecessionMismatch",
            Error::IdentityMismatch { .. } => "IdentityMismatch",
            Error::ZeroHelicity => "ZeroHelicity",
            Error::InvalidHelicity(_) => "InvalidHelicity",
            Error::ParseError { .. } => "ParseError",
            Error::SuperluminalSample { .. } => "SuperluminalSample",
            Error::EmptyDistribution => "EmptyDistribution",
            Error::InvalidThreshold(_) => "InvalidThreshold",
            Error::DegenerateSample { .. } => "DegenerateObservable",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
