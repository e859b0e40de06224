use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("vector, functional and space do not match: {0}")]
    Shape(String),
    #[error("invalid norm profile: {0}")]
    InvalidProfile(String),

    #[error("norm is not A-octahedral (it has property alpha)")]
    NotAoh,
    #[error("no sphere point is both diametral and norming: {0}")]
    Infeasible(String),

    #[error("space has no Daugavet witness oracle: {0}")]
    NoOracle(String),
    #[error("mesh too coarse for the requested tolerance: {0}")]
    InfeasibleMesh(String),
    #[error("slice is empty")]
    EmptySlice,
    #[error("no non-Delta certificate found: the point behaves diametrally")]
    NotFound,
    #[error("brute-force oracle unavailable: {0}")]
    NoBruteOracle(String),

    #[error("component oracle missing: {0}")]
    MissingOracle(String),
    #[error("witness failed its final recheck: {0}")]
    VerificationFailed(String),
    #[error("requested component is zero")]
    ZeroComponent,
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("slice width must be smaller than the gap (alpha = {alpha}, eps = {eps})")]
    WidthTooLarge { alpha: String, eps: String },
    #[error("certificates do not share common parameters: {0}")]
    ParameterMismatch(String),
    #[error("b = 1 corner is excluded; use the l_inf Delta-point operations")]
    BEqualsOne,
    #[error("slice does not contain the point")]
    SliceDoesNotContainPoint,
    #[error("1/p + 1/q != 1 (p = {p}, q = {q})")]
    ConjugateMismatch { p: String, q: String },

    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable short name used in reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "Domain",
            Error::Parse(_) => "Parse",
            Error::Shape(_) => "Shape",
            Error::InvalidProfile(_) => "InvalidProfile",
            Error::NotAoh => "NotAOH",
            Error::Infeasible(_) => "Infeasible",
            Error::NoOracle(_) => "NoOracle",
            Error::InfeasibleMesh(_) => "InfeasibleMesh",
            Error::EmptySlice => "EmptySlice",
            Error::NotFound => "NotFound",
            Error::NoBruteOracle(_) => "NoBruteOracle",
            Error::MissingOracle(_) => "MissingOracle",
            Error::VerificationFailed(_) => "VerificationFailed",
            Error::ZeroComponent => "ZeroComponent",
            Error::NotApplicable(_) => "NotApplicable",
            Error::WidthTooLarge { .. } => "WidthTooLarge",
            Error::ParameterMismatch(_) => "ParameterMismatch",
            Error::BEqualsOne => "BEqualsOne",
            Error::SliceDoesNotContainPoint => "SliceDoesNotContainPoint",
            Error::ConjugateMismatch { .. } => "ConjugateMismatch",
            Error::Config(_) => "Config",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
