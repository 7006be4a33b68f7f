use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The propagator would grow past what f64 can represent.
    #[error("numeric overflow: growth exponent max|Im λ|·τ = {exponent:.3} exceeds {limit}")]
    NumericOverflow { exponent: f64, limit: f64 },

    #[error("eigen-decomposition path unavailable: condition estimate {condition:.3e}")]
    IllConditioned { condition: f64 },

    /// The two-photon coincidence has vanishing probability for these parameters.
    #[error("zero coincidence probability (weight {weight:.3e})")]
    ZeroCoincidence { weight: f64 },

    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("truncation: {0}")]
    Truncation(String),

    #[error("config parse error at line {line}, column {column}: {message}")]
    ConfigParse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("config validation: field `{field}` {reason}")]
    ConfigValidation { field: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short stable tag used in the CSV `status` column.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::NumericOverflow { .. } => "overflow",
            Error::IllConditioned { .. } => "ill_conditioned",
            Error::ZeroCoincidence { .. } => "zero_coincidence",
            Error::NotNormalized { .. } => "not_normalized",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::Truncation(_) => "truncation",
            Error::ConfigParse { .. } => "config_parse",
            Error::ConfigValidation { .. } => "config_validation",
            Error::Io(_) => "io",
        }
    }
}
